# utils/errors.py

from enum import Enum


class ParseErrorKind(str, Enum):
    MALFORMED_JSON = "malformed_json"
    SCHEMA_VIOLATION = "schema_violation"
    NO_JSON_FOUND = "no_json_found"


class FlowParseError(ValueError):
    """A flow document that could not be turned into a valid Flow."""

    def __init__(self, kind: ParseErrorKind, reason: str, path: str | None = None):
        self.kind = ParseErrorKind(kind)
        self.reason = reason
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"{self.kind.value}{where}: {reason}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "reason": self.reason, "path": self.path}


class SizeExceededError(ValueError):
    pass


class ExhaustedRetriesError(ValueError):
    pass


class DatasetError(ValueError):
    def __init__(self, message: str, line: int | None = None, sample_id: str | None = None):
        self.line = line
        self.sample_id = sample_id
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if sample_id is not None:
            prefix.append(f"sample {sample_id!r}")
        super().__init__(f"{', '.join(prefix)}: {message}" if prefix else message)


class UnknownSampleIdError(ValueError):
    pass


class ConfigError(ValueError):
    pass
