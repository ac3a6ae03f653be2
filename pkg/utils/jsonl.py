# utils/jsonl.py

import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Tuple

from utils.errors import DatasetError


def read_jsonl(path: str | Path) -> Iterator[Tuple[int, dict]]:
    """Yield (line_number, object) for every non-blank line. Line numbers start at 1."""
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"invalid JSON ({e.msg})", line=line_no)
            if not isinstance(obj, dict):
                raise DatasetError("expected a JSON object", line=line_no)
            yield line_no, obj


def write_jsonl(path: str | Path, rows: Iterable[Any]) -> int:
    count = 0
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
            count += 1
    return count
