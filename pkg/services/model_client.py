# services/model_client.py

import base64
import json
import logging
import mimetypes
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

import httpx
from pydantic import BaseModel, Field, ValidationError, model_validator

from config.constants import (
    DEFAULT_ENDPOINT_PATH,
    DEFAULT_MAX_IN_FLIGHT,
    DEFAULT_MAX_RETRIES,
    DEFAULT_PROMPT_PATH,
    DEFAULT_TIMEOUT_S,
    IMAGE_SLOT,
)
from services.harness_service import Prediction, Sample
from utils.errors import ConfigError

logger = logging.getLogger(__name__)


# =============================================================================
# CONFIG
# =============================================================================

class ModelEndpointConfig(BaseModel):
    base_url: str
    path: str = DEFAULT_ENDPOINT_PATH
    model: str = ""
    auth_token_env: str = "FLOW_MODEL_TOKEN"
    prompt_template: Optional[str] = None
    prompt_path: Optional[str] = None
    timeout_s: float = Field(default=DEFAULT_TIMEOUT_S, gt=0)
    max_retries: int = Field(default=DEFAULT_MAX_RETRIES, ge=0)
    max_in_flight: int = Field(default=DEFAULT_MAX_IN_FLIGHT, ge=1)

    @model_validator(mode="after")
    def _one_prompt_source(self) -> "ModelEndpointConfig":
        if self.prompt_template is not None and self.prompt_path is not None:
            raise ValueError("give prompt_template or prompt_path, not both")
        return self

    @classmethod
    def from_file(cls, path: str | Path) -> "ModelEndpointConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.model_validate(json.load(fh))
        except OSError as e:
            raise ConfigError(f"cannot read endpoint config {path}: {e.strerror or e}") from e
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"invalid endpoint config {path}: {e}") from e

    def load_prompt(self) -> str:
        if self.prompt_template is not None:
            template = self.prompt_template
        else:
            prompt_path = self.prompt_path or DEFAULT_PROMPT_PATH
            try:
                template = Path(prompt_path).read_text(encoding="utf-8")
            except OSError as e:
                raise ConfigError(f"cannot read prompt {prompt_path}: {e.strerror or e}") from e
        if IMAGE_SLOT not in template:
            raise ConfigError(f"prompt template has no {IMAGE_SLOT} slot")
        return template

    def token(self) -> str:
        value = os.environ.get(self.auth_token_env)
        if not value:
            raise ConfigError(f"environment variable {self.auth_token_env} is not set")
        return value


# =============================================================================
# REQUESTS
# =============================================================================

def _image_part(image_path: str) -> dict:
    mime = mimetypes.guess_type(image_path)[0] or "image/png"
    data = base64.b64encode(Path(image_path).read_bytes()).decode("ascii")
    return {"type": "image_url", "image_url": {"url": f"data:{mime};base64,{data}"}}


def build_messages(template: str, image_path: str) -> List[dict]:
    """One user message; text around the image slot becomes text parts."""
    before, _, after = template.partition(IMAGE_SLOT)
    content = []
    if before.strip():
        content.append({"type": "text", "text": before.strip()})
    content.append(_image_part(image_path))
    if after.strip():
        content.append({"type": "text", "text": after.strip()})
    return [{"role": "user", "content": content}]


def _reply_text(body: dict) -> str:
    try:
        content = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise ValueError("response has no choices[0].message.content") from None
    if isinstance(content, list):
        content = "".join(part.get("text", "") for part in content if isinstance(part, dict))
    return content or ""


class ModelClient:
    def __init__(self, config: ModelEndpointConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self.prompt = config.load_prompt()
        self.client = httpx.Client(
            base_url=config.base_url,
            headers={"Authorization": f"Bearer {config.token()}"},
            timeout=config.timeout_s,
            transport=transport,
        )

    def close(self) -> None:
        self.client.close()

    def predict(self, sample: Sample) -> Prediction:
        if not sample.image_path:
            return Prediction.failed(sample.id, "sample has no image_path")
        try:
            payload = {"messages": build_messages(self.prompt, sample.image_path)}
        except OSError as e:
            return Prediction.failed(sample.id, f"cannot read image: {e.strerror or e}")
        if self.config.model:
            payload["model"] = self.config.model

        last_error = "no attempt made"
        for attempt in range(self.config.max_retries + 1):
            try:
                resp = self.client.post(self.config.path, json=payload)
                resp.raise_for_status()
                raw = _reply_text(resp.json())
            except (httpx.HTTPError, ValueError) as e:
                last_error = f"{type(e).__name__}: {e}"
                if attempt < self.config.max_retries:
                    logger.warning("request for %s failed (%s); retrying", sample.id, last_error)
                continue
            logger.debug("received %d chars for %s", len(raw), sample.id)
            return Prediction.from_raw(sample.id, raw)

        logger.warning("giving up on %s after %d attempts", sample.id, self.config.max_retries + 1)
        return Prediction.failed(sample.id, f"request failed: {last_error}")


def fetch_predictions(
    samples: List[Sample],
    config: ModelEndpointConfig,
    transport: Optional[httpx.BaseTransport] = None,
) -> List[Prediction]:
    """
    One request per sample, at most `config.max_in_flight` at a time.
    Results come back in sample order; failures become failed predictions.
    """
    config.token()
    if not samples:
        return []
    client = ModelClient(config, transport=transport)
    try:
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            predictions = list(pool.map(client.predict, samples))
    finally:
        client.close()

    failed = sum(1 for p in predictions if p.flow is None)
    logger.info("fetched %d predictions (%d without a flow)", len(predictions), failed)
    return predictions
