import logging
from pathlib import Path
from typing import Any, List, Union

import yaml
from pydantic import ValidationError

from ..core.errors import ConfigError, ConfigIssue
from ..models.run_config import RunConfig

logger = logging.getLogger(__name__)

# tags pydantic adds to locations of discriminated unions and validators
_LOC_NOISE = {"function-after", "function-before", "function-wrap"}


def _dotted(loc) -> str:
    parts = [str(part) for part in loc if str(part) not in _LOC_NOISE]
    return ".".join(parts) if parts else "<root>"


def _issues(exc: ValidationError) -> List[ConfigIssue]:
    issues = []
    for error in exc.errors():
        reason = error["msg"]
        if reason.startswith("Value error, "):
            reason = reason[len("Value error, "):]
        if error["type"] == "extra_forbidden":
            reason = f"unknown key {str(error['loc'][-1])!r}"
        issues.append(ConfigIssue(path=_dotted(error["loc"]), reason=reason))
    return issues


def parse_config(text: str) -> RunConfig:
    """Parse a YAML experiment document into a validated RunConfig."""
    try:
        document: Any = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else "unknown location"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError([ConfigIssue(path="<document>", reason=f"syntax error at {where}: {problem}")])

    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError(
            [ConfigIssue(path="<document>", reason=f"expected a mapping, got {type(document).__name__}")]
        )
    try:
        config = RunConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(_issues(exc))
    logger.debug("parsed config: %s", config.model_dump(mode="json"))
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([ConfigIssue(path="<document>", reason=f"cannot read {path}: {exc.strerror}")])
    return parse_config(text)
