import csv
import io
import json
import logging
import math
from typing import Any, Iterable, Sequence

import sentry_sdk
from pydantic import BaseModel

from lrpossib import config

logger = logging.getLogger(__name__)

LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

FLOAT_FORMAT = ".17g"


def setup_logging(log_level: str = config.LOG_LEVEL) -> None:
    try:
        level = LOG_LEVELS[str(log_level).lower()]
    except KeyError:
        raise ValueError(f"Unknown log level {log_level!r}; expected one of {list(LOG_LEVELS)}.")
    logging.basicConfig(format="%(message)s", level=level)


def init_sentry() -> bool:
    if not config.SENTRY_DSN:
        return False
    sentry_sdk.init(config.SENTRY_DSN)
    logger.debug("Sentry error reporting enabled.")
    return True


def format_float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    text = format(value, FLOAT_FORMAT)
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def _encode(value: Any, indent: int, level: int) -> str:
    """``json.dumps`` has no hook for float text, so ``FLOAT_FORMAT`` and ``null`` need this."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_encode(v, indent, level) for v in value) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"Cannot encode {type(value).__name__} as JSON.")


def to_json(report: Any, indent: int = 2) -> str:
    """Serialize with fixed field order and floats written with 17 significant digits."""
    if isinstance(report, BaseModel):
        report = report.model_dump(mode="python")
    elif isinstance(report, list):
        report = [r.model_dump(mode="python") if isinstance(r, BaseModel) else r for r in report]
    return _encode(report, indent, 0) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, float) else v for v in row]
        )
    return buffer.getvalue()
