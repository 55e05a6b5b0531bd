from datetime import datetime
import hashlib
import json
import logging
import math
import os
import pytz
import numpy as np
from typing import Any, Optional, Union

from macauthpy.constants import LOG_LEVEL_ENV

utc_tz: pytz.BaseTzInfo = pytz.utc

SeedLike = Union[int, np.random.Generator]


def now(tz: pytz.BaseTzInfo = utc_tz) -> datetime:
    """Datetime now, default to UTC."""  # noqa: DAR201
    if tz is None:
        return datetime.now()
    return datetime.now(tz)


def to_iso8601_str(dt: datetime) -> str:
    dt = dt.astimezone(utc_tz)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


def _encode_non_finite(payload: Any) -> Any:
    """inf/nan become the strings "Infinity", "-Infinity" and "NaN"."""
    if isinstance(payload, float) and not math.isfinite(payload):
        if math.isnan(payload):
            return "NaN"
        return "Infinity" if payload > 0 else "-Infinity"
    if isinstance(payload, dict):
        return {key: _encode_non_finite(value) for key, value in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [_encode_non_finite(value) for value in payload]
    return payload


def canonical_json(payload: Any, indent: Optional[int] = None) -> str:
    """Sorted-key strict JSON; floats use the shortest round-trip repr."""
    separators = (",", ":") if indent is None else (",", ": ")
    return json.dumps(
        _encode_non_finite(payload),
        sort_keys=True,
        indent=indent,
        separators=separators,
        allow_nan=False,
    )


def stable_hash(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_rng(seed: int, *counter: int) -> np.random.Generator:
    """Independent stream keyed by (seed, counter...)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=tuple(counter))
    )


def configure_logging(level: Optional[str] = None) -> None:
    level_name = (level or os.environ.get(LOG_LEVEL_ENV, "WARNING")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
