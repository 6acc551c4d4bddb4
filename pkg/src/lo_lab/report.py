"""JSON/CSV codec for result dataclasses.

Fractions travel as "numerator/denominator" strings, step sets as integer
lists, and non-finite floats as the strings "inf", "-inf", "nan" so the JSON
stays strict.  ``decode`` walks the dataclass type hints to rebuild the
original object.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import types
import typing
from fractions import Fraction

from .dist import StepSet, SumDistribution

SCHEMA_VERSION = 1

_FLOAT_TOKENS = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _float(x: float):
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def encode(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, StepSet):
        return list(obj.steps)
    if isinstance(obj, SumDistribution):
        return {
            "backend": obj.backend,
            "offset": obj.offset,
            "weights": [encode(w) for w in obj.weights],
        }
    if dataclasses.is_dataclass(obj):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if hasattr(obj, "item"):
        return encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _parse_fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def decode(tp, data):
    """Rebuild an instance of ``tp`` from ``encode`` output."""
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if tp is typing.Any:
        return data
    if origin in (typing.Union, types.UnionType):
        if data is None and type(None) in args:
            return None
        if Fraction in args and isinstance(data, str) and data not in _FLOAT_TOKENS:
            return _parse_fraction(data)
        if Fraction in args and float in args:
            return decode(float, data)
        for arg in args:
            if arg is type(None):
                continue
            try:
                return decode(arg, data)
            except (TypeError, ValueError):
                continue
        raise ValueError(f"cannot decode {data!r} as {tp}")
    if tp is Fraction:
        return _parse_fraction(data)
    if tp is float:
        if isinstance(data, str):
            if data not in _FLOAT_TOKENS:
                raise ValueError(f"not a float token: {data!r}")
            return _FLOAT_TOKENS[data]
        return float(data)
    if tp is bool:
        if not isinstance(data, bool):
            raise TypeError("expected bool")
        return data
    if tp is int:
        if isinstance(data, bool) or not isinstance(data, int):
            raise TypeError("expected int")
        return data
    if tp is str:
        return str(data)
    if tp is StepSet:
        return StepSet(tuple(data))
    if tp is SumDistribution:
        return _decode_distribution(data)
    if origin is tuple:
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(decode(args[0], x) for x in data)
        return tuple(decode(a, x) for a, x in zip(args, data))
    if origin is list:
        return [decode(args[0], x) for x in data]
    if dataclasses.is_dataclass(tp):
        hints = typing.get_type_hints(tp)
        kwargs = {}
        for f in dataclasses.fields(tp):
            if not f.init or f.name.startswith("_"):
                continue
            if f.name in data:
                kwargs[f.name] = decode(hints[f.name], data[f.name])
        return tp(**kwargs)
    raise TypeError(f"unsupported type {tp}")


def _decode_distribution(data) -> SumDistribution:
    import numpy as np

    weights = data["weights"]
    if data["backend"] == "exact":
        fracs = [Fraction(w) for w in weights]
        denom = max((f.denominator for f in fracs), default=1)
        # Counts are over 2**n; recover the common power-of-two denominator.
        counts = [f.numerator * (denom // f.denominator) for f in fracs]
        dtype = np.int64 if denom < 1 << 62 else object
        return SumDistribution(
            offset=data["offset"], values=np.asarray(counts, dtype=dtype), backend="exact", denominator=denom
        )
    return SumDistribution(offset=data["offset"], values=np.asarray(weights, dtype=float), backend="float")


def envelope(command: str, params: dict, seed: int, result, timing_ms=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "params": encode(params),
        "seed": seed,
        "result": encode(result),
        "timing_ms": timing_ms,
    }


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([encode(x) for x in row])
    return buf.getvalue()


def flat_scalars(result) -> tuple[list[str], list[list]]:
    """One-row table of the top-level scalar fields of a result dataclass."""
    data = encode(result)
    header = [k for k, v in data.items() if not isinstance(v, (list, dict))]
    return header, [[data[k] for k in header]]
