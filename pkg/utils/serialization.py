"""
JSON codec for frames, operators and reports.

Complex arrays travel as nested lists of [re, im] pairs (row-major).
orjson writes every float with its shortest round-trip representation,
so a double read back from our JSON is bit-identical to the one written.
"""

import math
from pathlib import Path
from typing import Any, List, Union

import numpy as np
import orjson

from frame_core.errors import InvalidInputError

_DUMP_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def complex_to_pairs(arr) -> List:
    arr = np.asarray(arr, dtype=np.complex128)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def complex_from_pairs(data, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("expected nested [re, im] pairs", {"reason": str(exc)}) from exc
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise InvalidInputError(f"expected a {ndim}-D array of [re, im] pairs", {"shape": list(arr.shape)})
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("non-finite number in complex array")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_payload(M) -> List:
    return complex_to_pairs(M)


def matrix_from_payload(data) -> np.ndarray:
    M = complex_from_pairs(data, ndim=2)
    if M.shape[0] != M.shape[1]:
        raise InvalidInputError("operator must be square", {"shape": list(M.shape)})
    return M


def parse_real_list(text: str, name: str = "value") -> List[float]:
    """'4,1,1,1' → [4.0, 1.0, 1.0, 1.0]"""
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"{name} must be a comma-separated list of numbers", {name: text}) from exc
    if not values or not all(math.isfinite(v) for v in values):
        raise InvalidInputError(f"{name} must be a non-empty list of finite numbers", {name: text})
    return values


def _check_finite(obj: Any) -> None:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise InvalidInputError("refusing to serialize a non-finite float")
    elif isinstance(obj, dict):
        for value in obj.values():
            _check_finite(value)
    elif isinstance(obj, (list, tuple)):
        for value in obj:
            _check_finite(value)
    elif isinstance(obj, np.ndarray) and obj.dtype.kind == "f" and not np.all(np.isfinite(obj)):
        raise InvalidInputError("refusing to serialize a non-finite float")


def dumps(obj: Any) -> bytes:
    _check_finite(obj)
    return orjson.dumps(obj, option=_DUMP_OPTIONS)


def loads(raw: Union[bytes, str]) -> Any:
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise InvalidInputError("malformed JSON", {"reason": str(exc)}) from exc


def read_json(path: Union[str, Path]) -> Any:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InvalidInputError("cannot read input file", {"path": str(path), "reason": exc.strerror}) from exc
    return loads(raw)


def write_json(path: Union[str, Path], obj: Any) -> None:
    Path(path).write_bytes(dumps(obj) + b"\n")
