import dataclasses
import datetime
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
import sympy
from pydantic import BaseModel


def to_serializable_dict(obj: Any) -> Any:
    """
    Recursively convert an object into a JSON serializable structure.

    Rationals become [numerator, denominator] pairs so exact data survives
    the round trip through JSON.

    Args:
        obj: Any Python object to be converted

    Returns:
        A JSON serializable representation of the object
    """
    if obj is None:
        return None

    if isinstance(obj, Enum):
        return obj.value

    # bool before the numpy scalars, np.bool_ is not an int
    if isinstance(obj, (str, bool, int, float)):
        return obj

    if isinstance(obj, np.bool_):
        return bool(obj)

    if isinstance(obj, np.integer):
        return int(obj)

    if isinstance(obj, np.floating):
        return float(obj)

    if isinstance(obj, np.ndarray):
        return to_serializable_dict(obj.tolist())

    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]

    if isinstance(obj, sympy.Rational):
        return [int(obj.p), int(obj.q)]

    if isinstance(obj, sympy.MatrixBase):
        return [[to_serializable_dict(entry) for entry in obj.row(i)] for i in range(obj.rows)]

    if isinstance(obj, (datetime.datetime, datetime.date, datetime.time)):
        return obj.isoformat()

    if isinstance(obj, BaseModel):
        return to_serializable_dict(obj.model_dump())

    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_serializable_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj)}

    if isinstance(obj, dict):
        return {str(k): to_serializable_dict(v) for k, v in obj.items()}

    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_serializable_dict(item) for item in obj]

    if hasattr(obj, 'to_list'):
        return to_serializable_dict(obj.to_list())

    if hasattr(obj, '__dict__'):
        return to_serializable_dict(vars(obj))

    # Try to convert to string as a last resort
    try:
        return str(obj)
    except Exception:
        return f'<Object of type {type(obj).__name__} could not be serialized>'
