"""JSON descriptors for sequences and self-similar systems.

Numbers may be JSON numbers or "p/q" strings; the latter become exact
fractions so knife-edge comparisons stay exact.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

from .errors import InputError
from .geometry import SelfSimilarSystem
from .sequences import BlockGeometric, Explicit, FromSystem, GapSequence, PowerLaw

HALF_THIRD = {"model": "system", "ratios": ["1/2", "1/3"], "gaps": ["1/6"]}
TERNARY_REARRANGED = {"model": "blockgeo", "rho": "1/3", "m": 2, "b": 1}


def number(value):
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, (int, float, Fraction)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip()) if "/" in value else float(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a number: {value!r}") from exc
    raise InputError(f"not a number: {value!r}")


def _field(desc: dict, name: str):
    if name not in desc:
        raise InputError(f"descriptor for model {desc.get('model')!r} needs {name!r}")
    return desc[name]


def build_system(desc: dict) -> SelfSimilarSystem:
    ratios = [number(r) for r in _field(desc, "ratios")]
    gaps = [number(b) for b in _field(desc, "gaps")]
    return SelfSimilarSystem(tuple(ratios), tuple(gaps))


def build(desc: dict):
    """GapSequence or SelfSimilarSystem from a parsed descriptor."""
    if not isinstance(desc, dict):
        raise InputError("descriptor must be a JSON object")
    model = desc.get("model")
    if model == "powerlaw":
        return PowerLaw(number(_field(desc, "L")), number(_field(desc, "d")))
    if model == "blockgeo":
        m = _field(desc, "m")
        if not isinstance(m, int):
            raise InputError("blockgeo needs an integer m")
        return BlockGeometric(number(_field(desc, "rho")), m, number(desc.get("b", 1)))
    if model == "explicit":
        return Explicit([number(v) for v in _field(desc, "lengths")], number(desc.get("tail", 0)))
    if model == "system":
        return build_system(desc)
    if model == "fromsystem":
        return FromSystem(build_system(desc))
    raise InputError(f"unknown model {model!r}")


def read(source: str):
    """Parse a descriptor from a file path or an inline JSON object."""
    text = source
    if not source.lstrip().startswith("{"):
        path = Path(source)
        if not path.is_file():
            raise InputError(f"no such descriptor file: {source}")
        text = path.read_text()
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"descriptor is not valid JSON: {exc}") from exc
    return build(desc)


def natural_dimension(obj) -> float | None:
    """The dimension a descriptor implies, when it has a closed form."""
    if isinstance(obj, PowerLaw):
        return obj.d
    if isinstance(obj, BlockGeometric):
        return math.log(obj.m) / math.log(1 / float(obj.rho))
    return None


def as_sequence(obj) -> GapSequence:
    return FromSystem(obj) if isinstance(obj, SelfSimilarSystem) else obj
