"""JSON configuration documents describing one family instance.

Scalars may be JSON numbers, ``"p/q"`` strings or ``[re, im]`` pairs.  Jordan
data is a list of ``[eigenvalue, size]`` pairs.  Example::

    {"family": "soliton", "betas": [0.5, -0.5], "C": [[1, 1]], "K": 3}
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from . import linalg as la
from .errors import ConfigError
from .linalg import EXACT, FLOAT, JordanSpec

FAMILIES = ("rational", "soliton", "cauchy", "calogero-moser", "generic-jordan")

_SCALAR = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*[-+]?\d+(\.\d*)?([eE][-+]?\d+)?(\s*/\s*\d+)?\s*$"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_VECTOR = {"type": "array", "items": _SCALAR, "minItems": 1}
_MATRIX = {"type": "array", "items": _VECTOR, "minItems": 1}
_JORDAN = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "prefixItems": [_SCALAR, {"type": "integer", "minimum": 1}], "minItems": 2, "maxItems": 2},
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["family"],
    "properties": {
        "family": {"enum": list(FAMILIES)},
        "backend": {"enum": [EXACT, FLOAT]},
        "K": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 0},
        "betas": _VECTOR,
        "deltas": _VECTOR,
        "xis": _VECTOR,
        "B": _JORDAN,
        "D": _JORDAN,
        "C": _MATRIX,
        "F": _MATRIX,
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
    },
    "allOf": [
        {"if": {"properties": {"family": {"const": "rational"}}}, "then": {"required": ["n", "k", "C"]}},
        {"if": {"properties": {"family": {"const": "soliton"}}}, "then": {"required": ["betas", "C"]}},
        {"if": {"properties": {"family": {"const": "cauchy"}}}, "then": {"required": ["betas", "deltas", "C"]}},
        {"if": {"properties": {"family": {"const": "calogero-moser"}}}, "then": {"required": ["betas", "xis"]}},
        {"if": {"properties": {"family": {"const": "generic-jordan"}}}, "then": {"required": ["B", "D", "C"]}},
    ],
}


def parse_scalar(x: Any, backend: str):
    if isinstance(x, str):
        x = Fraction(x.replace(" ", ""))
    return la.to_scalar(x, backend)


def serialize_scalar(x: Any) -> Any:
    """Inverse of :func:`parse_scalar`: Fractions become ``"p/q"``, complex values ``[re, im]``."""
    if isinstance(x, la.GaussianFraction):
        return [serialize_scalar(x.re), serialize_scalar(x.im)]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, complex):
        return x.real if x.imag == 0 else [x.real, x.imag]
    return x


@dataclass
class FamilyConfig:
    """Validated configuration; fields mirror the JSON keys."""

    family: str
    backend: str | None = None
    K: int = 4
    n: int | None = None
    k: int | None = None
    betas: list | None = None
    deltas: list | None = None
    xis: list | None = None
    B: list | None = None
    D: list | None = None
    C: list | None = None
    F: list | None = None
    tolerance: float = la.DEFAULT_RTOL
    extras: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(cls, doc: dict) -> "FamilyConfig":
        validator = jsonschema.Draft202012Validator(SCHEMA)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
        if errors:
            err = errors[0]
            path = "/".join(str(p) for p in err.absolute_path) or "<root>"
            raise ConfigError(f"config field {path}: {err.message}")
        cfg = cls(**doc)
        cfg._check_shapes()
        return cfg

    @classmethod
    def loads(cls, text: str) -> "FamilyConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config root must be an object")
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path: str | Path) -> "FamilyConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
        return cls.loads(text)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v is not None and k != "extras"}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @property
    def resolved_backend(self) -> str:
        if self.backend:
            return self.backend
        return EXACT if self.family == "rational" else FLOAT

    def _check_shapes(self) -> None:
        if self.C is not None:
            width = len(self.C[0])
            if any(len(r) != width for r in self.C):
                raise ConfigError("config field C: rows have different lengths")
        if self.F is not None and any(len(r) != len(self.F[0]) for r in self.F):
            raise ConfigError("config field F: rows have different lengths")
        fam = self.family
        if fam == "rational" and self.C is not None:
            if len(self.C) != self.n or len(self.C[0]) != self.n + self.k:
                raise ConfigError(f"config field C: expected {self.n} x {self.n + self.k}")
        if fam in ("soliton", "cauchy") and len(self.C[0]) != len(self.betas):
            raise ConfigError(f"config field C: expected {len(self.betas)} columns")
        if fam == "cauchy" and len(self.C) != len(self.deltas):
            raise ConfigError(f"config field C: expected {len(self.deltas)} rows")
        if fam == "calogero-moser" and len(self.betas) != len(self.xis):
            raise ConfigError("config field xis: must match betas in length")
        if fam == "generic-jordan":
            N = sum(s for _, s in self.B)
            if len(self.C[0]) != N:
                raise ConfigError(f"config field C: expected {N} columns")

    def jordan(self, key: str, backend: str) -> JordanSpec:
        return JordanSpec(tuple((parse_scalar(e, backend), s) for e, s in getattr(self, key)))

    def scalars(self, key: str, backend: str) -> list:
        return [parse_scalar(x, backend) for x in getattr(self, key)]

    def matrix(self, key: str, backend: str):
        return la.matrix([[parse_scalar(x, backend) for x in row] for row in getattr(self, key)], backend)


@dataclass(frozen=True, eq=False)
class BuiltModel:
    """A built system plus the family object when one exists."""

    config: FamilyConfig
    system: Any
    family: Any = None


def build_model(cfg: FamilyConfig, backend: str | None = None) -> BuiltModel:
    from . import families as fm

    be = backend or cfg.resolved_backend
    fam = cfg.family
    if fam == "rational":
        sys = fm.rational_family(cfg.n, cfg.k, cfg.matrix("C", be), be)
        return BuiltModel(cfg, sys)
    if fam == "soliton":
        obj = fm.soliton_family(cfg.scalars("betas", be), cfg.matrix("C", be), be)
        return BuiltModel(cfg, obj.system(), obj)
    if fam == "cauchy":
        sys = fm.cauchy_family(cfg.scalars("betas", be), cfg.scalars("deltas", be), cfg.matrix("C", be), be)
        return BuiltModel(cfg, sys)
    if fam == "calogero-moser":
        obj = fm.calogero_moser_family(cfg.scalars("betas", be), cfg.scalars("xis", be), be)
        return BuiltModel(cfg, obj.system(), obj)
    F = cfg.matrix("F", be) if cfg.F is not None else None
    sys = fm.generic_jordan_family(cfg.jordan("B", be), cfg.jordan("D", be), cfg.matrix("C", be), F, be)
    return BuiltModel(cfg, sys)
