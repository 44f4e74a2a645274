"""Run configuration with ``KAKFORGE_*`` environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .kak import H1, H2, TOL_RECON
from .linalg import TOL_EIG, TOL_GROUP, TOL_UNITARY

ENV_PREFIX = "KAKFORGE_"


@dataclass(frozen=True)
class Config:
    tol_unitary: float = TOL_UNITARY
    tol_eig: float = TOL_EIG
    tol_group: float = TOL_GROUP
    tol_recon: float = TOL_RECON
    axis: int | None = None
    subalgebra: str = H1
    ry_branch: bool = False
    dim_cap: int = 1 << 12
    output_format: str = "json"
    seed: int = 42

    def __post_init__(self):
        for name in ("tol_unitary", "tol_eig", "tol_group", "tol_recon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        cap = self.dim_cap
        if cap < 2 or cap & (cap - 1) or cap > 1 << 12:
            raise ValueError(f"dim_cap must be a power of two in 2..4096, got {cap}")
        if self.subalgebra not in (H1, H2):
            raise ValueError(f"subalgebra must be {H1!r} or {H2!r}")
        if self.output_format not in ("json", "text"):
            raise ValueError("output_format must be 'json' or 'text'")

    @property
    def max_qubits(self) -> int:
        return self.dim_cap.bit_length() - 1

    def with_overrides(self, **values) -> Config:
        return replace(self, **{k: v for k, v in values.items() if v is not None})


def _parse(kind, raw: str):
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


_TYPES = {"tol_unitary": float, "tol_eig": float, "tol_group": float, "tol_recon": float,
          "axis": int, "subalgebra": str, "ry_branch": bool, "dim_cap": int,
          "output_format": str, "seed": int}


def from_env(environ=None, base: Config | None = None) -> Config:
    environ = os.environ if environ is None else environ
    values = {}
    for f in fields(Config):
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            values[f.name] = _parse(_TYPES[f.name], raw)
    return replace(base or Config(), **values)
