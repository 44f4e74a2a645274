"""Matrix and factor file formats.

Text matrices: first line is the qubit count ``n``; then ``2^n`` rows of
``2^(n+1)`` numbers, each entry written as a ``re im`` pair.  JSON matrices:
``{"n": n, "re": [[...]], "im": [[...]]}``.  Floats are written with ``repr``
so a write/read round trip is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .involution import CartanInvolution
from .kak import KakFactors


class FormatError(ValueError):
    pass


def _qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise FormatError(f"matrix dimension {dim} is not a power of two >= 2")
    return n


def matrix_to_text(m: np.ndarray) -> str:
    m = np.asarray(m, dtype=complex)
    lines = [str(_qubits_for(len(m)))]
    for row in m:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines()]
    if not lines or not lines[0].strip():
        raise FormatError("line 1: missing qubit count")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise FormatError(f"line 1: qubit count {lines[0].strip()!r} is not an integer") from None
    if not 1 <= n <= 12:
        raise FormatError(f"line 1: qubit count {n} outside 1..12")
    dim = 1 << n
    rows = [ln for ln in lines[1:]]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != dim:
        raise FormatError(f"expected {dim} matrix rows after line 1, found {len(rows)}")
    out = np.empty((dim, dim), dtype=complex)
    for i, ln in enumerate(rows):
        fields = ln.split()
        if len(fields) != 2 * dim:
            raise FormatError(f"line {i + 2}: expected {2 * dim} numbers, found {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError as exc:
            raise FormatError(f"line {i + 2}: {exc}") from None
        out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return out


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"n": _qubits_for(len(m)), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_dict(d: dict, field: str = "matrix") -> np.ndarray:
    if not isinstance(d, dict):
        raise FormatError(f"{field}: expected an object with n, re, im")
    for key in ("n", "re", "im"):
        if key not in d:
            raise FormatError(f"{field}: missing field {key!r}")
    try:
        re = np.array(d["re"], dtype=float)
        im = np.array(d["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{field}: non-numeric entries ({exc})") from None
    dim = 1 << int(d["n"])
    for key, part in (("re", re), ("im", im)):
        if part.shape != (dim, dim):
            raise FormatError(f"{field}.{key}: shape {part.shape}, expected ({dim}, {dim}) for n={d['n']}")
    return re + 1j * im


def load_matrix(path: str | Path) -> np.ndarray:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        return matrix_from_dict(data)
    return matrix_from_text(text)


def factors_to_dict(f: KakFactors, report: dict | None = None) -> dict:
    out = {
        "n": f.theta.n,
        "axis": f.theta.axis,
        "subalgebra": f.subalgebra,
        "k_tilde": matrix_to_dict(f.k_tilde),
        "y": matrix_to_dict(f.y),
        "p_dagger": matrix_to_dict(f.p_dagger),
        "b": matrix_to_dict(f.b),
        "angles": [float(a) for a in f.angles],
        "global_phase": [f.global_phase.real, f.global_phase.imag],
        "ry_blocks": list(f.ry_blocks),
    }
    if report is not None:
        out["report"] = report
    return out


def factors_from_dict(d: dict) -> KakFactors:
    try:
        theta = CartanInvolution(int(d["n"]), int(d["axis"]))
        phase = complex(d["global_phase"][0], d["global_phase"][1])
        return KakFactors(
            k_tilde=matrix_from_dict(d["k_tilde"], "k_tilde"),
            y=matrix_from_dict(d["y"], "y"),
            p_dagger=matrix_from_dict(d["p_dagger"], "p_dagger"),
            angles=np.array(d["angles"], dtype=float),
            subalgebra=d["subalgebra"],
            global_phase=phase,
            b=matrix_from_dict(d["b"], "b") if "b" in d else np.eye(1 << theta.n, dtype=complex),
            theta=theta,
            ry_blocks=list(d.get("ry_blocks", [])),
        )
    except KeyError as exc:
        raise FormatError(f"factors: missing field {exc.args[0]!r}") from None
