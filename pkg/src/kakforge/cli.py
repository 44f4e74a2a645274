"""``kakforge`` command line.

Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
bad input (unreadable or malformed files, invalid options).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import circuit as circ
from .config import Config, from_env
from .formats import FormatError, factors_from_dict, factors_to_dict, load_matrix
from .involution import CartanInvolution
from .kak import KakError, kak_decompose, verify_factors
from .lemmas import check_lemmas, lemma_samples
from .linalg import LinalgError, is_unitary, unitarity_defect
from .qft import qft_kak_check, qft_known_check, qft_known_circuit
from .synth import SynthOptions, synthesize


class InputError(Exception):
    pass


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text)


def _report(residual: float, checks: dict, counts: dict | None, start: float, **extra) -> dict:
    rep = {"residual": residual, "checks": checks, "counts": counts or {},
           "runtime_ms": int(1000 * (time.perf_counter() - start))}
    rep.update(extra)
    return rep


def _load(path: str) -> np.ndarray:
    try:
        return load_matrix(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None


def _theta(cfg: Config, g: np.ndarray) -> CartanInvolution:
    n = len(g).bit_length() - 1
    if len(g) > cfg.dim_cap:
        raise InputError(f"matrix dimension {len(g)} exceeds the cap {cfg.dim_cap}")
    if not is_unitary(g, cfg.tol_unitary):
        raise InputError(f"input matrix is not unitary (|g^dag g - I| = {unitarity_defect(g):.3g})")
    try:
        return CartanInvolution(n, cfg.axis)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_decompose(args, cfg: Config) -> int:
    start = time.perf_counter()
    g = _load(args.input)
    theta = _theta(cfg, g)
    f = kak_decompose(g, theta, cfg.subalgebra, ry_branch=cfg.ry_branch,
                      tol_unitary=cfg.tol_unitary, tol_group=cfg.tol_group)
    rep = verify_factors(g, theta, f, cfg.tol_recon)
    summary = rep.as_dict()
    report = _report(rep.residual, summary["checks"], None, start)
    _emit(json.dumps(factors_to_dict(f, report)), args.out)
    return 0 if rep.passed else 1


def cmd_synth(args, cfg: Config) -> int:
    start = time.perf_counter()
    g = _load(args.input)
    theta = _theta(cfg, g)
    opts = SynthOptions(ry_branch=cfg.ry_branch, tol_unitary=cfg.tol_unitary,
                        tol_group=cfg.tol_group, expand=args.expand_ucr)
    c = synthesize(g, theta, opts)
    text = circ.to_text(c) if cfg.output_format == "text" else circ.dumps(c)
    _emit(text, args.out)
    if not args.verify:
        return 0
    residual = float(np.linalg.norm(circ.evaluate(c) - g))
    ok = residual <= cfg.tol_recon * len(g)
    counts = dict(circ.count_gates(c))
    report = _report(residual, {"reconstruction": ok}, counts, start)
    print(json.dumps(report), file=sys.stderr if args.out == "-" else sys.stdout)
    return 0 if ok else 1


def cmd_qft_demo(args, cfg: Config) -> int:
    start = time.perf_counter()
    if not 1 <= args.n <= cfg.max_qubits:
        raise InputError(f"--n must be in 1..{cfg.max_qubits}")
    checks: dict[str, bool] = {}
    counts: dict[str, int] = {}
    residual = 0.0
    extra: dict = {}
    if args.mode in ("known", "both"):
        known = qft_known_check(args.n)
        checks.update({f"known.{k}": v for k, v in known.checks.items()})
        counts.update(known.counts)
        residual = max(residual, known.residual)
        extra["known_circuit"] = [g.kind for g in qft_known_circuit(args.n)]
    if args.mode in ("kak", "both"):
        if args.n < 2:
            extra["kak"] = "skipped: the F_n recursion needs n >= 2"
        else:
            kak = qft_kak_check(args.n)
            checks.update({f"kak.{k}": v for k, v in kak.checks.items()})
            residual = max(residual, kak.residual)
            extra["kak_details"] = kak.details
    report = _report(residual, checks, counts, start, n=args.n, mode=args.mode, **extra)
    _emit(json.dumps(report, indent=1), args.out)
    return 0 if all(checks.values()) else 1


def cmd_lemma_check(args, cfg: Config) -> int:
    start = time.perf_counter()
    if args.input:
        samples = [_load(args.input)]
    else:
        if args.n < 1 or args.random < 1:
            raise InputError("--random and --n must be positive")
        samples = lemma_samples(args.random, args.n, cfg.seed)
    totals = {"conjugate_pairs": 0, "real_eigenvalues": 0, "transport": 0}
    count = 0
    failures = []
    for i, g in enumerate(samples):
        res = check_lemmas(g, tol=cfg.tol_eig, tol_group=cfg.tol_group)
        count += 1
        totals["conjugate_pairs"] += res.conjugate_pairs
        totals["real_eigenvalues"] += res.real_eigenvalues
        totals["transport"] += res.transport
        if not res.passed:
            failures.append({"sample": i, "notes": res.notes})
    checks = {k: v == count for k, v in totals.items()}
    report = _report(0.0, checks, {"samples": count, **totals}, start, failures=failures[:10])
    _emit(json.dumps(report, indent=1), args.out)
    return 0 if all(checks.values()) else 1


def cmd_verify(args, cfg: Config) -> int:
    start = time.perf_counter()
    g = _load(args.input)
    tol = cfg.tol_recon * len(g)
    if bool(args.factors) == bool(args.circuit):
        raise InputError("give exactly one of --factors or --circuit")
    if args.factors:
        try:
            f = factors_from_dict(_load_json(args.factors))
        except FormatError as exc:
            raise InputError(f"{args.factors}: {exc}") from None
        if f.theta.dim != len(g):
            raise InputError("factors and matrix differ in dimension")
        rep = verify_factors(g, f.theta, f, cfg.tol_recon)
        summary = rep.as_dict()
        report = _report(rep.residual, summary["checks"], None, start)
        ok = rep.passed
    else:
        try:
            c = circ.loads(Path(args.circuit).read_text())
        except OSError as exc:
            raise InputError(f"{args.circuit}: {exc.strerror}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"{args.circuit}: {exc}") from None
        if 1 << c.n != len(g):
            raise InputError("circuit and matrix differ in qubit count")
        residual = float(np.linalg.norm(circ.evaluate(c) - g))
        ok = residual <= tol
        report = _report(residual, {"reconstruction": ok}, dict(circ.count_gates(c)), start)
    _emit(json.dumps(report, indent=1), args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="PRNG seed for randomized commands (default 42)")
    common.add_argument("--tol-unitary", type=float)
    common.add_argument("--tol-eig", type=float)
    common.add_argument("--tol-group", type=float)
    common.add_argument("--tol-recon", type=float)
    common.add_argument("--dim-cap", type=int)
    common.add_argument("--format", dest="output_format", choices=("json", "text"))
    common.add_argument("--out", default="-", help="output file, '-' for stdout")

    p = argparse.ArgumentParser(prog="kakforge", description="KAK-based unitary factorization and synthesis")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common], help="factor g = k~ y p^dag")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--axis", type=int, help="involution qubit (default: last)")
    d.add_argument("--subalgebra", choices=("h1", "h2"))
    d.add_argument("--ry-branch", action="store_true", default=None)
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("synth", parents=[common], help="synthesize a circuit of UCRs")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--axis", type=int)
    s.add_argument("--expand-ucr", action="store_true")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--ry-branch", action="store_true", default=None)
    s.set_defaults(func=cmd_synth)

    q = sub.add_parser("qft-demo", parents=[common], help="QFT closed-form checks")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mode", choices=("kak", "known", "both"), default="both")
    q.set_defaults(func=cmd_qft_demo)

    lc = sub.add_parser("lemma-check", parents=[common], help="eigenstructure checks on m^2")
    lc.add_argument("--random", type=int, default=100)
    lc.add_argument("--n", type=int, default=3)
    lc.add_argument("--in", dest="input")
    lc.set_defaults(func=cmd_lemma_check)

    v = sub.add_parser("verify", parents=[common], help="residual of factors or a circuit against g")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--factors")
    v.add_argument("--circuit")
    v.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = from_env().with_overrides(
            seed=args.seed, tol_unitary=args.tol_unitary, tol_eig=args.tol_eig,
            tol_group=args.tol_group, tol_recon=args.tol_recon, dim_cap=args.dim_cap,
            output_format=args.output_format, axis=getattr(args, "axis", None),
            subalgebra=getattr(args, "subalgebra", None), ry_branch=getattr(args, "ry_branch", None))
    except ValueError as exc:
        print(f"kakforge: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except InputError as exc:
        print(f"kakforge: {exc}", file=sys.stderr)
        return 2
    except (KakError, LinalgError) as exc:
        print(f"kakforge: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, KakError) else 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
