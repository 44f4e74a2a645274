"""Acceptance gate: nine end-to-end criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from kakforge.circuit import ROTATIONS, count_gates, demux_block_diag, evaluate
from kakforge.involution import CartanInvolution, exp_k_defect
from kakforge.kak import H1, kak_decompose, rx, verify_factors
from kakforge.lemmas import check_lemmas, lemma_samples, structured_unitary
from kakforge.qft import omega, omega_diag, qft_kak_check, qft_known_check, qft_matrix
from kakforge.rng import SplitMix64
from kakforge.synth import SynthOptions, elementary_gate_count, synthesize

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[number])


def max_block_sqrt_error(y: np.ndarray, b: np.ndarray, size: int) -> float:
    y2 = y @ y
    return max(float(np.linalg.norm(y2[s:s + size, s:s + size] - b[s:s + size, s:s + size]))
               for s in range(0, len(b), size))


def test_criterion_1_reconstruction():
    start = time.perf_counter()
    worst, failures, sqrt_err = 0.0, 0, 0.0
    for n in range(1, 6):
        rng = SplitMix64(1000 + n)
        th = CartanInvolution(n)
        for _ in range(200):
            g = rng.unitary(1 << n)
            f = kak_decompose(g, th, H1)
            rep = verify_factors(g, th, f, 1e-8)
            worst = max(worst, rep.residual / (1 << n))
            failures += not rep.passed
            sqrt_err = max(sqrt_err, max_block_sqrt_error(f.y, f.b, 2))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and worst <= 1e-8 and elapsed <= 60 and sqrt_err <= 1e-11
    record(1, ok, f"1000 unitaries n=1..5, max residual/2^n={worst:.2e}, failures={failures}, "
                  f"{elapsed:.1f}s")
    assert ok


def test_criterion_2_synthesis_round_trip():
    worst, bad_kinds = 0.0, set()
    allowed = {"CNOT", "GlobalPhase", *ROTATIONS}
    for n in (2, 3, 4):
        rng = SplitMix64(2000 + n)
        for _ in range(50):
            g = rng.unitary(1 << n)
            c = synthesize(g, opts=SynthOptions(expand=True))
            worst = max(worst, float(np.linalg.norm(evaluate(c) - g)) / (1 << n))
            bad_kinds |= set(count_gates(c)) - allowed
    ok = worst <= 1e-8 and not bad_kinds
    record(2, ok, f"150 round trips n=2..4, max residual/2^n={worst:.2e}, foreign gates={sorted(bad_kinds)}")
    assert ok


def test_criterion_3_gate_count_scaling():
    totals = {}
    deterministic = True
    for n in range(2, 6):
        rng = SplitMix64(3000 + n)
        seen = {len(synthesize(rng.unitary(1 << n), opts=SynthOptions(expand=True))) for _ in range(3)}
        deterministic &= len(seen) == 1 and seen == {elementary_gate_count(n)}
        totals[n] = seen.pop()
    ratios = [totals[n + 1] / totals[n] for n in range(2, 5)]
    ok = deterministic and all(4 / 1.3 <= r <= 4 * 1.3 for r in ratios)
    record(3, ok, f"totals {totals}, ratios {[round(r, 3) for r in ratios]}, input-independent={deterministic}")
    assert ok


def test_criterion_4_qft_closed_forms():
    reports = [qft_kak_check(n, tol_recon=1e-9, tol_block=1e-9, tol_identity=1e-10) for n in range(2, 7)]
    ok = all(r.passed for r in reports)
    worst = max(r.residual for r in reports)
    failed = [(r.n, [k for k, v in r.checks.items() if not v]) for r in reports if not r.passed]
    record(4, ok, f"F_n n=2..6, max residual={worst:.2e}, failed={failed}")
    assert ok


def test_criterion_5_qft_circuit_counts():
    reports = [qft_known_check(n, tol=1e-10) for n in range(1, 11)]
    ok = all(r.passed for r in reports)
    record(5, ok, f"known circuit n=1..10, max residual={max(r.residual for r in reports):.2e}")
    assert ok


def test_criterion_6_lemma_suite():
    start = time.perf_counter()
    total, passed, with_real = 0, 0, 0
    for n in (2, 3, 4):
        for g in lemma_samples(1000, n, seed=6000 + n):
            res = check_lemmas(g, tol=1e-9)
            total += 1
            passed += res.passed
            with_real += res.real_dimension > 0
    ok = passed == total
    record(6, ok, f"{passed}/{total} pass ({with_real} with real eigenvalues), "
                  f"{time.perf_counter() - start:.1f}s")
    assert ok


def test_criterion_7_square_roots():
    worst, minus_identity = 0.0, {False: 0, True: 0}
    for n in (1, 2, 3, 4):
        rng = SplitMix64(7000 + n)
        th = CartanInvolution(n)
        for i in range(100):
            g = rng.unitary(1 << n) if n == 1 or i % 2 else structured_unitary(n, rng)
            for ry_branch in (False, True):
                f = kak_decompose(g, th, H1, ry_branch=ry_branch)
                worst = max(worst, max_block_sqrt_error(f.y, f.b, 2))
                blocks = [f.b[s:s + 2, s:s + 2] for s in range(0, 1 << n, 2)]
                minus_identity[ry_branch] += sum(np.linalg.norm(b + np.eye(2)) < 1e-9 for b in blocks)
    for n in (2, 3, 4):
        f = kak_decompose(qft_matrix(n), CartanInvolution(n), "h2")
        worst = max(worst, max_block_sqrt_error(f.y, f.b, 4))
    # the -I block itself under both conventions
    direct = max(float(np.linalg.norm(rx(np.pi / 2) @ rx(np.pi / 2) + np.eye(2))),
                 float(np.linalg.norm(np.array([[0, -1], [1, 0]]) @ np.array([[0, -1], [1, 0]]) + np.eye(2))))
    ok = worst <= 1e-11 and direct <= 1e-11 and minus_identity[False] > 0 and minus_identity[True] > 0
    record(7, ok, f"max block |y^2-b|={worst:.2e}, -I blocks seen Rx={minus_identity[False]} "
                  f"Ry={minus_identity[True]}")
    assert ok


def test_criterion_8_first_axis():
    th = CartanInvolution(3, 1)
    worst_mass, worst_res = 0.0, 0.0
    rng = SplitMix64(8000)
    for _ in range(100):
        g = rng.unitary(8)
        f = kak_decompose(g, th, H1)
        worst_mass = max(worst_mass, exp_k_defect(th, f.k_tilde), exp_k_defect(th, f.p_dagger))
        worst_res = max(worst_res, verify_factors(g, th, f).residual)
    ok = worst_mass <= 1e-9 and worst_res <= 1e-8 * 8
    record(8, ok, f"axis 1, n=3, 100 unitaries, max off-pattern mass={worst_mass:.2e}, "
                  f"max residual={worst_res:.2e}")
    assert ok


def test_criterion_9_demux():
    rng = SplitMix64(9000)
    worst = 0.0
    for i in range(100):
        dim = (1, 2, 4, 8, 16)[i % 5]
        u1, u2 = rng.unitary(dim), rng.unitary(dim)
        v, d, w = demux_block_diag(u1, u2)
        z = np.zeros_like(d)
        rebuilt = (np.block([[v, z], [z, v]]) @ np.block([[d, z], [z, d.conj().T]])
                   @ np.block([[w, z], [z, w]]))
        worst = max(worst, float(np.linalg.norm(rebuilt - np.block([[u1, z], [z, u2]]))))
    n = 3
    f = qft_matrix(n - 1)
    v, d, _ = demux_block_diag(-omega_diag(n) @ f, f)
    aligned = np.empty(len(d), dtype=complex)
    aligned[np.argmax(np.abs(v), axis=0)] = np.diag(d)
    d_err = float(np.max(np.abs(aligned - 1j * omega(n + 1) ** np.arange(1 << (n - 1)))))
    ok = worst <= 1e-10 and d_err <= 1e-10
    record(9, ok, f"100 pairs dim<=16, max residual={worst:.2e}; QFT n=3 d entries error={d_err:.2e}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
