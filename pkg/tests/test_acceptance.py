"""Acceptance criteria 1-7 at their stated tolerances.

Each test prints a PASS/FAIL line and feeds the summary printed at the end of
the pytest run.
"""
import time
import warnings

import numpy as np
import pytest

from xycompress.compressed import (
    compile_step,
    kink_from_w,
    magnetization_from_w,
    offblock_residue,
    v_matrix,
    w_factor,
    w_of_schedule,
)
from xycompress.fermion import ChainSpec, XYChain, rotation
from xycompress.matchgate import expect_observable_statevector, statevector_run
from xycompress.protocols import (
    QuenchWarning,
    kink_scaling_fit,
    kink_trace_r,
    magnetization_sweep,
    magnetization_trace_r,
    propagation_speed,
    quench_series,
    r_of_schedule,
    timeevo_circuit,
    timeevo_profile,
)
from xycompress.cli import verify_suite
from xycompress.schedule import TrotterSchedule
from xycompress.spectrum import (
    bogoliubov,
    dense_hamiltonian,
    ground_magnetization,
    quadratic_form,
    sector_crossings,
    spectrum,
)


def report(acceptance, num, ok, detail):
    acceptance(num, ok, detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} | {detail}")


# 1 ------------------------------------------------------------------------------------------------


def test_criterion_1_oracle_equivalence(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for i, n in enumerate((4, 6, 8)):
        for jw in (False, True):
            worst = max(worst, verify_suite(n, 100, 100, seed=100 + 2 * i + jw, jw=jw))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 60
    report(acceptance, 1, ok, f"max |dZ| = {worst:.2e} over 600 circuits in {elapsed:.1f} s")
    assert ok


# 2 ------------------------------------------------------------------------------------------------


def test_criterion_2_compression_consistency(acceptance):
    rng = np.random.default_rng(2)
    worst_route, worst_block = 0.0, 0.0
    for n in (4, 8, 16, 32, 64, 128, 256):
        for bc in ("open", "jw"):
            chain = ChainSpec(n, B=1.0, j_max=1.0, delta=0.3, boundary=bc)
            omegas = rng.uniform(-0.3, 0.3, (25, 3))
            R = r_of_schedule(chain, omegas)
            W = w_of_schedule(chain, omegas)
            worst_route = max(worst_route,
                              abs(magnetization_trace_r(R) - magnetization_from_w(W)),
                              abs(kink_trace_r(R) - kink_from_w(W)))
            vt = v_matrix(n)
            for kind in ("H0", "H1", "H2"):
                worst_block = max(worst_block, offblock_residue(vt, rotation(kind, rng.uniform(-np.pi, np.pi), chain).dense()))
    ok = worst_route < 1e-10 and worst_block < 1e-12
    report(acceptance, 2, ok, f"m vs m_hat {worst_route:.2e}, off-block {worst_block:.2e}")
    assert ok


# 3 ------------------------------------------------------------------------------------------------


def _magnetization_deviation(n, Ts):
    chain = ChainSpec(n, B=1.0, j_max=2.0, delta=0.3, boundary="jw")
    J = np.round(np.arange(0, 2.0 + 1e-9, 0.05), 10)
    exact = np.array([ground_magnetization(bogoliubov(quadratic_form(chain.replace(j_max=j))))
                      for j in J])
    outside = np.abs(J - chain.B) >= 0.2 * chain.B
    devs = []
    for T in Ts:
        y = magnetization_sweep(chain, TrotterSchedule.from_rule(T, "2T^2"), J).y
        devs.append(np.abs(y - exact)[outside])
    return np.array(devs)


def test_criterion_3_magnetization(acceptance):
    start = time.perf_counter()
    devs = _magnetization_deviation(64, (50, 100, 500))
    worst = devs.max(axis=1)
    # pointwise ordering where the Trotter/adiabatic error is above the 1e-4 noise floor
    above = devs[:-1] > 1e-4
    pointwise = bool(np.all((devs[1:] <= devs[:-1])[above]))
    ok = bool(np.all(np.diff(worst) < 0)) and pointwise and worst[-1] < 0.05
    report(acceptance, 3, ok, "max dev T=50/100/500: " + "/".join(f"{d:.4f}" for d in worst)
           + f", pointwise ordered {pointwise}, {time.perf_counter() - start:.0f} s")
    assert ok


@pytest.mark.slow
def test_criterion_3_optional_n128(acceptance):
    devs = _magnetization_deviation(128, (50, 100, 1000))
    worst = devs.max(axis=1)
    ok = bool(np.all(np.diff(worst) < 0)) and worst[-1] < 0.02
    report(acceptance, 3, ok, "optional n=128 max dev T=50/100/1000: " + "/".join(f"{d:.4f}" for d in worst))
    assert ok


# 4 ------------------------------------------------------------------------------------------------


def test_criterion_4_quench_scaling(acceptance):
    grid = [50, 75, 100, 150, 200, 250]
    ps = {}
    with warnings.catch_warnings():
        warnings.simplefilter("error", QuenchWarning)
        for n in (8, 16, 32, 64, 128):
            chain = ChainSpec(n, B=20.0, j_max=1.0, delta=0.0)
            rows = quench_series(chain, 50.0, 20000, grid, "2T^2")
            stats = kink_scaling_fit((np.array(grid, float), np.array([r.nu for r in rows])))
            ps[n] = stats.p
    values = [ps[n] for n in sorted(ps)]
    ok = (abs(ps[128] - 0.58) <= 0.05 and all(b < a for a, b in zip(values, values[1:]))
          and abs(ps[128] - 0.5) <= 0.08)
    report(acceptance, 4, ok, "p(n) " + ", ".join(f"{n}:{p:.4f}" for n, p in ps.items()))
    assert ok


# 5 ------------------------------------------------------------------------------------------------


def test_criterion_5_spectrum_equivalence(acceptance):
    rng = np.random.default_rng(5)
    worst = 0.0
    for bc in ("open", "jw"):
        for n in range(2, 9):
            for _ in range(50):
                chain = XYChain(n, B=rng.uniform(0.1, 2), j_max=rng.uniform(0, 2),
                                delta=rng.uniform(0, 1), boundary=bc)
                E = np.linalg.eigvalsh(dense_hamiltonian(chain))
                ours = spectrum(bogoliubov(quadratic_form(chain))).energy
                worst = max(worst, np.abs(ours - E).max())
    ok = worst < 1e-9
    report(acceptance, 5, ok, f"Bogoliubov vs dense max {worst:.2e} (700 draws)")
    assert ok


@pytest.mark.xfail(strict=True, reason="n=4 spectra contain equal-label crossings at E=0, "
                   "separated only by spatial reflection; see the decisions ledger")
def test_criterion_5_level_crossings(acceptance):
    grid = np.linspace(0, 2, 201)
    found = {}
    for bc in ("open", "jw"):
        for delta in (0.0, 0.5, 0.9):
            found[(bc, delta)] = sector_crossings(XYChain(4, B=1.0, delta=delta, boundary=bc), grid)
    total = sum(len(v) for v in found.values())
    where = ", ".join(f"{bc} d={d}: J=" + "/".join(f"{c.J:.3f}" for c in cs)
                      for (bc, d), cs in found.items() if cs)
    report(acceptance, 5, total == 0, f"{total} same-label crossings ({where})")
    assert total == 0


# 6 ------------------------------------------------------------------------------------------------


def test_criterion_6_gate_compiler(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    counts = {}
    for bc in ("open", "jw"):
        for n in (8, 16, 32):
            chain = ChainSpec(n, boundary=bc)
            for _ in range(100):
                w = rng.uniform(-np.pi, np.pi, 3)
                gl = compile_step(chain, *w)
                target = w_factor("W0", w[0], chain) @ w_factor("W1", w[1], chain) @ w_factor("W2", w[2], chain)
                worst = max(worst, np.abs(gl.dense() - target).max())
                counts.setdefault((bc, n), set()).add(gl.elementary_count())
    # per-step count is angle independent; count / m_hat^2 stays below a fixed c
    fixed = all(len(v) == 1 for v in counts.values())
    c = {bc: max(counts[(bc, n)].pop() / np.log2(n) ** 2 for n in (8, 16, 32)) for bc in ("open", "jw")}
    bounded = True
    for bc in ("open", "jw"):
        for n in (64, 128, 256):
            bounded &= compile_step(ChainSpec(n, boundary=bc), 0.1, 0.2, 0.3).elementary_count() <= c[bc] * np.log2(n) ** 2
    ok = worst < 1e-10 and fixed and bounded
    report(acceptance, 6, ok, f"reconstruction {worst:.2e}, c open {c['open']:.2f}, c jw {c['jw']:.2f}")
    assert ok


# 7 ------------------------------------------------------------------------------------------------


def test_criterion_7_time_evolution(acceptance):
    worst_sv = 0.0
    for bc in ("open", "jw"):
        chain = XYChain(8, B=1.0, j_max=0.3, delta=0.3, boundary=bc)
        sched = TrotterSchedule.from_rule(2.0, "2T^2")
        t_grid = [0.0, 1.0, 2.0]
        prof = timeevo_profile(chain, sched, t_grid, dt_max=0.1)
        for row, t in zip(prof, t_grid):
            steps = 0 if t == 0 else int(np.ceil(t / 0.1 - 1e-9))
            state = statevector_run(timeevo_circuit(chain, sched, t, steps), [0] * 8)
            sv = np.array([expect_observable_statevector(state, "Z", k) for k in range(1, 9)])
            worst_sv = max(worst_sv, np.abs(row - sv).max())

    n = 128
    t_grid = np.arange(0, 30.1, 2.0)
    sched = TrotterSchedule.from_rule(10, "2T^2")
    dist = np.abs(np.arange(1, n + 1) - (n + 1) / 2) - 0.5
    speeds, cone_ok = {}, True
    for delta in (0.0, 0.3, 0.6):
        for J in (0.0, 0.1, 0.2, 0.3, 0.4):
            chain = XYChain(n, B=1.0, j_max=J, delta=delta)
            prof = timeevo_profile(chain, sched, t_grid, dt_max=0.05)
            speeds[(J, delta)] = propagation_speed(prof, t_grid).speed
            for row, t in zip(prof, t_grid):
                outside = dist > 8 * J * t + 4
                cone_ok &= bool(np.all(np.abs(row - prof[0])[outside] < 1e-2))
    zero = all(speeds[(0.0, d)] == 0.0 for d in (0.0, 0.3, 0.6))
    in_J = all(speeds[(a, d)] < speeds[(b, d)] for d in (0.0, 0.3, 0.6)
               for a, b in zip((0.0, 0.1, 0.2, 0.3), (0.1, 0.2, 0.3, 0.4)))
    in_delta = all(speeds[(J, 0.0)] < speeds[(J, 0.3)] < speeds[(J, 0.6)] for J in (0.1, 0.2, 0.3, 0.4))
    ok = worst_sv < 1e-9 and cone_ok and zero and in_J and in_delta
    report(acceptance, 7, ok, f"n=8 vs statevector {worst_sv:.2e}, light cone {cone_ok}, "
           f"J=0 speed 0 {zero}, monotone in J {in_J}, in delta {in_delta}, "
           f"v(0.4,0.6)={speeds[(0.4, 0.6)]:.3f}")
    assert ok
