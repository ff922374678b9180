"""Adiabatic sweeps, quenches and signal propagation in the compressed picture.

Two equivalent routes are available for sweeps and quenches:

* ``"m"``: the real ``2n x 2n`` rotation ``R`` (``log2(n) + 1`` qubits),
* ``"m_hat"``: the ``n x n`` unitary ``W`` (``log2(n)`` qubits).

Time evolution only has the ``"m"`` route.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .compressed import InputKind, kink_from_w, prepared_input, shift_matrix, w_factor_plan
from .fermion import GeneratorKind, XYChain, rotation
from .kernels import FactorPlan
from .matchgate import GateKind, MatchgateCircuit, ParametricGate, layer, s_matrix
from .schedule import (
    StepRule,
    TrotterSchedule,
    adiabatic_angles,
    evolution_angles,
    quench_field_values,
    quench_stage1_angles,
    quench_stage2_angles,
)

__all__ = [
    "Series",
    "KinkStats",
    "QuenchResult",
    "PropagationResult",
    "r_factor_plan",
    "r_of_schedule",
    "magnetization_from_r",
    "kink_from_r",
    "magnetization_trace_r",
    "kink_trace_r",
    "z_profile_from_r",
    "trotter_circuit",
    "flip_rotation",
    "magnetization_sweep",
    "adiabatic_roundtrip_check",
    "quench_run",
    "quench_series",
    "kink_scaling_fit",
    "timeevo_profile",
    "timeevo_circuit",
    "propagation_speed",
    "QuenchWarning",
]

PATHS = ("m", "m_hat")


class QuenchWarning(UserWarning):
    pass


@dataclass
class Series:
    """``(x, y)`` rows with strictly increasing ``x`` and a provenance dict."""

    x_name: str
    y_name: str
    x: np.ndarray
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have equal length")
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("x values must be strictly increasing")

    def __len__(self) -> int:
        return len(self.x)

    def rows(self):
        return list(zip(self.x.tolist(), self.y.tolist()))


# --- 2n x 2n rotation route ----------------------------------------------------------------------


def r_factor_plan(chain: XYChain) -> FactorPlan:
    """Sparse plan of one step ``R0 R1 R2``."""
    factors = []
    for kind in (GeneratorKind.H0, GeneratorKind.H1, GeneratorKind.H2):
        rot = rotation(kind, 1.0, chain)
        sign = rot.s / math.sin(1.0)
        factors.append(([(int(i), int(j), float(s)) for i, j, s in zip(rot.i, rot.j, sign)], []))
    return FactorPlan(factors)


def r_of_schedule(chain: XYChain, omegas: np.ndarray, initial: np.ndarray | None = None) -> np.ndarray:
    """``prod_l R0 R1 R2`` (later steps on the left), left-multiplied onto ``initial``."""
    M = np.eye(chain.dim) if initial is None else np.array(initial, dtype=float)
    return r_factor_plan(chain).evolve(M, np.asarray(omegas, dtype=float))


def _rsr_entries(R: np.ndarray, rows_a, rows_b, S: np.ndarray | None = None) -> np.ndarray:
    if S is None:
        # R S for S = 1 (x) iY without forming S
        RS = np.empty_like(R)
        RS[:, 0::2] = -R[:, 1::2]
        RS[:, 1::2] = R[:, 0::2]
        return np.einsum("ij,ij->i", RS[rows_a], R[rows_b])
    return np.einsum("ij,ij->i", R[rows_a] @ S, R[rows_b])


def z_profile_from_r(R: np.ndarray, input_bits=None) -> np.ndarray:
    """``<Z_k> = [R S R^T]_{2k-1, 2k}`` for all k."""
    n = R.shape[0] // 2
    S = None if input_bits is None else s_matrix(input_bits)
    k = np.arange(n)
    return _rsr_entries(R, 2 * k, 2 * k + 1, S)


def magnetization_from_r(R: np.ndarray) -> float:
    """``M = (1/n) sum_k [R S R^T]_{2k-1,2k} = tr[R rho_in R^T Y_m]`` for input |0...0>."""
    return float(z_profile_from_r(R).mean())


def kink_from_r(R: np.ndarray) -> float:
    """``K = 1/(n-1) sum_{k<n} [R S R^T]_{2k, 2k+1}``."""
    n = R.shape[0] // 2
    k = np.arange(n - 1)
    return float(_rsr_entries(R, 2 * k + 1, 2 * k + 2).mean())


def _y_m(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0, -1j], [1j, 0]]))


def magnetization_trace_r(R: np.ndarray) -> float:
    """``M = tr[R rho_in R^T Y_m]`` as a dense trace on ``log2(n) + 1`` qubits."""
    n = R.shape[0] // 2
    rho = prepared_input(InputKind.RHO_IN, n=n).matrix
    return float(np.real(np.trace(R @ rho @ R.T @ _y_m(n))))


def kink_trace_r(R: np.ndarray) -> float:
    """``K = tr[T^T sigma_in T Y_m]`` with ``T^T = R^T A_m`` (dense trace)."""
    n = R.shape[0] // 2
    sigma = prepared_input(InputKind.SIGMA_IN, n=n).matrix
    Am = shift_matrix(2 * n)
    Tt = R.T @ Am
    return float(np.real(np.trace(Tt @ sigma @ Tt.T @ _y_m(n))))


# --- oracle circuits ------------------------------------------------------------------------------


def trotter_circuit(chain: XYChain, omegas: np.ndarray, circuit: MatchgateCircuit | None = None) -> MatchgateCircuit:
    """Matchgate circuit of ``prod_l U0 U1 U2`` (U2 of each step acts first)."""
    circuit = MatchgateCircuit(chain.n) if circuit is None else circuit
    jw = chain.is_jw
    for w0, w1, w2 in np.asarray(omegas, dtype=float):
        for kind, w in ((GateKind.YY, w2), (GateKind.XX, w1), (GateKind.Z, w0)):
            if w != 0.0:
                circuit.extend(layer(kind, w, chain.n, jw))
    return circuit


def flip_rotation(n: int) -> np.ndarray:
    """``R_T^(2)``: identity except -1 at 1-based indices n and n+1."""
    d = np.ones(2 * n)
    d[n - 1] = d[n] = -1.0
    return np.diag(d)


def timeevo_circuit(chain: XYChain, schedule: TrotterSchedule, t: float, steps: int) -> MatchgateCircuit:
    """Adiabatic preparation, flip of the two middle spins, then free evolution."""
    c = trotter_circuit(chain, adiabatic_angles(chain, schedule))
    c.append(ParametricGate(GateKind.XX, chain.n // 2, -np.pi))
    return trotter_circuit(chain, evolution_angles(chain, chain.j_max, t, steps), c)


# --- adiabatic sweep --------------------------------------------------------------------------------


def _start_columns(n: int) -> np.ndarray:
    return np.kron(np.eye(n // 2), np.array([[1.0], [1.0j]]) / np.sqrt(2)).astype(complex)


def magnetization_sweep(chain: XYChain, schedule: TrotterSchedule, j_grid, path: str = "m_hat") -> Series:
    """``M(J)`` along an increasing J grid.

    With the ``LofJ`` rule every sweep endpoint is a prefix of the full ramp,
    so the product is extended step by step and never recomputed.
    """
    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}")
    j_grid = np.asarray(j_grid, dtype=float)
    if np.any(j_grid < 0) or np.any(j_grid > chain.j_max * (1 + 1e-12)):
        raise ValueError("J grid must lie in [0, j_max]")
    plan = w_factor_plan(chain) if path == "m_hat" else r_factor_plan(chain)
    fresh = (lambda: _start_columns(chain.n)) if path == "m_hat" else (lambda: np.eye(chain.dim))
    measure = _m_hat_magnetization if path == "m_hat" else magnetization_from_r
    values = []
    if schedule.rule is StepRule.L_OF_J:
        full = adiabatic_angles(chain, schedule)
        state, done = fresh(), 0
        for J in j_grid:
            upto = schedule.steps_for(J, chain.j_max) + 1
            if upto < done:
                raise ValueError("incremental sweeps need a non-decreasing J grid")
            plan.evolve(state, full[done:upto])
            done = upto
            values.append(measure(state))
    else:
        for J in j_grid:
            state = plan.evolve(fresh(), adiabatic_angles(chain, schedule, J))
            values.append(measure(state))
    meta = {"chain": chain.as_dict(), "schedule": schedule.as_dict(), "path": path}
    return Series("J", "M", j_grid, np.array(values), meta)


def _m_hat_magnetization(cols: np.ndarray) -> float:
    n = cols.shape[0]
    a0, a1 = cols[0::2], cols[1::2]
    return float((2.0 / n) * 2.0 * np.imag(np.conj(a0) * a1).sum())


def adiabatic_roundtrip_check(chain: XYChain, schedule: TrotterSchedule, t_grid=None,
                              path: str = "m_hat") -> Series:
    """Ramp J from 0 to J_max and back; ``M`` near 1 certifies adiabaticity.

    The return leg runs the forward steps in reverse order (forward in time),
    so an adiabatic round trip ends in the J = 0 ground state with ``M = 1``.
    """
    times = [schedule.total_time] if t_grid is None else sorted(float(t) for t in t_grid)
    plan = w_factor_plan(chain) if path == "m_hat" else r_factor_plan(chain)
    values = []
    for T in times:
        sched = schedule.with_total_time(T)
        fwd = adiabatic_angles(chain, sched)
        rows = np.concatenate([fwd, fwd[::-1]])
        if path == "m_hat":
            values.append(_m_hat_magnetization(plan.evolve(_start_columns(chain.n), rows)))
        else:
            values.append(magnetization_from_r(plan.evolve(np.eye(chain.dim), rows)))
    meta = {"chain": chain.as_dict(), "schedule": schedule.as_dict(), "path": path}
    return Series("T", "M_return", np.array(times), np.array(values), meta)


# --- quench -----------------------------------------------------------------------------------------


@dataclass
class QuenchResult:
    T2: float
    K: float
    nu: float
    path: str
    trajectory: np.ndarray | None = None  # rows (B, nu) during the field ramp


@dataclass
class KinkStats:
    """Rows ``(T2, K, nu)`` and the fitted exponent of ``nu ~ T2^-p``."""

    T: np.ndarray
    K: np.ndarray
    nu: np.ndarray
    p: float = float("nan")
    p_stderr: float = float("nan")
    window: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.K = np.asarray(self.K, dtype=float)
        self.nu = np.asarray(self.nu, dtype=float)
        if np.any(self.nu < -1e-12) or np.any(self.nu > 1 + 1e-12):
            raise ValueError("kink density outside [0, 1]")


def _check_quench_chain(chain: XYChain, B_max: float) -> XYChain:
    if chain.delta != 0:
        raise ValueError("the quench protocol is defined for the Ising chain (delta = 0)")
    if B_max < 5 * chain.j_max:
        warnings.warn(f"B_max = {B_max} is not much larger than J_max = {chain.j_max}; "
                      "the initial state may be far from the paramagnetic limit", QuenchWarning,
                      stacklevel=3)
    return chain.replace(B=B_max)


def _kink_eval(path: str, state: np.ndarray) -> float:
    return kink_from_w(state) if path == "m_hat" else kink_from_r(state)


def quench_series(chain: XYChain, T1: float, L1: int, t2_grid, l2_rule: str = "2T^2",
                  B_max: float | None = None, path: str = "m_hat",
                  record_every: int = 0) -> list[QuenchResult]:
    """Quench rows for several ``T2``; the adiabatic stage 1 is shared."""
    from .schedule import steps_from_rule

    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}")
    B_max = chain.B if B_max is None else float(B_max)
    chain = _check_quench_chain(chain, B_max)
    plan = w_factor_plan(chain) if path == "m_hat" else r_factor_plan(chain)
    eye = np.eye(chain.n, dtype=complex) if path == "m_hat" else np.eye(chain.dim)
    stage1 = plan.evolve(eye, quench_stage1_angles(chain, T1, L1))
    out = []
    for T2 in t2_grid:
        L2 = steps_from_rule(T2, l2_rule)
        rows = quench_stage2_angles(chain, T2, L2, B_max)
        state = stage1.copy()
        traj = None
        if record_every:
            fields = quench_field_values(B_max, L2)
            traj, done = [], 0
            for stop in list(range(record_every, L2 + 1, record_every)) + [L2 + 1]:
                plan.evolve(state, rows[done:stop])
                done = stop
                traj.append((fields[stop - 1], (1 - _kink_eval(path, state)) / 2))
            traj = np.array(traj)
        else:
            plan.evolve(state, rows)
        K = _kink_eval(path, state)
        out.append(QuenchResult(float(T2), K, (1.0 - K) / 2.0, path, traj))
    return out


def quench_run(chain: XYChain, T1: float, L1: int, T2: float, L2: int, B_max: float | None = None,
               path: str = "m_hat") -> QuenchResult:
    """One quench: adiabatic preparation at ``B_max`` then ``B -> 0`` in time ``T2``."""
    return quench_series(chain, T1, L1, [T2], str(L2), B_max, path)[0]


def kink_scaling_fit(stats: KinkStats | tuple, window=None) -> KinkStats:
    """Least-squares slope ``p`` of ``log nu`` against ``log(1/T2)`` with its standard error."""
    if not isinstance(stats, KinkStats):
        T, nu = stats
        nu = np.asarray(nu, dtype=float)
        stats = KinkStats(T, 1 - 2 * nu, nu)
    T, nu = stats.T, stats.nu
    sel = np.ones(T.size, dtype=bool)
    if window is not None:
        sel = (T >= window[0]) & (T <= window[1])
    if sel.sum() < 4:
        raise ValueError("the scaling fit needs at least 4 points in the window")
    if np.any(nu[sel] <= 0):
        raise ValueError("nonpositive kink density inside the fit window")
    x = np.log(1.0 / T[sel])
    y = np.log(nu[sel])
    X = np.column_stack([x, np.ones_like(x)])
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    dof = x.size - 2
    resid = y - X @ coef
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.inv(X.T @ X)
    stats.p = float(coef[0])
    stats.p_stderr = float(np.sqrt(cov[0, 0]))
    stats.window = (float(T[sel].min()), float(T[sel].max()))
    return stats


# --- time evolution ---------------------------------------------------------------------------------


def _evolution_steps(t: float, dt_max: float) -> int:
    return 0 if t == 0 else max(1, int(math.ceil(t / dt_max - 1e-9)))


def timeevo_profile(chain: XYChain, schedule: TrotterSchedule, t_grid, dt_max: float = 0.05,
                    steps=None) -> np.ndarray:
    """``<Z_k(J, t)>`` for every ``t`` in ``t_grid`` (rows) and spin ``k`` (columns).

    ``J = chain.j_max``.  ``R_T = R^(3) R^(2) R^(1)`` with ``R^(1)`` the adiabatic
    ramp, ``R^(2)`` the flip of the two middle spins and ``R^(3)`` ``L_T``
    identical steps of length ``t / L_T``; ``L_T = ceil(t / dt_max)`` unless
    ``steps`` (one count per t) is given.
    """
    if chain.n < 4 or chain.n % 2:
        raise ValueError("time evolution needs an even n >= 4")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0) or np.any(t_grid < 0):
        raise ValueError("t grid must be nonnegative and increasing")
    plan = r_factor_plan(chain)
    R1 = plan.evolve(np.eye(chain.dim), adiabatic_angles(chain, schedule))
    R21 = flip_rotation(chain.n) @ R1
    out = np.empty((t_grid.size, chain.n))
    for i, t in enumerate(t_grid):
        L_T = _evolution_steps(t, dt_max) if steps is None else int(steps[i])
        R = plan.evolve(R21.copy(), evolution_angles(chain, chain.j_max, t, L_T))
        out[i] = z_profile_from_r(R)
    return out


@dataclass
class PropagationResult:
    speed: float
    fronts: np.ndarray
    flagged: bool  # True when no site ever deviated from the background


def propagation_speed(profiles: np.ndarray, t_grid, threshold: float = 0.01,
                      background: np.ndarray | None = None) -> PropagationResult:
    """Least-squares slope of the signal front against time.

    The front at time t is the largest distance from the flipped pair among
    sites whose ``<Z_k>`` deviates from ``background`` (default: the t = 0
    profile) by more than ``threshold``; the flipped pair has distance 0.
    """
    profiles = np.asarray(profiles, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    n = profiles.shape[1]
    bg = profiles[0] if background is None else np.asarray(background, dtype=float)
    k = np.arange(1, n + 1)
    dist = np.abs(k - (n + 1) / 2.0) - 0.5
    dev = np.abs(profiles - bg) > threshold
    fronts = np.array([dist[row].max() if row.any() else 0.0 for row in dev])
    if not dev.any():
        return PropagationResult(0.0, fronts, True)
    X = np.column_stack([t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(X, fronts, rcond=None)
    return PropagationResult(float(coef[0]), fronts, False)
