"""Exact diagonalization of the XY chain: Bogoliubov modes and dense oracles.

Fermions are ``c_i = prod_{j<i} (-Z_j) a_i`` with ``a = |1><0|``, so an
occupied mode is spin ``|0>`` and ``Z_i = 2 c_i^dag c_i - 1``.  In this gauge
the Jordan-Wigner closed chain is the quadratic form with the wrap-around
elements multiplied by ``(-1)^n`` (periodic fermions for even n).

Parity labels are eigenvalues of ``prod_i Z_i``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np
import scipy.sparse as sp

from .fermion import XYChain

__all__ = [
    "QuadraticForm",
    "quadratic_form",
    "BogoliubovSolution",
    "bogoliubov",
    "ground_magnetization",
    "sector_ground",
    "LabeledSpectrum",
    "spectrum",
    "gap_curves",
    "brute_force_labels",
    "dense_hamiltonian",
    "dense_quadratic_hamiltonian",
    "fermion_operators",
    "momentum_operator",
    "parity_diagonal",
    "reflection_operator",
    "Crossing",
    "sector_crossings",
    "MAX_DENSE_QUBITS",
]

MAX_DENSE_QUBITS = 10
MAX_ENUM_MODES = 20
ZERO_MODE_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticForm:
    """``H = sum c^dag a c + 1/2 (c^dag b c^dag + h.c.) + constant``."""

    a: np.ndarray
    b: np.ndarray
    constant: float

    def __post_init__(self):
        if not np.array_equal(self.a, self.a.T):
            raise ValueError("a must be symmetric")
        if not np.array_equal(self.b, -self.b.T):
            raise ValueError("b must be antisymmetric")

    @property
    def n(self) -> int:
        return self.a.shape[0]


def quadratic_form(chain: XYChain) -> QuadraticForm:
    n, B, J, d = chain.n, chain.B, chain.j_max, chain.delta
    a = np.zeros((n, n))
    b = np.zeros((n, n))
    a[np.arange(n), np.arange(n)] = -2.0 * B
    i = np.arange(n - 1)
    a[i, i + 1] += -J * (1 + d)
    a[i + 1, i] += -J * (1 + d)
    b[i, i + 1] += -J * (1 - d)
    b[i + 1, i] -= -J * (1 - d)
    if chain.is_jw:
        s = 1.0 if n % 2 == 0 else -1.0
        # += so that n = 2 adds the wrap bond on top of the open one
        a[n - 1, 0] += s * -J * (1 + d)
        a[0, n - 1] += s * -J * (1 + d)
        b[n - 1, 0] += s * -J * (1 - d)
        b[0, n - 1] += s * J * (1 - d)
    return QuadraticForm(a, b, B * n)


@dataclass
class BogoliubovSolution:
    """``H = e0 + sum_k lambdas[k] eta_k^dag eta_k`` with ``eta = g c + h c^dag``.

    Modes are sorted by ascending ``lambdas``.  ``e0`` already contains the
    constant of the quadratic form.  ``vacuum_parity`` is the ``prod Z``
    eigenvalue of the eta vacuum.
    """

    lambdas: np.ndarray
    g: np.ndarray
    h: np.ndarray
    e0: float
    constant: float
    vacuum_parity: int
    zero_modes: int = 0
    qf: QuadraticForm | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.lambdas.size

    @property
    def occupied(self) -> np.ndarray:
        return np.flatnonzero(self.lambdas < 0)

    @property
    def ground_energy(self) -> float:
        return float(self.e0 + self.lambdas[self.lambdas < 0].sum())

    @property
    def ground_parity(self) -> int:
        return int(self.vacuum_parity * (-1) ** self.occupied.size)

    def residuals(self) -> tuple[float, float, float]:
        """Max residuals: two mode equations, ``[h g^T, Lambda]``, canonical relations."""
        a, b = self.qf.a, self.qf.b
        L = self.lambdas[:, None]
        r1 = np.abs(self.g @ a - self.h @ b - L * self.g).max()
        r2 = np.abs(self.g @ b - self.h @ a - L * self.h).max()
        hg = self.h @ self.g.T
        r3 = np.abs(hg * (self.lambdas[None, :] - self.lambdas[:, None])).max()
        gh = self.g @ self.h.T
        r4 = max(np.abs(self.g @ self.g.T + self.h @ self.h.T - np.eye(self.n)).max(),
                 np.abs(gh + gh.T).max())
        return float(r1), float(r2), float(r3), float(r4)


def _commutator_flips(g, h, lam) -> np.ndarray:
    """Extra flips so that ``[h g^T, Lambda] = 0``.

    Flipping mode k swaps rows ``g_k, h_k`` and negates ``Lambda_k``.  Each pair
    of modes either must flip together, must flip oppositely, or is free; the
    constraints are two-colored per connected component, and each component
    keeps the orientation closest to the particle-like choice.
    """
    n = lam.size
    # residual of pair (k, l) for flips (fk, fl) relative to the current rows
    scale = max(1.0, np.abs(lam).max())
    dm = np.abs(lam[None, :] - lam[:, None])
    dp = np.abs(lam[None, :] + lam[:, None])
    r00 = np.abs(h @ g.T) * dm
    r01 = np.abs(h @ h.T) * dp
    r10 = np.abs(g @ g.T) * dp
    r11 = np.abs(g @ h.T) * dm
    tol = 1e-9 * scale
    same = np.maximum(r00, r11) < tol
    diff = np.maximum(r01, r10) < tol
    color = -np.ones(n, dtype=int)
    extra = np.zeros(n, dtype=bool)
    for root in range(n):
        if color[root] >= 0:
            continue
        color[root] = 0
        comp, stack = [root], [root]
        while stack:
            k = stack.pop()
            for l in range(n):
                if l == k or (same[k, l] and diff[k, l]):
                    continue
                want = color[k] if same[k, l] else 1 - color[k]
                if not (same[k, l] or diff[k, l]):
                    continue
                if color[l] < 0:
                    color[l] = want
                    comp.append(l)
                    stack.append(l)
        comp = np.array(comp)
        c = color[comp].astype(bool)
        # flip the color-1 set or the color-0 set, whichever disturbs fewer modes
        extra[comp] = c if c.sum() <= (~c).sum() else ~c
    return extra


def bogoliubov(qf: QuadraticForm) -> BogoliubovSolution:
    """Solve ``G (A-B)(A+B) = Lambda^2 G`` with ``H = G (A-B) / Lambda``.

    Because ``A + B = (A - B)^T`` both eigenproblems are the two sides of one
    SVD, ``A - B = G^T |Lambda| H``, which also supplies orthonormal ``G, H``
    for zero modes.  ``(G, H, Lambda)`` and ``(G, -H, -Lambda)`` satisfy the
    mode equations equally well (the second swaps particle and hole).  Signs
    start from ``|g_k| >= |h_k|`` and are then adjusted until
    ``[h g^T, Lambda] = 0``; ``|Lambda| < 1e-12`` counts as a zero mode.
    """
    a, b = qf.a, qf.b
    u, sv, vt = np.linalg.svd(a - b)
    G, H = u.T.copy(), vt.copy()
    lam = sv.copy()
    zero = lam < ZERO_MODE_TOL
    g = (G + H) / 2
    h = (G - H) / 2
    lam[zero] = 0.0
    flip = (np.einsum("ij,ij->i", h, h) > np.einsum("ij,ij->i", g, g)) & ~zero
    for _ in range(2):
        lam[flip] *= -1
        g[flip], h[flip] = h[flip].copy(), g[flip].copy()
        H[flip] *= -1
        flip = _commutator_flips(g, h, lam)
    order = np.argsort(lam, kind="stable")
    lam, g, h, G, H = lam[order], g[order], h[order], G[order], H[order]
    e0 = qf.constant + 0.5 * (np.trace(a) - lam.sum())
    # eta-vacuum parity from the Majorana transform G (+) H; prod Z = (-1)^n e^{i pi N}
    det = np.linalg.det(G) * np.linalg.det(H)
    vac = int(np.sign(det)) * (-1) ** qf.n
    return BogoliubovSolution(lam, g, h, float(e0), float(qf.constant), vac, int(zero.sum()), qf)


def ground_magnetization(sol: BogoliubovSolution, occupied=None) -> float:
    """``M_z = (2/n) sum_i (sum_k h_ki^2 + sum_{k occ} (g_ki^2 - h_ki^2)) - 1``."""
    occ = sol.occupied if occupied is None else np.asarray(occupied, dtype=int)
    n = sol.n
    total = (sol.h ** 2).sum() + (sol.g[occ] ** 2 - sol.h[occ] ** 2).sum()
    return float(2.0 * total / n - 1.0)


def sector_ground(sol: BogoliubovSolution, parity: int) -> tuple[float, np.ndarray]:
    """Lowest energy and occupation among states of the given ``prod Z`` parity."""
    occ = set(sol.occupied.tolist())
    if sol.ground_parity == parity:
        return sol.ground_energy, np.array(sorted(occ), dtype=int)
    k = int(np.argmin(np.abs(sol.lambdas)))
    occ ^= {k}
    return sol.ground_energy + abs(float(sol.lambdas[k])), np.array(sorted(occ), dtype=int)


@dataclass
class LabeledSpectrum:
    energy: np.ndarray
    parity: np.ndarray
    occupation: np.ndarray  # bitmask over modes (Bogoliubov) or -1 (dense)
    momentum: np.ndarray | None = None

    def __post_init__(self):
        order = np.argsort(self.energy, kind="stable")
        self.energy = np.asarray(self.energy, dtype=float)[order]
        self.parity = np.asarray(self.parity, dtype=int)[order]
        self.occupation = np.asarray(self.occupation, dtype=np.int64)[order]
        if self.momentum is not None:
            self.momentum = np.asarray(self.momentum, dtype=float)[order]

    def __len__(self) -> int:
        return self.energy.size

    def rows(self):
        mom = self.momentum if self.momentum is not None else [None] * len(self)
        return list(zip(self.energy.tolist(), self.parity.tolist(), list(mom), self.occupation.tolist()))


def spectrum(sol: BogoliubovSolution, max_levels: int | None = None) -> LabeledSpectrum:
    """All ``E0 + sum_{k in S} Lambda_k``, lowest ``max_levels`` first."""
    n = sol.n
    if max_levels is not None and max_levels > 2 ** n:
        raise ValueError(f"max_levels = {max_levels} exceeds 2^{n}")
    if n > MAX_ENUM_MODES:
        raise ValueError(f"subset enumeration is limited to n <= {MAX_ENUM_MODES}")
    masks = np.arange(2 ** n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    energy = sol.e0 + bits @ sol.lambdas
    count = bits.sum(axis=1)
    parity = sol.vacuum_parity * np.where(count % 2 == 0, 1, -1)
    spec = LabeledSpectrum(energy, parity, masks)
    if max_levels is not None:
        spec = LabeledSpectrum(spec.energy[:max_levels], spec.parity[:max_levels],
                               spec.occupation[:max_levels])
    return spec


def gap_curves(chain: XYChain, j_grid) -> dict:
    """Gaps of the single-particle, single-hole and two-particle excitations vs J."""
    rows = {"J": [], "particle": [], "hole": [], "two_particle": [], "ground_parity": []}
    for J in j_grid:
        sol = bogoliubov(quadratic_form(chain.replace(j_max=float(J))))
        lam = sol.lambdas
        kf = sol.occupied.size  # modes 0..kf-1 are occupied
        rows["J"].append(float(J))
        rows["particle"].append(lam[kf] if kf < lam.size else np.nan)
        rows["hole"].append(-lam[kf - 1] if kf > 0 else np.nan)
        rows["two_particle"].append(lam[kf] + lam[kf + 1] if kf + 1 < lam.size else np.nan)
        rows["ground_parity"].append(sol.ground_parity)
    return {k: np.asarray(v, dtype=float) for k, v in rows.items()}


# --- dense oracles ----------------------------------------------------------------------------------

_I = sp.identity(2, format="csr", dtype=complex)
_X = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
_Y = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))
_Z = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex))
_LOWER = sp.csr_matrix(np.array([[0, 0], [1, 0]], dtype=complex))  # |1><0|


def _check_width(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle is limited to n <= {MAX_DENSE_QUBITS}, got {n}")


def _op(n: int, ops: dict) -> sp.csr_matrix:
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), [ops.get(q, _I) for q in range(1, n + 1)])


@lru_cache(maxsize=16)
def _spin_terms(n: int, jw: bool) -> tuple:
    """``(sum Z, sum XX, sum YY)`` including the closure bonds when ``jw``."""
    z = sum(_op(n, {q: _Z}) for q in range(1, n + 1))
    xx = sum(_op(n, {q: _X, q + 1: _X}) for q in range(1, n))
    yy = sum(_op(n, {q: _Y, q + 1: _Y}) for q in range(1, n))
    if jw:
        Zt = _op(n, {q: _Z for q in range(1, n + 1)})
        xx = xx + _op(n, {n: _X}) @ Zt @ _op(n, {1: _X})
        yy = yy + _op(n, {n: _Y}) @ Zt @ _op(n, {1: _Y})
    return z.tocsr(), xx.tocsr(), yy.tocsr()


def dense_hamiltonian(chain: XYChain) -> np.ndarray:
    """``-B sum Z - J sum (XX + delta YY)``; the JW closure couples X_n Z~ X_1."""
    n = chain.n
    _check_width(n)
    z, xx, yy = _spin_terms(n, chain.is_jw)
    H = -chain.B * z - chain.j_max * (xx + chain.delta * yy)
    return H.toarray()


def fermion_operators(n: int) -> list:
    """Annihilators ``c_i`` as sparse matrices."""
    _check_width(n)
    out = []
    for i in range(1, n + 1):
        ops = {q: -_Z for q in range(1, i)}
        ops[i] = _LOWER
        out.append(_op(n, ops))
    return out


def dense_quadratic_hamiltonian(qf: QuadraticForm) -> np.ndarray:
    n = qf.n
    c = fermion_operators(n)
    cd = [x.conj().T.tocsr() for x in c]
    H = qf.constant * sp.identity(2 ** n, dtype=complex, format="csr")
    for i, j in itertools.product(range(n), range(n)):
        if qf.a[i, j]:
            H = H + qf.a[i, j] * (cd[i] @ c[j])
        if qf.b[i, j]:
            t = 0.5 * qf.b[i, j] * (cd[i] @ cd[j])
            H = H + t + t.conj().T
    return H.toarray()


@lru_cache(maxsize=8)
def _momentum_cached(n: int) -> np.ndarray:
    P = momentum_operator(n)
    P.setflags(write=False)
    return P


def momentum_operator(n: int) -> np.ndarray:
    """``P = -i sum_j (c_j^dag c_{j-1} - c_j^dag c_{j+1})`` on the closed fermion ring.

    The ring closes with ``c_{n+1} = (-1)^n c_1``, matching the gauge of
    :func:`quadratic_form`, so that P commutes with the JW Hamiltonian.
    """
    c = fermion_operators(n)
    s = 1.0 if n % 2 == 0 else -1.0
    cd = [x.conj().T.tocsr() for x in c]

    def cc(k):  # c_k with 0-based k, wrapped
        if k == n:
            return s * c[0]
        if k == -1:
            return s * c[n - 1]
        return c[k]

    P = sp.csr_matrix((2 ** n, 2 ** n), dtype=complex)
    for j in range(n):
        P = P + cd[j] @ cc(j - 1) - cd[j] @ cc(j + 1)
    return (-1j * P).toarray()


def parity_diagonal(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    ones = np.array([bin(i).count("1") for i in idx])
    return np.where(ones % 2 == 0, 1, -1)


def brute_force_labels(chain: XYChain, degeneracy_tol: float = 1e-8) -> LabeledSpectrum:
    """Dense spectrum with ``prod Z`` parity and, for JW chains, momentum labels.

    Inside each degenerate block parity and then momentum are diagonalized,
    so every returned level is a simultaneous eigenstate.
    """
    n = chain.n
    H = dense_hamiltonian(chain)
    E, V = np.linalg.eigh(H)
    par_diag = parity_diagonal(n).astype(float)
    P = _momentum_cached(n) if chain.is_jw else None
    energies, parities, moms = [], [], []
    start = 0
    while start < E.size:
        stop = start + 1
        while stop < E.size and E[stop] - E[stop - 1] < degeneracy_tol:
            stop += 1
        block = V[:, start:stop]
        pb = block.conj().T @ (par_diag[:, None] * block)
        pv, pu = np.linalg.eigh((pb + pb.conj().T) / 2)
        sub = block @ pu
        for sign in (-1, 1):
            sel = np.abs(pv - sign) < 1e-6
            if not sel.any():
                continue
            vecs = sub[:, sel]
            if P is not None:
                pm = vecs.conj().T @ P @ vecs
                mv = np.linalg.eigvalsh((pm + pm.conj().T) / 2)
            else:
                mv = [np.nan] * vecs.shape[1]
            for k in range(vecs.shape[1]):
                energies.append(E[start] if stop - start == 1 else E[start:stop].mean())
                parities.append(sign)
                moms.append(mv[k])
        start = stop
    return LabeledSpectrum(np.array(energies), np.array(parities), -np.ones(len(energies)),
                           np.array(moms) if P is not None else None)


def reflection_operator(n: int) -> np.ndarray:
    """Spin permutation ``k -> n + 1 - k``; commutes with H for both boundaries."""
    _check_width(n)
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    mirrored = (bits * (1 << np.arange(n)[::-1])).sum(axis=1)
    R = np.zeros((2 ** n, 2 ** n))
    R[mirrored, idx] = 1.0
    return R


@dataclass(frozen=True)
class Crossing:
    J: float
    energy: float
    gap: float
    label: tuple  # (parity,) or (parity, momentum) shared by both levels


def _sector_levels(chain: XYChain, J: float) -> dict:
    s = brute_force_labels(chain.replace(j_max=float(J)))
    mom = np.round(s.momentum, 6) if s.momentum is not None else None
    out: dict = {}
    for i, (e, p) in enumerate(zip(s.energy, s.parity)):
        key = (int(p),) if mom is None else (int(p), float(mom[i]) + 0.0)
        out.setdefault(key, []).append(e)
    return {k: np.sort(v) for k, v in out.items()}


def sector_crossings(chain: XYChain, j_grid, tol: float = 1e-6, scan_gap: float = 0.05) -> list[Crossing]:
    """Exact degeneracies between levels carrying the same symmetry label.

    Labels are the parity (open) or parity and momentum (JW) of
    :func:`brute_force_labels`.  Every local minimum of a within-sector gap
    below ``scan_gap`` on ``j_grid`` is refined with a bounded scalar search;
    minima below ``tol`` are reported.
    """
    from scipy.optimize import minimize_scalar

    grid = np.asarray(j_grid, dtype=float)
    levels = [_sector_levels(chain, J) for J in grid]
    keys = sorted(set().union(*levels))
    found = []
    for key in keys:
        sizes = {len(lv.get(key, ())) for lv in levels}
        if len(sizes) != 1:  # a label that appears or vanishes (exact J = 0 degeneracies)
            continue
        for i in range(sizes.pop() - 1):
            gaps = np.array([lv[key][i + 1] - lv[key][i] for lv in levels])

            def gap(J, key=key, i=i):
                lv = _sector_levels(chain, J).get(key)
                return np.inf if lv is None or len(lv) <= i + 1 else lv[i + 1] - lv[i]

            for j in range(1, grid.size - 1):
                if gaps[j] <= gaps[j - 1] and gaps[j] <= gaps[j + 1] and gaps[j] < scan_gap:
                    r = minimize_scalar(gap, bounds=(grid[j - 1], grid[j + 1]), method="bounded",
                                        options={"xatol": 1e-12})
                    if r.fun < tol:
                        e = _sector_levels(chain, r.x)[key][i]
                        found.append(Crossing(float(r.x), float(e), float(r.fun), key))
    return sorted(found, key=lambda c: (c.J, c.energy))
