"""The log(n)-qubit picture: V transform, W factors and the gate-list compiler.

Conjugating the Majorana rotations by the unitary ``V`` makes them block
diagonal, ``R~ = |0><0| (x) W + |1><1| (x) W'``, with ``W`` an ``n x n`` unitary
acting on ``m_hat = log2(n)`` qubits.  All measured quantities of the adiabatic
sweep and the quench only need ``W``.

Conventions
-----------
``v_coefficients(n)`` builds the matrix with the coefficients ``alpha_k, beta_k``; the
block structure appears for ``R~ = v R v^dagger``.  ``VTransform.dense()``
returns ``U = v^dagger`` so that the transform reads ``U^dagger R U``.

Gate lists are in time order (first element acts first).  Qubit 1 is the most
significant bit of an index, qubit ``m_hat`` the least significant.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .fermion import ChainSpec, GeneratorKind, XYChain, rotation
from .kernels import FactorPlan

__all__ = [
    "v_coefficients",
    "VTransform",
    "v_matrix",
    "offblock_residue",
    "shift_matrix",
    "o_gate",
    "phase_gate",
    "d_gate",
    "c_gate",
    "controlled",
    "rotation_hat",
    "w_factor",
    "w_factor_plan",
    "w_of_schedule",
    "WKind",
    "OpKind",
    "CompressedGate",
    "CompressedGateList",
    "compile_step",
    "shift_ladder",
    "elementary_cost",
    "InputKind",
    "PreparedInput",
    "prepared_input",
    "kink_observable",
    "magnetization_from_w",
    "kink_from_w",
]

_Y = np.array([[0, -1j], [1j, 0]])
_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PLUS_Y = np.array([1.0, 1.0j]) / np.sqrt(2)
_MINUS_Y = np.array([1.0, -1.0j]) / np.sqrt(2)


def _check_pow2(n: int) -> int:
    if n < 4 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 4, got {n}")
    return n.bit_length() - 1


# --- V transform -----------------------------------------------------------------------


def v_coefficients(n: int) -> np.ndarray:
    """``v = sum_k alpha_k |k><k| + beta_k |2n+1-k><k|`` over ``k = 1..2n``."""
    _check_pow2(n)
    d = 2 * n
    k = np.arange(1, d + 1)
    alpha = np.where(k <= n, (-1.0) ** (k + 1), -1j)
    beta = np.where(k <= n, (-1.0) ** k, -1j)
    v = np.zeros((d, d), dtype=complex)
    v[k - 1, k - 1] += alpha
    v[d - k, k - 1] += beta
    return v / np.sqrt(2)


@dataclass(frozen=True)
class VTransform:
    n: int
    alpha: np.ndarray
    beta: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.n

    def dense(self) -> np.ndarray:
        """``U`` with ``U^dagger R U`` block diagonal."""
        return v_coefficients(self.n).conj().T

    def conjugate(self, op: np.ndarray) -> np.ndarray:
        U = self.dense()
        return U.conj().T @ op @ U

    def blocks(self, op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Upper (qubit 1 in |0>) and lower diagonal blocks of the transformed ``op``."""
        t = self.conjugate(op)
        n = self.n
        return t[:n, :n], t[n:, n:]


def v_matrix(n: int) -> VTransform:
    _check_pow2(n)
    k = np.arange(1, 2 * n + 1)
    alpha = np.where(k <= n, (-1.0) ** (k + 1), -1j) / np.sqrt(2)
    beta = np.where(k <= n, (-1.0) ** k, -1j) / np.sqrt(2)
    vt = VTransform(n, alpha, beta)
    U = vt.dense()
    err = np.abs(U.conj().T @ U - np.eye(2 * n)).max()
    if err > 1e-12:
        raise ArithmeticError(f"V is not unitary (err {err:.3g})")
    return vt


def offblock_residue(vt: VTransform, op: np.ndarray) -> float:
    t = vt.conjugate(op)
    n = vt.n
    return float(max(np.abs(t[:n, n:]).max(), np.abs(t[n:, :n]).max()))


# --- small gates and embeddings -----------------------------------------------------------


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift ``A|k> = |k+1>``, ``A|n> = |1>``."""
    A = np.zeros((n, n))
    A[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return A


def o_gate(angle: float) -> np.ndarray:
    """``O(w) = exp(i w Y) = [[cos w, sin w], [-sin w, cos w]]``."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def phase_gate(angle: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * angle)])


def c_gate(angle: float) -> np.ndarray:
    """``C(w) = e^{iw} O(w)^T`` (JW closure of the XX layer)."""
    return np.exp(1j * angle) * o_gate(angle).T


def d_gate(angle: float) -> np.ndarray:
    """Two-qubit ``D(w)`` rotating |00>, |11> (JW closure of the YY layer)."""
    e = np.exp(1j * angle)
    D = np.eye(4, dtype=complex)
    D[0, 0] = D[3, 3] = e * np.cos(angle)
    D[0, 3] = e * np.sin(angle)
    D[3, 0] = -e * np.sin(angle)
    return D


def controlled(op: np.ndarray, controls, targets, width: int) -> np.ndarray:
    """Dense ``op`` on ``targets`` conditioned on every control qubit being |1>."""
    controls = tuple(controls)
    targets = tuple(targets)
    if set(controls) & set(targets):
        raise ValueError("control and target qubits overlap")
    op = np.asarray(op, dtype=complex)
    if op.shape != (2 ** len(targets),) * 2:
        raise ValueError("operator size does not match the number of targets")
    dim = 2 ** width
    idx = np.arange(dim)
    bit = lambda q: (idx >> (width - q)) & 1
    active = np.ones(dim, dtype=bool)
    for q in controls:
        active &= bit(q) == 1
    sub = np.zeros(dim, dtype=int)
    for q in targets:
        sub = 2 * sub + bit(q)
    # index with the target bits cleared
    base = idx.copy()
    for q in targets:
        base &= ~(1 << (width - q))
    M = np.eye(dim, dtype=complex)
    rows = np.flatnonzero(active)
    for r in rows:
        M[r, r] = 0.0
    for c in rows:
        for a in range(op.shape[0]):
            r = base[c]
            for pos, q in enumerate(targets):
                if (a >> (len(targets) - 1 - pos)) & 1:
                    r |= 1 << (width - q)
            M[r, c] += op[a, sub[c]]
    return M


# --- W factors --------------------------------------------------------------------------------


class WKind(str, enum.Enum):
    W0 = "W0"
    W1 = "W1"
    W2 = "W2"


_W_TO_H = {WKind.W0: GeneratorKind.H0, WKind.W1: GeneratorKind.H1, WKind.W2: GeneratorKind.H2}


def _half_chain(chain: XYChain) -> XYChain:
    return XYChain(chain.n // 2, chain.B, chain.j_max, chain.delta, chain.boundary)


def rotation_hat(kind, angle: float, chain: XYChain) -> np.ndarray:
    """``R^{m_hat}_kind``: the same rotation on a chain of ``n/2`` spins (dimension n)."""
    return rotation(kind, angle, _half_chain(chain)).dense()


def w_factor(kind: WKind | str, angle: float, chain: ChainSpec) -> np.ndarray:
    """Closed form of the upper block of ``U^dagger R_kind(angle) U``.

    W0 = R0^T, W1 = T1 R1^T, W2 = T2 R2^T with the ``R`` of the half chain.  For
    open chains T1 (T2) puts a phase ``e^{iw}`` on index n (n-1); for the JW
    closure T1 = A Lambda(C) A^T and T2 = A^2 Lambda(D) A^T^2.
    """
    kind = WKind(kind)
    n = chain.n
    mh = _check_pow2(n)
    Rt = rotation_hat(_W_TO_H[kind], angle, chain).T.astype(complex)
    if kind is WKind.W0:
        return Rt
    A = shift_matrix(n)
    if kind is WKind.W1:
        if chain.is_jw:
            T = A @ controlled(c_gate(angle), range(1, mh), (mh,), mh) @ A.T
        else:
            T = np.eye(n, dtype=complex)
            T[n - 1, n - 1] = np.exp(1j * angle)
        return T @ Rt
    if chain.is_jw:
        A2 = A @ A
        T = A2 @ controlled(d_gate(angle), range(1, mh - 1), (mh - 1, mh), mh) @ A2.T
    else:
        T = np.eye(n, dtype=complex)
        T[n - 2, n - 2] = np.exp(1j * angle)
    return T @ Rt


def w_factor_plan(chain: XYChain) -> FactorPlan:
    """Sparse plan of one step ``W0 W1 W2`` with angles ``(w0, w1, w2)``.

    Each W factor is a direct sum of plane rotations and single-index phases
    ``e^{iw}``: the transposed half-chain rotation plus the T phases, which
    for both boundaries land on indices left untouched by the planes.
    """
    n = chain.n
    half = _half_chain(chain)
    factors = []
    for kind in WKind:
        rot = rotation(_W_TO_H[kind], 1.0, half)
        # transpose flips the sign of s; s = sign * sin(w)
        sign = -rot.s / np.sin(1.0)
        planes = [(int(i), int(j), float(sg)) for i, j, sg in zip(rot.i, rot.j, sign)]
        if kind is WKind.W0:
            diags = []
        elif kind is WKind.W1:
            diags = [(n - 1, 1.0)] + ([(0, 1.0)] if chain.is_jw else [])
        else:
            diags = [(n - 2, 1.0)] + ([(1, 1.0)] if chain.is_jw else [])
        if chain.is_jw and kind is not WKind.W0:
            # the wrap plane of the half chain is replaced by the two phases
            wrap = {(n - 1, 0), (n - 2, 1)}
            planes = [p for p in planes if (p[0], p[1]) not in wrap]
        factors.append((planes, diags))
    return FactorPlan(factors)


def w_of_schedule(chain: XYChain, omegas: np.ndarray, initial: np.ndarray | None = None) -> np.ndarray:
    """``prod_l W0(w0_l) W1(w1_l) W2(w2_l)`` with later steps on the left.

    ``omegas`` has one row ``(w0, w1, w2)`` per step.  ``initial`` (default the
    identity) is left-multiplied in place of a fresh identity, so products can
    be extended step by step.
    """
    n = chain.n
    M = np.eye(n, dtype=complex) if initial is None else np.array(initial, dtype=complex)
    return w_factor_plan(chain).evolve(M, np.asarray(omegas, dtype=float))


# --- observables in the compressed picture ------------------------------------------------


def kink_observable(n: int) -> np.ndarray:
    """``O = |n><n|/2 + i h1`` of the open half chain (upper block of ``-V i h1 V^dagger``)."""
    from .fermion import build_generator

    h1 = build_generator(GeneratorKind.H1, XYChain(n // 2)).dense()
    O = 1j * h1.astype(complex)
    O[n - 1, n - 1] += 0.5
    return O


def _y_last(psi: np.ndarray) -> np.ndarray:
    """``<psi|Y_last|psi>`` for each column of ``psi``."""
    a0 = psi[0::2]
    a1 = psi[1::2]
    return 2.0 * np.imag(np.conj(a0) * a1).sum(axis=0)


def magnetization_from_w(W: np.ndarray) -> float:
    """``tr[W rho W^dagger Y]`` with ``rho = (2/n) 1 (x) |+y><+y|``."""
    n = W.shape[0]
    cols = np.kron(np.eye(n // 2), _PLUS_Y.reshape(2, 1))
    return float((2.0 / n) * _y_last(W @ cols).sum())


def kink_from_w(W: np.ndarray) -> float:
    """``K = -tr[W^dagger A zeta A^T W Y]``."""
    n = W.shape[0]
    zeta = prepared_input(InputKind.ZETA_IN, n=n).matrix
    A = shift_matrix(n)
    chi = A @ zeta @ A.T
    Ym = np.kron(np.eye(n // 2), _Y)
    return float(-np.real(np.trace(W.conj().T @ chi @ W @ Ym)))


# --- prepared inputs ------------------------------------------------------------------------


class InputKind(str, enum.Enum):
    RHO_IN = "rho_in"  # m qubits
    RHO_IN_HAT = "rho_in_hat"  # m_hat qubits
    SIGMA_IN = "sigma_in"  # m qubits
    XI_IN = "xi_in"  # m qubits
    ZETA_IN = "zeta_in"  # m_hat qubits
    CHI_IN = "chi_in"  # m_hat qubits
    RHO_IN_K = "rho_in_k"  # m qubits, needs k


@dataclass(frozen=True)
class PreparedInput:
    kind: InputKind
    matrix: np.ndarray

    def __post_init__(self):
        rho = self.matrix
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValueError("density matrix is not positive semidefinite")

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.matrix.shape[0]))


def prepared_input(kind: InputKind | str, chain: XYChain | None = None, k: int | None = None,
                   n: int | None = None) -> PreparedInput:
    """Dense input states of the compressed circuits.

    ``n`` is the number of spins (taken from ``chain`` if given).  States on
    ``m`` qubits have dimension 2n, those on ``m_hat`` qubits dimension n.
    """
    kind = InputKind(kind)
    if n is None:
        if chain is None:
            raise ValueError("need a chain or n")
        n = chain.n
    _check_pow2(n)
    py = np.outer(_PLUS_Y, _PLUS_Y.conj())
    my = np.outer(_MINUS_Y, _MINUS_Y.conj())
    if kind is InputKind.RHO_IN:
        rho = np.kron(np.eye(n) / n, py)
    elif kind is InputKind.RHO_IN_HAT:
        rho = np.kron(np.eye(n // 2) * (2.0 / n), py)
    elif kind is InputKind.SIGMA_IN:
        P = np.eye(n)
        P[n - 1, n - 1] = 0.0
        rho = np.kron(P / (n - 1), py)
    elif kind is InputKind.XI_IN:
        Am = shift_matrix(2 * n)
        rho = Am @ prepared_input(InputKind.SIGMA_IN, n=n).matrix @ Am.T
    elif kind is InputKind.ZETA_IN:
        P = np.zeros((n // 2, n // 2))
        P[np.arange(n // 2 - 1), np.arange(n // 2 - 1)] = 2.0
        rho = np.kron(P, my)
        last = np.zeros((n // 2, n // 2))
        last[-1, -1] = 1.0
        rho = (rho + np.kron(last, np.diag([0.0, 1.0]))) / (n - 1)
    elif kind is InputKind.CHI_IN:
        rho = (np.eye(n) - 2 * kink_observable(n)) / (n - 1)
    else:
        if k is None:
            raise ValueError("rho_in_k needs the spin index k")
        if not 1 <= k <= n:
            raise IndexError(f"k = {k} outside 1..{n}")
        e = np.zeros((n, n))
        e[k - 1, k - 1] = 1.0
        rho = np.kron(e, py)
    return PreparedInput(kind, np.asarray(rho, dtype=complex))


# --- gate lists -------------------------------------------------------------------------------


class OpKind(str, enum.Enum):
    O = "O"
    OT = "OT"
    X = "X"
    PHASE = "Phase"
    C = "C"
    D = "D"
    SHIFT = "Shift"
    SHIFT_INV = "ShiftInverse"


@dataclass(frozen=True)
class CompressedGate:
    """One gate: ``op`` on ``targets`` controlled by ``controls`` (all on |1>).

    ``Shift``/``ShiftInverse`` act on the whole register and take no targets.
    """

    op: OpKind
    targets: tuple = ()
    controls: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "op", OpKind(self.op))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    def matrix(self) -> np.ndarray:
        op, p = self.op, self.params
        if op is OpKind.O:
            return o_gate(p[0])
        if op is OpKind.OT:
            return o_gate(p[0]).T
        if op is OpKind.X:
            return _X
        if op is OpKind.PHASE:
            return phase_gate(p[0])
        if op is OpKind.C:
            return c_gate(p[0])
        if op is OpKind.D:
            return d_gate(p[0])
        raise ValueError(f"{op.value} has no local matrix")

    def dense(self, width: int) -> np.ndarray:
        if self.op is OpKind.SHIFT:
            return shift_matrix(2 ** width).astype(complex)
        if self.op is OpKind.SHIFT_INV:
            return shift_matrix(2 ** width).T.astype(complex)
        return controlled(self.matrix(), self.controls, self.targets, width)

    def as_dict(self) -> dict:
        return {"kind": self.op.value, "controls": list(self.controls),
                "targets": list(self.targets), "params": list(self.params)}


def elementary_cost(n_controls: int, n_targets: int = 1) -> int:
    """Elementary gates charged for one gate with ``r`` controls.

    Linear model ``(2r + 1)`` per target qubit: an uncontrolled single-qubit
    gate costs 1 and every control adds two two-qubit gates.  Under this
    model the shift ladder costs exactly ``m_hat^2``.
    """
    return (2 * int(n_controls) + 1) * int(n_targets)


def shift_ladder(width: int) -> list[CompressedGate]:
    """``A = X_m [Lambda^(m) X_{m-1}] ... [Lambda^(m..2) X_1]`` in time order."""
    gates = []
    for t in range(1, width + 1):
        gates.append(CompressedGate(OpKind.X, (t,), tuple(range(width, t, -1))))
    return gates


@dataclass
class CompressedGateList:
    width: int
    gates: list = field(default_factory=list)

    def dense(self) -> np.ndarray:
        M = np.eye(2 ** self.width, dtype=complex)
        for g in self.gates:
            M = g.dense(self.width) @ M
        return M

    def expand_shifts(self) -> "CompressedGateList":
        out = []
        for g in self.gates:
            if g.op is OpKind.SHIFT:
                out.extend(shift_ladder(self.width))
            elif g.op is OpKind.SHIFT_INV:
                out.extend(reversed(shift_ladder(self.width)))
            else:
                out.append(g)
        return CompressedGateList(self.width, out)

    def elementary_count(self) -> int:
        total = 0
        for g in self.expand_shifts().gates:
            total += elementary_cost(len(g.controls), len(g.targets))
        return total

    def to_json(self) -> str:
        return json.dumps({"width": self.width, "gates": [g.as_dict() for g in self.gates]}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CompressedGateList":
        doc = json.loads(text)
        gates = [CompressedGate(g["kind"], g.get("targets", ()), g.get("controls", ()),
                                g.get("params", ())) for g in doc["gates"]]
        return cls(int(doc["width"]), gates)

    def __len__(self) -> int:
        return len(self.gates)


def _factor_gates(kind: WKind, angle: float, chain: XYChain, mh: int) -> list[CompressedGate]:
    ctrl_all = tuple(range(1, mh))
    S, Si = CompressedGate(OpKind.SHIFT), CompressedGate(OpKind.SHIFT_INV)
    O = CompressedGate(OpKind.O, (mh,), (), (angle,))
    OT = CompressedGate(OpKind.OT, (mh,), (), (angle,))
    Xm = CompressedGate(OpKind.X, (mh,))
    B = CompressedGate(OpKind.OT, (mh,), ctrl_all, (angle,))
    BT = CompressedGate(OpKind.O, (mh,), ctrl_all, (angle,))
    if kind is WKind.W0:
        return [O]
    if kind is WKind.W1:
        if chain.is_jw:
            # T1 R1^T with R1^T = A^T O A and T1 = A Lambda(C) A^T
            return [S, O, Si, Si, CompressedGate(OpKind.C, (mh,), ctrl_all, (angle,)), S]
        # T1 R1^T with R1^T = A O B A^T and T1 = Lambda(Phase) on |1...1>
        return [Si, B, O, S, CompressedGate(OpKind.PHASE, (mh,), ctrl_all, (angle,))]
    if chain.is_jw:
        # T2 R2^T with R2^T = X A^T O^T A X and T2 = A^2 Lambda(D) A^T^2
        D = CompressedGate(OpKind.D, (mh - 1, mh), tuple(range(1, mh - 1)), (angle,))
        return [Xm, S, OT, Si, Xm, Si, Si, D, S, S]
    # T2 R2^T with R2^T = X A B^T O^T A^T X and T2 = phase on |1...10>
    phase = CompressedGate(OpKind.PHASE, (mh,), ctrl_all, (angle,))
    return [Xm, Si, OT, BT, S, Xm, Xm, phase, Xm]


def compile_step(chain: ChainSpec, w0: float, w1: float, w2: float) -> CompressedGateList:
    """Gate list of one Trotter step ``W0(w0) W1(w1) W2(w2)`` (W2 acts first)."""
    mh = _check_pow2(chain.n)
    gates = []
    for kind, angle in ((WKind.W2, w2), (WKind.W1, w1), (WKind.W0, w0)):
        gates.extend(_factor_gates(kind, angle, chain, mh))
    return CompressedGateList(mh, gates)


def _dense_step(chain: ChainSpec, w0: float, w1: float, w2: float) -> np.ndarray:
    return reduce(np.matmul, [w_factor(WKind.W0, w0, chain), w_factor(WKind.W1, w1, chain),
                              w_factor(WKind.W2, w2, chain)])
