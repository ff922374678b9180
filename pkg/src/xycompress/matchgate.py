"""Matchgate circuits: a brute-force statevector oracle and the R/S simulation.

Qubit 1 is the most significant bit of a statevector index.  Parametric gates
are ``exp(-i w P / 2)`` with ``P`` one of ``Z_j``, ``X_j X_j+1``, ``Y_j Y_j+1``;
site ``j = n`` of the two-qubit kinds is the Jordan-Wigner closure
``X_n Z~ X_1`` (resp. ``Y_n Z~ Y_1``) with ``Z~`` the product of all ``Z``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .fermion import PlaneRotationSet

__all__ = [
    "ATOL_EQUIV",
    "ATOL_ALGEBRA",
    "MAX_ORACLE_QUBITS",
    "GateKind",
    "ParametricGate",
    "RawGate",
    "MatchgateCircuit",
    "MatchgateDiagnostics",
    "StateVector",
    "validate_matchgate",
    "gate_matrix",
    "gate_rotation",
    "layer",
    "random_parametric_circuit",
    "basis_state",
    "statevector_run",
    "expect_observable_statevector",
    "r_of_circuit",
    "s_matrix",
    "expect_z_via_r",
    "expect_xx_via_r",
    "CompressedCircuitDescription",
    "compress_generic",
]

ATOL_EQUIV = 1e-10
ATOL_ALGEBRA = 1e-12
MAX_ORACLE_QUBITS = 12

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class GateKind(str, enum.Enum):
    Z = "Z"
    XX = "XX"
    YY = "YY"


@dataclass(frozen=True)
class ParametricGate:
    kind: GateKind
    site: int  # 1-based
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))


@dataclass(frozen=True)
class RawGate:
    site: int  # acts on (site, site + 1)
    matrix: np.ndarray


Gate = Union[ParametricGate, RawGate]


@dataclass
class MatchgateCircuit:
    """Nearest-neighbour matchgate circuit; ``gates`` are in time order."""

    n: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if isinstance(g, ParametricGate):
            # two-qubit kinds at site n are the JW closure
            if not 1 <= g.site <= self.n:
                raise ValueError(f"gate site {g.site} outside 1..{self.n}")
        elif isinstance(g, RawGate):
            if not 1 <= g.site <= self.n - 1:
                raise ValueError("raw gates act on (j, j+1) with j < n")
            diag = validate_matchgate(g.matrix)
            if not diag.ok:
                raise ValueError("raw gate is not a matchgate: " + "; ".join(diag.reasons))
        else:
            raise TypeError(f"unsupported gate {g!r}")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def is_parametric(self) -> bool:
        return all(isinstance(g, ParametricGate) for g in self.gates)


@dataclass(frozen=True)
class MatchgateDiagnostics:
    ok: bool
    reasons: tuple
    det_a: complex
    det_b: complex

    def __bool__(self) -> bool:
        return self.ok


def validate_matchgate(gate: np.ndarray, atol: float = ATOL_EQUIV) -> MatchgateDiagnostics:
    """Check the G(A, B) pattern: A on {|00>, |11>}, B on {|01>, |10>}, det A = det B."""
    G = np.asarray(gate, dtype=complex)
    reasons = []
    if G.shape != (4, 4):
        return MatchgateDiagnostics(False, (f"shape {G.shape} is not 4x4",), np.nan, np.nan)
    mask = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool)
    leak = np.abs(G[~mask]).max()
    if leak > atol:
        reasons.append(f"entries outside the matchgate pattern (max {leak:.3g})")
    A = G[np.ix_([0, 3], [0, 3])]
    B = G[np.ix_([1, 2], [1, 2])]
    for name, block in (("A", A), ("B", B)):
        err = np.abs(block.conj().T @ block - np.eye(2)).max()
        if err > atol:
            reasons.append(f"{name} not unitary (err {err:.3g})")
    det_a, det_b = np.linalg.det(A), np.linalg.det(B)
    if abs(det_a - det_b) > atol:
        reasons.append(f"det A = {det_a:.6g} differs from det B = {det_b:.6g}")
    return MatchgateDiagnostics(not reasons, tuple(reasons), complex(det_a), complex(det_b))


def gate_matrix(gate: ParametricGate) -> np.ndarray:
    """4x4 matrix on qubits (site, site+1); Z gates act trivially on site+1."""
    c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
    if gate.kind is GateKind.Z:
        P = np.kron(_Z, np.eye(2))
    elif gate.kind is GateKind.XX:
        P = np.kron(_X, _X)
    else:
        P = np.kron(_Y, _Y)
    return c * np.eye(4) - 1j * s * P


# --- statevector oracle --------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n > MAX_ORACLE_QUBITS:
            raise ValueError(f"statevector oracle is capped at {MAX_ORACLE_QUBITS} qubits")
        if self.amplitudes.shape != (2 ** self.n,):
            raise ValueError("amplitude vector has the wrong length")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _bits(input_bits, n: int | None = None) -> np.ndarray:
    if isinstance(input_bits, str):
        bits = np.array([int(b) for b in input_bits.strip()], dtype=int)
    else:
        bits = np.asarray(input_bits, dtype=int).ravel()
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError(f"input must be a bitstring, got {input_bits!r}")
    if n is not None and bits.size != n:
        raise ValueError(f"expected {n} input bits, got {bits.size}")
    return bits


def basis_state(input_bits) -> StateVector:
    bits = _bits(input_bits)
    n = bits.size
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"statevector oracle is capped at {MAX_ORACLE_QUBITS} qubits")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[int("".join(map(str, bits)), 2) if n else 0] = 1.0
    return StateVector(n, psi)


def _apply_pauli(psi: np.ndarray, n: int, qubit: int, op: str) -> np.ndarray:
    t = psi.reshape((2,) * n)
    ax = qubit - 1
    if op == "X":
        t = np.flip(t, axis=ax)
    elif op == "Y":
        t = np.flip(t, axis=ax) * np.array([-1j, 1j]).reshape([2 if a == ax else 1 for a in range(n)])
    elif op == "Z":
        t = t * np.array([1.0, -1.0]).reshape([2 if a == ax else 1 for a in range(n)])
    else:
        raise ValueError(op)
    return t.reshape(-1)


def _pauli_string(kind: GateKind, site: int, n: int) -> list[tuple[int, str]]:
    """Operator product (leftmost first) generating a parametric gate."""
    if kind is GateKind.Z:
        return [(site, "Z")]
    p = "X" if kind is GateKind.XX else "Y"
    if site < n:
        return [(site, p), (site + 1, p)]
    return [(n, p)] + [(q, "Z") for q in range(1, n + 1)] + [(1, p)]


def _apply_string(psi: np.ndarray, n: int, ops) -> np.ndarray:
    for q, op in reversed(ops):
        psi = _apply_pauli(psi, n, q, op)
    return psi


def statevector_run(circuit: MatchgateCircuit, input_bits) -> StateVector:
    """Exact dense evolution of a computational basis state."""
    n = circuit.n
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"circuit width {n} exceeds the oracle cap of {MAX_ORACLE_QUBITS}")
    psi = basis_state(_bits(input_bits, n)).amplitudes
    for g in circuit.gates:
        if isinstance(g, ParametricGate):
            Ppsi = _apply_string(psi, n, _pauli_string(g.kind, g.site, n))
            psi = np.cos(g.angle / 2) * psi - 1j * np.sin(g.angle / 2) * Ppsi
        else:
            t = psi.reshape(2 ** (g.site - 1), 4, 2 ** (n - g.site - 1))
            psi = np.einsum("ab,ibj->iaj", np.asarray(g.matrix, dtype=complex), t).reshape(-1)
    return StateVector(n, psi)


def expect_observable_statevector(state: StateVector, obs: str, k: int) -> float:
    """``<psi| O |psi>`` for ``O = Z_k`` (``obs="Z"``) or ``X_k X_k+1`` (``obs="XX"``)."""
    n = state.n
    if obs == "Z":
        if not 1 <= k <= n:
            raise IndexError(f"qubit {k} out of range 1..{n}")
        ops = [(k, "Z")]
    elif obs == "XX":
        if not 1 <= k <= n - 1:
            raise IndexError(f"bond {k} out of range 1..{n - 1}")
        ops = [(k, "X"), (k + 1, "X")]
    else:
        raise ValueError(f"unsupported observable {obs!r}")
    psi = state.amplitudes
    val = np.vdot(psi, _apply_string(psi, n, ops))
    if abs(val.imag) > ATOL_ALGEBRA * 10:
        raise ArithmeticError(f"expectation of a hermitian observable has imaginary part {val.imag}")
    return float(val.real)


# --- Clifford-algebra simulation -----------------------------------------------------------


def gate_rotation(gate: ParametricGate, n: int) -> PlaneRotationSet:
    """Single-plane rotation ``exp(2 w h_gate)`` of one parametric gate."""
    j = gate.site
    if gate.kind is GateKind.Z:
        a, b, h = 2 * j - 2, 2 * j - 1, -0.5
    elif gate.kind is GateKind.XX:
        a, b, h = (2 * j - 1, 2 * j, -0.5) if j < n else (2 * n - 1, 0, -0.5)
    else:
        a, b, h = (2 * j - 2, 2 * j + 1, 0.5) if j < n else (2 * n - 2, 1, 0.5)
    return PlaneRotationSet(2 * n, [a], [b], [np.cos(gate.angle)], [-2 * h * np.sin(gate.angle)])


def layer(kind: GateKind | str, angle: float, n: int, jw: bool = False) -> list[ParametricGate]:
    """Gates of ``U_kind(angle) = exp(-i angle H_kind / 2)`` (they commute)."""
    kind = GateKind(kind)
    if kind is GateKind.Z:
        sites = range(1, n + 1)
    else:
        sites = range(1, n + 1 if jw else n)
    return [ParametricGate(kind, j, angle) for j in sites]


def random_parametric_circuit(n: int, n_gates: int, rng: np.random.Generator,
                              jw: bool = False) -> MatchgateCircuit:
    top = n if jw else n - 1
    gates = []
    for _ in range(n_gates):
        kind = GateKind(rng.choice(["Z", "XX", "YY"]))
        site = int(rng.integers(1, (n if kind is GateKind.Z else top) + 1))
        gates.append(ParametricGate(kind, site, float(rng.uniform(-np.pi, np.pi))))
    return MatchgateCircuit(n, gates)


def r_of_circuit(circuit: MatchgateCircuit) -> np.ndarray:
    """``R = R_N ... R_1`` for a parametric circuit, one plane per gate."""
    n = circuit.n
    R = np.eye(2 * n)
    for g in circuit.gates:
        if not isinstance(g, ParametricGate):
            raise ValueError("raw gates must be decomposed into parametric gates before simulation")
        g_rot = gate_rotation(g, n)
        R = g_rot.apply_left(R)
    return R


def s_matrix(input_bits) -> np.ndarray:
    """``S_jl = <x| -i c_j c_l |x>``: blocks ``(-1)^x_k iY`` on pairs (2k-1, 2k)."""
    bits = _bits(input_bits)
    n = bits.size
    S = np.zeros((2 * n, 2 * n))
    sign = 1.0 - 2.0 * bits
    S[2 * np.arange(n), 2 * np.arange(n) + 1] = sign
    S[2 * np.arange(n) + 1, 2 * np.arange(n)] = -sign
    return S


def _bilinear(R: np.ndarray, S: np.ndarray, a: int, b: int) -> float:
    # [R S R^T]_{ab} from two rows, O(dim^2)
    return float(R[a] @ (S @ R[b]))


def expect_z_via_r(R: np.ndarray, S: np.ndarray, k: int) -> float:
    """``<Z_k> = [R S R^T]_{2k-1, 2k}``."""
    if R.shape != S.shape:
        raise ValueError("R and S must have equal dimensions")
    n = R.shape[0] // 2
    if not 1 <= k <= n:
        raise IndexError(f"qubit {k} out of range 1..{n}")
    return _bilinear(R, S, 2 * k - 2, 2 * k - 1)


def expect_xx_via_r(R: np.ndarray, S: np.ndarray, k: int) -> float:
    """``<X_k X_k+1> = [R S R^T]_{2k, 2k+1}``."""
    if R.shape != S.shape:
        raise ValueError("R and S must have equal dimensions")
    n = R.shape[0] // 2
    if not 1 <= k <= n - 1:
        raise IndexError(f"bond {k} out of range 1..{n - 1}")
    return _bilinear(R, S, 2 * k - 1, 2 * k)


@dataclass
class CompressedCircuitDescription:
    """Controlled-U circuit on a control qubit plus ``log2(n) + 1`` data qubits.

    The control starts in ``|+>`` and the data register in ``|0...0>``; the
    readout is ``X`` on the control (qubit 1), whose mean is ``Re U[0, 0]``.
    ``sign`` is ``(-1)^x_1`` of the simulated input so that
    ``sign * <X_1> = <Z_1>`` of the matchgate circuit.
    """

    data_qubits: int
    u_matrix: np.ndarray
    sign: float = 1.0
    verification: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.data_qubits + 1

    def expect_x1(self) -> float:
        return float(np.real(self.u_matrix[0, 0]))

    def to_json(self) -> str:
        u = np.asarray(self.u_matrix, dtype=complex)
        flat = np.stack([u.real, u.imag], axis=-1).reshape(-1)
        doc = {
            "width": self.width,
            "data_qubits": self.data_qubits,
            "input": {"control": "+", "data": "0" * self.data_qubits},
            "u_matrix": {"rows": u.shape[0], "cols": u.shape[1], "re_im": flat.tolist()},
            "measurement": {"observable": "X", "qubit": 1},
            "sign": self.sign,
            "verification": self.verification,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CompressedCircuitDescription":
        doc = json.loads(text)
        um = doc["u_matrix"]
        flat = np.asarray(um["re_im"], dtype=float).reshape(um["rows"], um["cols"], 2)
        u = flat[..., 0] + 1j * flat[..., 1]
        if doc["width"] != doc["data_qubits"] + 1:
            raise ValueError("width must equal data_qubits + 1")
        return cls(doc["data_qubits"], u, float(doc.get("sign", 1.0)), doc.get("verification", {}))


def compress_generic(circuit: MatchgateCircuit, input_bits) -> CompressedCircuitDescription:
    """Emit the ``Lambda U`` description with ``U = S^-1 R S R^T``."""
    bits = _bits(input_bits, circuit.n)
    R = r_of_circuit(circuit)
    orth = np.abs(R @ R.T - np.eye(R.shape[0])).max()
    if orth > ATOL_EQUIV:
        raise ArithmeticError(f"accumulated R is not orthogonal (err {orth:.3g})")
    S = s_matrix(bits)
    U = np.linalg.solve(S, R @ S @ R.T)
    m = int(np.log2(2 * circuit.n))
    if 2 ** m != 2 * circuit.n:
        # pad the 2n-dimensional mode space to a qubit register
        m = int(np.ceil(np.log2(2 * circuit.n)))
        Up = np.eye(2 ** m)
        Up[: U.shape[0], : U.shape[1]] = U
        U = Up
    sign = 1.0 - 2.0 * bits[0]
    desc = CompressedCircuitDescription(m, U.astype(complex), sign)
    z1 = expect_z_via_r(R, S, 1)
    x1 = sign * desc.expect_x1()
    desc.verification = {"z1_via_r": float(z1), "signed_x1": float(x1), "abs_diff": float(abs(z1 - x1)),
                         "ok": bool(abs(z1 - x1) < ATOL_EQUIV)}
    return desc
