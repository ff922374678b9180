"""Chain definitions, quadratic generators and their SO(2n) rotations.

Majorana operators follow the Jordan-Wigner representation

    c_{2k-1} = Z...Z X_k,    c_{2k} = Z...Z Y_k,

and a quadratic Hamiltonian is written ``H = i sum_{j != k} h_{jk} c_j c_k`` with
``h`` real antisymmetric.  The unitary ``exp(-i w H / 2)`` conjugates the Majorana
vector by ``R = exp(2 w h)``.

Index convention: formulas use 1-based mode labels ``k = 1..2n``; arrays are
0-based, so label ``k`` lives at position ``k - 1``.  Reading ``k - 1`` in binary
(big-endian over ``m = log2(n) + 1`` qubits) makes the pair ``(2k-1, 2k)`` differ
only in the least significant qubit, the one on which ``S = 1 (x) iY`` acts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Boundary",
    "GeneratorKind",
    "XYChain",
    "ChainSpec",
    "AntisymGenerator",
    "PlaneRotationSet",
    "build_generator",
    "rotation",
    "apply_rotation",
    "Side",
    "pair_table",
]


class Boundary(str, enum.Enum):
    OPEN = "open"
    JORDAN_WIGNER = "jw"

    @classmethod
    def parse(cls, value: "Boundary | str") -> "Boundary":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"open": cls.OPEN, "obc": cls.OPEN, "jw": cls.JORDAN_WIGNER,
                   "jordanwigner": cls.JORDAN_WIGNER, "jordan-wigner": cls.JORDAN_WIGNER,
                   "jordan_wigner": cls.JORDAN_WIGNER}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown boundary condition {value!r}") from None


class GeneratorKind(str, enum.Enum):
    """The three quadratic pieces of the XY Hamiltonian: sum Z, sum XX, sum YY."""

    H0 = "H0"
    H1 = "H1"
    H2 = "H2"

    @classmethod
    def parse(cls, value: "GeneratorKind | str") -> "GeneratorKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"invalid generator kind {value!r}") from None


@dataclass(frozen=True)
class XYChain:
    """Parameters of ``H = -B sum Z_i - J sum (X_i X_i+1 + delta Y_i Y_i+1)``.

    Accepts any ``n >= 2``; the compressed simulators require :class:`ChainSpec`.
    """

    n: int
    B: float = 1.0
    j_max: float = 1.0
    delta: float = 0.0
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not np.isfinite(self.B) or self.B <= 0:
            raise ValueError(f"field B must be > 0, got {self.B!r}")
        if not np.isfinite(self.j_max) or self.j_max < 0:
            raise ValueError(f"j_max must be >= 0, got {self.j_max!r}")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"anisotropy delta must lie in [0, 1], got {self.delta!r}")

    @property
    def dim(self) -> int:
        """Number of Majorana modes, 2n."""
        return 2 * self.n

    @property
    def is_jw(self) -> bool:
        return self.boundary is Boundary.JORDAN_WIGNER

    def replace(self, **changes) -> "XYChain":
        values = dict(n=self.n, B=self.B, j_max=self.j_max, delta=self.delta,
                      boundary=self.boundary)
        values.update(changes)
        return type(self)(**values)

    def as_dict(self) -> dict:
        return {"n": self.n, "B": float(self.B), "j_max": float(self.j_max),
                "delta": float(self.delta), "boundary": self.boundary.value}


@dataclass(frozen=True)
class ChainSpec(XYChain):
    """An XY chain whose size is a power of two ``n >= 4`` (compressible)."""

    def __post_init__(self):
        super().__post_init__()
        if self.n < 4 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 4, got {self.n}")

    @property
    def m(self) -> int:
        """Qubits of the log(n)+1 register."""
        return self.n.bit_length()

    @property
    def m_hat(self) -> int:
        """Qubits of the log(n) register."""
        return self.n.bit_length() - 1


@dataclass(frozen=True)
class AntisymGenerator:
    """Sparse antisymmetric ``h`` stored as its upper-or-lower triangle entries.

    ``entries`` holds 0-based ``(row, col, value)``; the mirrored entry
    ``(col, row, -value)`` is implied.
    """

    dim: int
    entries: tuple

    def dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim))
        for r, c, v in self.entries:
            h[r, c] += v
            h[c, r] -= v
        return h

    def row_nnz(self) -> np.ndarray:
        counts = np.zeros(self.dim, dtype=int)
        for r, c, _ in self.entries:
            counts[r] += 1
            counts[c] += 1
        return counts


def pair_table(kind: GeneratorKind | str, n: int, jw: bool) -> list[tuple[int, int, float]]:
    """0-based ``(i, j, h_ij)`` pairs of the generator ``h_kind``.

    H0 couples (2j-1, 2j), H1 couples (2j, 2j+1), H2 couples (2j-1, 2j+2);
    the JW closure adds (2n, 1) to H1 and (2n-1, 2) to H2.
    """
    kind = GeneratorKind.parse(kind)
    if kind is GeneratorKind.H0:
        return [(2 * j, 2 * j + 1, -0.5) for j in range(n)]
    if kind is GeneratorKind.H1:
        pairs = [(2 * j + 1, 2 * j + 2, -0.5) for j in range(n - 1)]
        if jw:
            # -i c_{2n} c_1
            pairs.append((2 * n - 1, 0, -0.5))
        return pairs
    pairs = [(2 * j, 2 * j + 3, 0.5) for j in range(n - 1)]
    if jw:
        # +i c_{2n-1} c_2
        pairs.append((2 * n - 2, 1, 0.5))
    return pairs


def build_generator(kind: GeneratorKind | str, chain: XYChain) -> AntisymGenerator:
    """Antisymmetric matrix ``h`` with ``H_kind = i sum h_jk c_j c_k``."""
    return AntisymGenerator(chain.dim, tuple(pair_table(kind, chain.n, chain.is_jw)))


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT_TRANSPOSED = "right_transposed"


@dataclass(frozen=True)
class PlaneRotationSet:
    """Direct sum of 2x2 rotations on disjoint coordinate pairs.

    A plane ``(i, j, c, s)`` sets ``R[i,i] = R[j,j] = c``, ``R[i,j] = -s`` and
    ``R[j,i] = s``; every other coordinate is fixed (diagonal 1).
    """

    dim: int
    i: np.ndarray
    j: np.ndarray
    c: np.ndarray
    s: np.ndarray
    fixed_diagonal: tuple = field(default=())

    def __post_init__(self):
        for name in ("i", "j"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.intp))
        for name in ("c", "s"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        touched = np.concatenate([self.i, self.j])
        if len(np.unique(touched)) != len(touched):
            raise ValueError("rotation planes must be disjoint")
        if touched.size and (touched.min() < 0 or touched.max() >= self.dim):
            raise ValueError("plane index out of range")

    @property
    def n_planes(self) -> int:
        return len(self.i)

    @classmethod
    def identity(cls, dim: int) -> "PlaneRotationSet":
        empty = np.zeros(0)
        return cls(dim, empty, empty, empty, empty, tuple((k, 1.0) for k in range(dim)))

    def dense(self) -> np.ndarray:
        R = np.eye(self.dim)
        R[self.i, self.i] = self.c
        R[self.j, self.j] = self.c
        R[self.i, self.j] = -self.s
        R[self.j, self.i] = self.s
        return R

    def transpose(self) -> "PlaneRotationSet":
        return PlaneRotationSet(self.dim, self.i, self.j, self.c, -self.s, self.fixed_diagonal)

    def apply_left(self, M: np.ndarray) -> np.ndarray:
        """``self @ M`` in O(planes * cols)."""
        out = np.array(M, copy=True)
        ri, rj = M[self.i], M[self.j]
        c = self.c.reshape((-1,) + (1,) * (M.ndim - 1))
        s = self.s.reshape((-1,) + (1,) * (M.ndim - 1))
        out[self.i] = c * ri - s * rj
        out[self.j] = s * ri + c * rj
        return out

    def apply_right_transposed(self, M: np.ndarray) -> np.ndarray:
        """``M @ self.T`` in O(rows * planes)."""
        return self.apply_left(np.asarray(M).T).T


def rotation(kind: GeneratorKind | str, angle: float, chain: XYChain) -> PlaneRotationSet:
    """Closed form of ``R_kind(angle) = exp(2 * angle * h_kind)``.

    Each pair with generator entry ``h_ij = -+1/2`` becomes a plane rotation by
    ``-+angle``; coordinates not touched by ``h_kind`` stay fixed, which for the
    open chain are the endpoints {1, 2n} of R_1 and {2, 2n-1} of R_2.
    """
    pairs = pair_table(kind, chain.n, chain.is_jw)
    i = np.array([p[0] for p in pairs], dtype=np.intp)
    j = np.array([p[1] for p in pairs], dtype=np.intp)
    sign = np.array([-2.0 * p[2] for p in pairs])
    c = np.full(len(pairs), np.cos(angle))
    s = sign * np.sin(angle)
    touched = set(i.tolist()) | set(j.tolist())
    fixed = tuple((k, 1.0) for k in range(chain.dim) if k not in touched)
    return PlaneRotationSet(chain.dim, i, j, c, s, fixed)


def apply_rotation(rot: PlaneRotationSet, target: np.ndarray,
                   side: Side | str = Side.LEFT) -> np.ndarray:
    """Multiply ``target`` by a plane set without forming the dense matrix."""
    target = np.asarray(target)
    side = Side(side)
    if side is Side.LEFT:
        if target.shape[0] != rot.dim:
            raise ValueError(f"dimension mismatch: set is {rot.dim}, target has {target.shape[0]} rows")
        return rot.apply_left(target)
    if target.ndim != 2 or target.shape[1] != rot.dim:
        raise ValueError(f"dimension mismatch: set is {rot.dim}, target has shape {target.shape}")
    return rot.apply_right_transposed(target)
