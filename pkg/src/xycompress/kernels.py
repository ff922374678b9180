"""Compiled inner loops for long Trotter products.

A Trotter step is a product ``F_0 F_1 ... F_{k-1}`` of factors, each a direct sum
of 2x2 rotations on disjoint coordinate pairs, optionally with diagonal phases.
Left-multiplying an accumulated matrix by one factor touches only the rows of
its planes, so a step costs O(planes * columns) instead of a dense product.

Factor layout (shared by both kernels):

* ``plane_ptr[f]:plane_ptr[f+1]`` slices ``pi, pj, psign`` for factor ``f``;
  with ``w = omegas[step, f]`` the plane acts as ``[[c, -s], [s, c]]`` on rows
  ``(pi, pj)``, ``c = cos w``, ``s = psign * sin w``.
* ``diag_ptr[f]:diag_ptr[f+1]`` slices ``di, dk``; row ``di`` is multiplied by
  ``exp(1j * dk * w)`` (complex kernel only).
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is declared, but keep a slow path
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def evolve_real(M, omegas, plane_ptr, pi, pj, psign):
    """In place: for each step ``M <- F_0 ... F_{k-1} M`` (real planes only)."""
    n_steps, n_factors = omegas.shape
    ncol = M.shape[1]
    for step in range(n_steps):
        for f in range(n_factors - 1, -1, -1):
            w = omegas[step, f]
            if w == 0.0:
                continue
            c = np.cos(w)
            sw = np.sin(w)
            for p in range(plane_ptr[f], plane_ptr[f + 1]):
                i = pi[p]
                j = pj[p]
                s = psign[p] * sw
                for col in range(ncol):
                    a = M[i, col]
                    b = M[j, col]
                    M[i, col] = c * a - s * b
                    M[j, col] = s * a + c * b


@njit(cache=True)
def evolve_complex(M, omegas, plane_ptr, pi, pj, psign, diag_ptr, di, dk):
    """In place: for each step ``M <- F_0 ... F_{k-1} M`` with phase-dressed factors."""
    n_steps, n_factors = omegas.shape
    ncol = M.shape[1]
    for step in range(n_steps):
        for f in range(n_factors - 1, -1, -1):
            w = omegas[step, f]
            if w == 0.0:
                continue
            for q in range(diag_ptr[f], diag_ptr[f + 1]):
                ph = np.exp(1j * dk[q] * w)
                r = di[q]
                for col in range(ncol):
                    M[r, col] = ph * M[r, col]
            c = np.cos(w)
            sw = np.sin(w)
            for p in range(plane_ptr[f], plane_ptr[f + 1]):
                i = pi[p]
                j = pj[p]
                s = psign[p] * sw
                for col in range(ncol):
                    a = M[i, col]
                    b = M[j, col]
                    M[i, col] = c * a - s * b
                    M[j, col] = s * a + c * b


class FactorPlan:
    """Flattened plane/phase tables for a fixed sequence of factor kinds."""

    def __init__(self, factors):
        # factors: list of (planes[(i, j, sign)], diags[(row, k)])
        plane_ptr, pi, pj, psign = [0], [], [], []
        diag_ptr, di, dk = [0], [], []
        for planes, diags in factors:
            for i, j, sg in planes:
                pi.append(i)
                pj.append(j)
                psign.append(sg)
            plane_ptr.append(len(pi))
            for r, k in diags:
                di.append(r)
                dk.append(k)
            diag_ptr.append(len(di))
        self.n_factors = len(factors)
        self.plane_ptr = np.asarray(plane_ptr, dtype=np.int64)
        self.pi = np.asarray(pi, dtype=np.int64)
        self.pj = np.asarray(pj, dtype=np.int64)
        self.psign = np.asarray(psign, dtype=np.float64)
        self.diag_ptr = np.asarray(diag_ptr, dtype=np.int64)
        self.di = np.asarray(di, dtype=np.int64)
        self.dk = np.asarray(dk, dtype=np.float64)

    @property
    def has_phases(self) -> bool:
        return self.di.size > 0

    def evolve(self, M: np.ndarray, omegas: np.ndarray) -> np.ndarray:
        """Apply ``len(omegas)`` steps to ``M`` in place and return it."""
        omegas = np.ascontiguousarray(np.atleast_2d(omegas), dtype=np.float64)
        if omegas.shape[1] != self.n_factors:
            raise ValueError(f"expected {self.n_factors} angles per step, got {omegas.shape[1]}")
        if omegas.shape[0] == 0:
            return M
        if np.iscomplexobj(M):
            evolve_complex(M, omegas, self.plane_ptr, self.pi, self.pj, self.psign,
                           self.diag_ptr, self.di, self.dk)
        else:
            if self.has_phases:
                raise TypeError("phase-dressed factors need a complex matrix")
            evolve_real(M, omegas, self.plane_ptr, self.pi, self.pj, self.psign)
        return M
