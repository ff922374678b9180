"""
Matchgate circuits and their rotation picture
=============================================

A circuit of XX, YY and Z rotations on nearest neighbours maps the Majorana
operators by a real orthogonal matrix R.  Single-qubit Z expectations are then
entries of R S R^T, where S encodes the computational-basis input.
"""

# %%
import numpy as np

from xycompress.matchgate import (
    expect_observable_statevector,
    expect_z_via_r,
    r_of_circuit,
    random_parametric_circuit,
    s_matrix,
    statevector_run,
)

rng = np.random.default_rng(7)
n = 6
circuit = random_parametric_circuit(n, 40, rng, jw=True)
bits = [0, 1, 1, 0, 0, 1]

# %%
# Both routes, qubit by qubit.
R = r_of_circuit(circuit)
S = s_matrix(bits)
state = statevector_run(circuit, bits)
for k in range(1, n + 1):
    a = expect_z_via_r(R, S, k)
    b = expect_observable_statevector(state, "Z", k)
    print(f"Z_{k}: rotation {a:+.12f}  statevector {b:+.12f}")

# %%
# R is special orthogonal; the statevector needs 2^n amplitudes, R only (2n)^2 entries.
print("||R R^T - 1|| =", np.abs(R @ R.T - np.eye(2 * n)).max(), " det R =", np.linalg.det(R))
