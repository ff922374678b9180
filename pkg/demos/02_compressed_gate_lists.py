"""
One Trotter step on log2(n) qubits
==================================

Conjugating the rotations by V splits them into two n x n blocks.  The upper
block W is what the compressed circuit implements; `compile_step` writes one
step W0 W1 W2 as a list of (multi-)controlled gates on log2(n) qubits.
"""

# %%
import numpy as np

from xycompress.compressed import compile_step, offblock_residue, v_matrix, w_factor
from xycompress.fermion import ChainSpec, rotation

chain = ChainSpec(16, boundary="jw")
vt = v_matrix(chain.n)
for kind in ("H0", "H1", "H2"):
    R = rotation(kind, 0.37, chain).dense()
    print(kind, "off-block residue", offblock_residue(vt, R))

# %%
w = (0.21, -0.4, 0.9)
gates = compile_step(chain, *w)
for g in gates.gates:
    print(g.op.value, "targets", g.targets, "controls", g.controls, "params", g.params)

# %%
target = w_factor("W0", w[0], chain) @ w_factor("W1", w[1], chain) @ w_factor("W2", w[2], chain)
print("reconstruction error", np.abs(gates.dense() - target).max())

# %%
# Elementary-gate count per step grows like m_hat^2.
for n in (8, 16, 32, 64, 128, 256):
    for bc in ("open", "jw"):
        count = compile_step(ChainSpec(n, boundary=bc), *w).elementary_count()
        mh = int(np.log2(n))
        print(f"n={n:4d} {bc:4s} gates={count:5d} gates/m_hat^2={count / mh**2:.2f}")
