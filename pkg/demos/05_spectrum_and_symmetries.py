"""
Free-fermion spectrum and level crossings
=========================================

The XY chain is a quadratic fermion Hamiltonian; its 2^n levels are sums of
Bogoliubov mode energies.  Parity (and, for the Jordan-Wigner closed chain,
momentum) label the levels.  Crossings between levels sharing those labels can
still happen; they sit at E = 0 and the partners differ in mirror symmetry.
"""

# %%
import numpy as np

from xycompress.fermion import XYChain
from xycompress.spectrum import (
    bogoliubov,
    brute_force_labels,
    dense_hamiltonian,
    gap_curves,
    quadratic_form,
    reflection_operator,
    sector_crossings,
    spectrum,
)

chain = XYChain(4, B=1.0, j_max=0.8, delta=0.5, boundary="jw")
sol = bogoliubov(quadratic_form(chain))
print("mode energies", np.round(sol.lambdas, 6), "ground parity", sol.ground_parity)
print("max |E_bogoliubov - E_dense|",
      np.abs(spectrum(sol).energy - np.linalg.eigvalsh(dense_hamiltonian(chain))).max())

# %%
labels = brute_force_labels(chain)
for e, p, k, _ in labels.rows()[:6]:
    print(f"E={e:+.6f} parity={p:+d} momentum={k:+.4f}")

# %%
gaps = gap_curves(XYChain(16, B=1.0, delta=0.5), np.linspace(0, 2, 9))
for row in zip(*(gaps[k] for k in ("J", "particle", "hole", "ground_parity"))):
    print("J={:.2f} particle={:.4f} hole={:.4f} parity={:+.0f}".format(*row))

# %%
R = reflection_operator(4)
for bc in ("open", "jw"):
    c4 = XYChain(4, B=1.0, delta=0.5, boundary=bc)
    for c in sector_crossings(c4, np.linspace(0, 2, 101)):
        E, V = np.linalg.eigh(dense_hamiltonian(c4.replace(j_max=c.J)))
        block = V[:, np.abs(E - c.energy) < 1e-5]
        mirror = np.linalg.eigvalsh(block.T.conj() @ R @ block)
        print(f"{bc}: J={c.J:.5f} E={c.energy:+.1e} label={c.label} mirror={np.round(mirror.real, 6)}")
