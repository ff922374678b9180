"""
Signal propagation after a local flip
=====================================

After preparing the ground state, the two middle spins are flipped and the
chain evolves at fixed J.  The disturbance spreads inside a light cone; its
front moves faster for larger J and larger anisotropy delta.
"""

# %%
import numpy as np

from xycompress.fermion import XYChain
from xycompress.protocols import propagation_speed, timeevo_profile
from xycompress.schedule import TrotterSchedule

n = 128
t_grid = np.arange(0, 30.1, 2.0)
sched = TrotterSchedule.from_rule(10, "2T^2")

# %%
for delta in (0.0, 0.3, 0.6):
    speeds = []
    for J in (0.0, 0.1, 0.2, 0.3, 0.4):
        prof = timeevo_profile(XYChain(n, B=1.0, j_max=J, delta=delta), sched, t_grid)
        speeds.append(propagation_speed(prof, t_grid).speed)
    print(f"delta={delta}: speeds", np.round(speeds, 3))

# %%
prof = timeevo_profile(XYChain(n, B=1.0, j_max=0.3, delta=0.3), sched, t_grid)
for t, row in zip(t_grid[::3], prof[::3]):
    line = "".join("#" if abs(d) > 0.05 else ("+" if abs(d) > 0.01 else ".") for d in row - prof[0])
    print(f"t={t:4.0f} {line}")
