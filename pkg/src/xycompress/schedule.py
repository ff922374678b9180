"""Trotter schedules and the angle sequences they generate.

Every protocol step is ``U0(a0) U1(a1) U2(a2)`` (``U2`` acts first), stored as
a row ``(a0, a1, a2)``.  The same rows drive the ``2n x 2n`` rotation products
and the ``n x n`` W products.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from .fermion import XYChain

__all__ = [
    "StepRule",
    "TrotterSchedule",
    "steps_from_rule",
    "adiabatic_angles",
    "quench_stage1_angles",
    "quench_stage2_angles",
    "quench_field_values",
    "evolution_angles",
]


class StepRule(str, enum.Enum):
    L_OF_J = "LofJ"  # L(J) = round(L J / J_max), prefix of the full ramp
    FIXED = "Fixed"  # always L steps, ramping to the requested J


def steps_from_rule(total_time: float, rule: str) -> int:
    """Number of steps from a rule string like ``"2T^2"``, ``"T^2"`` or ``"500"``."""
    text = str(rule).replace(" ", "").replace("**", "^")
    if re.fullmatch(r"\d+", text):
        return int(text)
    m = re.fullmatch(r"(\d*\.?\d*)\*?T(\^(\d+))?", text)
    if not m:
        raise ValueError(f"cannot parse step rule {rule!r}")
    coeff = float(m.group(1)) if m.group(1) else 1.0
    power = int(m.group(3)) if m.group(3) else 1
    return max(1, int(round(coeff * total_time ** power)))


@dataclass(frozen=True)
class TrotterSchedule:
    total_time: float
    base_steps: int
    rule: StepRule = StepRule.L_OF_J
    steps_rule: str | None = None  # remembered so with_total_time can rescale L

    def __post_init__(self):
        object.__setattr__(self, "rule", StepRule(self.rule))
        if not self.total_time > 0:
            raise ValueError(f"total time must be > 0, got {self.total_time}")
        if int(self.base_steps) != self.base_steps or self.base_steps < 1:
            raise ValueError(f"base_steps must be a positive integer, got {self.base_steps}")
        object.__setattr__(self, "base_steps", int(self.base_steps))

    @classmethod
    def from_rule(cls, total_time: float, steps_rule: str = "2T^2",
                  rule: StepRule | str = StepRule.L_OF_J) -> "TrotterSchedule":
        return cls(total_time, steps_from_rule(total_time, steps_rule), rule, steps_rule)

    def with_total_time(self, total_time: float) -> "TrotterSchedule":
        if self.steps_rule is not None:
            return TrotterSchedule.from_rule(total_time, self.steps_rule, self.rule)
        return TrotterSchedule(total_time, self.base_steps, self.rule)

    @property
    def dt(self) -> float:
        return self.total_time / (self.base_steps + 1)

    def steps_for(self, J: float, j_max: float) -> int:
        """``L(J)``; the product then has ``L(J) + 1`` factors."""
        if self.rule is StepRule.FIXED:
            return self.base_steps
        if j_max == 0:
            return 0
        if J < 0 or J > j_max * (1 + 1e-12):
            raise ValueError(f"J = {J} outside [0, j_max = {j_max}]")
        return int(round(self.base_steps * J / j_max))

    def as_dict(self) -> dict:
        return {"T": float(self.total_time), "L": self.base_steps, "rule": self.rule.value,
                "steps_rule": self.steps_rule, "dt": self.dt}


def adiabatic_angles(chain: XYChain, schedule: TrotterSchedule, J: float | None = None) -> np.ndarray:
    """Rows ``(-2 B dt, -2 J_l dt, -2 J_l delta dt)`` for ``l = 0..L(J)``.

    With the ``LofJ`` rule ``J_l = J_max l / L`` so the ramp to a smaller J is a
    prefix of the full ramp; with ``Fixed`` the ramp reaches ``J`` in L steps.
    """
    j_max = chain.j_max
    J = j_max if J is None else float(J)
    L = schedule.base_steps
    dt = schedule.dt
    count = schedule.steps_for(J, j_max) + 1
    l = np.arange(count, dtype=float)
    J_l = (j_max if schedule.rule is StepRule.L_OF_J else J) * l / L
    rows = np.empty((count, 3))
    rows[:, 0] = -2.0 * chain.B * dt
    rows[:, 1] = -2.0 * J_l * dt
    rows[:, 2] = -2.0 * J_l * chain.delta * dt
    return rows


def quench_stage1_angles(chain: XYChain, T1: float, L1: int) -> np.ndarray:
    """Adiabatic preparation of the ground state of ``H(B, J_max)`` (no YY term)."""
    dt = T1 / (L1 + 1)
    l = np.arange(L1 + 1, dtype=float)
    rows = np.zeros((L1 + 1, 3))
    rows[:, 0] = -2.0 * chain.B * dt
    rows[:, 1] = -2.0 * chain.j_max * l / L1 * dt
    return rows


def quench_field_values(B_max: float, L2: int) -> np.ndarray:
    """``B_l = B_max (L2 - l) / L2`` for ``l = 0..L2``."""
    return B_max * (L2 - np.arange(L2 + 1, dtype=float)) / L2


def quench_stage2_angles(chain: XYChain, T2: float, L2: int, B_max: float | None = None) -> np.ndarray:
    """Field ramp ``B_max -> 0`` at fixed ``J = J_max``."""
    B_max = chain.B if B_max is None else B_max
    dt = T2 / (L2 + 1)
    rows = np.zeros((L2 + 1, 3))
    rows[:, 0] = -2.0 * quench_field_values(B_max, L2) * dt
    rows[:, 1] = -2.0 * chain.j_max * dt
    return rows


def evolution_angles(chain: XYChain, J: float, t: float, steps: int) -> np.ndarray:
    """``steps`` identical rows ``(-2 B dt, -2 J dt, -2 J delta dt)``, ``dt = t / steps``."""
    if steps == 0:
        return np.zeros((0, 3))
    dt = t / steps
    row = np.array([-2.0 * chain.B * dt, -2.0 * J * dt, -2.0 * J * chain.delta * dt])
    return np.tile(row, (steps, 1))
