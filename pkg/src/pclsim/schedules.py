"""Step-size schedules and tail averaging.

Three schedule kinds:

* ``fixed(alpha)``                     -- constant learning rate.
* ``theory_constant(horizon, lam)``    -- ln(t) / (lam * t) for a fixed
  horizon t >= 2.
* ``diminishing(t0, lam)``             -- 4 / ((tau + t0 + 1) * lam).

The tail average is the convex combination with weights proportional to
(tau + t0); it removes the logarithmic factor under the diminishing schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class InvalidHorizonError(ValueError):
    """theory_constant schedules need a horizon of at least 2."""


class EmptyTrajectoryError(ValueError):
    """tail_average requires at least one iterate."""


@dataclass(frozen=True)
class StepSchedule:
    kind: str = "fixed"        # fixed | theory_constant | diminishing
    alpha: float = 0.01        # fixed
    horizon: float = 0.0       # theory_constant
    t0: int = 10               # diminishing
    lam: float = 1.0           # lambda binding for the two theory schedules

    def __post_init__(self):
        if self.kind not in ("fixed", "theory_constant", "diminishing"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "diminishing" and self.t0 < 1:
            raise ValueError("diminishing schedule needs t0 >= 1")

    def with_lambda(self, lam: float) -> "StepSchedule":
        """Bind a module-specific lambda (synchronized effective steps)."""
        return replace(self, lam=lam)


def step_size(schedule: StepSchedule, tau: int) -> float:
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if schedule.kind == "fixed":
        return schedule.alpha
    if schedule.kind == "theory_constant":
        if schedule.horizon < 2:
            raise InvalidHorizonError("theory_constant needs horizon >= 2")
        return math.log(schedule.horizon) / (schedule.lam * schedule.horizon)
    return 4.0 / ((tau + schedule.t0 + 1) * schedule.lam)


def tail_average(trajectory, t0: int = 10):
    """Convex combination sum_tau w_tau x_tau with w_tau ~ (tau + t0).

    The final weight is computed as one minus the rest so the weights sum
    to 1 exactly.
    """
    if len(trajectory) == 0:
        raise EmptyTrajectoryError("empty trajectory")
    if t0 < 1:
        raise ValueError("t0 must be >= 1")
    total = sum(tau + t0 for tau in range(len(trajectory)))
    weights = [(tau + t0) / total for tau in range(len(trajectory) - 1)]
    weights.append(1.0 - sum(weights))
    out = weights[0] * trajectory[0]
    for w, x in zip(weights[1:], trajectory[1:]):
        out = out + w * x
    return out
