"""Fixed-step numeric integration for planar fields.

Lowers exact rational components to float evaluators, integrates with
the classical 4th-order Runge-Kutta scheme, and measures conservation
drift of the logarithmic first integral attached to the normalized
Lotka-Volterra system.  Everything is deterministic: no adaptivity, no
randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .algebra import MultiPoly, RatFunc
from .errors import NonFiniteState, PoleEncountered, SignChange
from .vectorfield import VectorField

FloatFn = Callable[[float, float], float]


@dataclass(frozen=True)
class Trajectory:
    """A uniformly sampled numeric solution.

    ``times[0] = 0`` and consecutive times differ by ``step``.  All
    recorded states are finite; a run cut short by a pole or overflow
    keeps the finite prefix and records why in ``stop_reason`` (None
    means the full horizon was reached).
    """

    times: Tuple[float, ...]
    states: Tuple[Tuple[float, float], ...]
    step: float
    stop_reason: Optional[str] = None

    def __len__(self) -> int:
        return len(self.times)

    def final_state(self) -> Tuple[float, float]:
        return self.states[-1]


def _poly_fn(p: MultiPoly) -> FloatFn:
    terms = []
    for expo, coeff in p.terms.items():
        if not coeff.is_rational():
            raise ValueError(
                f"coefficient {coeff} is symbolic; specialize parameters "
                "before integrating"
            )
        terms.append((float(coeff.as_fraction()), expo[0], expo[1]))

    def ev(x: float, y: float) -> float:
        total = 0.0
        for c, i, j in terms:
            total += c * x**i * y**j
        return total

    return ev


def _component_fn(r: RatFunc) -> FloatFn:
    num = _poly_fn(r.num)
    den = _poly_fn(r.den)

    def ev(x: float, y: float) -> float:
        d = den(x, y)
        if d == 0.0:
            raise PoleEncountered(f"component denominator vanishes at ({x}, {y})")
        return num(x, y) / d

    return ev


def integrate_rk4(
    s: VectorField, start: Tuple[float, float], t_end: float, step: float
) -> Trajectory:
    """Classical fixed-step 4th-order Runge-Kutta from t = 0.

    The horizon is rounded to a whole number of steps.  Starting on a
    pole raises PoleEncountered and a non-finite start raises
    NonFiniteState; a pole or overflow reached mid-run truncates the
    trajectory there instead, with the reason recorded.
    """
    if len(s.variables) != 2 or s.diff_params:
        raise ValueError("integration supports plain planar fields only")
    if not step > 0:
        raise ValueError("step must be positive")
    fx = _component_fn(s.components[0])
    fy = _component_fn(s.components[1])
    x, y = float(start[0]), float(start[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFiniteState(f"start {start} is not finite")
    fx(x, y)
    fy(x, y)

    n = int(round(t_end / step))
    h = step
    times = [0.0]
    states = [(x, y)]
    stop: Optional[str] = None
    for i in range(n):
        try:
            k1x, k1y = fx(x, y), fy(x, y)
            k2x = fx(x + h / 2 * k1x, y + h / 2 * k1y)
            k2y = fy(x + h / 2 * k1x, y + h / 2 * k1y)
            k3x = fx(x + h / 2 * k2x, y + h / 2 * k2y)
            k3y = fy(x + h / 2 * k2x, y + h / 2 * k2y)
            k4x = fx(x + h * k3x, y + h * k3y)
            k4y = fy(x + h * k3x, y + h * k3y)
        except PoleEncountered:
            stop = f"pole encountered near t = {i * h:.6g}"
            break
        except OverflowError:
            stop = f"non-finite state near t = {(i + 1) * h:.6g}"
            break
        nx = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        ny = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        if not (math.isfinite(nx) and math.isfinite(ny)):
            stop = f"non-finite state near t = {(i + 1) * h:.6g}"
            break
        x, y = nx, ny
        times.append((i + 1) * h)
        states.append((x, y))
    return Trajectory(tuple(times), tuple(states), h, stop)


def log_first_integral(x: float, y: float, b: float, d: float) -> float:
    """y - x + b log|y| - d log|x|, the conserved quantity of the
    normalized system x' = x(y + b), y' = y(x + d)."""
    if x == 0.0 or y == 0.0:
        raise SignChange("the first integral is undefined on the axes")
    return y - x + b * math.log(abs(y)) - d * math.log(abs(x))


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def first_integral_drift(traj: Trajectory, b: float, d: float) -> float:
    """Max over samples of |f(x_t, y_t) - f(x_0, y_0)| for the
    logarithmic first integral of the normalized system.

    Uses principal logs of |x| and |y|, valid while both coordinates
    keep their starting signs; a trajectory that touches or crosses an
    axis raises SignChange since the branches are no longer comparable.
    """
    x0, y0 = traj.states[0]
    sx, sy = _sign(x0), _sign(y0)
    if sx == 0 or sy == 0:
        raise SignChange("the first integral is undefined on the axes")
    f0 = log_first_integral(x0, y0, b, d)
    worst = 0.0
    for x, y in traj.states:
        if _sign(x) != sx or _sign(y) != sy:
            raise SignChange(
                f"trajectory leaves the starting sign region at ({x}, {y})"
            )
        worst = max(worst, abs(log_first_integral(x, y, b, d) - f0))
    return worst
