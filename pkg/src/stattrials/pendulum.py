"""Pendulum in a horizontal air stream whose speed fluctuates at random.

Equation of motion (rigid pendulum, viscous damping, horizontal drag force F)::

    phi'' = -(g/L) sin(phi) - b*omega + F/(m*L) * cos(phi)

The drag is F = c*u**2 of the free-stream speed u.  The speed is held
piecewise constant and redrawn uniformly from [u0 - du, u0 + du] (clamped
at 0) every ``wind_refresh`` seconds.  A constant force therefore settles
the pendulum at tan(phi_eq) = F/(m*g).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import rng as _rng
from .errors import DivergenceError
from .stats import Histogram, SummaryStats, histogram, summarize


@dataclass(frozen=True)
class PendulumParams:
    g: float = 9.81
    length: float = 1.0
    mass: float = 0.1
    damping: float = 0.5
    drag_coeff: float = 0.05
    wind_mean: float = 2.0
    wind_halfwidth: float = 1.0
    wind_refresh: float = 0.5
    dt: float = 0.01
    t_total: float = 200.0
    burn_in: float = 20.0
    seed: int = 1

    def __post_init__(self):
        if self.length <= 0 or self.mass <= 0:
            raise ValueError("length and mass must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.wind_refresh < self.dt:
            raise ValueError("wind_refresh must be at least dt")
        if self.wind_halfwidth < 0:
            raise ValueError("wind_halfwidth must be nonnegative")
        if self.t_total < 0:
            raise ValueError("t_total must be nonnegative")
        if self.t_total > 0 and not 0 <= self.burn_in < self.t_total:
            raise ValueError("burn_in must lie in [0, t_total)")

    def with_(self, **changes) -> "PendulumParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PendulumState:
    phi: float = 0.0
    omega: float = 0.0
    t: float = 0.0


class Wind:
    """Piecewise-constant random wind.

    Segment ``k`` covers [k*wind_refresh, (k+1)*wind_refresh).  Speeds are drawn
    in segment order, so the wind sequence depends only on the seed and the
    refresh period, never on ``dt``.  Query times must not decrease.
    """

    def __init__(self, params: PendulumParams, state: _rng.RngState | None = None):
        self.params = params
        self.rng = state if state is not None else _rng.new(params.seed)
        self.segment = -1
        self.speed_now = 0.0

    def _draw(self) -> float:
        p = self.params
        u = p.wind_mean - p.wind_halfwidth + 2.0 * p.wind_halfwidth * self.rng.next_uniform()
        return max(u, 0.0)

    def speed(self, t: float) -> float:
        k = math.floor(t / self.params.wind_refresh + 1e-9)
        while self.segment < k:
            self.speed_now = self._draw()
            self.segment += 1
        return self.speed_now

    def force(self, t: float) -> float:
        return self.params.drag_coeff * self.speed(t) ** 2


def wind_force(wind: Wind, t: float) -> float:
    """Drag force (N) of the air stream at time ``t``."""
    return wind.force(t)


def _accel(phi, omega, force, p: PendulumParams):
    return (-(p.g / p.length) * math.sin(phi) - p.damping * omega
            + force / (p.mass * p.length) * math.cos(phi))


def step_rk4(state: PendulumState, params: PendulumParams, force: float, dt: float | None = None) -> PendulumState:
    """One classical RK4 step with the force held constant over the step."""
    h = params.dt if dt is None else dt
    phi, om = state.phi, state.omega
    t = state.t + h
    try:
        k1p, k1o = om, _accel(phi, om, force, params)
        k2p, k2o = om + 0.5 * h * k1o, _accel(phi + 0.5 * h * k1p, om + 0.5 * h * k1o, force, params)
        k3p, k3o = om + 0.5 * h * k2o, _accel(phi + 0.5 * h * k2p, om + 0.5 * h * k2o, force, params)
        k4p, k4o = om + h * k3o, _accel(phi + h * k3p, om + h * k3o, force, params)
    except (ValueError, OverflowError):
        # math.sin/cos reject infinities once the state has blown up
        raise DivergenceError(t) from None
    phi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    om += h / 6.0 * (k1o + 2 * k2o + 2 * k3o + k4o)
    if not (math.isfinite(phi) and math.isfinite(om)):
        raise DivergenceError(t)
    return PendulumState(phi, om, t)


def energy(state: PendulumState, params: PendulumParams) -> float:
    """Kinetic plus gravitational potential energy (J)."""
    m, L = params.mass, params.length
    return 0.5 * m * L * L * state.omega**2 + m * params.g * L * (1.0 - math.cos(state.phi))


@dataclass
class Trajectory:
    t: np.ndarray
    phi: np.ndarray
    omega: np.ndarray

    def __len__(self) -> int:
        return self.t.size

    def __getitem__(self, i) -> PendulumState:
        return PendulumState(float(self.phi[i]), float(self.omega[i]), float(self.t[i]))


def simulate(params: PendulumParams, initial: PendulumState | None = None) -> Trajectory:
    """Integrate from rest (or ``initial``) over ``t_total``, recording every step."""
    n = int(round(params.t_total / params.dt))
    wind = Wind(params)
    t = np.empty(n + 1)
    phi = np.empty(n + 1)
    omega = np.empty(n + 1)
    s = initial if initial is not None else PendulumState()
    t[0], phi[0], omega[0] = s.t, s.phi, s.omega
    for k in range(n):
        # times are k*dt, not accumulated sums, so refresh boundaries stay exact
        s = PendulumState(s.phi, s.omega, k * params.dt)
        s = step_rk4(s, params, wind.force(s.t))
        t[k + 1], phi[k + 1], omega[k + 1] = (k + 1) * params.dt, s.phi, s.omega
    return Trajectory(t, phi, omega)


def angle_distribution(
    trajectory: Trajectory,
    params: PendulumParams,
    bins: int = 50,
    lo: float | None = None,
    hi: float | None = None,
) -> tuple[Histogram, SummaryStats]:
    """Histogram and mean/std of phi over the samples with t >= burn_in.

    Without explicit bounds the histogram spans mean +/- 5 std (or +/- 0.5 rad
    around the mean when the spread is negligible).
    """
    phi = trajectory.phi[trajectory.t >= params.burn_in - 1e-12]
    if phi.size == 0:
        raise ValueError("no samples after burn-in")
    st = summarize(phi)
    half = 5.0 * st.std
    if half <= 1e-9 * max(1.0, abs(st.mean)):
        half = 0.5
    lo = st.mean - half if lo is None else lo
    hi = st.mean + half if hi is None else hi
    return histogram(phi, lo, hi, bins), st
