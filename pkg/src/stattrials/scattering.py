"""Alpha particles deflected by fixed repulsive Coulomb centers.

Units are dimensionless by default (kqQ = m = v0 = 1).  A particle starts at
(start_x, b) moving along +x with speed v0 and is integrated with fixed-step
RK4 until it leaves the interaction region.  For a single center the
asymptotic deflection is 2*atan(kqQ / (m v0**2 b)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import rng as _rng
from ._parallel import run_chunked
from .errors import NonEscapeError, SingularityError
from .stats import Histogram, histogram

SINGULAR_R = 1e-9

_OK, _NON_ESCAPE, _SINGULAR = 0, 1, 2
_STATUS_TEXT = {_NON_ESCAPE: "non-escape", _SINGULAR: "singularity"}


def two_atoms(separation: float = 2.0, strength: float = 1.0) -> list[tuple[tuple[float, float], float]]:
    """Two equal centers at (0, +d/2) and (0, -d/2)."""
    h = separation / 2.0
    return [((0.0, h), strength), ((0.0, -h), strength)]


@dataclass(frozen=True)
class ScatteringConfig:
    centers: list = field(default_factory=two_atoms)
    mass: float = 1.0
    v0: float = 1.0
    start_x: float = -50.0
    stop_x: float = 50.0
    b_range: tuple[float, float] = (-5.0, 5.0)
    dt: float = 0.05
    max_steps: int = 1_000_000
    particles: int = 10_000
    seed: int = 1
    drift_tolerance: float = 1e-4

    def __post_init__(self):
        if self.mass <= 0 or self.v0 <= 0 or self.dt <= 0:
            raise ValueError("mass, v0 and dt must be positive")
        if self.b_range[0] > self.b_range[1]:
            raise ValueError("b_range must satisfy b_min <= b_max")
        if not self.centers:
            raise ValueError("at least one force center is required")
        for (_, k) in self.centers:
            if k <= 0:
                raise ValueError("center strengths must be positive (repulsive)")
        if self.start_x >= min(c[0][0] for c in self.centers):
            raise ValueError("start_x must lie to the left of every center")
        if self.particles < 1:
            raise ValueError("particles must be positive")

    def center_arrays(self):
        cx = np.array([c[0][0] for c in self.centers], dtype=np.float64)
        cy = np.array([c[0][1] for c in self.centers], dtype=np.float64)
        ck = np.array([c[1] for c in self.centers], dtype=np.float64)
        return cx, cy, ck


@dataclass(frozen=True)
class TrajectoryOutcome:
    b: float
    alpha: float
    steps_used: int
    energy_drift: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _force(x, y, cx, cy, ck):
    fx = 0.0
    fy = 0.0
    rmin = np.inf
    for i in range(cx.shape[0]):
        dx = x - cx[i]
        dy = y - cy[i]
        r = math.sqrt(dx * dx + dy * dy)
        if r < rmin:
            rmin = r
        if r < SINGULAR_R:
            return 0.0, 0.0, r
        s = ck[i] / (r * r * r)
        fx += s * dx
        fy += s * dy
    return fx, fy, rmin


@njit(cache=True, nogil=True)
def _potential(x, y, cx, cy, ck):
    u = 0.0
    for i in range(cx.shape[0]):
        u += ck[i] / math.sqrt((x - cx[i]) ** 2 + (y - cy[i]) ** 2)
    return u


@njit(cache=True, nogil=True)
def _integrate(b, cx, cy, ck, m, v0, start_x, stop_x, dt, max_steps):
    """Returns (alpha, steps, drift, status, x, y, vx, vy)."""
    x = start_x
    y = b
    vx = v0
    vy = 0.0
    e0 = 0.5 * m * v0 * v0 + _potential(x, y, cx, cy, ck)
    drift = 0.0
    r_out = 10.0 * abs(start_x)
    inv_m = 1.0 / m
    steps = 0
    while True:
        if x > stop_x or x * x + y * y > r_out * r_out:
            return math.atan2(vy, vx), steps, drift, _OK, x, y, vx, vy
        if steps >= max_steps:
            return math.atan2(vy, vx), steps, drift, _NON_ESCAPE, x, y, vx, vy
        f1x, f1y, r1 = _force(x, y, cx, cy, ck)
        f2x, f2y, r2 = _force(x + 0.5 * dt * vx, y + 0.5 * dt * vy, cx, cy, ck)
        v2x = vx + 0.5 * dt * f1x * inv_m
        v2y = vy + 0.5 * dt * f1y * inv_m
        f3x, f3y, r3 = _force(x + 0.5 * dt * v2x, y + 0.5 * dt * v2y, cx, cy, ck)
        v3x = vx + 0.5 * dt * f2x * inv_m
        v3y = vy + 0.5 * dt * f2y * inv_m
        f4x, f4y, r4 = _force(x + dt * v3x, y + dt * v3y, cx, cy, ck)
        v4x = vx + dt * f3x * inv_m
        v4y = vy + dt * f3y * inv_m
        if min(min(r1, r2), min(r3, r4)) < SINGULAR_R:
            return math.atan2(vy, vx), steps, drift, _SINGULAR, x, y, vx, vy
        x += dt / 6.0 * (vx + 2.0 * v2x + 2.0 * v3x + v4x)
        y += dt / 6.0 * (vy + 2.0 * v2y + 2.0 * v3y + v4y)
        vx += dt / 6.0 * inv_m * (f1x + 2.0 * f2x + 2.0 * f3x + f4x)
        vy += dt / 6.0 * inv_m * (f1y + 2.0 * f2y + 2.0 * f3y + f4y)
        steps += 1
        e = 0.5 * m * (vx * vx + vy * vy) + _potential(x, y, cx, cy, ck)
        d = abs(e - e0) / abs(e0)
        if d > drift:
            drift = d


@njit(cache=True, nogil=True)
def _sweep_kernel(bs, cx, cy, ck, m, v0, start_x, stop_x, dt, max_steps,
                  start, stop, alpha, steps, drift, status):
    for i in range(start, stop):
        a, n, d, s, _, _, _, _ = _integrate(bs[i], cx, cy, ck, m, v0, start_x, stop_x, dt, max_steps)
        alpha[i] = a
        steps[i] = n
        drift[i] = d
        status[i] = s


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------

def force_at(point, centers) -> tuple[float, float]:
    """Total repulsive inverse-square force at ``point``."""
    x, y = float(point[0]), float(point[1])
    fx = fy = 0.0
    for (px, py), k in centers:
        dx, dy = x - px, y - py
        r = math.hypot(dx, dy)
        if r < SINGULAR_R:
            raise SingularityError(f"point {point} coincides with center {(px, py)}")
        s = k / r**3
        fx += s * dx
        fy += s * dy
    return fx, fy


def integrate_trajectory(b: float, config: ScatteringConfig) -> TrajectoryOutcome:
    """Trace one particle with impact parameter ``b`` and report its deflection.

    Raises :class:`NonEscapeError` if ``max_steps`` run out and
    :class:`SingularityError` if the particle hits a center.
    """
    cx, cy, ck = config.center_arrays()
    alpha, steps, drift, status, x, y, vx, vy = _integrate(
        float(b), cx, cy, ck, config.mass, config.v0, config.start_x, config.stop_x,
        config.dt, int(config.max_steps))
    if status == _NON_ESCAPE:
        raise NonEscapeError(f"particle b={b:g} did not escape in {steps} steps", (x, y, vx, vy))
    if status == _SINGULAR:
        raise SingularityError(f"particle b={b:g} reached a center")
    return TrajectoryOutcome(float(b), float(alpha), int(steps), float(drift))


def impact_parameters(config: ScatteringConfig) -> np.ndarray:
    """b for each particle, one uniform from substream ``(seed, i)`` each."""
    b_min, b_max = config.b_range
    u = _rng.stream_heads(config.seed, config.particles, 1)[:, 0]
    return b_min + (b_max - b_min) * u


def sweep(config: ScatteringConfig, bins: int = 50, threads: int = 1) -> tuple[Histogram, list[TrajectoryOutcome]]:
    """Scatter ``config.particles`` particles with uniform random impact parameters.

    Failed trajectories are kept in the outcome list with ``error`` set and are
    left out of the histogram, which spans [-pi, pi].
    """
    bs = impact_parameters(config)
    n = bs.size
    cx, cy, ck = config.center_arrays()
    alpha = np.empty(n)
    steps = np.empty(n, dtype=np.int64)
    drift = np.empty(n)
    status = np.empty(n, dtype=np.int64)

    def call(lo, hi):
        _sweep_kernel(bs, cx, cy, ck, config.mass, config.v0, config.start_x, config.stop_x,
                      config.dt, int(config.max_steps), lo, hi, alpha, steps, drift, status)

    run_chunked(call, n, threads, min_chunk=16)
    outcomes = []
    for i in range(n):
        err = _STATUS_TEXT.get(int(status[i]))
        if err is None and drift[i] > config.drift_tolerance:
            err = "energy-drift"
        outcomes.append(TrajectoryOutcome(float(bs[i]), float(alpha[i]), int(steps[i]), float(drift[i]), err))
    good = alpha[status == _OK]
    hist = histogram(good, -math.pi, math.pi + 1e-12, bins)
    return hist, outcomes


def analytic_single_center_angle(b: float, kqq: float = 1.0, mass: float = 1.0, v0: float = 1.0) -> float:
    """Rutherford deflection 2*atan(kqQ / (m v0**2 b)) for b > 0."""
    if b <= 0:
        raise ValueError(f"impact parameter must be positive, got {b}")
    return 2.0 * math.atan(kqq / (mass * v0 * v0 * b))
