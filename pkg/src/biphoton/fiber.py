"""Dispersive fiber channel: quadratic spectral phase, loss, slow drift.

Group-velocity dispersion multiplies the pair amplitude at detuning Omega by
e^{i k2 z Omega^2} (the two photons sit at +-Omega, so their quadratic phases
add and the linear ones cancel).  For large k2*z the channel acts like a
far-field imaging system in time: the coincidence distribution becomes the
image of the spectral amplitude under tau = 2 k2 z Omega.

Slow polarization drift of the fiber is a seeded random walk on U(2); in the
go-and-return arrangement the walk is conjugated through the Faraday mirror
and drops out entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigurationError
from .jones import round_trip
from .state import BiphotonState, CrystalParams

# Independent substreams of a DriftProcess seed.
_STREAM_AXIS = 0
_STREAM_ANGLE = 1


@dataclass(frozen=True)
class DriftProcess:
    """Random walk of the fiber's polarization transformation.

    Every ``time_step`` the accumulated unitary is multiplied by a small
    rotation about a uniformly random axis; the step angle has standard
    deviation step_angle_scale * sqrt(time_step / correlation_time), so the
    drift angle accumulated over one correlation time is of order
    ``step_angle_scale``.  The default scale pi decorrelates the output
    polarization completely from one correlation time to the next, matching
    an interferometer that needs realignment every few minutes.
    """

    correlation_time: float = 360.0
    step_angle_scale: float = np.pi
    seed: int = 0
    time_step: float | None = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.correlation_time) or self.correlation_time <= 0.0:
            raise ConfigurationError("correlation_time must be finite and > 0")
        if not np.isfinite(self.step_angle_scale) or self.step_angle_scale < 0.0:
            raise ConfigurationError("step_angle_scale must be finite and >= 0")
        if self.time_step is None:
            object.__setattr__(self, "time_step", self.correlation_time / 100.0)
        if not np.isfinite(self.time_step) or self.time_step <= 0.0:
            raise ConfigurationError("time_step must be finite and > 0")


def drift_walk(process: DriftProcess, n_steps: int) -> np.ndarray:
    """Unitaries at walk steps 0..n_steps (inclusive), step 0 = identity.

    Deterministic in (seed, n_steps): axis and angle draws come from two
    independent substreams, so extending the horizon never changes the
    prefix of the trajectory.
    """
    out = np.empty((n_steps + 1, 2, 2), dtype=complex)
    out[0] = np.eye(2)
    if n_steps == 0:
        return out
    rng_axis = np.random.default_rng(np.random.SeedSequence([process.seed, _STREAM_AXIS]))
    rng_angle = np.random.default_rng(np.random.SeedSequence([process.seed, _STREAM_ANGLE]))
    axes = rng_axis.normal(size=(n_steps, 3))
    norms = np.linalg.norm(axes, axis=1)
    # A zero draw is probability zero; fall back to the z axis for safety.
    bad = norms == 0.0
    axes[bad] = (0.0, 0.0, 1.0)
    norms[bad] = 1.0
    axes /= norms[:, None]
    sigma = process.step_angle_scale * np.sqrt(process.time_step / process.correlation_time)
    angles = rng_angle.normal(size=n_steps) * sigma
    c = np.cos(angles / 2.0)
    s = np.sin(angles / 2.0)
    u = np.eye(2, dtype=complex)
    for j in range(n_steps):
        nx, ny, nz = axes[j]
        step = np.array(
            [
                [c[j] - 1j * s[j] * nz, (-1j * nx - ny) * s[j]],
                [(-1j * nx + ny) * s[j], c[j] + 1j * s[j] * nz],
            ]
        )
        u = step @ u
        out[j + 1] = u
    return out


def drift_sample(process: DriftProcess, t: float) -> np.ndarray:
    """Fiber unitary at time t (piecewise constant over walk steps)."""
    if not np.isfinite(t) or t < 0.0:
        raise ValueError(f"time must be finite and >= 0, got {t!r}")
    k = int(np.floor(t / process.time_step))
    return drift_walk(process, k)[k]


@dataclass(frozen=True)
class FiberChannel:
    """One fiber used once, or twice via a Faraday mirror at the far end."""

    k2: float
    geometric_length: float
    passes: Literal["single", "go_and_return"] = "single"
    loss_db_per_km: float = 0.0
    drift: DriftProcess = DriftProcess()

    def __post_init__(self) -> None:
        if not np.isfinite(self.k2):
            raise ConfigurationError("k2 must be finite")
        if not np.isfinite(self.geometric_length) or self.geometric_length <= 0.0:
            raise ConfigurationError("geometric_length must be finite and > 0")
        if self.passes not in ("single", "go_and_return"):
            raise ConfigurationError(f"unknown passes mode {self.passes!r}")
        if not np.isfinite(self.loss_db_per_km) or self.loss_db_per_km < 0.0:
            raise ConfigurationError("loss_db_per_km must be finite and >= 0")

    @property
    def z(self) -> float:
        """Dispersive path length: the geometric length times the pass count."""
        return self.geometric_length * (2.0 if self.passes == "go_and_return" else 1.0)


def tau_f(fiber: FiberChannel, crystal: CrystalParams) -> float:
    """Time scale 2 k2 z / tau0 of the dispersed correlation pattern."""
    tau0 = crystal.tau0
    if tau0 <= 0.0:
        raise ConfigurationError("crystal tau0 must be > 0")
    return 2.0 * fiber.k2 * fiber.z / tau0


def required_grid_n(fiber: FiberChannel, omega_max: float) -> int:
    """Smallest power-of-two grid n that samples the dispersion phase safely."""
    n_min = 8.0 * abs(fiber.k2) * fiber.z * omega_max**2 / np.pi + 2.0
    n = 256
    while n < n_min:
        n *= 2
    return n


def check_chirp_sampling(fiber: FiberChannel, grid) -> None:
    """Reject grids whose edge-to-edge chirp phase step reaches pi/4."""
    phase_step = abs(fiber.k2) * fiber.z * grid.omega_max * grid.domega
    if phase_step >= np.pi / 4.0:
        raise ConfigurationError(
            f"dispersion phase under-sampled (edge step {phase_step:.3g} rad >= pi/4); "
            f"use grid n >= {required_grid_n(fiber, grid.omega_max)}"
        )


def apply_gvd(state: BiphotonState, fiber: FiberChannel) -> BiphotonState:
    """Multiply the pair amplitude by the fiber's quadratic spectral phase.

    The phase step between neighboring grid points at the band edge must stay
    below pi/4, otherwise the sampled chirp aliases.
    """
    grid = state.grid
    check_chirp_sampling(fiber, grid)
    chirp = np.exp(1j * fiber.k2 * fiber.z * grid.omegas**2)
    return BiphotonState(grid=grid, crystal=state.crystal, amp=state.amp * chirp)


def channel_operator(fiber: FiberChannel, t: float) -> np.ndarray:
    """Polarization operator of the channel at time t.

    Drift is lumped at the fiber midpoint; a single pass sees it once, the
    go-and-return arrangement sees it forward, then mirrored, then reversed,
    which reduces it to a constant Faraday mirror times a phase.
    """
    u = drift_sample(fiber.drift, t)
    if fiber.passes == "single":
        return u
    return round_trip(u)


def transmittance(fiber: FiberChannel) -> float:
    """Single-photon power transmission over the dispersive path length."""
    return float(10.0 ** (-fiber.loss_db_per_km * (fiber.z / 1000.0) / 10.0))
