"""Free-evolution transfer at fixed terminal fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import AmplitudeState, ChainRealization, chain_spectrum, propagate_many
from .errors import VanishingCoupling

SAMPLES_PER_TRANSFER = 500
HORIZON_FACTOR = 1.5


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # shape (len(times), N)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if times.ndim != 1 or amps.shape[0] != times.size:
            raise ValueError("times and amplitudes do not line up")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amps)

    def __len__(self):
        return self.times.size

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def states(self) -> list[AmplitudeState]:
        return [AmplitudeState(c, t) for t, c in zip(self.times, self.amplitudes)]

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def occ_first(self) -> np.ndarray:
        return self.populations[:, 0]

    @property
    def occ_last(self) -> np.ndarray:
        return self.populations[:, -1]

    @property
    def fidelity(self) -> np.ndarray:
        return self.occ_last

    @property
    def leakage(self) -> np.ndarray:
        p = self.populations
        return np.clip(1.0 - p[:, 0] - p[:, -1], 0.0, 1.0)

    @property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)


def free_transfer_time(v: float) -> float:
    """tau_f = pi / (2 V)."""
    if not v > 0:
        raise VanishingCoupling(f"effective coupling must be positive, got {v}")
    return math.pi / (2.0 * v)


def sample_times(horizon: float, dt: float) -> np.ndarray:
    if not (horizon > 0 and dt > 0):
        raise ValueError("horizon and dt must be positive")
    n = max(1, math.ceil(horizon / dt - 1e-9))
    return np.arange(n + 1) * dt


def simulate_free(chain: ChainRealization, delta_b: float, horizon: float,
                  dt: float) -> Trajectory:
    """Exact evolution of |1> with B_1^ext = B_N^ext + delta_b, sampled every dt."""
    detuned = chain.with_detuning(delta_b)
    spec = chain_spectrum(detuned, warn=False)
    times = sample_times(horizon, dt)
    c0 = np.zeros(chain.n_sites, dtype=np.complex128)
    c0[0] = 1.0
    amps = propagate_many(spec, c0, times)
    amps[0] = c0
    return Trajectory(times, amps)


def peak_fidelity(traj: Trajectory) -> tuple[float, float]:
    """Largest sampled receiver occupation and its time, refined by a parabola.

    The parabola through the maximum and its two neighbours is used only
    when it is concave with its vertex between those neighbours.
    """
    f = traj.fidelity
    t = traj.times
    i = int(np.argmax(f))
    f_max, t_max = float(f[i]), float(t[i])
    if 0 < i < len(f) - 1:
        # local coordinates around t[i]; absolute times can reach 1e9
        x0, x2 = t[i - 1] - t[i], t[i + 1] - t[i]
        d0, d2 = f[i - 1] - f[i], f[i + 1] - f[i]
        det = x0 * x2 * (x0 - x2)
        a = (d0 * x2 - d2 * x0) / det
        b = (x0 * x0 * d2 - x2 * x2 * d0) / det
        if a < 0:
            xv = -b / (2 * a)
            if x0 < xv < x2:
                fv = f[i] - b * b / (4 * a)
                f_max, t_max = min(float(fv), 1.0), float(t[i] + xv)
    return f_max, t_max


def max_fidelity(chain: ChainRealization, delta_b: float, horizon: float,
                 dt: float) -> tuple[float, float, Trajectory]:
    """Peak receiver occupation with the fast band oscillations resolved.

    The coarse trajectory locates the peak; the window of one coarse step on
    either side is then re-evaluated exactly on a grid fine enough to resolve
    the highest frequency in the spectrum.
    """
    traj = simulate_free(chain, delta_b, horizon, dt)
    f_max, t_max = peak_fidelity(traj)
    spec = chain_spectrum(chain.with_detuning(delta_b), warn=False)
    spread = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    step = min(dt, math.pi / (8.0 * spread)) if spread > 0 else dt
    n_fine = min(20001, 2 * math.ceil(dt / step) + 1)
    lo = max(0.0, t_max - dt)
    fine_t = np.linspace(lo, min(traj.times[-1], t_max + dt), n_fine)
    c0 = traj.amplitudes[0]
    fine = Trajectory(fine_t, propagate_many(spec, c0, fine_t))
    f_fine, t_fine = peak_fidelity(fine)
    if f_fine > f_max:
        f_max, t_max = f_fine, t_fine
    return f_max, t_max, traj
