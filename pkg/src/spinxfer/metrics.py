"""Fidelity, entanglement, leakage and eavesdropping measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import AmplitudeState

CLIP = 1e-12


def _check_unit(name, x):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def average_fidelity(f: float) -> float:
    """Bloch-sphere averaged transfer fidelity, 1/3 + (1 + F)^2 / 6."""
    _check_unit("F", f)
    return 1.0 / 3.0 + (1.0 + f) ** 2 / 6.0


def average_fidelity_from_amplitude(amplitude: complex) -> float:
    """Bloch-sphere average for the channel |1> -> f|N> + (interior), |0> -> |0>.

    Equals 1/2 + Re(f)/3 + |f|^2/6; it coincides with ``average_fidelity``
    evaluated at |f| when f is real and positive.
    """
    f = complex(amplitude)
    if abs(f) > 1.0 + CLIP:
        raise ValueError(f"|f| must not exceed 1, got {abs(f)}")
    return 0.5 + f.real / 3.0 + abs(f) ** 2 / 6.0


def _xlog2x(x):
    return 0.0 if x <= 0.0 else x * math.log2(x)


def entanglement_of_formation(f: float) -> float:
    """Entanglement of formation after sending half of a singlet with fidelity F."""
    _check_unit("F", f)
    r = math.sqrt(1.0 - f)
    return -_xlog2x((1.0 + r) / 2.0) - _xlog2x((1.0 - r) / 2.0)


def leakage(state: AmplitudeState | np.ndarray) -> float:
    """Total interior occupation 1 - |c_1|^2 - |c_N|^2."""
    c = state.amplitudes if isinstance(state, AmplitudeState) else np.asarray(state)
    p = np.abs(c) ** 2
    return float(np.clip(1.0 - p[0] - p[-1], 0.0, 1.0))


def time_averaged_leakage(traj, t_stop: float | None = None) -> float:
    """Trapezoidal time average of the leakage over [0, t_stop].

    ``t_stop`` defaults to the end of the trajectory; samples beyond it are
    ignored.
    """
    t = traj.times
    eps = traj.leakage
    if t_stop is not None:
        keep = t <= t_stop * (1 + 1e-12)
        t, eps = t[keep], eps[keep]
    if t.size < 2 or t[-1] == t[0]:
        return float(eps[0])
    return float(np.trapezoid(eps, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class SenderState:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2 pi), got {self.phi}")


@dataclass(frozen=True)
class EavesdropperScope:
    """``site=None`` is the powerful eavesdropper (all interior spins);
    an integer is the weak one holding only that (1-based) interior site."""

    site: int | None = None

    @classmethod
    def powerful(cls) -> "EavesdropperScope":
        return cls(None)

    @classmethod
    def weak(cls, site: int) -> "EavesdropperScope":
        return cls(site)

    @property
    def kind(self) -> str:
        return "powerful" if self.site is None else "weak"

    def validate(self, n_sites: int):
        if self.site is not None and not 2 <= self.site <= n_sites - 1:
            raise ValueError(f"weak eavesdropper site must be in [2, {n_sites - 1}], "
                             f"got {self.site}")

    def accessible_weight(self, state: AmplitudeState) -> float:
        """a = epsilon (powerful) or |c_n|^2 (weak)."""
        self.validate(state.amplitudes.size)
        if self.site is None:
            return leakage(state)
        return float(np.clip(abs(state.amplitudes[self.site - 1]) ** 2, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class EffectiveDensityMatrix:
    """2x2 reduced state on {vacuum-like, excited-like} basis vectors."""

    matrix: np.ndarray
    basis: tuple[str, str] = ("0", "1")

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("effective density matrix must be 2x2")
        if np.max(np.abs(m - m.conj().T)) > CLIP:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > CLIP:
            raise ValueError(f"density matrix trace {np.trace(m).real} != 1")
        if np.min(np.linalg.eigvalsh(m)) < -CLIP:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def interior_state(state: AmplitudeState) -> np.ndarray:
    """Unit-norm interior excitation (c_2, ..., c_{N-1}) / sqrt(sum |c_k|^2)."""
    c = state.amplitudes[1:-1]
    norm = math.sqrt(float(np.sum(np.abs(c) ** 2)))
    if norm == 0.0:
        return np.zeros_like(c)
    return c / norm


def reduced_pair(a: float, theta: float, phi: float):
    """The two 2x2 matrices held by the eavesdropper for accessible weight ``a``."""
    _check_unit("a", a)
    s2 = math.sin(theta / 2.0) ** 2
    c2 = math.cos(theta / 2.0) ** 2
    coh = math.sqrt(a) * math.cos(theta / 2.0) * math.sin(theta / 2.0) * np.exp(1j * phi)
    rho = np.array([[1.0 - a * s2, np.conj(coh)], [coh, a * s2]])
    rho_perp = np.array([[1.0 - a * c2, -np.conj(coh)], [-coh, a * c2]])
    return rho, rho_perp


def eavesdropper_states(state: AmplitudeState, sender: SenderState,
                        scope: EavesdropperScope):
    """Reduced states of the eavesdropped spins for the sender's state and its orthogonal partner.

    The excited-like basis vector is the normalized interior excitation for
    the powerful eavesdropper and |1>_n for the weak one.
    """
    a = scope.accessible_weight(state)
    rho, rho_perp = reduced_pair(a, sender.theta, sender.phi)
    basis = ("0~", "Psi~") if scope.site is None else (f"0_{scope.site}", f"1_{scope.site}")
    return EffectiveDensityMatrix(rho, basis), EffectiveDensityMatrix(rho_perp, basis)


def trace_distance(rho: EffectiveDensityMatrix, sigma: EffectiveDensityMatrix) -> float:
    """Half the trace norm of rho - sigma, from the closed-form 2x2 eigenvalues."""
    if rho.basis != sigma.basis:
        raise ValueError(f"basis mismatch: {rho.basis} vs {sigma.basis}")
    d = rho.matrix - sigma.matrix
    mean = 0.5 * (d[0, 0] + d[1, 1]).real
    half_diff = 0.5 * (d[0, 0] - d[1, 1]).real
    r = math.hypot(half_diff, abs(d[0, 1]))
    return 0.5 * (abs(mean + r) + abs(mean - r))


def distinguishability(a: float, theta: float) -> float:
    """sqrt(a^2 cos^2 theta + a sin^2 theta)."""
    _check_unit("a", a)
    return math.sqrt(a * a * math.cos(theta) ** 2 + a * math.sin(theta) ** 2)


def success_probability(d: float) -> float:
    """Helstrom probability of telling two equiprobable states apart at trace distance d."""
    return 0.5 * (1.0 + d)
