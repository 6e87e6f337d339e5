"""Single-excitation XY spin chain: Hamiltonian, spectrum and exact propagation.

Units: hbar = 1, energies in units of the mean coupling J, times in hbar/J.
Site k of the chain is index k-1 in every array.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IsolationWarning
from .jacobi import jacobi_eigh


def _frozen_array(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ChainRealization:
    couplings: np.ndarray
    static_fields: np.ndarray
    ext_field_first: float = 0.0
    ext_field_last: float = 0.0

    def __post_init__(self):
        couplings = _frozen_array(self.couplings)
        fields = _frozen_array(self.static_fields)
        if couplings.ndim != 1 or fields.ndim != 1:
            raise ValueError("couplings and static_fields must be 1-D")
        if fields.size < 2:
            raise ValueError(f"need at least 2 sites, got {fields.size}")
        if couplings.size != fields.size - 1:
            raise ValueError(
                f"expected {fields.size - 1} couplings for {fields.size} sites, "
                f"got {couplings.size}"
            )
        ext = (float(self.ext_field_first), float(self.ext_field_last))
        if not (np.all(np.isfinite(couplings)) and np.all(np.isfinite(fields))
                and np.all(np.isfinite(ext))):
            raise ValueError("chain parameters must be finite")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "static_fields", fields)
        object.__setattr__(self, "ext_field_first", ext[0])
        object.__setattr__(self, "ext_field_last", ext[1])

    @property
    def n_sites(self) -> int:
        return self.static_fields.size

    @classmethod
    def homogeneous(cls, n_sites: int, terminal_field: float = 0.0, coupling: float = 1.0):
        return cls(np.full(n_sites - 1, coupling), np.zeros(n_sites),
                   terminal_field, terminal_field)

    def with_terminal_fields(self, first: float, last: float) -> "ChainRealization":
        return dataclasses.replace(self, ext_field_first=first, ext_field_last=last)

    def with_detuning(self, delta_b: float) -> "ChainRealization":
        """Set B_1^ext = B_N^ext + delta_b, keeping the receiver field."""
        return self.with_terminal_fields(self.ext_field_last + delta_b, self.ext_field_last)

    def diagonal(self) -> np.ndarray:
        d = np.array(self.static_fields)
        d[0] += self.ext_field_first
        d[-1] += self.ext_field_last
        return d

    def __eq__(self, other):
        if not isinstance(other, ChainRealization):
            return NotImplemented
        return (np.array_equal(self.couplings, other.couplings)
                and np.array_equal(self.static_fields, other.static_fields)
                and self.ext_field_first == other.ext_field_first
                and self.ext_field_last == other.ext_field_last)

    def to_dict(self) -> dict:
        return {
            "couplings": self.couplings.tolist(),
            "static_fields": self.static_fields.tolist(),
            "ext_field_first": self.ext_field_first,
            "ext_field_last": self.ext_field_last,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChainRealization":
        return cls(data["couplings"], data["static_fields"],
                   data.get("ext_field_first", 0.0), data.get("ext_field_last", 0.0))


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    doublet_indices: tuple[int, int]
    guard_gap: float

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size

    @property
    def doublet_splitting(self) -> float:
        i, j = self.doublet_indices
        return float(abs(self.eigenvalues[i] - self.eigenvalues[j]))

    @property
    def isolated(self) -> bool:
        return self.guard_gap >= self.doublet_splitting


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes, np.complex128)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("amplitudes must be a 1-D array over at least two sites")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def localized(cls, n_sites: int, site: int = 1) -> "AmplitudeState":
        """Single excitation on ``site`` (1-based)."""
        c = np.zeros(n_sites, dtype=np.complex128)
        c[site - 1] = 1.0
        return cls(c, 0.0)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.populations))


def build_hamiltonian(chain: ChainRealization) -> np.ndarray:
    """Tridiagonal single-excitation Hamiltonian of ``chain``."""
    n = chain.n_sites
    h = np.zeros((n, n))
    h[np.arange(n), np.arange(n)] = chain.diagonal()
    k = np.arange(n - 1)
    h[k, k + 1] = chain.couplings
    h[k + 1, k] = chain.couplings
    return h


def isolated_doublet(eigenvalues, eigenvectors, *, warn: bool = True):
    """Locate the two top eigenstates and the gap separating them from the rest.

    Returns ``((upper, lower), guard_gap)``. When the two top eigenvalues tie
    exactly, the state with the larger site-1 overlap is listed first.
    Emits an IsolationWarning if the guard gap is smaller than the doublet
    splitting.
    """
    n = len(eigenvalues)
    upper, lower = n - 1, n - 2
    if eigenvalues[upper] == eigenvalues[lower] and (
            abs(eigenvectors[0, lower]) > abs(eigenvectors[0, upper])):
        upper, lower = lower, upper
    if n > 2:
        guard = float(eigenvalues[n - 2] - eigenvalues[n - 3])
    else:
        guard = float("inf")
    splitting = float(eigenvalues[n - 1] - eigenvalues[n - 2])
    if warn and guard < splitting:
        warnings.warn(
            f"terminal doublet not isolated: guard gap {guard:.4g} < splitting {splitting:.4g}",
            IsolationWarning, stacklevel=2,
        )
    return (upper, lower), guard


def diagonalize(h, *, warn: bool = True) -> Spectrum:
    w, v = jacobi_eigh(h)
    w.setflags(write=False)
    v.setflags(write=False)
    (upper, lower), guard = isolated_doublet(w, v, warn=warn)
    return Spectrum(w, v, (upper, lower), guard)


def chain_spectrum(chain: ChainRealization, *, warn: bool = True) -> Spectrum:
    return diagonalize(build_hamiltonian(chain), warn=warn)


def propagate(spec: Spectrum, initial: AmplitudeState, t: float) -> AmplitudeState:
    """Evolve ``initial`` by ``t`` in the eigenbasis of ``spec``."""
    if t == 0:
        return AmplitudeState(initial.amplitudes, initial.time)
    v = spec.eigenvectors
    coeff = v.T @ initial.amplitudes
    c = v @ (np.exp(-1j * spec.eigenvalues * t) * coeff)
    return AmplitudeState(c, initial.time + t)


def propagate_many(spec: Spectrum, c0, times) -> np.ndarray:
    """Amplitudes at each of ``times`` (rows) from initial amplitudes ``c0``."""
    v = spec.eigenvectors
    coeff = v.T @ np.asarray(c0, dtype=np.complex128)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=np.float64), spec.eigenvalues))
    return (phases * coeff) @ v.T
