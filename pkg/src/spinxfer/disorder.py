"""Reproducible Gaussian disorder for spin-chain realizations.

Random stream (fully specified so other implementations can reproduce it):

* ``mix64(z)`` is the SplitMix64 finalizer::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      z =  z ^ (z >> 31)                      (all mod 2**64)

* A realization stream is a SplitMix64 generator whose state starts at
  ``mix64(mix64(master_seed) ^ index)``. Each draw adds
  ``GAMMA = 0x9E3779B97F4A7C15`` to the state and returns ``mix64(state)``.
* Uniforms are ``(x >> 11) * 2**-53`` in [0, 1).
* Normals come in Box-Muller pairs from two consecutive uniforms u1, u2:
  ``r = sqrt(-2 ln(1 - u1))``, ``z0 = r cos(2 pi u2)``, ``z1 = r sin(2 pi u2)``.
* A realization draws N-1 coupling normals, then N field normals, from one
  continuous normal sequence (a pair may straddle the two groups).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .chain import ChainRealization

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, state: int):
        self.state = state & MASK64
        self._spare = None

    @classmethod
    def for_realization(cls, master_seed: int, index: int) -> "SplitMix64":
        if index < 0:
            raise ValueError(f"realization index must be >= 0, got {index}")
        return cls(mix64(mix64(master_seed) ^ (index & MASK64)))

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class DisorderSpec:
    """Gaussian disorder: J_k ~ N(J, sigma_j^2), B_k ~ N(0, sigma_b^2)."""

    n_sites: int
    sigma_j: float = 0.0
    sigma_b: float = 0.0
    mean_terminal_field: float = 5.0
    master_seed: int = 0
    mean_coupling: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.sigma_j < 0 or self.sigma_b < 0:
            raise ValueError("standard deviations must be non-negative")
        if self.mean_terminal_field < 0:
            raise ValueError("mean_terminal_field must be non-negative")

    @classmethod
    def from_variances(cls, n_sites: int, sigma_j2: float = 0.0, sigma_b2: float = 0.0,
                       **kwargs) -> "DisorderSpec":
        """Build from normalized variances (sigma/J)^2, with J = 1."""
        if sigma_j2 < 0 or sigma_b2 < 0:
            raise ValueError("variances must be non-negative")
        return cls(n_sites, math.sqrt(sigma_j2), math.sqrt(sigma_b2), **kwargs)

    @property
    def sigma_j_norm(self) -> float:
        return self.sigma_j / self.mean_coupling

    @property
    def sigma_b_norm(self) -> float:
        return self.sigma_b / self.mean_coupling

    @property
    def sigma_j_norm2(self) -> float:
        return self.sigma_j_norm**2

    @property
    def sigma_b_norm2(self) -> float:
        return self.sigma_b_norm**2


def sample_realization(spec: DisorderSpec, index: int) -> ChainRealization:
    """Realization ``index`` of ``spec``; bit-exact for a given (master_seed, index).

    Both terminal external fields start at the mean terminal field; the
    compensating asymmetry is applied later.
    """
    rng = SplitMix64.for_realization(spec.master_seed, index)
    n = spec.n_sites
    couplings = [spec.mean_coupling + spec.sigma_j * rng.normal() for _ in range(n - 1)]
    fields = [spec.sigma_b * rng.normal() + 0.0 for _ in range(n)]  # no -0.0
    b = spec.mean_terminal_field
    return ChainRealization(couplings, fields, b, b)


def realization_record(spec: DisorderSpec, index: int, chain: ChainRealization) -> dict:
    """JSON-ready audit record of one realization."""
    return {"master_seed": spec.master_seed, "index": index, **chain.to_dict()}
