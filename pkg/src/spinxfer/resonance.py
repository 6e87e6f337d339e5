"""Locating the terminal-state anticrossing and its effective coupling."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainRealization, Spectrum, chain_spectrum
from .errors import IsolationWarning, MinimumOnBoundary, VanishingCoupling

MIN_TERMINAL_FIELD = 2.0
MIN_COUPLING = 1e-14
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ResonanceResult:
    delta_b_star: float
    half_splitting: float
    localization_defect: float
    gap_profile: list = field(default_factory=list)
    terminal_weight: float = float("nan")
    guard_gap: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "delta_b_star": self.delta_b_star,
            "half_splitting": self.half_splitting,
            "localization_defect": self.localization_defect,
            "terminal_weight": self.terminal_weight,
            "guard_gap": self.guard_gap,
            "gap_profile": [[float(x), float(g)] for x, g in self.gap_profile],
        }


def _check_terminal_field(b_bar):
    if not b_bar >= MIN_TERMINAL_FIELD:
        raise ValueError(
            f"mean terminal field {b_bar} is below the isolation threshold {MIN_TERMINAL_FIELD}"
        )


def detuned(chain: ChainRealization, b_bar: float, delta_b: float) -> ChainRealization:
    return chain.with_terminal_fields(b_bar + delta_b, b_bar)


def doublet_gap(chain: ChainRealization, b_bar: float, delta_b: float) -> float:
    spec = chain_spectrum(detuned(chain, b_bar, delta_b), warn=False)
    return spec.doublet_splitting


def gap_profile(chain: ChainRealization, b_bar: float, grid) -> list[tuple[float, float]]:
    """Doublet gap at each asymmetry in ``grid`` (sorted, nonempty)."""
    _check_terminal_field(b_bar)
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("delta-B grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("delta-B grid must be sorted")
    out = []
    for x in grid:
        spec = chain_spectrum(detuned(chain, b_bar, x), warn=False)
        if not spec.isolated:
            warnings.warn(f"doublet not isolated at delta_B={x:.6g}", IsolationWarning,
                          stacklevel=2)
        out.append((x, spec.doublet_splitting))
    return out


def golden_section(f, a: float, b: float, tol: float):
    """Minimize a unimodal ``f`` on [a, b] until the bracket is below ``tol``.

    Returns the best evaluated point and its value.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc < best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd < best[1]:
                best = (d, fd)
    return best


def localization_defect(spec: Spectrum) -> float:
    """1 - |<1|Psi_N>|^2 - |<1|Psi_{N-1}>|^2, clipped to [0, 1]."""
    i, j = spec.doublet_indices
    v = spec.eigenvectors
    return float(np.clip(1.0 - v[0, i] ** 2 - v[0, j] ** 2, 0.0, 1.0))


def terminal_weight(spec: Spectrum) -> float:
    """Smallest combined site-1 + site-N weight among the two doublet states."""
    v = spec.eigenvectors
    return float(min(v[0, k] ** 2 + v[-1, k] ** 2 for k in spec.doublet_indices))


def terminal_imbalance(spec: Spectrum) -> float:
    """|<1|Psi_N>|^2 - |<N|Psi_N>|^2 for the upper doublet state.

    Negative while the upper state sits on the receiver, positive once it has
    moved to the sender; it crosses zero where the two terminal states are
    resonant.
    """
    v = spec.eigenvectors[:, spec.doublet_indices[0]]
    return float(v[0] ** 2 - v[-1] ** 2)


def default_halfwidth(sigma_b: float) -> float:
    return 3.0 * sigma_b + 0.5


def _bisect(spectrum_at, a: float, b: float, fa: float, tol: float) -> float:
    """Zero of the terminal imbalance in [a, b].

    Stops once the bracket is below both ``tol`` and 1e-6 of the local gap,
    so tiny splittings are not swamped by the position error, or when the
    bracket cannot shrink further in floating point.
    """
    gap = math.inf
    while b - a > min(tol, 1e-6 * gap):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        spec = spectrum_at(m)
        fm = terminal_imbalance(spec)
        gap = spec.doublet_splitting
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def find_anticrossing(chain: ChainRealization, b_bar: float, search_halfwidth: float | None = None,
                      coarse_points: int = 33, tol: float = 1e-10,
                      sigma_b: float = 0.0) -> ResonanceResult:
    """Find the compensating asymmetry delta_B* that brings the terminal states to resonance.

    The window is centred on the bare terminal detuning
    ``static_fields[-1] - static_fields[0]`` (zero for clean chains) and spans
    ``search_halfwidth`` on either side, by default ``3 sigma_b + 0.5``.
    A coarse scan of the doublet gap brackets the anticrossing; inside the
    bracket delta_B* is refined (see ``_bisect``) as the zero of the upper doublet
    state's terminal imbalance (equal weight on sites 1 and N). The
    half-splitting V is half the doublet gap there.
    """
    _check_terminal_field(b_bar)
    if search_halfwidth is None:
        search_halfwidth = default_halfwidth(sigma_b)
    if not search_halfwidth > 0:
        raise ValueError("search_halfwidth must be positive")
    if coarse_points < 33:
        raise ValueError(f"coarse_points must be >= 33, got {coarse_points}")
    if not 0 < tol <= 1e-10:
        raise ValueError(f"tol must be in (0, 1e-10], got {tol}")

    def spectrum_at(x):
        return chain_spectrum(detuned(chain, b_bar, x), warn=False)

    center = float(chain.static_fields[-1] - chain.static_fields[0])
    offsets = np.linspace(-search_halfwidth, search_halfwidth, coarse_points)
    grid = center + offsets
    spectra = [spectrum_at(x) for x in grid]
    gaps = np.array([s.doublet_splitting for s in spectra])
    imbalance = np.array([terminal_imbalance(s) for s in spectra])
    profile = [(float(x), float(g)) for x, g in zip(grid, gaps)]

    # ties: closest to the window centre wins
    k = int(np.lexsort((np.abs(offsets), gaps))[0])
    if k == 0 or k == coarse_points - 1:
        raise MinimumOnBoundary(
            f"gap minimum at the edge of the search window (delta_B={grid[k]:.6g}); "
            "widen search_halfwidth"
        )
    if imbalance[k] == 0.0:
        x_star = float(grid[k])
    else:
        # the imbalance changes sign between k and the neighbour on the other side
        j = k + 1 if imbalance[k] < 0 else k - 1
        if np.sign(imbalance[j]) == np.sign(imbalance[k]):
            raise MinimumOnBoundary(
                f"no terminal resonance next to the gap minimum at delta_B={grid[k]:.6g}"
            )
        lo, hi = sorted((k, j))
        x_star = _bisect(spectrum_at, float(grid[lo]), float(grid[hi]),
                         float(imbalance[lo]), tol)

    spec = chain_spectrum(detuned(chain, b_bar, x_star))
    v = spec.doublet_splitting / 2.0
    if v < MIN_COUPLING:
        raise VanishingCoupling(f"half-splitting {v:.3e} is below {MIN_COUPLING:g}")
    return ResonanceResult(
        delta_b_star=float(x_star),
        half_splitting=float(v),
        localization_defect=localization_defect(spec),
        gap_profile=profile,
        terminal_weight=terminal_weight(spec),
        guard_gap=spec.guard_gap,
    )
