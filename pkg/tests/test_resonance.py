import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinxfer.chain import ChainRealization, chain_spectrum
from spinxfer.disorder import DisorderSpec, sample_realization
from spinxfer.errors import MinimumOnBoundary, VanishingCoupling
from spinxfer.resonance import (
    default_halfwidth,
    doublet_gap,
    find_anticrossing,
    gap_profile,
    golden_section,
    localization_defect,
)

GAP3 = (math.sqrt(33) - 5) / 2
DELTA3 = 0.032402930055377754  # symmetric-sector eigenvector of [[5, sqrt2], [sqrt2, 0]]


def homog(n, b=5.0):
    return ChainRealization.homogeneous(n).with_terminal_fields(b, b)


def test_three_site_gap():
    assert doublet_gap(homog(3), 5.0, 0.0) == pytest.approx(GAP3, abs=1e-13)


def test_three_site_defect_matches_sector_oracle():
    m = np.array([[5.0, math.sqrt(2)], [math.sqrt(2), 0.0]])
    _, v = np.linalg.eigh(m)
    oracle = 0.5 - v[0, 1] ** 2 / 2
    assert oracle == pytest.approx(DELTA3, abs=1e-15)
    assert localization_defect(chain_spectrum(homog(3))) == pytest.approx(DELTA3, abs=1e-12)


def test_two_site_defect_zero():
    assert localization_defect(chain_spectrum(ChainRealization.homogeneous(2))) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8, 10])
def test_homogeneous_anticrossing_at_zero(n):
    res = find_anticrossing(homog(n), 5.0)
    assert abs(res.delta_b_star) < 1e-8
    assert 0 <= res.localization_defect <= 1


def test_three_site_half_splitting():
    res = find_anticrossing(homog(3), 5.0)
    assert res.half_splitting == pytest.approx(GAP3 / 2, abs=1e-9)


def test_mirror_symmetry_of_gap():
    # raising the first field by d matches raising the last field by d
    chain = homog(6)
    for d in (-0.3, 0.01, 0.2):
        a = chain_spectrum(chain.with_terminal_fields(5 + d, 5), warn=False).doublet_splitting
        b = chain_spectrum(chain.with_terminal_fields(5, 5 + d), warn=False).doublet_splitting
        assert a == pytest.approx(b, rel=1e-12)


def test_gap_profile_validates_grid():
    with pytest.raises(ValueError):
        gap_profile(homog(4), 5.0, [])
    with pytest.raises(ValueError):
        gap_profile(homog(4), 5.0, [0.1, 0.0])


def test_profile_minimum_near_result():
    res = find_anticrossing(homog(4), 5.0)
    gaps = [g for _, g in res.gap_profile]
    assert min(gaps) >= 2 * res.half_splitting * (1 - 1e-6)


def test_defect_independent_of_length():
    d = [find_anticrossing(homog(n), 5.0).localization_defect for n in range(5, 21)]
    assert max(d) - min(d) < 0.01


def test_half_splitting_decreases_with_length():
    v = [find_anticrossing(homog(n), 5.0).half_splitting for n in range(3, 16)]
    assert all(b < a for a, b in zip(v, v[1:]))


def test_bare_detuning_is_compensated():
    shifted = ChainRealization([1.0] * 5, [1.0, 0, 0, 0, 0, 0], 5.0, 5.0)
    assert find_anticrossing(shifted, 5.0).delta_b_star == pytest.approx(-1.0, abs=0.01)


def test_small_window_hits_boundary():
    # a strong first bond shifts the sender level by roughly (1.5^2 - 1) / 5
    skewed = ChainRealization([1.5, 1.0, 1.0, 1.0, 1.0], [0.0] * 6, 5.0, 5.0)
    with pytest.raises(MinimumOnBoundary):
        find_anticrossing(skewed, 5.0, search_halfwidth=0.05)
    assert find_anticrossing(skewed, 5.0, search_halfwidth=1.0).delta_b_star < -0.1


def test_vanishing_coupling():
    with pytest.raises(VanishingCoupling):
        find_anticrossing(homog(20, 10.0), 10.0)


def test_tiny_coupling_resolved():
    # each extra site divides V by B = 5 deep in the isolated regime
    v19 = find_anticrossing(homog(19), 5.0).half_splitting
    v20 = find_anticrossing(homog(20), 5.0).half_splitting
    assert v19 / v20 == pytest.approx(5.0, rel=1e-2)


def test_rejects_weak_terminal_field():
    with pytest.raises(ValueError):
        find_anticrossing(ChainRealization.homogeneous(4), 1.0)


def test_default_halfwidth():
    assert default_halfwidth(0.0) == 0.5
    assert default_halfwidth(1.0) == 3.5


def test_golden_section_quadratic():
    x, fx = golden_section(lambda x: (x - 0.3) ** 2 + 1.0, -1.0, 2.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert fx == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 4.0), st.integers(3, 8))
def test_energy_rescaling(s, n):
    spec = DisorderSpec.from_variances(n, 0.05, 0.05, master_seed=2)
    chain = sample_realization(spec, 0)
    scaled = ChainRealization(chain.couplings * s, chain.static_fields * s, 5.0 * s, 5.0 * s)
    a = find_anticrossing(chain, 5.0, sigma_b=spec.sigma_b)
    b = find_anticrossing(scaled, 5.0 * s, sigma_b=spec.sigma_b * s)
    assert b.half_splitting == pytest.approx(s * a.half_splitting, rel=1e-6)
    assert b.delta_b_star / s == pytest.approx(a.delta_b_star, abs=1e-8)
    assert b.localization_defect == pytest.approx(a.localization_defect, abs=1e-9)


def test_disordered_resonance_scatters():
    spec = DisorderSpec.from_variances(10, 0.1, 0.5, master_seed=0)
    star = np.array([find_anticrossing(sample_realization(spec, i), 5.0,
                                       sigma_b=spec.sigma_b).delta_b_star for i in range(100)])
    assert star.std() > 0.1


@pytest.mark.xfail(strict=True, reason="V is log-normally spread under this disorder "
                   "(std/mean about 1.8); see the decisions ledger")
def test_disordered_width_stable():
    spec = DisorderSpec.from_variances(10, 0.1, 0.5, master_seed=0)
    res = [find_anticrossing(sample_realization(spec, i), 5.0, sigma_b=spec.sigma_b)
           for i in range(100)]
    v = np.array([r.half_splitting for r in res])
    star = np.array([r.delta_b_star for r in res])
    assert v.std() / v.mean() < 0.5
    assert star.std() > 0.1
