import math

import numpy as np
import pytest

from thresholds.errors import DomainError, MissingAxisError
from thresholds.infomeasures import (
    JointTable,
    ProbVector,
    ball_volume,
    conditional_mi,
    dist_entropy,
    fano_bound,
    hq,
    hq_multi,
    hql,
    joint_measures,
)


def random_joint(shape, seed):
    rng = np.random.default_rng(seed)
    t = rng.random(shape)
    return t / t.sum()


# ---------------------------------------------------------------------------
# the scalar entropy functions
# ---------------------------------------------------------------------------


def test_hq_binary_midpoint():
    assert hq(2, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_hq_endpoints():
    for q in (2, 3, 5, 8):
        assert hq(q, 0.0) == 0.0
        assert hq(q, 1.0) == pytest.approx(math.log(q - 1) / math.log(q), abs=1e-15)


def test_hq_peak_at_plotkin_radius():
    # maximized at 1 - 1/q where it equals 1
    for q in (2, 3, 7):
        assert hq(q, 1 - 1 / q) == pytest.approx(1.0, abs=1e-14)
        assert hq(q, 1 - 1 / q - 0.05) < 1.0


def test_hq_domain():
    with pytest.raises(DomainError):
        hq(2, -0.01)
    with pytest.raises(DomainError):
        hq(2, 1.01)
    with pytest.raises(DomainError):
        hq(1, 0.3)


def test_hql_reduces_to_hq_at_ell_one():
    for rho in (0.01, 0.2, 0.45):
        assert hql(2, 1, rho) == pytest.approx(hq(2, rho), abs=1e-15)
        assert hql(5, 1, rho) == pytest.approx(hq(5, rho), abs=1e-15)


def test_hql_endpoints():
    q, ell = 5, 2
    assert hql(q, ell, 0.0) == pytest.approx(math.log(ell) / math.log(q), abs=1e-15)
    assert hql(q, ell, 1.0) == pytest.approx(math.log(q - ell) / math.log(q), abs=1e-15)


def test_hql_midpoint_symmetric_case():
    assert hql(4, 2, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_hq_multi_known_value():
    assert hq_multi(2, [0.25, 0.25]) == pytest.approx(1.5, abs=1e-15)
    assert hq_multi(2, [0.0, 0.0]) == 0.0


def test_hq_multi_mass_filtering():
    # zero masses contribute nothing rather than NaN
    assert hq_multi(3, [0.5, 0.0, 0.5]) == pytest.approx(
        math.log(2) / math.log(3), abs=1e-14
    )


def test_hq_multi_domain():
    with pytest.raises(DomainError):
        hq_multi(2, [0.7, 0.7])
    with pytest.raises(DomainError):
        hq_multi(2, [-0.1])


# ---------------------------------------------------------------------------
# distributions and joint tables
# ---------------------------------------------------------------------------


def test_probvector_clips_jitter_and_validates():
    p = ProbVector(np.array([0.5, 0.5 + 4e-13, -4e-13]))
    assert p.masses.min() >= 0.0
    with pytest.raises(DomainError):
        ProbVector(np.array([0.6, 0.6]))


def test_dist_entropy_bases():
    p = np.array([0.5, 0.5])
    assert dist_entropy(p) == pytest.approx(math.log(2), abs=1e-15)
    assert dist_entropy(p, base=2) == pytest.approx(1.0, abs=1e-15)


def test_chain_rule_two_axes():
    jt = JointTable(random_joint((4, 5), seed=1))
    m = joint_measures(jt, base=2)
    assert m["H_xy"] == pytest.approx(m["H_x"] + m["H_y_given_x"], abs=1e-12)
    assert m["I_xy"] == pytest.approx(m["H_x"] - m["H_x_given_y"], abs=1e-12)
    assert m["I_xy"] >= -1e-12


def test_chain_rule_three_axes():
    jt = JointTable(random_joint((3, 4, 3), seed=2))
    m = joint_measures(jt, base=2)
    assert m["H_xyz"] <= m["H_x"] + m["H_y"] + m["H_z"] + 1e-12
    assert m["H_x_given_yz"] <= m["H_x_given_y"] + 1e-12


def test_independent_table_has_zero_mi():
    px = np.array([0.3, 0.7])
    py = np.array([0.2, 0.5, 0.3])
    jt = JointTable(np.outer(px, py))
    m = joint_measures(jt, base=2)
    assert m["I_xy"] == pytest.approx(0.0, abs=1e-12)


def test_marginal_axis_errors():
    jt = JointTable(random_joint((3, 3), seed=3))
    with pytest.raises(MissingAxisError):
        jt.marginal("z")


def test_conditional_mi_nonnegative():
    for seed in range(5):
        jt = JointTable(random_joint((3, 3, 4), seed=seed))
        assert conditional_mi(jt, base=2) >= -1e-12


def test_fano_bound_values():
    # H(X|Y) <= h2(pe) + pe log2(M-1)
    assert fano_bound(0.0, 4) == pytest.approx(0.0, abs=1e-15)
    assert fano_bound(0.5, 2) == pytest.approx(1.0, abs=1e-15)
    assert fano_bound(0.1, 5) == pytest.approx(
        hq(2, 0.1) * 0 + (-0.1 * math.log2(0.1) - 0.9 * math.log2(0.9)) + 0.1 * 2.0,
        abs=1e-12,
    )


# ---------------------------------------------------------------------------
# ball volumes
# ---------------------------------------------------------------------------


def test_ball_volume_small_cases():
    assert ball_volume(2, 10, 0) == 1
    assert ball_volume(2, 10, 2) == 56
    assert ball_volume(3, 4, 1) == 9
    assert ball_volume(2, 6, 6) == 64


def test_ball_volume_radius_clamped():
    assert ball_volume(2, 5, 12) == 32


def test_ball_volume_exact_big():
    # exact integers well past float precision
    v = ball_volume(4, 60, 30)
    assert v == sum(math.comb(60, i) * 3**i for i in range(31))
