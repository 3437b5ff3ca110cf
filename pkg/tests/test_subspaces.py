import math

import numpy as np
import pytest

from thresholds.errors import (
    DomainError,
    FullSpaceKernelError,
    SizeCapError,
)
from thresholds.subspaces import (
    SubspaceRREF,
    enum_subspaces,
    entropy_over_kernels,
    gaussian_binomial,
    iter_kernel_entropies,
    iter_rref_bases,
    map_with_kernel,
    rref_of,
)
from thresholds.typespace import LRSpec, TypeDist, bad_type


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 1, 3) == 13
    assert gaussian_binomial(5, 0, 2) == 1
    assert gaussian_binomial(5, 5, 7) == 1
    assert gaussian_binomial(3, 4, 2) == 0


def test_enum_counts_match_gaussian_binomials():
    subs = enum_subspaces(2, 4)
    assert len(subs) == 67  # 1 + 15 + 35 + 15 + 1
    by_dim = {}
    for s in subs:
        by_dim[s.dim] = by_dim.get(s.dim, 0) + 1
    assert by_dim == {k: gaussian_binomial(4, k, 2) for k in range(5)}
    # canonical representation: no duplicates
    assert len({s.basis for s in subs}) == 67


def test_enum_counts_q3():
    assert len(list(iter_rref_bases(3, 3, 1))) == gaussian_binomial(3, 1, 3)
    assert len(list(iter_rref_bases(3, 3, 2))) == gaussian_binomial(3, 2, 3)


def test_rref_validation():
    with pytest.raises(DomainError):
        SubspaceRREF(q=2, ambient=2, basis=((1, 1), (0, 1)))
    with pytest.raises(DomainError):
        SubspaceRREF(q=2, ambient=3, basis=((0, 0, 0),))
    with pytest.raises(DomainError):
        SubspaceRREF(q=3, ambient=2, basis=((2, 0),))


def test_rref_of_canonicalizes():
    s = rref_of([[1, 1, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1]], 2)
    assert s.basis == ((1, 1, 1, 1),)
    # different generators, same subspace, same canonical form
    t = rref_of([[2, 1], [1, 2]], 3)
    u = rref_of([[1, 2]], 3)
    assert t.basis == u.basis == ((1, 2),)


def test_quotient_of_repetition_kernel():
    s = rref_of([[1, 1, 1, 1]], 2)
    qm = map_with_kernel(s)
    assert qm.matrix == ((1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1))
    # every row kills the kernel generator
    for row in qm.matrix:
        assert sum(a * b for a, b in zip(row, (1, 1, 1, 1))) % 2 == 0


def test_quotient_of_zero_kernel_is_identity():
    s = SubspaceRREF(q=3, ambient=2, basis=())
    qm = map_with_kernel(s)
    assert qm.matrix == ((1, 0), (0, 1))


def test_full_space_has_no_quotient():
    s = rref_of([[1, 0], [0, 1]], 2)
    with pytest.raises(FullSpaceKernelError):
        map_with_kernel(s)


def test_identity_kernel_entropy_equals_type_entropy():
    tau = bad_type(LRSpec(q=2, ell=1, L=2, rho=0.3)).u_marginal()
    rows = entropy_over_kernels(tau, dims=[0])
    assert len(rows) == 1
    assert rows[0]["entropy"] == pytest.approx(tau.entropy(), abs=1e-12)
    assert rows[0]["dim_image"] == 2


def test_difference_kernel_entropy_ternary():
    # pair type at rho = 0.2 over GF(3); quotienting by the repetition line
    # leaves the coordinate difference, whose law is ((1-rho)^2 + rho^2/2,
    # ...) split evenly over the nonzero values
    rho = 0.2
    tau = bad_type(LRSpec(q=3, ell=1, L=2, rho=rho)).u_marginal()
    kernel = rref_of([[1, 1]], 3)
    rows = entropy_over_kernels(tau, dims=[1])
    match = [r for r in rows if r["kernel"] == kernel]
    assert len(match) == 1
    p0 = (1 - rho) ** 2 + rho**2 / 2
    p1 = (1 - p0) / 2
    expected = -(p0 * math.log(p0) + 2 * p1 * math.log(p1)) / math.log(3)
    assert match[0]["entropy"] == pytest.approx(expected, abs=1e-12)
    assert match[0]["entropy"] == pytest.approx(0.798012, abs=1e-6)


def test_uniform_type_saturates_every_kernel():
    tau = TypeDist(q=2, b=3, probs=np.full(8, 1 / 8))
    for row in entropy_over_kernels(tau):
        assert row["entropy"] == pytest.approx(row["dim_image"], abs=1e-12)


def test_image_dimension_tracks_support():
    # mass confined to the repetition line: identity quotient sees dim 1
    probs = np.zeros(8)
    probs[0] = probs[7] = 0.5
    tau = TypeDist(q=2, b=3, probs=probs)
    rows = entropy_over_kernels(tau, dims=[0])
    assert rows[0]["dim_image"] == 1
    assert rows[0]["entropy"] == pytest.approx(1.0, abs=1e-12)


def test_iter_matches_list_form():
    tau = bad_type(LRSpec(q=2, ell=1, L=3, rho=0.25)).u_marginal()
    listed = entropy_over_kernels(tau)
    streamed = list(iter_kernel_entropies(tau))
    assert len(listed) == len(streamed) == sum(
        gaussian_binomial(3, k, 2) for k in range(3)
    )
    for row, (basis, dim_img, H) in zip(listed, streamed):
        assert row["kernel"].basis == basis
        assert row["dim_image"] == dim_img
        assert row["entropy"] == pytest.approx(H, abs=1e-12)


def test_kernel_dims_bounds_checked():
    tau = TypeDist(q=2, b=2, probs=np.full(4, 0.25))
    with pytest.raises(DomainError):
        list(iter_kernel_entropies(tau, dims=[2]))  # full space is not a kernel


def test_enum_cap_triggers():
    with pytest.raises(SizeCapError):
        enum_subspaces(5, 9)
