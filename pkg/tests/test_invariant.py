from math import comb

import numpy as np
import pytest

from borel_rigidity.borel import borel_value
from borel_rigidity.cocycle import (
    CorruptedBoundary,
    FiniteGammaSpace,
    TwistMap,
    VeroneseBoundary,
    cocycle_from_representation,
    dihedral_space,
    figure_eight,
    sym_power_representation,
    twist,
    twisted_boundary,
)
from borel_rigidity.dilog import NU3
from borel_rigidity.errors import RefusalError, ValidationError
from borel_rigidity.invariant import (
    BlockBoundary,
    PullbackCochain,
    block_diagonal_cocycle,
    block_flag,
    empirical_borel_ratio,
    integrate_over_X,
    parabolic_bound,
    representation_borel_ratio,
    validate_partition,
)
from borel_rigidity.projflag import CompleteFlag, flag_distance, random_proj_points, veronese

PRES = figure_eight()
DIHEDRAL = dihedral_space({"a": 0, "b": 1}, PRES.relators)


def pi_cocycle(n):
    return cocycle_from_representation(sym_power_representation(PRES, n), DIHEDRAL, PRES)


def test_integrate_weighted_mean():
    space = FiniteGammaSpace([0.3, 0.7], {"a": [0, 1]})
    assert integrate_over_X(np.array([1.0, 2.0]), None, space) == pytest.approx(1.7, abs=1e-15)


def test_integrate_point_and_constant(rng):
    xis = random_proj_points(rng, 4)
    phi = VeroneseBoundary(3)
    c = PullbackCochain(phi)
    point = FiniteGammaSpace.point(PRES.names)
    assert integrate_over_X(c, xis, point) == c(xis, 0)
    # constant in x: the shifted sum returns the value exactly
    assert integrate_over_X(c, xis, DIHEDRAL) == c(xis, 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_maximal_ratio(n):
    rep = empirical_borel_ratio(pi_cocycle(n), VeroneseBoundary(n), 16, seed=1, volume=2 * NU3)
    assert rep.ratio == pytest.approx(comb(n + 1, 3), abs=1e-9)
    assert rep.integrand_max - rep.integrand_min < 1e-7
    assert rep.constant and rep.maximal == 1 and rep.label == "exact constant"
    assert rep.invariant == pytest.approx(comb(n + 1, 3) * 2 * NU3, abs=1e-9)


def test_twist_neutral_pointwise(rng):
    sigma = pi_cocycle(3)
    f = TwistMap.random(rng, 5, 3)
    plain = PullbackCochain(VeroneseBoundary(3))
    twisted = PullbackCochain(twisted_boundary(VeroneseBoundary(3), f))
    for _ in range(10):
        xis = random_proj_points(rng, 4)
        assert np.max(np.abs(plain.values(xis, 5) - twisted.values(xis, 5))) < 1e-9
    a = empirical_borel_ratio(sigma, VeroneseBoundary(3), 8, seed=2)
    b = empirical_borel_ratio(twist(sigma, f), twisted_boundary(VeroneseBoundary(3), f), 8, seed=2)
    assert abs(a.ratio - b.ratio) < 1e-9


def test_pullback_gamma_invariance(rng):
    f = TwistMap.random(rng, 5, 3)
    c = PullbackCochain(twisted_boundary(VeroneseBoundary(3), f))
    for word in ("a", "b", "A", "B", "abA"):
        xis = random_proj_points(rng, 4)
        x = int(rng.integers(5))
        moved = [PRES.act(word, xi) for xi in xis]
        assert abs(c(moved, DIHEDRAL.act(word, x)) - c(xis, x)) < 1e-7


def test_representation_consistency_bitwise():
    rho = sym_power_representation(PRES, 3)
    direct = representation_borel_ratio(PRES, rho, VeroneseBoundary(3), 12, seed=5)
    on_x = empirical_borel_ratio(pi_cocycle(3), VeroneseBoundary(3), 12, seed=5)
    assert direct.ratio == on_x.ratio


def test_reproducible_given_seed_and_workers():
    sigma = pi_cocycle(2)
    a = empirical_borel_ratio(sigma, VeroneseBoundary(2), 10, seed=9, workers=3)
    b = empirical_borel_ratio(sigma, VeroneseBoundary(2), 10, seed=9, workers=3)
    assert a.to_dict() == b.to_dict()


def test_estimator_bound():
    sigma = block_diagonal_cocycle(PRES, DIHEDRAL, (2, 1), (1.0, 2.0))
    rep = empirical_borel_ratio(sigma, BlockBoundary((2, 1)), 16, seed=3)
    assert rep.ratio <= rep.bound + 3 * rep.stderr + 1e-12
    assert rep.ratio <= parabolic_bound((2, 1)) + 1e-9


def test_diagonal_cocycle_vanishes():
    sigma = block_diagonal_cocycle(PRES, DIHEDRAL, (1, 1, 1))
    rep = empirical_borel_ratio(sigma, BlockBoundary((1, 1, 1)), 16, seed=0)
    assert rep.ratio == 0.0 and rep.maximal == 0


def test_refuses_non_equivariant():
    bad = CorruptedBoundary(VeroneseBoundary(3), 1, np.diag([1, 2, 3]))
    with pytest.raises(RefusalError, match="not equivariant"):
        empirical_borel_ratio(pi_cocycle(3), bad, 4)


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        empirical_borel_ratio(pi_cocycle(3), VeroneseBoundary(2), 4)
    with pytest.raises(ValidationError):
        empirical_borel_ratio(pi_cocycle(3), VeroneseBoundary(3), 0)


def test_parabolic_bound():
    assert parabolic_bound((4,)) == comb(5, 3)
    assert parabolic_bound((1, 1, 1, 1)) == 0
    assert parabolic_bound((2, 1)) == 1
    with pytest.raises(ValidationError):
        validate_partition((2, 1), 4)
    with pytest.raises(ValidationError):
        validate_partition((2, 0))


def test_block_flag(rng):
    f = veronese(random_proj_points(rng), 3)
    assert flag_distance(block_flag([f]), f) < 1e-15
    std = block_flag([CompleteFlag.standard(2), CompleteFlag.standard(1)])
    assert np.array_equal(std.basis, np.eye(3))


def test_block_flag_regular_below_parabolic_bound(rng):
    for _ in range(100):
        xis = random_proj_points(rng, 4)
        value = borel_value([block_flag([veronese(xi, 2), np.eye(1)]) for xi in xis])
        assert abs(value) <= parabolic_bound((2, 1)) * NU3 + 1e-6


def test_block_cocycle_characters_must_match():
    with pytest.raises(ValidationError):
        block_diagonal_cocycle(PRES, DIHEDRAL, (2, 1), (1.0,))
