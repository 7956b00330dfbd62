import numpy as np
import pytest
from hypothesis import given, strategies as st

from borel_rigidity.cocycle import (
    FIGURE_EIGHT_RELATOR,
    Cocycle,
    ConstantBoundary,
    CorruptedBoundary,
    FiniteGammaSpace,
    GroupPresentation,
    TwistMap,
    VeroneseBoundary,
    check_equivariance,
    cocycle_from_representation,
    cyclic_space,
    dihedral_space,
    evaluate_word,
    figure_eight,
    invert_word,
    parse_word,
    sym_power_representation,
    twist,
    twisted_boundary,
)
from borel_rigidity.errors import ValidationError
from borel_rigidity.projflag import CompleteFlag, projective_distance, sym_power

PRES = figure_eight()
DIHEDRAL = dihedral_space({"a": 0, "b": 1}, PRES.relators)
words = st.text(alphabet="abAB", max_size=8)


def pi_cocycle(n, space=DIHEDRAL):
    return cocycle_from_representation(sym_power_representation(PRES, n), space, PRES)


def test_parse_and_invert():
    assert parse_word("aB") == [("a", 1), ("b", -1)]
    assert invert_word("aBc") == "CbA"
    with pytest.raises(ValidationError):
        parse_word("a1")


def test_figure_eight_relator():
    assert projective_distance(np.eye(2), PRES.evaluate(FIGURE_EIGHT_RELATOR)) < 1e-12
    assert PRES.names == ("a", "b")


def test_bad_relator_rejected():
    with pytest.raises(ValidationError, match="relator"):
        GroupPresentation(dict(PRES.generators), ("ab",))
    with pytest.raises(ValidationError, match="unknown generator"):
        GroupPresentation(dict(PRES.generators), ("ac",))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_representation_cocycle_valid(n):
    sigma = pi_cocycle(n)
    assert sigma.relator_residual < 1e-7
    assert projective_distance(np.eye(n), evaluate_word(sigma, FIGURE_EIGHT_RELATOR, 3)) < 1e-8


def test_trivial_representation():
    sigma = cocycle_from_representation({"a": np.eye(3), "b": np.eye(3)}, DIHEDRAL, PRES)
    assert all(np.array_equal(sigma.evaluate("aBab", x), np.eye(3)) for x in range(5))


def test_empty_word_and_generators():
    sigma = pi_cocycle(3)
    assert np.array_equal(sigma.evaluate("", 2), np.eye(3))
    assert np.array_equal(sigma.evaluate("a", 2), sigma.table["a"][2])


@given(words, st.integers(0, 4))
def test_representation_constant_in_x(w, x):
    sigma = pi_cocycle(2)
    assert projective_distance(sigma.evaluate(w, 0), sigma.evaluate(w, x)) < 1e-9


def test_space_validation():
    with pytest.raises(ValidationError, match="positive"):
        FiniteGammaSpace([1.0, 0.0], {"a": [0, 1]})
    with pytest.raises(ValidationError, match="sum"):
        FiniteGammaSpace([0.5, 0.6], {"a": [0, 1]})
    with pytest.raises(ValidationError, match="permutation"):
        FiniteGammaSpace([0.5, 0.5], {"a": [0, 0]})
    with pytest.raises(ValidationError, match="preserve"):
        FiniteGammaSpace([0.25, 0.75], {"a": [1, 0]})
    with pytest.raises(ValidationError, match="moves point"):
        FiniteGammaSpace([0.5, 0.5], {"a": [1, 0], "b": [0, 1]}, ("ab",))


def test_relators_fix_points():
    for space in (DIHEDRAL, cyclic_space(16, PRES.names, PRES.relators)):
        assert all(space.act(FIGURE_EIGHT_RELATOR, x) == x for x in range(len(space)))


@given(words, words, st.integers(0, 4))
def test_cocycle_rule(u, v, x):
    rng = np.random.default_rng(7)
    sigma = twist(pi_cocycle(2), TwistMap.random(rng, 5, 2))
    lhs = sigma.evaluate(u + v, x)
    rhs = sigma.evaluate(u, DIHEDRAL.act(v, x)) @ sigma.evaluate(v, x)
    assert projective_distance(lhs, rhs) < 1e-8


def test_relator_failure_names_point():
    table = {g: np.array(sigma_table) for g, sigma_table in pi_cocycle(2).table.items()}
    table["a"][3] = np.array([[1, 0], [1, 1]])
    with pytest.raises(ValidationError, match="point '.'"):
        Cocycle(PRES, DIHEDRAL, table)


def test_twist_identity_and_inverse(rng):
    sigma = pi_cocycle(3)
    same = twist(sigma, TwistMap.identity(5, 3))
    assert all(np.allclose(same.table[g], sigma.table[g]) for g in PRES.names)
    f = TwistMap.random(rng, 5, 3)
    back = twist(twist(sigma, f), f.inverse())
    assert max(projective_distance(sigma.table[g][x], back.table[g][x])
               for g in PRES.names for x in range(5)) < 1e-9


@given(words, st.integers(0, 4))
def test_twist_on_words(w, x):
    rng = np.random.default_rng(3)
    sigma = pi_cocycle(3)
    f = TwistMap.random(rng, 5, 3)
    got = twist(sigma, f).evaluate(w, x)
    want = np.linalg.inv(f[DIHEDRAL.act(w, x)]) @ sigma.evaluate(w, x) @ f[x]
    assert projective_distance(want, got) < 1e-8


def test_twist_mismatch():
    with pytest.raises(ValidationError):
        twist(pi_cocycle(3), TwistMap.identity(4, 3))


def test_equivariance_residuals(rng):
    sigma = pi_cocycle(3)
    assert check_equivariance(VeroneseBoundary(3), sigma, 64, rng) < 1e-8
    f = TwistMap.random(rng, 5, 3)
    assert check_equivariance(twisted_boundary(VeroneseBoundary(3), f), twist(sigma, f), 64, rng) < 1e-8
    bad = CorruptedBoundary(VeroneseBoundary(3), 2, np.eye(3) + 0.5 * np.triu(np.ones((3, 3)), 1).T)
    assert check_equivariance(bad, sigma, 64, rng) > 0.1


def test_conjugate_boundary_matches_conjugate_cocycle(rng):
    sigma = pi_cocycle(3).conjugate()
    assert check_equivariance(VeroneseBoundary(3, conjugate=True), sigma, 32, rng) < 1e-8


def test_constant_boundary():
    phi = ConstantBoundary(CompleteFlag.standard(3))
    assert phi.n == 3
    assert phi.flag(None, 0) is phi.value


def test_point_space():
    point = FiniteGammaSpace.point(PRES.names)
    assert len(point) == 1
    sigma = pi_cocycle(2, point)
    assert np.allclose(sigma.evaluate("ab", 0), sym_power(PRES.evaluate("ab"), 2))
