import numpy as np
import pytest
from conftest import bloch_wigner_oracle, complexes, proj_points
from hypothesis import assume, given, strategies as st

from borel_rigidity.checks import regular_volume_oracle
from borel_rigidity.dilog import NU3, REGULAR_VERTEX, DomainError, bloch_wigner, ideal_volume
from borel_rigidity.projflag import INFINITY, ONE, ZERO, ProjPoint, random_proj_points, random_sl2


def test_regular_value_matches_trigamma_oracle():
    assert abs(bloch_wigner(REGULAR_VERTEX) - regular_volume_oracle()) < 1e-13
    assert abs(NU3 - 1.0149416064096536) < 1e-15


def test_oracles_agree_with_each_other():
    assert abs(bloch_wigner_oracle(REGULAR_VERTEX) - regular_volume_oracle()) < 1e-14


@pytest.mark.parametrize("z", [0, 1, 0.5, -3.0, 2.0, 1e-300])
def test_real_axis_is_zero(z):
    assert bloch_wigner(z) == pytest.approx(0.0, abs=1e-15)


def test_unit_disk_against_oracle(rng):
    r = np.sqrt(rng.random(1000))
    z = r * np.exp(2j * np.pi * rng.random(1000))
    ours = bloch_wigner(z)
    worst = max(abs(a - bloch_wigner_oracle(b)) for a, b in zip(ours, z))
    assert worst < 1e-10


def test_whole_plane_against_oracle(rng):
    z = (rng.standard_normal(300) + 1j * rng.standard_normal(300)) * np.exp(3 * rng.standard_normal(300))
    worst = max(abs(bloch_wigner(w) - bloch_wigner_oracle(w)) for w in z)
    assert worst < 1e-12


def test_vectorized_matches_scalar(rng):
    z = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
    out = bloch_wigner(z)
    assert out.shape == (4, 5)
    assert out[2, 3] == bloch_wigner(z[2, 3])
    assert isinstance(bloch_wigner(0.3 + 0.2j), float)


@pytest.mark.parametrize("z", [np.inf, complex(np.nan, 0), complex(1, np.inf)])
def test_non_finite_rejected(z):
    with pytest.raises(DomainError):
        bloch_wigner(z)


@given(complexes)
def test_conjugation_antisymmetry(z):
    assert bloch_wigner(np.conj(z)) == pytest.approx(-bloch_wigner(z), abs=1e-12)


@given(complexes)
def test_six_fold_symmetry(z):
    assume(abs(z) > 1e-6 and abs(1 - z) > 1e-6)
    d = bloch_wigner(z)
    for w, sign in ((1 / (1 - z), 1), ((z - 1) / z, 1), (1 / z, -1), (1 - z, -1), (z / (z - 1), -1)):
        assert bloch_wigner(w) == pytest.approx(sign * d, abs=1e-11)


@given(complexes)
def test_bounded_by_regular_value(z):
    assert abs(bloch_wigner(z)) <= NU3 + 1e-12


def test_regular_ideal_tetrahedron():
    xi = ProjPoint.from_complex(REGULAR_VERTEX)
    assert ideal_volume(ZERO, ONE, xi, INFINITY) == pytest.approx(NU3, abs=1e-14)
    assert ideal_volume(ZERO, ONE, xi.conjugate(), INFINITY) == pytest.approx(-NU3, abs=1e-14)


def test_normalization_convention(rng):
    for z in rng.standard_normal(20) + 1j * rng.standard_normal(20):
        assert ideal_volume(ZERO, ONE, ProjPoint.from_complex(z), INFINITY) == pytest.approx(
            bloch_wigner(z), abs=1e-13)


def test_repeated_point_is_zero():
    assert ideal_volume(ZERO, ONE, ONE, INFINITY) == 0.0
    assert ideal_volume(ZERO, ZERO, ONE, INFINITY) == 0.0


@given(st.lists(proj_points(), min_size=4, max_size=4), st.permutations(range(4)))
def test_alternating(points, perm):
    from borel_rigidity.borel import permutation_sign

    value = ideal_volume(*points)
    assert ideal_volume(*[points[i] for i in perm]) == pytest.approx(
        permutation_sign(perm) * value, abs=1e-9)


def test_mobius_invariance(rng):
    for _ in range(200):
        pts = random_proj_points(rng, 4)
        g = random_sl2(rng)
        assert ideal_volume(*[p.transform(g) for p in pts]) == pytest.approx(
            ideal_volume(*pts), abs=1e-9)


def test_bound_on_random_tuples(rng):
    coords = rng.standard_normal((4, 100_000, 2)) + 1j * rng.standard_normal((4, 100_000, 2))
    vols = ideal_volume(*coords)
    assert vols.shape == (100_000,)
    assert np.max(np.abs(vols)) <= NU3 + 1e-9
