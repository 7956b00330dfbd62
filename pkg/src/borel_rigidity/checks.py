"""Numerical self-checks shared by ``selftest`` and the acceptance suite.

Each check returns a :class:`CheckResult`; ``tag`` is the identifier used
in both places (``AC1`` ... ``AC8`` for the acceptance criteria).
"""

from dataclasses import dataclass
from itertools import permutations
from math import comb

import mpmath
import numpy as np

from .borel import borel_bound, borel_value, is_maximal, permutation_sign
from .cocycle import (
    FiniteGammaSpace,
    BoundaryMap,
    TwistMap,
    VeroneseBoundary,
    cocycle_from_representation,
    cyclic_space,
    dihedral_space,
    figure_eight,
    sym_power_representation,
    twist,
    twisted_boundary,
)
from .dilog import NU3, REGULAR_VERTEX, bloch_wigner, ideal_volume
from .invariant import (
    BlockBoundary,
    PullbackCochain,
    block_diagonal_cocycle,
    block_flag,
    empirical_borel_ratio,
    parabolic_bound,
    representation_borel_ratio,
)
from .projflag import (
    CompleteFlag,
    random_group_element,
    random_proj_points,
    random_sl2,
    regular_tetrahedron,
    veronese,
)
from .rigidity import maximality_certificate, trivialize

__all__ = ["CheckResult", "regular_volume_oracle", "ACCEPTANCE", "run_selftest", "RandomFlagBoundary"]


@dataclass
class CheckResult:
    tag: str
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{self.tag}] {status}  {self.name}: worst {self.worst:.3e} (tol {self.tol:.0e}) {self.detail}".rstrip()


def regular_volume_oracle(digits=30):
    """``nu_3`` from the periodic sine series, summed in closed form with trigamma values.

    ``D(e^(i pi/3)) = sum_k sin(k pi/3) / k^2`` and the sine pattern has
    period 6, which gives ``(sqrt 3 / 72) (psi'(1/6) + psi'(1/3) - psi'(2/3) - psi'(5/6))``.
    """
    with mpmath.workdps(digits):
        s = (mpmath.psi(1, mpmath.mpf(1) / 6) + mpmath.psi(1, mpmath.mpf(1) / 3)
             - mpmath.psi(1, mpmath.mpf(2) / 3) - mpmath.psi(1, mpmath.mpf(5) / 6))
        return float(mpmath.sqrt(3) / 72 * s)


def _random_flag(rng, n):
    return CompleteFlag(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def check_regular_constant(tol=1e-10):
    oracle = regular_volume_oracle()
    value = bloch_wigner(REGULAR_VERTEX)
    vol = ideal_volume(*regular_tetrahedron())
    worst = max(abs(value - oracle), abs(vol - value))
    return CheckResult("AC1", "regular-tetrahedron constant", worst <= tol, worst, tol,
                       f"nu3 = {value:.12f}")


def check_pullback_identity(ns=(2, 3, 4, 5), trials=1000, seed=0, tol=1e-6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in ns:
        for _ in range(trials):
            xis = random_proj_points(rng, 4)
            value = borel_value([veronese(xi, n) for xi in xis])
            worst = max(worst, abs(value - comb(n + 1, 3) * ideal_volume(*xis)))
    return CheckResult("AC2", "pullback identity B_n(V_n) = C(n+1,3) vol", worst <= tol, worst, tol,
                       f"n in {list(ns)}, {trials} tuples each")


def check_cocycle_properties(ns=(2, 3, 4), trials=20, bound_trials=10_000, seed=0,
                             alt_tol=1e-8, inv_tol=1e-7, deco_tol=1e-8, bound_tol=1e-6,
                             max_cond=10.0):
    rng = np.random.default_rng(seed)
    perms = [(p, permutation_sign(p)) for p in permutations(range(4))]
    alt = inv = deco = 0.0
    bound_excess = -np.inf
    for n in ns:
        for _ in range(trials):
            flags = [_random_flag(rng, n) for _ in range(4)]
            value = borel_value(flags)
            for p, sign in perms:
                alt = max(alt, abs(borel_value([flags[i] for i in p]) - sign * value))
            g = random_group_element(rng, n, max_cond)
            inv = max(inv, abs(borel_value([f.transform(g) for f in flags]) - value))
            redecorated = []
            for f in flags:
                scale = np.exp(rng.standard_normal(n) * 0.5 + 2j * np.pi * rng.random(n))
                upper = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
                redecorated.append(CompleteFlag(f.basis @ (np.diag(scale) + upper)))
            deco = max(deco, abs(borel_value(redecorated) - value))
        b = borel_bound(n)
        for _ in range(bound_trials):
            value = borel_value([_random_flag(rng, n) for _ in range(4)])
            bound_excess = max(bound_excess, abs(value) - b)
    passed = alt <= alt_tol and inv <= inv_tol and deco <= deco_tol and bound_excess <= bound_tol
    worst = max(alt / alt_tol, inv / inv_tol, deco / deco_tol, max(bound_excess, 0.0) / bound_tol)
    detail = (f"alternation {alt:.2e}, invariance {inv:.2e}, decoration {deco:.2e}, "
              f"bound excess {bound_excess:.2e} (worst as fraction of tol)")
    return CheckResult("AC3", "cocycle properties of B_n", passed, worst, 1.0, detail)


def check_maximal_invariant(ns=(2, 3, 4), samples=64, seed=0, tol=1e-7):
    from .documents import load_document

    worst = 0.0
    details = []
    for n in ns:
        exp = load_document("figure-eight-pi3", n=n)
        rep = empirical_borel_ratio(exp.cocycle, exp.boundary, samples, seed, volume=exp.volume)
        target = comb(n + 1, 3)
        dev = max(abs(rep.integrand_max - target), abs(rep.integrand_min - target),
                  abs(rep.ratio - target))
        vol_dev = abs(exp.volume - 2 * bloch_wigner(REGULAR_VERTEX))
        inv_dev = abs(rep.invariant - target * 2 * NU3)
        worst = max(worst, dev, vol_dev, inv_dev)
        details.append(f"n={n}: ratio {rep.ratio:.12g}, beta {rep.invariant:.12g}")
    return CheckResult("AC4", "Borel invariant of the maximal cocycle", worst <= tol, worst, tol,
                       "; ".join(details))


def check_class_invariance(n=3, twists=10, samples=8, seed=0, tol=1e-9):
    rng = np.random.default_rng(seed)
    pres = figure_eight()
    space = dihedral_space({"a": 0, "b": 1}, pres.relators)
    rho = sym_power_representation(pres, n)
    sigma = cocycle_from_representation(rho, space, pres)
    base = VeroneseBoundary(n)
    plain = PullbackCochain(base)
    gs = [random_sl2(rng) for _ in range(samples)]
    worst = 0.0
    ratio = empirical_borel_ratio(sigma, base, samples, seed).ratio
    for _ in range(twists):
        f = TwistMap.random(rng, len(space), n)
        twisted_phi = twisted_boundary(base, f)
        twisted = PullbackCochain(twisted_phi)
        for g in gs:
            xis = [xi.transform(g) for xi in regular_tetrahedron()]
            diff = np.abs(twisted.values(xis, len(space)) - plain.values(xis, len(space)))
            worst = max(worst, float(diff.max()))
        tw_ratio = empirical_borel_ratio(twist(sigma, f), twisted_phi, samples, seed).ratio
        worst = max(worst, abs(tw_ratio - ratio))
    rep_ratio = representation_borel_ratio(pres, rho, base, samples, seed).ratio
    bitwise = rep_ratio == ratio
    return CheckResult("AC5", "cohomology-class invariance", worst <= tol and bitwise, worst, tol,
                       f"representation ratio bitwise equal: {bitwise}")


def check_rigidity(ns=(2, 3, 4), sizes=(1, 5, 16), seed=0, tol=1e-6, cert_tol=1e-5,
                   certificate_samples=8):
    rng = np.random.default_rng(seed)
    pres = figure_eight()
    worst = 0.0
    ok = True
    notes = []
    for n in ns:
        rho = sym_power_representation(pres, n)
        for size in sizes:
            if size == 1:
                space = FiniteGammaSpace.point(pres.names)
            elif size == 5:
                space = dihedral_space({"a": 0, "b": 1}, pres.relators)
            else:
                space = cyclic_space(size, pres.names, pres.relators)
            f0 = TwistMap.random(rng, size, n)
            sigma = twist(cocycle_from_representation(rho, space, pres), f0)
            phi = twisted_boundary(VeroneseBoundary(n), f0)
            cert = maximality_certificate(sigma, phi, certificate_samples, cert_tol, seed)
            ok &= all(c.certified and c.sign == 1 for c in cert)
            triv = trivialize(sigma, phi, tol=tol, seed=seed, certificate_samples=certificate_samples,
                              certificate_tol=cert_tol)
            worst = max(worst, triv.residual)
            ok &= triv.branch == "plain"

            conj_sigma = sigma.conjugate()
            conj_phi = twisted_boundary(VeroneseBoundary(n, conjugate=True), f0.conjugate())
            cert = maximality_certificate(conj_sigma, conj_phi, certificate_samples, cert_tol, seed)
            ok &= all(c.certified and c.sign == -1 for c in cert)
            ctriv = trivialize(conj_sigma, conj_phi, tol=tol, seed=seed,
                               certificate_samples=certificate_samples, certificate_tol=cert_tol)
            worst = max(worst, ctriv.residual)
            ok &= ctriv.branch == "conjugated"
        notes.append(f"n={n}")
    return CheckResult("AC6", "rigidity round-trip", ok and worst <= tol, worst, tol,
                       f"{', '.join(notes)}, |X| in {list(sizes)}, both branches")


def check_parabolic(trials=1000, certificate_samples=8, seed=0, tol=1e-6):
    rng = np.random.default_rng(seed)
    pres = figure_eight()
    space = dihedral_space({"a": 0, "b": 1}, pres.relators)
    fractions = []
    for chars in (None, (1.0, 2.0)):
        sigma = block_diagonal_cocycle(pres, space, (2, 1), chars)
        f = TwistMap.random(rng, len(space), 3)
        for s, phi in ((sigma, BlockBoundary((2, 1))),
                       (twist(sigma, f), twisted_boundary(BlockBoundary((2, 1)), f))):
            cert = maximality_certificate(s, phi, certificate_samples, 1e-5, seed)
            fractions.extend(c.fraction for c in cert)
    certificates_fail = max(fractions) < 1.0
    bound = parabolic_bound((2, 1)) * NU3
    excess = -np.inf
    for _ in range(trials):
        xis = random_proj_points(rng, 4)
        value = borel_value([block_flag([veronese(xi, 2), np.eye(1)]) for xi in xis])
        excess = max(excess, abs(value) - bound)
    passed = certificates_fail and excess <= tol
    return CheckResult("AC7", "parabolic non-maximality", passed, max(excess, 0.0), tol,
                       f"max certificate fraction {max(fractions):.3g}; "
                       f"max |B_3| - nu3 = {excess:.3e} (exploratory)")


class RandomFlagBoundary(BoundaryMap):
    """Negative control: an unrelated random flag on every call."""

    def __init__(self, n, seed=0):
        self.n = n
        self._rng = np.random.default_rng(seed)

    def flag(self, xi, x):
        return _random_flag(self._rng, self.n)


def check_negative_controls(n=3, samples=16, seed=0, tol=1e-5):
    from .cli import main
    from .documents import example_path

    codes = [main(["invariant", "--input", str(example_path("figure-eight-corrupted")),
                   "--samples", "4", "--seed", str(seed)], quiet=True),
             main(["trivialize", "--input", str(example_path("figure-eight-corrupted")),
                   "--seed", str(seed)], quiet=True)]
    pres = figure_eight()
    space = dihedral_space({"a": 0, "b": 1}, pres.relators)
    sigma = cocycle_from_representation(sym_power_representation(pres, n), space, pres)
    cert = maximality_certificate(sigma, RandomFlagBoundary(n, seed), samples, tol, seed)
    fraction = max(c.fraction for c in cert)
    rng = np.random.default_rng(seed)
    verdicts = [is_maximal([_random_flag(rng, n) for _ in range(4)], tol) for _ in range(samples)]
    refused = codes == [2, 2]
    passed = refused and fraction == 0.0 and not any(verdicts)
    return CheckResult("AC8", "negative controls", passed, fraction, 0.0,
                       f"exit codes {codes}, random-flag certificate fraction {fraction:.3g}")


#: acceptance checks at full size, in order
ACCEPTANCE = (
    check_regular_constant,
    check_pullback_identity,
    check_cocycle_properties,
    check_maximal_invariant,
    check_class_invariance,
    check_rigidity,
    check_parabolic,
    check_negative_controls,
)


def run_selftest(n_max=4, trials=100, seed=0):
    """Reduced-size versions of the acceptance checks; ``AC1``-``AC3`` keep their tags."""
    ns = tuple(range(2, max(2, n_max) + 1))
    results = [
        check_regular_constant(),
        check_pullback_identity(ns=ns, trials=trials, seed=seed),
        check_cocycle_properties(ns=tuple(n for n in ns if n <= 4), trials=max(1, trials // 20),
                                 bound_trials=trials, seed=seed),
        check_maximal_invariant(ns=tuple(n for n in ns if n <= 4), samples=max(2, trials // 10),
                                seed=seed),
        check_class_invariance(twists=3, samples=4, seed=seed),
        check_rigidity(ns=tuple(n for n in ns if n <= 3), sizes=(1, 5), seed=seed,
                       certificate_samples=4),
        check_parabolic(trials=trials, certificate_samples=4, seed=seed),
        check_negative_controls(samples=8, seed=seed),
    ]
    return results

