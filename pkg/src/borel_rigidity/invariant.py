"""Pulled-back Borel cochains, integration over X and the Borel-invariant estimator.

The estimator evaluates the integrand of the multiplicative formula at
``g (0, 1, e^(i pi/3), oo)`` for ``g`` drawn from a fixed distribution on
PSL(2, C) (complex Gaussian entries rescaled to determinant one) instead of
Haar measure on the quotient by the lattice.  Whenever the integrand is
constant this returns the exact ratio; otherwise the result is a heuristic
estimate and is labelled as such.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from .borel import borel_value
from .cocycle import (
    BoundaryMap,
    FiniteGammaSpace,
    check_equivariance,
    cocycle_from_representation,
)
from .dilog import NU3
from .errors import RefusalError, ValidationError
from .projflag import CompleteFlag, random_sl2, regular_tetrahedron, sym_power, veronese

__all__ = [
    "PullbackCochain",
    "EstimatorReport",
    "integrate_over_X",
    "empirical_borel_ratio",
    "representation_borel_ratio",
    "validate_partition",
    "parabolic_bound",
    "block_flag",
    "BlockBoundary",
    "block_diagonal_cocycle",
    "EQUIVARIANCE_TOL",
]

#: boundary maps whose sampled equivariance residual exceeds this are refused
EQUIVARIANCE_TOL = 1e-6

# spread below which the integrand is reported as constant
_CONSTANT_SPREAD = 1e-7


class PullbackCochain:
    """``c(xi_0, ..., xi_3; x) = B_n(phi(xi_0, x), ..., phi(xi_3, x))``."""

    def __init__(self, phi):
        self.phi = phi

    def __call__(self, xis, x):
        return borel_value([self.phi.flag(xi, x) for xi in xis])

    def values(self, xis, size):
        """The cochain at every point of a space with ``size`` points."""
        return np.array([self(xis, x) for x in range(size)])


def integrate_over_X(c, xis, space):
    """Weighted sum ``sum_x mu(x) c(xis; x)`` over the finite space.

    The sum is taken relative to the value at the first point so that a
    cochain which is constant in ``x`` integrates to exactly that constant.
    """
    if isinstance(c, np.ndarray):
        values = c
    else:
        values = c.values(xis, len(space))
    ref = values[0]
    return float(ref + np.dot(space.weights, values - ref))


@dataclass
class EstimatorReport:
    """Output of :func:`empirical_borel_ratio`.

    ``ratio`` estimates ``beta_n(sigma) / Vol(M)``; ``invariant`` is
    ``ratio * volume`` when a volume is known.
    """

    n: int
    ratio: float
    stderr: float
    samples: int
    seed: int
    workers: int
    integrand_min: float
    integrand_max: float
    bound: int
    maximal: int
    constant: bool
    label: str
    equivariance_residual: float
    volume: float = None
    invariant: float = None

    def to_dict(self):
        return asdict(self)


def _sample_chunk(cochain, space, seed, worker, count):
    rng = np.random.default_rng([seed, worker])
    tetra = regular_tetrahedron()
    out = np.empty(count)
    for k in range(count):
        g = random_sl2(rng)
        xis = [xi.transform(g) for xi in tetra]
        out[k] = integrate_over_X(cochain, xis, space) / NU3
    return out


def _split(total, parts):
    base, extra = divmod(total, parts)
    return [base + (1 if w < extra else 0) for w in range(parts)]


def _estimate(cochain, space, n, samples, seed, workers, residual, volume, tol):
    if samples < 1:
        raise ValidationError("samples must be at least 1")
    workers = max(1, int(workers))
    sizes = _split(samples, workers)
    if workers == 1:
        chunks = [_sample_chunk(cochain, space, seed, 0, samples)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda w: _sample_chunk(cochain, space, seed, w, sizes[w]),
                                   range(workers)))
    values = np.concatenate(chunks)
    ratio = float(np.sum(values) / samples)
    stderr = float(np.std(values, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    lo, hi = float(values.min()), float(values.max())
    bound = comb(n + 1, 3)
    constant = (hi - lo) <= _CONSTANT_SPREAD
    maximal = 0
    if bound > 0:
        if ratio >= bound - tol:
            maximal = 1
        elif ratio <= -bound + tol:
            maximal = -1
    return EstimatorReport(
        n=n, ratio=ratio, stderr=stderr, samples=samples, seed=seed, workers=workers,
        integrand_min=lo, integrand_max=hi, bound=bound, maximal=maximal, constant=constant,
        label="exact constant" if constant else "heuristic estimate",
        equivariance_residual=residual, volume=volume,
        invariant=None if volume is None else ratio * volume,
    )


def empirical_borel_ratio(sigma, phi, samples, seed=0, workers=1, volume=None,
                          tol=1e-6, equivariance_samples=64,
                          equivariance_tol=EQUIVARIANCE_TOL):
    """Estimate ``beta_n(sigma) / Vol(M)`` from a boundary map.

    The boundary map is first checked for ``sigma``-equivariance on random
    samples and refused with :class:`RefusalError` when the residual exceeds
    ``equivariance_tol``.  Results are bit-reproducible for a fixed
    ``(seed, workers)``.
    """
    if phi.n != sigma.n:
        raise ValidationError(f"boundary map has n = {phi.n}, cocycle has n = {sigma.n}")
    rng = np.random.default_rng([seed, 2**32 - 1])
    residual = check_equivariance(phi, sigma, equivariance_samples, rng)
    if not residual <= equivariance_tol:
        raise RefusalError(f"boundary map is not equivariant: residual {residual:.3g} "
                           f"> {equivariance_tol:g}")
    return _estimate(PullbackCochain(phi), sigma.space, sigma.n, samples, seed, workers,
                     residual, volume, tol)


def representation_borel_ratio(presentation, rho, phi, samples, seed=0, workers=1,
                               volume=None, tol=1e-6):
    """The estimator for a representation, evaluated on the one-point space."""
    point = FiniteGammaSpace.point(presentation.names)
    sigma = cocycle_from_representation(rho, point, presentation)
    return empirical_borel_ratio(sigma, phi, samples, seed, workers, volume, tol)


def validate_partition(partition, n=None):
    parts = tuple(int(p) for p in partition)
    if not parts or any(p < 1 for p in parts):
        raise ValidationError(f"partition {partition} must consist of positive integers")
    if n is not None and sum(parts) != n:
        raise ValidationError(f"partition {partition} does not sum to {n}")
    return parts


def parabolic_bound(partition):
    """``sum_i C(n_i + 1, 3)``, the bound on ``|beta_n| / Vol(M)`` for a parabolic cocycle."""
    return sum(comb(p + 1, 3) for p in validate_partition(partition))


def block_flag(components):
    """Concatenate flags of ``C^(n_1), ..., C^(n_r)`` into a flag of ``C^n``.

    Levels inside block ``i`` are ``C^(n_1) + ... + C^(n_(i-1))`` plus the
    corresponding level of the ``i``-th component, so the basis is block
    diagonal.
    """
    blocks = [c.basis if isinstance(c, CompleteFlag) else np.asarray(c, dtype=complex)
              for c in components]
    if not blocks:
        raise ValidationError("block_flag needs at least one component")
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValidationError(f"component of shape {b.shape} is not a flag basis")
        d = b.shape[0]
        out[k:k + d, k:k + d] = b
        k += d
    return CompleteFlag(out)


class BlockBoundary(BoundaryMap):
    """``phi(xi, x) = block_flag(V_(n_1)(xi), ..., V_(n_r)(xi))``."""

    def __init__(self, partition, conjugate=False):
        self.partition = validate_partition(partition)
        self.n = sum(self.partition)
        self.conjugate = conjugate

    def flag(self, xi, x):
        if self.conjugate:
            xi = xi.conjugate()
        return block_flag([veronese(xi, p) for p in self.partition])


def block_diagonal_cocycle(presentation, space, partition, characters=None):
    """Cocycle with values in the block-diagonal parabolic of ``partition``.

    Block ``i`` is ``chi_i(g) pi_(n_i)(g)`` where the character ``chi_i``
    sends every generator to ``characters[i]`` (default 1).  The characters
    are well defined when each relator has total exponent zero.
    """
    parts = validate_partition(partition)
    chars = [1.0] * len(parts) if characters is None else [complex(c) for c in characters]
    if len(chars) != len(parts):
        raise ValidationError("one character per block is required")
    rho = {}
    for name, m in presentation.generators.items():
        n = sum(parts)
        out = np.zeros((n, n), dtype=complex)
        k = 0
        for p, c in zip(parts, chars):
            out[k:k + p, k:k + p] = c * sym_power(m, p)
            k += p
        rho[name] = out
    return cocycle_from_representation(rho, space, presentation)

