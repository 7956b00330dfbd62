"""Maximality certificates and trivialization of maximal cocycles.

Given a cocycle and a boundary map whose slices send regular ideal
tetrahedra to maximal 4-tuples of flags, each slice is aligned with the
Veronese flag by a linear least-squares problem, and the resulting map
``f`` is checked to conjugate the cocycle into ``pi_n``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .borel import borel_bound, borel_value
from .cocycle import TwistMap, check_equivariance
from .errors import NumericalFailure, RefusalError, ValidationError
from .projflag import (
    flag_distance,
    projective_distance,
    random_proj_points,
    random_sl2,
    regular_tetrahedron,
    sym_power,
    veronese,
)

__all__ = [
    "ALIGN_TOL",
    "VERIFY_TOL",
    "CERTIFICATE_TOL",
    "SliceCertificate",
    "AlignmentResult",
    "Trivialization",
    "maximality_certificate",
    "align_to_veronese",
    "generic_points",
    "trivialize",
]

ALIGN_TOL = 1e-7
VERIFY_TOL = 1e-6
CERTIFICATE_TOL = 1e-5

_MIN_CHORDAL = 1e-3


@dataclass
class SliceCertificate:
    point: int
    samples: int
    fraction: float
    sign: int
    value_min: float
    value_max: float

    @property
    def certified(self):
        return self.fraction == 1.0 and self.sign != 0


@dataclass
class AlignmentResult:
    """``g`` with ``g F_k = V_n(xi_k)``; ``status`` is success, no-solution or ambiguous."""

    g: np.ndarray
    residual: float
    status: str
    singular_values: np.ndarray = field(repr=False, default=None)
    message: str = ""

    @property
    def gap(self):
        s = self.singular_values
        if s is None or len(s) < 2:
            return np.nan
        return s[-2] / s[-1] if s[-1] > 0 else np.inf


@dataclass
class Trivialization:
    """Recovered ``f`` with ``target(g) = f(gx)^-1 sigma(g, x) f(x)``.

    ``target`` is ``pi_n`` on the plain branch and its complex conjugate on
    the conjugated branch.  ``verification[g][x]`` holds the projective
    deviation for each generator and point.
    """

    f: TwistMap
    branch: str
    residual: float
    slice_residuals: list
    verification: dict
    certificate: list


def maximality_certificate(sigma, phi, samples, tol=CERTIFICATE_TOL, seed=0, workers=1):
    """For every point ``x`` test ``phi_x`` on ``samples`` random regular ideal tetrahedra.

    A slice is certified when every sampled tetrahedron is sent to a maximal
    4-tuple of flags, all with the same sign.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    bound = borel_bound(phi.n)
    tetra = regular_tetrahedron()

    def run(x):
        rng = np.random.default_rng([seed, x, 1])
        values = np.empty(samples)
        for k in range(samples):
            g = random_sl2(rng)
            values[k] = borel_value([phi.flag(xi.transform(g), x) for xi in tetra])
        plus = np.abs(values - bound) <= tol
        minus = np.abs(values + bound) <= tol
        if bound == 0:
            plus = minus = np.zeros(samples, dtype=bool)
        sign = 1 if plus.all() else (-1 if minus.all() else 0)
        return SliceCertificate(point=x, samples=samples,
                                fraction=float(np.mean(plus | minus)), sign=sign,
                                value_min=float(values.min()), value_max=float(values.max()))

    points = range(len(sigma.space))
    if workers <= 1:
        return [run(x) for x in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, points))


def generic_points(rng, count, min_chordal=_MIN_CHORDAL):
    """Fubini-Study random points, rejecting near-collisions."""
    pts = []
    while len(pts) < count:
        p = random_proj_points(rng)
        if all(p.chordal_distance(q) >= min_chordal for q in pts):
            pts.append(p)
    return pts


def _annihilator(q, j):
    # columns spanning the orthogonal complement of the first j columns of a unitary q
    return q[:, j:]


def align_to_veronese(samples, tol=ALIGN_TOL):
    """Find ``g`` with ``g F_k = V_n(xi_k)`` for sample pairs ``(xi_k, F_k)``.

    Each containment ``g F_k^j in V_n^j(xi_k)`` gives the linear conditions
    ``w^H g b = 0`` for ``w`` orthogonal to ``V_n^j`` and ``b`` in ``F_k^j``.
    The stacked system is solved by its smallest right singular vector.
    """
    samples = list(samples)
    if not samples:
        return AlignmentResult(None, np.inf, "no-solution", message="no samples")
    n = samples[0][1].n
    if len(samples) < n * n:
        return AlignmentResult(None, np.inf, "no-solution",
                               message=f"need at least {n * n} samples, got {len(samples)}")
    xis = [xi for xi, _ in samples]
    for i in range(len(xis)):
        for k in range(i):
            if xis[i].chordal_distance(xis[k]) < 1e-12:
                return AlignmentResult(None, np.inf, "no-solution",
                                       message=f"samples {k} and {i} share a point")
    if n == 1:
        return AlignmentResult(np.eye(1, dtype=complex), 0.0, "success", np.array([1.0]))

    rows = []
    targets = []
    for xi, flag in samples:
        v = veronese(xi, n)
        targets.append(v)
        qv, qf = v.orthonormal, flag.orthonormal
        for j in range(1, n):
            w = _annihilator(qv, j).conj()
            b = qf[:, :j]
            # row for (w, b): coefficients of g in row-major order
            rows.append((w.T[:, None, :, None] * b.T[None, :, None, :]).reshape(-1, n * n))
    a = np.concatenate(rows)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    g = vh[-1].conj().reshape(n, n)
    g = g / g.flat[np.argmax(np.abs(g))]

    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= 1e-9 * sv[0]:
        return AlignmentResult(g, np.inf, "no-solution", s, "best candidate is singular")
    residual = max(flag_distance(flag.transform(g), v) for (_, flag), v in zip(samples, targets))
    if s[-2] < 10 * tol:
        return AlignmentResult(g, residual, "ambiguous", s,
                               f"second smallest singular value {s[-2]:.3g} below {10 * tol:g}")
    if residual > tol:
        return AlignmentResult(g, residual, "no-solution", s,
                               f"best candidate has residual {residual:.3g}")
    return AlignmentResult(g, residual, "success", s)


def trivialize(sigma, phi, samples_per_slice=None, tol=VERIFY_TOL, seed=0,
               certificate_samples=16, certificate_tol=CERTIFICATE_TOL,
               align_tol=ALIGN_TOL, workers=1, equivariance_samples=64,
               equivariance_tol=1e-6):
    """Recover ``f`` with ``pi_n(g) = f(gx)^-1 sigma(g, x) f(x)``.

    Raises :class:`RefusalError` when the boundary map is not equivariant
    or a slice is not certified maximal, and
    :class:`NumericalFailure` when an alignment or the final verification
    misses its tolerance.  When all slices are negatively maximal the flags
    are conjugated first and the target becomes the conjugate of ``pi_n``.
    """
    n = sigma.n
    if phi.n != n:
        raise ValidationError(f"boundary map has n = {phi.n}, cocycle has n = {n}")
    residual = check_equivariance(phi, sigma, equivariance_samples,
                                  np.random.default_rng([seed, 2**32 - 1]))
    if not residual <= equivariance_tol:
        raise RefusalError(f"boundary map is not equivariant: residual {residual:.3g} "
                           f"> {equivariance_tol:g}")
    cert = maximality_certificate(sigma, phi, certificate_samples, certificate_tol, seed, workers)
    failed = [c for c in cert if not c.certified]
    if failed:
        labels = ", ".join(f"{sigma.space.labels[c.point]} (fraction {c.fraction:.3g})" for c in failed)
        raise RefusalError(f"maximality certificate failed on slices: {labels}")
    signs = {c.sign for c in cert}
    if len(signs) != 1:
        raise RefusalError("slices are maximal with mixed orientations")
    conjugated = signs == {-1}

    count = samples_per_slice or 2 * n * n

    def align(x):
        rng = np.random.default_rng([seed, x, 2])
        pairs = []
        for xi in generic_points(rng, count):
            flag = phi.flag(xi, x)
            pairs.append((xi, flag.conjugate() if conjugated else flag))
        return align_to_veronese(pairs, align_tol)

    points = range(len(sigma.space))
    if workers <= 1:
        results = [align(x) for x in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(align, points))
    for x, res in zip(points, results):
        if res.status != "success":
            raise NumericalFailure(f"alignment failed on slice {sigma.space.labels[x]}: "
                                   f"{res.status} ({res.message})")

    # phi_x = g_x^-1 V_n, so f(x) = g_x^-1 (conjugated back on that branch)
    f = np.linalg.inv(np.stack([r.g for r in results]))
    if conjugated:
        f = np.conj(f)
    fmap = TwistMap(f)
    finv = np.linalg.inv(f)

    verification = {}
    worst = 0.0
    for name, hol in sigma.presentation.generators.items():
        target = sym_power(hol, n)
        if conjugated:
            target = np.conj(target)
        moved = sigma.space.action[name]
        devs = []
        for x in points:
            got = finv[moved[x]] @ sigma.table[name][x] @ f[x]
            devs.append(projective_distance(target, got))
        verification[name] = devs
        worst = max(worst, max(devs))
    if worst > tol:
        raise NumericalFailure(f"trivialization residual {worst:.3g} exceeds {tol:g}")
    return Trivialization(f=fmap, branch="conjugated" if conjugated else "plain",
                          residual=worst, slice_residuals=[r.residual for r in results],
                          verification=verification, certificate=cert)
