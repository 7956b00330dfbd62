"""Bloch-Wigner dilogarithm and volumes of ideal tetrahedra.

The dilogarithm is evaluated by moving the argument into a region where
``|log(1 - w)|`` is small using the six-fold symmetry of ``D`` and then
summing the Bernoulli-number expansion of ``Li2`` in ``u = -log(1 - w)``.
Every function here accepts numpy arrays and broadcasts.
"""

from fractions import Fraction
from math import factorial

import numpy as np

__all__ = [
    "bloch_wigner",
    "ideal_volume",
    "DomainError",
    "NU3",
    "REGULAR_VERTEX",
]


class DomainError(ValueError):
    """Raised for non-finite arguments."""


def _bernoulli(count):
    # B_1 = -1/2 convention
    b = [Fraction(0)] * count
    b[0] = Fraction(1)
    for m in range(1, count):
        b[m] = -sum(Fraction(factorial(m + 1), factorial(k) * factorial(m + 1 - k)) * b[k]
                    for k in range(m)) / (m + 1)
    return b


_NTERMS = 40
_LI2_COEFFS = np.array([float(bk / factorial(k + 1))
                        for k, bk in enumerate(_bernoulli(_NTERMS))])

# (map, sign) with D(z) = sign * D(map(z))
_SYMMETRIES = (
    (lambda z: z, 1.0),
    (lambda z: 1.0 - 1.0 / z, 1.0),
    (lambda z: 1.0 / (1.0 - z), 1.0),
    (lambda z: 1.0 / z, -1.0),
    (lambda z: 1.0 - z, -1.0),
    (lambda z: z / (z - 1.0), -1.0),
)

_DEGENERATE_EPS = 1e-15


def _li2_im_reduced(w):
    """Im Li2(w) for ``w`` with small ``|log(1 - w)|``."""
    u = -np.log1p(-w)
    # Horner in u: Li2 = sum c_k u^(k+1); odd k > 1 vanish
    acc = np.zeros_like(u)
    for c in _LI2_COEFFS[::-1]:
        if c != 0.0:
            acc = acc * u + c
        else:
            acc = acc * u
    return (acc * u).imag


def bloch_wigner(z):
    """Bloch-Wigner dilogarithm ``D(z) = Im Li2(z) + arg(1 - z) log|z|``.

    ``D`` is extended by zero at ``0`` and ``1``; the point at infinity is
    handled by :func:`ideal_volume` through homogeneous coordinates.
    Non-finite input raises :class:`DomainError`.
    """
    z_arr = np.asarray(z, dtype=complex)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("bloch_wigner: non-finite argument")

    out = np.zeros(z_arr.shape)
    degenerate = ((np.abs(z_arr) < _DEGENERATE_EPS)
                  | (np.abs(z_arr - 1.0) < _DEGENERATE_EPS))
    live = ~degenerate
    if np.any(live):
        zl = z_arr[live]
        best_w = np.empty_like(zl)
        best_s = np.empty(zl.shape)
        best_score = np.full(zl.shape, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            for transform, sign in _SYMMETRIES:
                w = transform(zl)
                score = np.abs(np.log1p(-w))
                score[~(np.abs(w) <= 1.0)] = np.inf
                better = score < best_score
                best_w[better] = w[better]
                best_s[better] = sign
                best_score[better] = score[better]
        w = best_w
        d = _li2_im_reduced(w) + np.angle(1.0 - w) * np.log(np.abs(w))
        out[live] = best_s * d
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(z))


REGULAR_VERTEX = complex(0.5, np.sqrt(3.0) / 2.0)
#: volume of the regular ideal tetrahedron
NU3 = bloch_wigner(REGULAR_VERTEX)


def _det2(p, q):
    return p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]


def ideal_volume(xi0, xi1, xi2, xi3, tol=1e-12):
    """Signed volume of the ideal tetrahedron with vertices ``xi0..xi3``.

    Vertices are homogeneous pairs ``(x, y)`` (trailing axis of length 2,
    or :class:`~borel_rigidity.projflag.ProjPoint`).  The orientation is
    fixed by ``ideal_volume(0, 1, z, oo) == bloch_wigner(z)``; tuples with
    two coincident vertices have volume zero.
    """
    pts = [np.asarray(getattr(p, "coords", p), dtype=complex) for p in (xi0, xi1, xi2, xi3)]
    pts = np.broadcast_arrays(*pts)
    norms = [np.linalg.norm(p, axis=-1) for p in pts]
    degenerate = np.zeros(pts[0].shape[:-1], dtype=bool)
    for i in range(4):
        for j in range(i + 1, 4):
            degenerate |= np.abs(_det2(pts[i], pts[j])) <= tol * norms[i] * norms[j]
    num = _det2(pts[2], pts[0]) * _det2(pts[1], pts[3])
    den = _det2(pts[2], pts[3]) * _det2(pts[1], pts[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        cross = np.where(degenerate, 0.0, num / np.where(degenerate, 1.0, den))
    vol = np.where(degenerate, 0.0, bloch_wigner(cross))
    return float(vol) if vol.ndim == 0 else vol
