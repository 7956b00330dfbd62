"""Points of P^1(C), complete flags of C^n, Moebius maps and the Veronese flag.

Group elements of PSL(2, C) and PSL(n, C) are plain complex ndarrays
compared up to a nonzero scalar.  A point ``z`` of the affine chart is
``[z : 1]`` and infinity is ``[1 : 0]``.

The vector ``c`` of C^n is identified with the polynomial
``sum_k c[k] t^k``; the Veronese line of ``[x : y]`` is ``(x + y t)^(n-1)``
and the symmetric power acts on ``e1 = 1, e2 = t``.  With this
identification the Veronese flag is equivariant for :func:`sym_power`
without any change of basis.
"""

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .dilog import REGULAR_VERTEX

__all__ = [
    "RANK_TOL",
    "ProjPoint",
    "CompleteFlag",
    "AffineFlag",
    "DegenerateConfigurationError",
    "ZERO",
    "ONE",
    "INFINITY",
    "as_group_element",
    "projective_normalize",
    "projective_distance",
    "projectively_equal",
    "mobius_normalize",
    "veronese",
    "sym_power",
    "flag_distance",
    "numerical_rank",
    "random_proj_points",
    "random_sl2",
    "random_group_element",
    "regular_tetrahedron",
    "binomial_bound",
]

#: relative singular-value threshold used for every rank decision
RANK_TOL = 1e-9


class DegenerateConfigurationError(ValueError):
    """Coincident points where distinct ones are required."""


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point ``[x : y]`` of the complex projective line."""

    x: complex
    y: complex

    def __post_init__(self):
        x, y = complex(self.x), complex(self.y)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValueError("homogeneous coordinates must be finite")
        scale = max(abs(x), abs(y))
        if scale == 0:
            raise ValueError("[0 : 0] is not a point of P^1")
        object.__setattr__(self, "x", x / scale)
        object.__setattr__(self, "y", y / scale)

    @classmethod
    def from_complex(cls, z):
        """``[z : 1]``, or infinity when ``z`` is infinite."""
        z = complex(z)
        if np.isinf(z.real) or np.isinf(z.imag):
            return cls(1, 0)
        return cls(z, 1)

    @property
    def coords(self):
        return np.array([self.x, self.y], dtype=complex)

    def to_complex(self):
        if abs(self.y) == 0:
            return complex(np.inf, 0)
        return self.x / self.y

    def transform(self, g):
        return ProjPoint(*(np.asarray(g, dtype=complex) @ self.coords))

    def conjugate(self):
        return ProjPoint(np.conj(self.x), np.conj(self.y))

    def chordal_distance(self, other):
        p, q = self.coords, other.coords
        return abs(p[0] * q[1] - p[1] * q[0]) / (np.linalg.norm(p) * np.linalg.norm(q))

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.chordal_distance(other) <= 1e-12

    __hash__ = None

    def __repr__(self):
        return f"ProjPoint({self.x:.6g}, {self.y:.6g})"


ZERO = ProjPoint(0, 1)
ONE = ProjPoint(1, 1)
INFINITY = ProjPoint(1, 0)


def as_group_element(m, n=None):
    """Validate ``m`` as an invertible square complex matrix."""
    g = np.array(m, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"group element must be square, got shape {g.shape}")
    if n is not None and g.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {g.shape[0]}x{g.shape[1]}")
    if not np.all(np.isfinite(g)):
        raise ValueError("group element has non-finite entries")
    s = np.linalg.svd(g, compute_uv=False)
    if s[0] == 0 or s[-1] <= RANK_TOL * s[0]:
        raise ValueError("group element is singular")
    return g


def projective_normalize(m):
    """Rescale so that the largest-modulus entry equals one."""
    m = np.asarray(m, dtype=complex)
    return m / m.flat[np.argmax(np.abs(m))]


def projective_distance(a, b):
    """Max-entry distance between ``a`` and ``b`` as elements of PGL.

    Both matrices are divided by their entry at the position of the
    largest-modulus entry of ``a``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = np.argmax(np.abs(a))
    if b.flat[k] == 0:
        return np.inf
    return float(np.max(np.abs(a / a.flat[k] - b / b.flat[k])))


def projectively_equal(a, b, tol=1e-8):
    return projective_distance(a, b) <= tol


def numerical_rank(m, tol=RANK_TOL):
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


class CompleteFlag:
    """A complete flag of C^n given by an adapted basis.

    ``F^i`` is spanned by the first ``i`` columns of ``basis``.  The columns
    double as the decoration ``(v^1, ..., v^n)`` of the affine flag, so the
    decoration condition ``F^i = C v^i + F^(i-1)`` holds by construction.
    """

    def __init__(self, basis, rank_tol=RANK_TOL, name=None):
        b = np.array(basis, dtype=complex)
        label = f"flag {name!r}" if name is not None else "flag"
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] == 0:
            raise ValueError(f"{label}: basis must be a non-empty square matrix, got shape {b.shape}")
        if not np.all(np.isfinite(b)):
            raise ValueError(f"{label}: basis has non-finite entries")
        s = np.linalg.svd(b, compute_uv=False)
        if s[0] == 0 or s[-1] <= rank_tol * s[0]:
            raise ValueError(f"{label}: basis is rank deficient "
                             f"(condition number {s[0] / s[-1] if s[-1] else np.inf:.3g})")
        b.setflags(write=False)
        self.basis = b
        self.name = name

    @property
    def n(self):
        return self.basis.shape[0]

    def subspace(self, i):
        """Basis of ``F^i`` (an ``n x i`` matrix)."""
        return self.basis[:, :i]

    def decoration(self, i):
        """The decoration vector ``v^i``, ``1 <= i <= n``."""
        return self.basis[:, i - 1]

    @cached_property
    def orthonormal(self):
        """Unitary matrix whose leading columns span the same flag."""
        q, _ = np.linalg.qr(self.basis)
        q.setflags(write=False)
        return q

    def transform(self, g):
        return CompleteFlag(np.asarray(g, dtype=complex) @ self.basis)

    def conjugate(self):
        return CompleteFlag(np.conj(self.basis))

    @classmethod
    def standard(cls, n):
        return cls(np.eye(n))

    def __repr__(self):
        return f"CompleteFlag(n={self.n})"


#: the decoration of an affine flag is stored as the flag basis
AffineFlag = CompleteFlag


def flag_distance(f, g):
    """Largest sine of a principal angle between ``F^i`` and ``G^i`` over all ``i``."""
    qf, qg = f.orthonormal, g.orthonormal
    n = qf.shape[0]
    worst = 0.0
    for i in range(1, n):
        a = qg[:, :i]
        resid = qf[:, :i] - a @ (a.conj().T @ qf[:, :i])
        worst = max(worst, float(np.linalg.norm(resid, 2)))
    return worst


def mobius_normalize(xi0, xi1, xi3):
    """The Moebius map sending ``xi0, xi1, xi3`` to ``0, 1, oo``."""
    p0, p1, p3 = (np.asarray(getattr(p, "coords", p), dtype=complex) for p in (xi0, xi1, xi3))

    def det(p, q):
        return p[0] * q[1] - p[1] * q[0]

    d10, d13, d03 = det(p1, p0), det(p1, p3), det(p0, p3)
    scale = np.linalg.norm(p0) * np.linalg.norm(p1) * np.linalg.norm(p3)
    if min(abs(d10), abs(d13), abs(d03)) <= 1e-12 * scale:
        raise DegenerateConfigurationError("mobius_normalize needs three distinct points")
    alpha, beta = 1.0 / d10, 1.0 / d13
    return np.array([[alpha * p0[1], -alpha * p0[0]],
                     [beta * p3[1], -beta * p3[0]]])


def _binomial_power(coeffs, k):
    out = np.array([1.0 + 0j])
    for _ in range(k):
        out = np.convolve(out, coeffs)
    return out


def veronese(xi, n):
    """The Veronese flag ``V_n(xi)``.

    ``V_n^j(xi)`` consists of the polynomials divisible by
    ``(x + y t)^(n-j)``.  The returned basis uses
    ``(x + y t)^(n-j) (u + v t)^(j-1)`` with ``[u : v]`` the antipode of
    ``xi``, which is adapted to the flag.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x, y = getattr(xi, "coords", xi)
    ell = np.array([x, y], dtype=complex)
    anti = np.array([-np.conj(y), np.conj(x)], dtype=complex)
    cols = [np.convolve(_binomial_power(ell, n - j), _binomial_power(anti, j - 1))
            for j in range(1, n + 1)]
    return CompleteFlag(np.column_stack(cols))


def sym_power(g, n):
    """Matrix of the irreducible representation ``pi_n`` at ``g`` in PGL(2, C).

    Column ``m`` is the image of ``t^m`` (``= e1^(n-1-m) e2^m``), i.e. the
    coefficients of ``(a + c t)^(n-1-m) (b + d t)^m`` for ``g = [[a, b], [c, d]]``.
    """
    g = as_group_element(g, 2)
    if n < 1:
        raise ValueError("n must be positive")
    (a, b), (c, d) = g
    col1 = np.array([a, c])
    col2 = np.array([b, d])
    cols = [np.convolve(_binomial_power(col1, n - 1 - m), _binomial_power(col2, m))
            for m in range(n)]
    return np.column_stack(cols)


def random_proj_points(rng, size=None):
    """Fubini-Study uniform points: normalized complex Gaussian pairs."""
    shape = (2,) if size is None else (size, 2)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if size is None:
        return ProjPoint(*v)
    return [ProjPoint(*row) for row in v]


def random_sl2(rng):
    """Complex Gaussian 2x2 matrix rescaled to determinant one."""
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return g / np.sqrt(np.linalg.det(g))


def random_group_element(rng, n, max_cond=None):
    """Complex Gaussian n x n matrix, resampled until its condition number is below ``max_cond``."""
    while True:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if max_cond is None or np.linalg.cond(g) <= max_cond:
            return g


def regular_tetrahedron():
    """The positively oriented regular ideal tetrahedron ``(0, 1, e^(i pi/3), oo)``."""
    return (ZERO, ONE, ProjPoint.from_complex(REGULAR_VERTEX), INFINITY)


def binomial_bound(n):
    """``C(n + 1, 3)``, the ratio of the Borel bound to ``nu_3``."""
    return comb(n + 1, 3)
