"""The Borel cocycle on 4-tuples of complete flags.

For a multi-index ``J`` the strat class is the quotient
``<F_i^(j_i + 1)> / <F_i^(j_i)>`` together with the images of the
decorations ``v_i^(j_i + 1)``.  Only classes whose quotient is a plane
contribute; their value is the ideal volume of the four projected lines.

The dimensions ``dim <F_0^a, F_1^b, F_2^c, F_3^d>`` for all
``a, b, c, d in 0..n`` are computed once per 4-tuple with one batched SVD
over orthonormal flag bases, so the ``n^4`` loop only pays for the few
classes with a two-dimensional quotient.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

import numpy as np

from .dilog import NU3, ideal_volume
from .projflag import RANK_TOL, CompleteFlag, binomial_bound

__all__ = [
    "ZERO_PROJECTION_TOL",
    "StratClass",
    "as_flag_tuple",
    "dimension_table",
    "strat_classes",
    "strat_value",
    "borel_value",
    "borel_from_complete",
    "borel_values",
    "borel_bound",
    "is_maximal",
    "permutation_sign",
]

#: a projected decoration counts as zero below this fraction of its norm
ZERO_PROJECTION_TOL = 1e-9


@dataclass(frozen=True)
class StratClass:
    """One term of the Borel sum.

    ``coords`` holds the projected decorations in an orthonormal basis of the
    quotient (a ``2 x 4`` array) and is ``None`` unless ``m == 2``.
    ``conditioning`` is the ratio of the two singular values of the
    projected spanning set; small values flag an ill-conditioned quotient.
    """

    index: tuple
    m: int
    coords: np.ndarray = None
    conditioning: float = np.nan
    value: float = 0.0


def as_flag_tuple(flags):
    """Coerce four flags (``CompleteFlag`` or basis matrices) into a tuple of ``CompleteFlag``."""
    flags = tuple(f if isinstance(f, CompleteFlag) else CompleteFlag(f, name=k)
                  for k, f in enumerate(flags))
    if len(flags) != 4:
        raise ValueError(f"the Borel cocycle takes 4 flags, got {len(flags)}")
    n = flags[0].n
    for k, f in enumerate(flags):
        if f.n != n:
            raise ValueError(f"flag {k} lives in C^{f.n}, expected C^{n}")
    return flags


@lru_cache(maxsize=None)
def _span_masks(n):
    # row r <-> (a, b, c, d) in lexicographic order over {0..n}^4
    idx = np.array(list(product(range(n + 1), repeat=4)))
    cols = np.arange(n)
    mask = (cols[None, None, :] < idx[:, :, None]).reshape(len(idx), 4 * n)
    return idx, mask


@lru_cache(maxsize=None)
def _multi_indices(n):
    return np.array(list(product(range(n), repeat=4)))


def _ranks(stack, tol):
    s = np.linalg.svd(stack, compute_uv=False)
    top = s[..., :1]
    return np.count_nonzero(s > tol * np.where(top > 0, top, np.inf), axis=-1)


def dimension_table(flags, tol=RANK_TOL):
    """Array ``T`` with ``T[a, b, c, d] = dim <F_0^a, F_1^b, F_2^c, F_3^d>``."""
    flags = as_flag_tuple(flags)
    n = flags[0].n
    q = np.concatenate([f.orthonormal for f in flags], axis=1)
    _, mask = _span_masks(n)
    return _ranks(q[None, :, :] * mask[:, None, :], tol).reshape((n + 1,) * 4)


def _evaluate(flags, with_details=False):
    flags = as_flag_tuple(flags)
    n = flags[0].n
    dims = dimension_table(flags)
    J = _multi_indices(n)
    lo = dims[tuple(J.T)]
    hi = dims[tuple((J + 1).T)]
    m = hi - lo
    live = np.flatnonzero(m == 2)
    values = np.zeros(len(J))
    details = None
    if with_details:
        details = [StratClass(index=tuple(int(j) for j in J[r]), m=int(m[r])) for r in range(len(J))]
    if len(live) == 0:
        return values, details

    Jl = J[live]
    q = np.concatenate([f.orthonormal for f in flags], axis=1)
    _, mask = _span_masks(n)
    stride = (n + 1) ** np.arange(3, -1, -1)
    below = q[None] * mask[Jl @ stride][:, None, :]
    above = q[None] * mask[(Jl + 1) @ stride][:, None, :]

    # orthonormal basis of W- and the projector onto its complement
    u, _, _ = np.linalg.svd(below)
    keep = np.arange(n)[None, :] < lo[live][:, None]
    w = u * keep[:, None, :]
    proj = np.eye(n)[None] - w @ w.conj().transpose(0, 2, 1)

    u2, s2, _ = np.linalg.svd(proj @ above)
    plane = u2[:, :, :2]

    bases = np.stack([f.basis for f in flags])
    deco = bases[np.arange(4)[None, :], :, Jl].transpose(0, 2, 1)  # (L, n, 4)
    pdeco = proj @ deco
    vanishing = np.any(np.linalg.norm(pdeco, axis=1)
                       <= ZERO_PROJECTION_TOL * np.linalg.norm(deco, axis=1), axis=1)
    coords = plane.conj().transpose(0, 2, 1) @ pdeco  # (L, 2, 4)
    pts = coords.transpose(0, 2, 1)
    vols = np.asarray(ideal_volume(pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]))
    vols = np.where(vanishing, 0.0, vols)
    values[live] = vols
    if with_details:
        cond = s2[:, 1] / s2[:, 0]
        for k, r in enumerate(live):
            details[r] = StratClass(index=details[r].index, m=2, coords=coords[k],
                                    conditioning=float(cond[k]), value=float(vols[k]))
    return values, details


def strat_classes(flags):
    """All ``n^4`` strat classes in lexicographic multi-index order, with diagnostics."""
    return _evaluate(flags, with_details=True)[1]


def strat_value(flags, index):
    """Contribution of the multi-index ``index = (j0, j1, j2, j3)`` to the Borel sum."""
    flags = as_flag_tuple(flags)
    n = flags[0].n
    index = tuple(int(j) for j in index)
    if len(index) != 4 or not all(0 <= j < n for j in index):
        raise ValueError(f"multi-index {index} out of range for n = {n}")
    values, _ = _evaluate(flags)
    return float(values[np.ravel_multi_index(index, (n,) * 4)])


def borel_value(flags):
    """``B_n`` of four affine flags, decorations taken from the flag bases."""
    values, _ = _evaluate(flags)
    return float(np.sum(values))


def borel_from_complete(flags):
    """``B_n`` of four complete flags; independent of the decoration chosen."""
    return borel_value(flags)


def borel_values(tuples, workers=1):
    """Evaluate :func:`borel_value` over many 4-tuples, in order."""
    tuples = list(tuples)
    if workers <= 1 or len(tuples) < 2:
        return np.array([borel_value(t) for t in tuples])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(borel_value, tuples)))


def borel_bound(n):
    """``C(n + 1, 3) * nu_3``."""
    return binomial_bound(n) * NU3


def is_maximal(flags, tol=1e-6, value=None):
    """+1 / -1 when ``B_n`` is within ``tol`` of plus / minus the bound, else 0.

    For ``n < 3`` with a zero bound (``n = 1``) no orientation exists and 0
    is returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if value is None:
        flags = as_flag_tuple(flags)
        value = borel_value(flags)
        n = flags[0].n
    else:
        n = as_flag_tuple(flags)[0].n
    bound = borel_bound(n)
    if bound == 0:
        return 0
    if abs(value - bound) <= tol:
        return 1
    if abs(value + bound) <= tol:
        return -1
    return 0


def permutation_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def all_permutations():
    """The 24 permutations of four flags with their signs."""
    return [(p, permutation_sign(p)) for p in permutations(range(4))]
