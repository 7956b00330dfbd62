"""Finite models of measurable cocycles of a lattice in PSL(2, C).

A word is a string of generator letters: lowercase for a generator and
uppercase for its inverse, so ``"aB"`` is ``a b^-1``.  Groups are never
enumerated; everything is evaluated word by word.  Points of a
:class:`FiniteGammaSpace` are addressed by their integer index.
"""

from dataclasses import dataclass

import numpy as np

from .dilog import REGULAR_VERTEX
from .errors import ValidationError
from .projflag import (
    CompleteFlag,
    as_group_element,
    flag_distance,
    projective_distance,
    random_group_element,
    random_proj_points,
    sym_power,
    veronese,
)

__all__ = [
    "parse_word",
    "invert_word",
    "GroupPresentation",
    "FiniteGammaSpace",
    "Cocycle",
    "TwistMap",
    "BoundaryMap",
    "VeroneseBoundary",
    "ConstantBoundary",
    "TransformedBoundary",
    "CorruptedBoundary",
    "twisted_boundary",
    "evaluate_word",
    "cocycle_from_representation",
    "sym_power_representation",
    "twist",
    "check_equivariance",
    "figure_eight",
    "dihedral_space",
    "cyclic_space",
    "RELATOR_TOL",
]

#: projective tolerance for relator checks of cocycles
RELATOR_TOL = 1e-7


def parse_word(word):
    """Turn ``"aBc"`` into ``[("a", 1), ("b", -1), ("c", 1)]``."""
    out = []
    for letter in word:
        if not letter.isalpha():
            raise ValidationError(f"bad letter {letter!r} in word {word!r}")
        out.append((letter.lower(), 1 if letter.islower() else -1))
    return out


def invert_word(word):
    return word[::-1].swapcase()


@dataclass(frozen=True)
class GroupPresentation:
    """Generators of a discrete subgroup of PSL(2, C) given by 2x2 matrices, and relators."""

    generators: dict
    relators: tuple = ()
    tol: float = 1e-9

    def __post_init__(self):
        gens = {}
        for name, m in self.generators.items():
            if len(name) != 1 or not name.islower():
                raise ValidationError(f"generator names must be single lowercase letters, got {name!r}")
            try:
                gens[name] = as_group_element(m, 2)
            except ValueError as exc:
                raise ValidationError(f"generator {name!r}: {exc}") from exc
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(self.relators))
        for r in self.relators:
            self._check_letters(r)
            dist = projective_distance(np.eye(2), self.evaluate(r))
            if dist > self.tol:
                raise ValidationError(f"relator {r!r} is not the identity (projective distance {dist:.3g})")

    @property
    def names(self):
        return tuple(self.generators)

    def _check_letters(self, word):
        for name, _ in parse_word(word):
            if name not in self.generators:
                raise ValidationError(f"unknown generator {name!r} in word {word!r}")

    def evaluate(self, word):
        """Holonomy matrix of ``word``."""
        self._check_letters(word)
        out = np.eye(2, dtype=complex)
        for name, e in parse_word(word):
            g = self.generators[name]
            out = out @ (g if e > 0 else np.linalg.inv(g))
        return out

    def act(self, word, xi):
        return xi.transform(self.evaluate(word))


class FiniteGammaSpace:
    """Finite probability space with a measure-preserving action by permutations.

    ``action[g][x]`` is the index of ``g . x``.  Words act right to left.
    """

    def __init__(self, weights, action, relators=(), labels=None):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ValidationError("weights must be a non-empty list")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {w.sum():.15g}, expected 1")
        size = len(w)
        perms = {}
        for name, perm in action.items():
            p = np.asarray(perm, dtype=int)
            if sorted(p.tolist()) != list(range(size)):
                raise ValidationError(f"action of {name!r} is not a permutation of {size} points")
            if np.any(np.abs(w[p] - w) > 1e-12):
                raise ValidationError(f"action of {name!r} does not preserve the weights")
            p.setflags(write=False)
            perms[name] = p
        w.setflags(write=False)
        self.weights = w
        self.action = perms
        self.labels = list(labels) if labels is not None else [str(i) for i in range(size)]
        if len(self.labels) != size:
            raise ValidationError("number of labels does not match number of points")
        self._inverse = {name: np.argsort(p) for name, p in perms.items()}
        for r in relators:
            for x in range(size):
                if self.act(r, x) != x:
                    raise ValidationError(f"relator {r!r} moves point {self.labels[x]!r}")

    def __len__(self):
        return len(self.weights)

    def act(self, word, x):
        for name, e in reversed(parse_word(word)):
            if name not in self.action:
                raise ValidationError(f"unknown generator {name!r}")
            x = int((self.action[name] if e > 0 else self._inverse[name])[x])
        return x

    @classmethod
    def point(cls, generators):
        return cls([1.0], {g: [0] for g in generators})


def cyclic_space(size, generators, relators=()):
    """Uniform ``Z/size`` with every generator acting by ``x -> x + 1``."""
    step = [(x + 1) % size for x in range(size)]
    return FiniteGammaSpace(np.full(size, 1.0 / size), {g: step for g in generators}, relators)


def dihedral_space(centers, relators=(), modulus=5):
    """Uniform ``Z/modulus`` with generator ``g`` acting by the reflection ``x -> 2 c_g - x``."""
    action = {g: [(2 * c - x) % modulus for x in range(modulus)] for g, c in centers.items()}
    return FiniteGammaSpace(np.full(modulus, 1.0 / modulus), action, relators)


class Cocycle:
    """Generator table ``(g, x) -> sigma(g, x)`` of a cocycle with values in PGL(n, C).

    ``table[g]`` is an array of shape ``(len(space), n, n)``.  Construction
    checks that every relator evaluates to the identity at every point.
    """

    def __init__(self, presentation, space, table, tol=RELATOR_TOL):
        self.presentation = presentation
        self.space = space
        arrays = {}
        n = None
        for name in presentation.names:
            if name not in table:
                raise ValidationError(f"cocycle table misses generator {name!r}")
            a = np.array(table[name], dtype=complex)
            if a.ndim != 3 or a.shape[0] != len(space) or a.shape[1] != a.shape[2]:
                raise ValidationError(f"table of {name!r} has shape {a.shape}, "
                                      f"expected ({len(space)}, n, n)")
            n = a.shape[1] if n is None else n
            if a.shape[1] != n:
                raise ValidationError("table entries have inconsistent sizes")
            for x in range(len(space)):
                try:
                    as_group_element(a[x])
                except ValueError as exc:
                    raise ValidationError(f"sigma({name}, {space.labels[x]}): {exc}") from exc
            a.setflags(write=False)
            arrays[name] = a
        self.table = arrays
        self.n = n
        self._inverse = {name: np.linalg.inv(a) for name, a in arrays.items()}
        self.relator_residual = 0.0
        for r in presentation.relators:
            for x in range(len(space)):
                dist = projective_distance(np.eye(n), self.evaluate(r, x))
                self.relator_residual = max(self.relator_residual, dist)
                if dist > tol:
                    raise ValidationError(f"relator {r!r} fails at point {space.labels[x]!r} "
                                          f"(projective distance {dist:.3g})")

    def evaluate(self, word, x):
        """``sigma(word, x)`` by the cocycle rule ``sigma(gh, x) = sigma(g, hx) sigma(h, x)``."""
        out = np.eye(self.n, dtype=complex)
        for name, e in reversed(parse_word(word)):
            if name not in self.table:
                raise ValidationError(f"unknown generator {name!r} in word {word!r}")
            if e > 0:
                out = self.table[name][x] @ out
                x = int(self.space.action[name][x])
            else:
                # sigma(g^-1, x) = sigma(g, g^-1 x)^-1
                x = int(self.space._inverse[name][x])
                out = self._inverse[name][x] @ out
        return out

    def conjugate(self):
        """Entrywise complex conjugate cocycle."""
        return Cocycle(self.presentation, self.space,
                       {g: np.conj(a) for g, a in self.table.items()})


def evaluate_word(sigma, word, x):
    return sigma.evaluate(word, x)


def cocycle_from_representation(rho, space, presentation, tol=RELATOR_TOL):
    """The constant cocycle ``sigma_rho(g, x) = rho(g)``."""
    table = {}
    for name in presentation.names:
        if name not in rho:
            raise ValidationError(f"representation misses generator {name!r}")
        m = np.asarray(rho[name], dtype=complex)
        table[name] = np.broadcast_to(m, (len(space),) + m.shape)
    try:
        return Cocycle(presentation, space, table, tol=tol)
    except ValidationError as exc:
        raise ValidationError(f"invalid representation: {exc}") from exc


def sym_power_representation(presentation, n):
    """Generator images of ``pi_n`` composed with the holonomy."""
    return {g: sym_power(m, n) for g, m in presentation.generators.items()}


class TwistMap:
    """Assignment ``x -> f(x)`` of invertible matrices on a finite space."""

    def __init__(self, matrices):
        m = np.array(matrices, dtype=complex)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValidationError(f"twist map must have shape (points, n, n), got {m.shape}")
        for x in range(m.shape[0]):
            try:
                as_group_element(m[x])
            except ValueError as exc:
                raise ValidationError(f"twist at point {x}: {exc}") from exc
        m.setflags(write=False)
        self.matrices = m

    def __getitem__(self, x):
        return self.matrices[x]

    def __len__(self):
        return len(self.matrices)

    @property
    def n(self):
        return self.matrices.shape[1]

    def inverse(self):
        return TwistMap(np.linalg.inv(self.matrices))

    def conjugate(self):
        return TwistMap(np.conj(self.matrices))

    @classmethod
    def identity(cls, size, n):
        return cls(np.broadcast_to(np.eye(n), (size, n, n)))

    @classmethod
    def random(cls, rng, size, n, max_cond=50.0):
        return cls([random_group_element(rng, n, max_cond) for _ in range(size)])


def twist(sigma, f):
    """The cohomologous cocycle ``sigma^f(g, x) = f(gx)^-1 sigma(g, x) f(x)``."""
    if len(f) != len(sigma.space) or f.n != sigma.n:
        raise ValidationError("twist map does not match the cocycle")
    inv = np.linalg.inv(f.matrices)
    table = {}
    for name, a in sigma.table.items():
        moved = sigma.space.action[name]
        table[name] = inv[moved] @ a @ f.matrices
    return Cocycle(sigma.presentation, sigma.space, table)


class BoundaryMap:
    """A map ``(xi, x) -> complete flag``; subclasses implement :meth:`flag`."""

    n = None

    def flag(self, xi, x):
        raise NotImplementedError

    def __call__(self, xi, x):
        return self.flag(xi, x)

    def slice(self, x):
        """The slice ``xi -> phi(xi, x)``."""
        return lambda xi: self.flag(xi, x)


@dataclass(frozen=True)
class VeroneseBoundary(BoundaryMap):
    """``phi(xi, x) = V_n(xi)``, or its complex conjugate ``V_n(conj xi)``."""

    n: int
    conjugate: bool = False

    def flag(self, xi, x):
        return veronese(xi.conjugate() if self.conjugate else xi, self.n)


@dataclass(frozen=True)
class ConstantBoundary(BoundaryMap):
    value: CompleteFlag

    @property
    def n(self):
        return self.value.n

    def flag(self, xi, x):
        return self.value


class TransformedBoundary(BoundaryMap):
    """``phi(xi, x) = M(x) base(xi, x)`` for a per-point matrix table ``M``."""

    def __init__(self, base, matrices):
        self.base = base
        self.matrices = matrices if isinstance(matrices, TwistMap) else TwistMap(matrices)
        self.n = base.n
        if self.matrices.n != self.n:
            raise ValidationError("boundary matrix table has the wrong size")

    def flag(self, xi, x):
        return self.base.flag(xi, x).transform(self.matrices[x])


def twisted_boundary(base, f):
    """``phi^f(xi, x) = f(x)^-1 phi(xi, x)``, equivariant for ``sigma^f``."""
    return TransformedBoundary(base, f.inverse())


class CorruptedBoundary(BoundaryMap):
    """Negative control: ``base`` moved by ``perturbation`` at a single point."""

    def __init__(self, base, point, perturbation):
        self.base = base
        self.point = point
        self.perturbation = as_group_element(perturbation, base.n)
        self.n = base.n

    def flag(self, xi, x):
        f = self.base.flag(xi, x)
        return f.transform(self.perturbation) if x == self.point else f


def check_equivariance(phi, sigma, samples, rng):
    """Largest flag distance between ``phi(g xi, g x)`` and ``sigma(g, x) phi(xi, x)``.

    ``g`` runs over generators and their inverses, ``xi`` is Fubini-Study
    random and ``x`` uniform on the points.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    pres = sigma.presentation
    letters = list(pres.names) + [g.upper() for g in pres.names]
    worst = 0.0
    for _ in range(samples):
        word = letters[rng.integers(len(letters))]
        x = int(rng.integers(len(sigma.space)))
        xi = random_proj_points(rng)
        lhs = phi.flag(pres.act(word, xi), sigma.space.act(word, x))
        rhs = phi.flag(xi, x).transform(sigma.evaluate(word, x))
        worst = max(worst, flag_distance(lhs, rhs))
    return worst


#: lower-left holonomy entry; -omega with omega = exp(2 pi i / 3)
FIGURE_EIGHT_PARAMETER = complex(np.conj(REGULAR_VERTEX))
FIGURE_EIGHT_RELATOR = "abABaBAbaB"


def figure_eight():
    """Figure-eight knot group with its parabolic holonomy generators.

    ``a = [[1, 1], [0, 1]]``, ``b = [[1, 0], [-omega, 1]]`` and the relator
    ``a w = w b`` with ``w = b a^-1 b^-1 a``.  The relator is re-verified by
    :class:`GroupPresentation` on construction.
    """
    a = np.array([[1, 1], [0, 1]], dtype=complex)
    b = np.array([[1, 0], [FIGURE_EIGHT_PARAMETER, 1]], dtype=complex)
    return GroupPresentation({"a": a, "b": b}, (FIGURE_EIGHT_RELATOR,))

