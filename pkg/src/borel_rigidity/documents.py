"""JSON experiment documents and flag files.

Complex numbers are ``[re, im]`` pairs (plain numbers are read as real),
matrices are lists of rows.  A document looks like::

    {
      "n": 3,
      "presentation": "figure-eight",
      "space": {"kind": "dihedral", "modulus": 5, "centers": {"a": 0, "b": 1}},
      "cocycle": {"kind": "sym-power"},
      "twist": [M_0, M_1, ...],
      "boundary": {"kind": "twisted-veronese"},
      "estimator": {"samples": 64, "seed": 0, "tol": 1e-6},
      "volume": {"regular-tetrahedra": 2}
    }

Every problem is reported as a :class:`ValidationError` whose message
starts with the JSON path of the offending item.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .cocycle import (
    Cocycle,
    ConstantBoundary,
    CorruptedBoundary,
    FiniteGammaSpace,
    GroupPresentation,
    TransformedBoundary,
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
from .dilog import REGULAR_VERTEX, bloch_wigner
from .errors import ValidationError
from .invariant import BlockBoundary, block_diagonal_cocycle, validate_partition
from .projflag import CompleteFlag, ProjPoint, veronese

__all__ = [
    "Experiment",
    "load_document",
    "load_flags",
    "example_path",
    "bundled_examples",
    "encode_complex",
    "encode_matrix",
    "decode_complex",
    "decode_matrix",
]

_DEFAULT_ESTIMATOR = {"samples": 64, "seed": 0, "tol": 1e-6, "workers": 1}


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(m):
    return [[encode_complex(v) for v in row] for row in np.asarray(m)]


def decode_complex(value, where):
    if isinstance(value, bool):
        raise ValidationError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise ValidationError(f"{where}: expected a number or [re, im], got {value!r}")


def decode_matrix(value, where, n=None):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ValidationError(f"{where}: expected a matrix as a list of rows")
    size = len(value)
    if any(len(r) != size for r in value):
        raise ValidationError(f"{where}: matrix must be square")
    if n is not None and size != n:
        raise ValidationError(f"{where}: expected a {n}x{n} matrix, got {size}x{size}")
    m = np.array([[decode_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)]
                  for i, r in enumerate(value)], dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{where}: matrix has non-finite entries")
    return m


def decode_point(value, where):
    """A point of CP^1: a complex number, ``"inf"`` or ``{"homogeneous": [z0, z1]}``."""
    if value in ("inf", "infinity"):
        return ProjPoint(1, 0)
    if isinstance(value, dict) and "homogeneous" in value:
        h = value["homogeneous"]
        if not isinstance(h, list) or len(h) != 2:
            raise ValidationError(f"{where}.homogeneous: expected two coordinates")
        try:
            return ProjPoint(decode_complex(h[0], f"{where}.homogeneous[0]"),
                             decode_complex(h[1], f"{where}.homogeneous[1]"))
        except ValueError as exc:
            raise ValidationError(f"{where}: {exc}") from exc
    return ProjPoint.from_complex(decode_complex(value, where))


def _require(doc, key, where):
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected an object")
    if key not in doc:
        raise ValidationError(f"{where}: missing {key!r}")
    return doc[key]


def _int(value, where, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(f"{where}: must be at least {minimum}")
    return value


@dataclass
class Experiment:
    """A fully validated document."""

    n: int
    presentation: GroupPresentation
    space: FiniteGammaSpace
    cocycle: Cocycle
    boundary: object
    twist: TwistMap = None
    partition: tuple = None
    samples: int = 64
    seed: int = 0
    tol: float = 1e-6
    workers: int = 1
    volume: float = None
    source: dict = field(default=None, repr=False)


def _presentation(value):
    if value == "figure-eight":
        return figure_eight()
    if isinstance(value, str):
        raise ValidationError(f"presentation: unknown named presentation {value!r}")
    gens = _require(value, "generators", "presentation")
    if not isinstance(gens, dict) or not gens:
        raise ValidationError("presentation.generators: expected a non-empty object")
    mats = {}
    for name, m in gens.items():
        if len(name) != 1 or not name.islower():
            raise ValidationError(f"presentation.generators: name {name!r} must be one lowercase letter")
        mats[name] = decode_matrix(m, f"presentation.generators.{name}", 2)
    relators = value.get("relators", [])
    if not isinstance(relators, list) or not all(isinstance(r, str) for r in relators):
        raise ValidationError("presentation.relators: expected a list of words")
    try:
        return GroupPresentation(mats, tuple(relators))
    except ValueError as exc:
        raise ValidationError(f"presentation: {exc}") from exc


def _space(value, pres):
    names = pres.names
    where = "space"
    if value is None or value == "point":
        return FiniteGammaSpace.point(names)
    if isinstance(value, str):
        raise ValidationError(f"{where}: unknown named space {value!r}")
    kind = value.get("kind", "table") if isinstance(value, dict) else None
    if kind == "point":
        return FiniteGammaSpace.point(names)
    if kind == "cyclic":
        return cyclic_space(_int(_require(value, "size", where), f"{where}.size", 1),
                            names, pres.relators)
    if kind == "dihedral":
        centers = value.get("centers", {g: i for i, g in enumerate(names)})
        if not isinstance(centers, dict) or set(centers) != set(names):
            raise ValidationError(f"{where}.centers: need one center per generator {list(names)}")
        centers = {g: _int(c, f"{where}.centers.{g}") for g, c in centers.items()}
        modulus = _int(value.get("modulus", 5), f"{where}.modulus", 1)
        return dihedral_space(centers, pres.relators, modulus)
    if kind == "table":
        weights = _require(value, "weights", where)
        action = _require(value, "action", where)
        if not isinstance(action, dict):
            raise ValidationError(f"{where}.action: expected an object")
        missing = set(names) - set(action)
        extra = set(action) - set(names)
        if missing or extra:
            raise ValidationError(f"{where}.action: generators {sorted(missing)} missing, "
                                  f"{sorted(extra)} unknown")
        for g, perm in action.items():
            if not isinstance(perm, list) or not all(isinstance(i, int) for i in perm):
                raise ValidationError(f"{where}.action.{g}: expected a list of point indices")
            if len(perm) != len(weights) or any(i < 0 or i >= len(weights) for i in perm):
                raise ValidationError(f"{where}.action.{g}: indices must lie in 0..{len(weights) - 1}")
        try:
            return FiniteGammaSpace(weights, action, pres.relators, value.get("labels"))
        except (ValueError, TypeError) as exc:
            raise ValidationError(f"{where}: {exc}") from exc
    raise ValidationError(f"{where}.kind: unknown kind {kind!r}")


def _matrix_table(value, where, size, n):
    if not isinstance(value, list) or len(value) != size:
        raise ValidationError(f"{where}: expected one matrix per point ({size})")
    return np.stack([decode_matrix(m, f"{where}[{x}]", n) for x, m in enumerate(value)])


def _cocycle(value, pres, space, n):
    where = "cocycle"
    kind = _require(value, "kind", where)
    try:
        if kind == "sym-power":
            return cocycle_from_representation(sym_power_representation(pres, n), space, pres)
        if kind == "representation":
            mats = _require(value, "matrices", where)
            if not isinstance(mats, dict) or set(mats) != set(pres.names):
                raise ValidationError(f"{where}.matrices: need one matrix per generator {list(pres.names)}")
            rho = {g: decode_matrix(m, f"{where}.matrices.{g}", n) for g, m in mats.items()}
            return cocycle_from_representation(rho, space, pres)
        if kind == "block":
            partition = validate_partition(_require(value, "partition", where), n)
            chars = value.get("characters")
            if chars is not None:
                if not isinstance(chars, list):
                    raise ValidationError(f"{where}.characters: expected a list")
                chars = [decode_complex(c, f"{where}.characters[{i}]") for i, c in enumerate(chars)]
            return block_diagonal_cocycle(pres, space, partition, chars)
        if kind == "table":
            table = _require(value, "table", where)
            if not isinstance(table, dict) or set(table) != set(pres.names):
                raise ValidationError(f"{where}.table: need one entry per generator {list(pres.names)}")
            mats = {g: _matrix_table(t, f"{where}.table.{g}", len(space), n) for g, t in table.items()}
            return Cocycle(pres, space, mats)
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    raise ValidationError(f"{where}.kind: unknown kind {kind!r}")


def _boundary(value, n, space, twist_map):
    where = "boundary"
    if value is None:
        raise ValidationError(f"{where}: missing boundary map")
    kind = _require(value, "kind", where)
    conj = bool(value.get("conjugate", False))
    if kind == "veronese":
        phi = VeroneseBoundary(n, conj)
    elif kind == "twisted-veronese":
        if twist_map is None:
            raise ValidationError(f"{where}: twisted-veronese needs a top-level 'twist'")
        phi = twisted_boundary(VeroneseBoundary(n, conj), twist_map)
    elif kind == "table":
        mats = _matrix_table(_require(value, "matrices", where), f"{where}.matrices", len(space), n)
        phi = TransformedBoundary(VeroneseBoundary(n, conj), mats)
    elif kind == "block":
        phi = BlockBoundary(validate_partition(_require(value, "partition", where), n), conj)
    elif kind == "constant":
        basis = decode_matrix(_require(value, "flag", where), f"{where}.flag", n)
        try:
            phi = ConstantBoundary(CompleteFlag(basis, name="boundary.flag"))
        except ValueError as exc:
            raise ValidationError(f"{where}.flag: {exc}") from exc
    else:
        raise ValidationError(f"{where}.kind: unknown kind {kind!r}")
    corrupt = value.get("corrupt")
    if corrupt is not None:
        point = _int(_require(corrupt, "point", f"{where}.corrupt"), f"{where}.corrupt.point", 0)
        if point >= len(space):
            raise ValidationError(f"{where}.corrupt.point: no point {point} in a space of {len(space)}")
        m = decode_matrix(_require(corrupt, "matrix", f"{where}.corrupt"), f"{where}.corrupt.matrix", n)
        try:
            phi = CorruptedBoundary(phi, point, m)
        except ValueError as exc:
            raise ValidationError(f"{where}.corrupt.matrix: {exc}") from exc
    return phi


def _volume(value):
    if value is None:
        return None
    if isinstance(value, dict) and set(value) == {"regular-tetrahedra"}:
        count = _int(value["regular-tetrahedra"], "volume.regular-tetrahedra", 1)
        return count * bloch_wigner(REGULAR_VERTEX)
    if isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0:
        return float(value)
    raise ValidationError(f"volume: expected a positive number or {{'regular-tetrahedra': k}}, got {value!r}")


def _read(source):
    if isinstance(source, dict):
        return source
    path = Path(source)
    if not path.exists():
        bundled = bundled_examples()
        if str(source) in bundled:
            path = bundled[str(source)]
        else:
            raise ValidationError(f"{source}: no such file or bundled example")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def load_document(source, n=None):
    """Load and validate an experiment document.

    ``source`` is a dict, a path or the name of a bundled example.  ``n``
    overrides the document's dimension; this is only allowed when nothing
    in the document is tied to a particular size.
    """
    doc = _read(source)
    if not isinstance(doc, dict):
        raise ValidationError("document: expected a JSON object")
    known = {"n", "presentation", "space", "cocycle", "twist", "conjugate", "boundary",
             "partition", "estimator", "volume", "description"}
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(f"document: unknown keys {sorted(unknown)}")
    if n is None:
        n = _int(_require(doc, "n", "document"), "n", 1)
    else:
        n = _int(n, "--n", 1)
        if "n" in doc and doc["n"] != n and _size_bound(doc):
            raise ValidationError(f"--n {n}: document is fixed to n = {doc['n']}")
    pres = _presentation(_require(doc, "presentation", "document"))
    space = _space(doc.get("space"), pres)
    sigma = _cocycle(_require(doc, "cocycle", "document"), pres, space, n)
    twist_map = None
    if doc.get("twist") is not None:
        twist_map = TwistMap(_matrix_table(doc["twist"], "twist", len(space), n))
        sigma = twist(sigma, twist_map)
    if doc.get("conjugate", False):
        sigma = sigma.conjugate()
    phi = _boundary(doc.get("boundary"), n, space, twist_map)
    partition = None
    if doc.get("partition") is not None:
        partition = validate_partition(doc["partition"], n)
    est = dict(_DEFAULT_ESTIMATOR)
    given = doc.get("estimator", {})
    if not isinstance(given, dict) or set(given) - set(est):
        raise ValidationError(f"estimator: allowed keys are {sorted(est)}")
    est.update(given)
    samples = _int(est["samples"], "estimator.samples", 1)
    seed = _int(est["seed"], "estimator.seed", 0)
    workers = _int(est["workers"], "estimator.workers", 1)
    tol = est["tol"]
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0:
        raise ValidationError("estimator.tol: expected a positive number")
    return Experiment(n=n, presentation=pres, space=space, cocycle=sigma, boundary=phi,
                      twist=twist_map, partition=partition, samples=samples, seed=seed,
                      tol=float(tol), workers=workers, volume=_volume(doc.get("volume")),
                      source=doc)


def _size_bound(doc):
    cocycle = doc.get("cocycle") or {}
    boundary = doc.get("boundary") or {}
    return (doc.get("twist") is not None or doc.get("partition") is not None
            or cocycle.get("kind") != "sym-power"
            or boundary.get("kind") not in ("veronese", "twisted-veronese")
            or "corrupt" in boundary)


def load_flags(source, n=None):
    """Read ``{"flags": [...]}`` with four entries ``{"basis": M}`` or ``{"veronese": point}``."""
    doc = _read(source)
    flags = _require(doc, "flags", "document")
    if not isinstance(flags, list) or len(flags) != 4:
        raise ValidationError("flags: expected exactly four flags")
    if n is None and "n" in doc:
        n = _int(doc["n"], "n", 1)
    out = []
    for i, entry in enumerate(flags):
        where = f"flags[{i}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        if "basis" in entry:
            basis = decode_matrix(entry["basis"], f"{where}.basis", n)
            try:
                out.append(CompleteFlag(basis, name=where))
            except ValueError as exc:
                raise ValidationError(str(exc)) from exc
        elif "veronese" in entry:
            if n is None:
                raise ValidationError(f"{where}: Veronese flags need --n or a top-level 'n'")
            out.append(veronese(decode_point(entry["veronese"], f"{where}.veronese"), n))
        else:
            raise ValidationError(f"{where}: expected 'basis' or 'veronese'")
    sizes = {f.n for f in out}
    if len(sizes) != 1:
        raise ValidationError(f"flags: flags live in different dimensions {sorted(sizes)}")
    return out


def bundled_examples():
    """Names and paths of the example documents shipped with the package."""
    root = resources.files("borel_rigidity") / "data"
    return {p.name.removesuffix(".json"): Path(str(p)) for p in root.iterdir()
            if p.name.endswith(".json")}


def example_path(name):
    examples = bundled_examples()
    if name not in examples:
        raise ValidationError(f"unknown bundled example {name!r}; available: {sorted(examples)}")
    return examples[name]
