"""Convex cones and their elements.

A :class:`Point` is a dense real vector or a dense symmetric matrix; a
:class:`ConeSpec` describes one of the supported cone families and provides
membership, the induced partial order, lattice operations where they exist,
and reproducible random sampling.

Randomness contract: every draw comes from a numpy ``Philox`` counter-based
bit generator keyed by ``(master_seed, stream_index)``.  Philox is platform
independent, so identical ``Rng`` values replay identical samples anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, ParameterError, ShapeError

VECTOR = "vector"
MATRIX = "symmetric-matrix"

_SYM_TOL = 1e-12

# Floor added to every coordinate sampled from an open orthant, relative to
# the sampling scale; keeps 1/x-style evaluations finite.
_OPEN_ORTHANT_FLOOR = 1e-6


class Point:
    """An element of a cone: a vector or a symmetric matrix.

    Immutable; arithmetic is defined only between points of equal kind and
    dimension.  Matrix points use the trace inner product ``<A,B> =
    trace(AB)`` so that all norms are Euclidean/Frobenius.
    """

    __slots__ = ("kind", "data", "dim")

    def __init__(self, kind: str, data: np.ndarray, *, _validated: bool = False):
        data = np.asarray(data, dtype=np.float64)
        if kind == VECTOR:
            if data.ndim != 1 or data.shape[0] < 1:
                raise ShapeError(f"vector point needs a 1-d array, got shape {data.shape}")
            dim = data.shape[0]
        elif kind == MATRIX:
            if data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] < 1:
                raise ShapeError(f"matrix point needs a square array, got shape {data.shape}")
            dim = data.shape[0]
            if not _validated:
                bound = _SYM_TOL * max(1.0, float(np.abs(data).max(initial=0.0)))
                if float(np.abs(data - data.T).max(initial=0.0)) > bound:
                    raise ShapeError("matrix point is not symmetric within tolerance")
                data = 0.5 * (data + data.T)
        else:
            raise ShapeError(f"unknown point kind {kind!r}")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    @staticmethod
    def vector(values) -> "Point":
        return Point(VECTOR, np.asarray(values, dtype=np.float64))

    @staticmethod
    def matrix(values) -> "Point":
        return Point(MATRIX, np.asarray(values, dtype=np.float64))

    @staticmethod
    def zero(kind: str, dim: int) -> "Point":
        shape = (dim,) if kind == VECTOR else (dim, dim)
        return Point(kind, np.zeros(shape), _validated=True)

    def _require_compatible(self, other: "Point") -> None:
        if not isinstance(other, Point):
            raise ShapeError(f"expected a Point, got {type(other).__name__}")
        if self.kind != other.kind or self.dim != other.dim:
            raise ShapeError(
                f"incompatible points: {self.kind}/{self.dim} vs {other.kind}/{other.dim}"
            )

    def __add__(self, other: "Point") -> "Point":
        self._require_compatible(other)
        return Point(self.kind, self.data + other.data, _validated=True)

    def __sub__(self, other: "Point") -> "Point":
        self._require_compatible(other)
        return Point(self.kind, self.data - other.data, _validated=True)

    def __mul__(self, scalar: float) -> "Point":
        return Point(self.kind, self.data * float(scalar), _validated=True)

    __rmul__ = __mul__

    def __neg__(self) -> "Point":
        return Point(self.kind, -self.data, _validated=True)

    def inner(self, other: "Point") -> float:
        """Euclidean dot product; trace pairing for matrices."""
        self._require_compatible(other)
        return float(np.sum(self.data * other.data))

    def norm(self) -> float:
        return math.sqrt(self.inner(self))

    def norm_inf(self) -> float:
        return float(np.abs(self.data).max(initial=0.0))

    def to_json(self):
        """Vectors serialize as arrays, matrices as arrays of row arrays."""
        return self.data.tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Point)
            and self.kind == other.kind
            and self.dim == other.dim
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.kind, self.dim, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Point({self.kind}, {self.data.tolist()!r})"


def point_from_json(obj, kind: str | None = None) -> Point:
    arr = np.asarray(obj, dtype=np.float64)
    if kind is None:
        kind = MATRIX if arr.ndim == 2 else VECTOR
    return Point(kind, arr)


NONNEG_ORTHANT = "nonneg-orthant"
POSITIVE_ORTHANT = "positive-orthant"
FULL_SPACE = "full-space"
PSD_CONE = "psd-cone"
PRODUCT = "product"
GRID_LP_POSITIVE = "grid-lp-positive"

_LATTICE_FAMILIES = {NONNEG_ORTHANT, FULL_SPACE, GRID_LP_POSITIVE}


@dataclass(frozen=True)
class ConeSpec:
    """Descriptor of a supported convex cone.

    ``dim`` is the vector length (or matrix order for the PSD cone, or the
    total concatenated length for product cones).  Product cones hold their
    factor specs; only vector-kind factors are supported, and points of a
    product cone are the concatenated factor coordinates.
    """

    family: str
    dim: int
    factors: tuple["ConeSpec", ...] = ()
    p: float | None = None
    h: float | None = None

    @property
    def point_kind(self) -> str:
        return MATRIX if self.family == PSD_CONE else VECTOR

    @property
    def contains_origin(self) -> bool:
        if self.family == POSITIVE_ORTHANT:
            return False
        if self.family == PRODUCT:
            return all(f.contains_origin for f in self.factors)
        return True

    @property
    def supports_lattice(self) -> bool:
        if self.family in _LATTICE_FAMILIES:
            return True
        if self.family == PRODUCT:
            return all(f.supports_lattice for f in self.factors)
        return False

    def zero(self) -> Point:
        return Point.zero(self.point_kind, self.dim)

    def to_json(self) -> dict:
        out: dict = {"family": self.family, "dim": self.dim}
        if self.family == GRID_LP_POSITIVE:
            out["p"] = self.p
            out["h"] = self.h
        if self.family == PRODUCT:
            out["factors"] = [f.to_json() for f in self.factors]
        return out


def _check_dim(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def nonneg_orthant(n: int) -> ConeSpec:
    return ConeSpec(NONNEG_ORTHANT, _check_dim(n))


def positive_orthant(n: int) -> ConeSpec:
    return ConeSpec(POSITIVE_ORTHANT, _check_dim(n))


def full_space(n: int) -> ConeSpec:
    return ConeSpec(FULL_SPACE, _check_dim(n))


def psd_cone(n: int) -> ConeSpec:
    return ConeSpec(PSD_CONE, _check_dim(n))


def product(*factors: ConeSpec) -> ConeSpec:
    if not factors:
        raise ParameterError("product cone needs at least one factor")
    for f in factors:
        if f.point_kind != VECTOR:
            raise CapabilityError("product cones support vector-kind factors only")
    return ConeSpec(PRODUCT, sum(f.dim for f in factors), factors=tuple(factors))


def grid_lp_positive(m: int, p: float, h: float) -> ConeSpec:
    m = _check_dim(m)
    if not p >= 1.0:
        raise ParameterError(f"grid exponent must satisfy p >= 1, got {p}")
    if not h > 0.0:
        raise ParameterError(f"grid step must be positive, got {h}")
    return ConeSpec(GRID_LP_POSITIVE, m, p=float(p), h=float(h))


def cone_from_json(obj: dict) -> ConeSpec:
    fam = obj["family"]
    if fam == PRODUCT:
        return product(*(cone_from_json(f) for f in obj["factors"]))
    if fam == GRID_LP_POSITIVE:
        return grid_lp_positive(obj["dim"], obj["p"], obj["h"])
    maker = {
        NONNEG_ORTHANT: nonneg_orthant,
        POSITIVE_ORTHANT: positive_orthant,
        FULL_SPACE: full_space,
        PSD_CONE: psd_cone,
    }.get(fam)
    if maker is None:
        raise ParameterError(f"unknown cone family {fam!r}")
    return maker(obj["dim"])


def _require_point(cone: ConeSpec, x: Point) -> None:
    if not isinstance(x, Point):
        raise ShapeError(f"expected a Point, got {type(x).__name__}")
    if x.kind != cone.point_kind or x.dim != cone.dim:
        raise ShapeError(
            f"point of kind {x.kind}/{x.dim} incompatible with cone "
            f"{cone.family}({cone.dim})"
        )


def member(cone: ConeSpec, x: Point, tol: float = 0.0) -> bool:
    """Whether ``x`` lies in the (closed, or open for the positive orthant)
    cone within tolerance."""
    _require_point(cone, x)
    d = x.data
    if cone.family in (NONNEG_ORTHANT, GRID_LP_POSITIVE):
        return bool(np.all(d >= -tol))
    if cone.family == POSITIVE_ORTHANT:
        return bool(np.all(d > tol))
    if cone.family == FULL_SPACE:
        return True
    if cone.family == PSD_CONE:
        lam_min = float(np.linalg.eigvalsh(d)[0])
        fro = float(np.linalg.norm(d))
        return lam_min >= -tol * max(1.0, fro)
    if cone.family == PRODUCT:
        off = 0
        for f in cone.factors:
            if not member(f, Point(VECTOR, d[off : off + f.dim], _validated=True), tol):
                return False
            off += f.dim
        return True
    raise CapabilityError(f"membership not implemented for {cone.family}")


def leq(cone: ConeSpec, x: Point, y: Point, tol: float = 0.0) -> bool:
    """Partial order induced by the cone: ``x <= y`` iff ``y - x`` is a member.

    The PSD cone therefore carries the Loewner order.
    """
    return member(cone, y - x, tol)


def meet_join(cone: ConeSpec, x: Point, y: Point) -> tuple[Point, Point]:
    """Coordinatewise ``(inf, sup)`` on lattice cones."""
    if not cone.supports_lattice:
        raise CapabilityError(f"cone family {cone.family!r} has no lattice operations")
    _require_point(cone, x)
    _require_point(cone, y)
    lo = Point(VECTOR, np.minimum(x.data, y.data), _validated=True)
    hi = Point(VECTOR, np.maximum(x.data, y.data), _validated=True)
    return lo, hi


def comonotonic(u, v, tol: float = 0.0) -> bool:
    """True iff ``(u_i - u_j) * (v_i - v_j) >= -tol`` for every index pair."""
    ua = u.data if isinstance(u, Point) else np.asarray(u, dtype=np.float64)
    va = v.data if isinstance(v, Point) else np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape or ua.ndim != 1:
        raise ShapeError("comonotonicity needs two vectors of equal length")
    du = ua[:, None] - ua[None, :]
    dv = va[:, None] - va[None, :]
    return bool(np.all(du * dv >= -tol))


@dataclass(frozen=True)
class Rng:
    """Reproducible random stream: Philox keyed by (master_seed, stream_index).

    Streams with distinct indices are statistically independent; identical
    keys replay identical draws on every platform.
    """

    master_seed: int
    stream_index: int = 0
    _gen: list = field(default_factory=list, repr=False, compare=False)

    def stream(self, index: int) -> "Rng":
        return Rng(self.master_seed, int(index))

    @property
    def generator(self) -> np.random.Generator:
        if not self._gen:
            key = np.array(
                [self.master_seed & 0xFFFFFFFFFFFFFFFF, self.stream_index & 0xFFFFFFFFFFFFFFFF],
                dtype=np.uint64,
            )
            self._gen.append(np.random.Generator(np.random.Philox(key=key)))
        return self._gen[0]


def sample_batch(
    cone: ConeSpec,
    rng: Rng,
    count: int,
    scale: float = 1.0,
    boundary_prob: float = 0.2,
) -> np.ndarray:
    """Draw ``count`` cone members as a stacked array.

    Orthant-like cones draw ``|N(0, scale)|`` coordinates and zero each one
    with probability ``boundary_prob`` so checks exercise the boundary; the
    open orthant then adds a small positive floor.  The PSD cone draws
    ``G @ G.T * (scale / N)`` with Gaussian ``G``; the full space draws plain
    Gaussians.  Consumes ``rng`` sequentially, so a fixed (seed, stream)
    replays the same batch.
    """
    if not scale > 0.0:
        raise ParameterError(f"scale must be positive, got {scale}")
    g = rng.generator
    n = cone.dim
    fam = cone.family
    if fam in (NONNEG_ORTHANT, GRID_LP_POSITIVE, POSITIVE_ORTHANT):
        out = np.abs(g.normal(0.0, scale, size=(count, n)))
        if boundary_prob > 0.0:
            out[g.random(size=(count, n)) < boundary_prob] = 0.0
        if fam == POSITIVE_ORTHANT:
            out += _OPEN_ORTHANT_FLOOR * scale
        return out
    if fam == FULL_SPACE:
        return g.normal(0.0, scale, size=(count, n))
    if fam == PSD_CONE:
        gmat = g.normal(0.0, 1.0, size=(count, n, n))
        out = np.einsum("tij,tkj->tik", gmat, gmat) * (scale / n)
        return 0.5 * (out + np.swapaxes(out, 1, 2))
    if fam == PRODUCT:
        parts = [sample_batch(f, rng, count, scale, boundary_prob) for f in cone.factors]
        return np.concatenate(parts, axis=1)
    raise CapabilityError(f"sampling not implemented for {fam}")


def sample(
    cone: ConeSpec,
    rng: Rng,
    scale: float = 1.0,
    boundary_prob: float = 0.2,
) -> Point:
    """Draw one member of the cone (see :func:`sample_batch` for the rules)."""
    arr = sample_batch(cone, rng, 1, scale, boundary_prob)[0]
    return Point(cone.point_kind, arr, _validated=True)


def comonotone_pair_batch(
    n: int, rng: Rng, count: int, scale: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized twin of :func:`sample_comonotone_pair`."""
    g = rng.generator
    u = np.sort(np.abs(g.normal(0.0, scale, size=(count, n))), axis=1)
    v = np.sort(np.abs(g.normal(0.0, scale, size=(count, n))), axis=1)
    perm = np.argsort(g.random(size=(count, n)), axis=1)
    return np.take_along_axis(u, perm, axis=1), np.take_along_axis(v, perm, axis=1)


def sample_comonotone_pair(n: int, rng: Rng, scale: float = 1.0) -> tuple[Point, Point]:
    """Two nonnegative vectors ordered by one shared permutation; always
    passes :func:`comonotonic` with zero tolerance."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    u, v = comonotone_pair_batch(n, rng, 1, scale)
    return Point(VECTOR, u[0], _validated=True), Point(VECTOR, v[0], _validated=True)
