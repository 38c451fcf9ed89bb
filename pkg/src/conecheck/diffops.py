"""Difference-operator calculus for functions on cones.

``delta`` is the first difference ``f(x + z) - f(z)``; ``second_diff`` is
the alternating four-term combination whose sign separates the strongly
subadditive functions from the strongly superadditive ones; ``kth_diff``
generalizes to order k via inclusion-exclusion.
"""

from __future__ import annotations

import numpy as np

from .cones import ConeSpec, Point
from .errors import CapabilityError, DomainError, ShapeError

# Beyond this order the 2^k alternating sum drowns in cancellation at double
# precision, and the evaluation count explodes.
MAX_DIFF_ORDER = 12


class FunctionHandle:
    """A real-valued function on a cone.

    ``batch`` maps a stacked array of raw point data ``(T, ...)`` to a
    ``(T,)`` value array and may return NaN where the function is undefined;
    calling the handle on a single :class:`Point` converts NaN into a
    :class:`DomainError`.  ``hessian`` optionally supplies an analytic
    Hessian rule for vector domains.
    """

    __slots__ = ("label", "domain", "batch", "hessian")

    def __init__(self, label: str, domain: ConeSpec, batch, hessian=None):
        self.label = label
        self.domain = domain
        self.batch = self._wrap(batch)
        self.hessian = hessian

    @staticmethod
    def _wrap(batch):
        def run(rows: np.ndarray) -> np.ndarray:
            with np.errstate(all="ignore"):
                out = np.asarray(batch(np.asarray(rows, dtype=np.float64)), dtype=np.float64)
            return out

        return run

    @classmethod
    def from_pointwise(cls, label: str, domain: ConeSpec, fn, hessian=None) -> "FunctionHandle":
        """Wrap a Point -> float rule (evaluated row by row in batches)."""
        kind = domain.point_kind

        def batch(rows: np.ndarray) -> np.ndarray:
            out = np.empty(rows.shape[0])
            for i, r in enumerate(rows):
                try:
                    out[i] = fn(Point(kind, r, _validated=True))
                except DomainError:
                    out[i] = np.nan
            return out

        return cls(label, domain, batch, hessian=hessian)

    def _point_data(self, x: Point) -> np.ndarray:
        if x.kind != self.domain.point_kind or x.dim != self.domain.dim:
            raise ShapeError(
                f"point {x.kind}/{x.dim} incompatible with the domain of {self.label!r}"
            )
        return x.data

    def __call__(self, x: Point) -> float:
        val = float(self.batch(self._point_data(x)[None, ...])[0])
        if not np.isfinite(val):
            raise DomainError(f"{self.label!r} is undefined or non-finite at {x!r}")
        return val

    def __repr__(self) -> str:
        return f"FunctionHandle({self.label!r} on {self.domain.family}({self.domain.dim}))"


def _stack_eval(f: FunctionHandle, points: list[Point]) -> np.ndarray:
    rows = np.stack([f._point_data(p) for p in points])
    vals = f.batch(rows)
    if not np.all(np.isfinite(vals)):
        bad = points[int(np.flatnonzero(~np.isfinite(vals))[0])]
        raise DomainError(f"{f.label!r} is undefined at {bad!r}")
    return vals


def delta(f: FunctionHandle, x: Point, z: Point) -> float:
    """First difference ``f(x + z) - f(z)``."""
    vals = _stack_eval(f, [x + z, z])
    return float(vals[0] - vals[1])


def second_diff(f: FunctionHandle, x: Point, y: Point, z: Point) -> float:
    """``f(x+y+z) + f(z) - f(x+z) - f(y+z)``, grouped as (positives) -
    (negatives) to limit cancellation; exactly symmetric in x and y."""
    vals = _stack_eval(f, [x + y + z, z, x + z, y + z])
    return float((vals[0] + vals[1]) - (vals[2] + vals[3]))


def kth_diff(f: FunctionHandle, xs: list[Point], base: Point) -> float:
    """Order-k alternating difference via inclusion-exclusion.

    Positive-parity and negative-parity subset evaluations are accumulated
    separately and subtracted once.
    """
    k = len(xs)
    if k < 1:
        raise ShapeError("kth_diff needs at least one increment")
    if k > MAX_DIFF_ORDER:
        raise CapabilityError(f"difference order {k} exceeds the cap {MAX_DIFF_ORDER}")
    # subset_sum[s] = base + sum of xs[i] for bits i of s, built incrementally
    sums: list[Point] = [base]
    for s in range(1, 1 << k):
        low = (s & -s).bit_length() - 1
        sums.append(sums[s & (s - 1)] + xs[low])
    vals = _stack_eval(f, sums)
    parity = np.array([(k - bin(s).count("1")) % 2 for s in range(1 << k)])
    pos = float(np.sum(vals[parity == 0]))
    neg = float(np.sum(vals[parity == 1]))
    return pos - neg


def shift_and_center(f: FunctionHandle, t: Point) -> FunctionHandle:
    """``x -> f(x + t) - f(t)``; the value at the origin is exactly zero.

    Raises a domain error immediately if ``f`` is undefined at ``t``.
    """
    t_data = f._point_data(t)
    f_t = f.batch(t_data[None, ...])[0]
    if not np.isfinite(f_t):
        raise DomainError(f"{f.label!r} is undefined at the shift point {t!r}")

    def batch(rows: np.ndarray) -> np.ndarray:
        return f.batch(rows + t_data) - f_t

    return FunctionHandle(f"{f.label}|shifted-centered", f.domain, batch)
