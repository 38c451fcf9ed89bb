"""Randomized property checks with reproducible witnesses.

A check draws trial points from the target's domain cone, evaluates the
inequality components of the requested property on every trial, and reports
the worst slack seen.  A verdict is only ever ``NO_VIOLATION_FOUND`` or
``VIOLATION_FOUND``: sampling cannot prove a universally quantified
inequality, so certified verdicts live in :mod:`conecheck.certify`.

Slack convention: every inequality is normalized to ``slack >= 0``; a trial
is a violation iff ``slack < -(tol_abs + tol_rel * s)`` where ``s`` is the
largest absolute function value involved in that trial.

Determinism: all draws derive from Philox streams keyed by
``(config.seed, fixed stream ids)``, so identical configurations produce
byte-identical reports.  Violating trials are re-evaluated through the same
scalar expression path used by witness re-evaluation, which makes stored
witness margins reproducible exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

import numpy as np

from . import cones
from .catalog import PropertyLabel, resolve_handle
from .cones import MATRIX, VECTOR, ConeSpec, Point, Rng
from .diffops import FunctionHandle, kth_diff, second_diff
from .errors import (
    CapabilityError,
    DomainError,
    NumericFailure,
    ParameterError,
    PreconditionError,
    ShapeError,
)
from .numkernel import ScalarFunction

NO_VIOLATION = "NO_VIOLATION_FOUND"
VIOLATION = "VIOLATION_FOUND"

# stream ids for the sampling roles; refute offsets these per ladder rung
_STREAM_X, _STREAM_Y, _STREAM_Z, _STREAM_BASE, _STREAM_PAIR = 1, 2, 3, 4, 5
_STREAM_STEPS = 8
_STREAM_SPOT_U, _STREAM_SPOT_V = 20, 21

_SKIP_BUDGET = 0.10
_SHRINK_CAP = 200


@dataclass(frozen=True)
class CheckConfig:
    """Knobs shared by every randomized check."""

    trials: int = 10000
    scale: float = 1.0
    tol_abs: float = 1e-9
    tol_rel: float = 1e-12
    seed: int = 0
    order_cap: int = 5
    shrink: bool = True
    boundary_prob: float = 0.2

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.scale > 0:
            raise ParameterError("scale must be positive")
        if self.tol_abs < 0 or self.tol_rel < 0:
            raise ParameterError("tolerances must be nonnegative")
        if not 1 <= self.order_cap <= 12:
            raise ParameterError("order_cap must lie in 1..12")
        if not 0.0 <= self.boundary_prob < 1.0:
            raise ParameterError("boundary_prob must lie in [0, 1)")

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "scale": self.scale,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "seed": self.seed,
            "order_cap": self.order_cap,
            "shrink": self.shrink,
            "boundary_prob": self.boundary_prob,
        }


@dataclass(frozen=True)
class Witness:
    """A re-evaluable counterexample: named points, the violated inequality,
    and the slack it produces (negative)."""

    points: dict
    margin: float
    expression: str

    def to_json(self) -> dict:
        return {
            "points": {k: v.to_json() for k, v in sorted(self.points.items())},
            "margin": self.margin,
            "expression": self.expression,
        }


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a randomized check.

    ``worst_margin`` is the most negative slack seen; when a violation is
    found it equals the witness margin (after shrinking).
    """

    property: str
    verdict: str
    trials_run: int
    worst_margin: float
    witness: Witness | None
    skipped: int
    config: CheckConfig
    mode: str = "check"

    @property
    def found_violation(self) -> bool:
        return self.verdict == VIOLATION

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "trials": self.trials_run,
            "worst_margin": self.worst_margin,
            "witness": self.witness.to_json() if self.witness else None,
            "skipped": self.skipped,
            "config": self.config.to_json(),
            "mode": self.mode,
        }

    def json_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# expression registry: the scalar evaluation path shared by witness
# re-evaluation and shrinking
# ---------------------------------------------------------------------------


def _vals(handle: FunctionHandle, pts: list[Point]) -> np.ndarray:
    rows = np.stack([handle._point_data(p) for p in pts])
    out = handle.batch(rows)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{handle.label!r} undefined on a witness point")
    return out


def _expr_subadd(handle, pts, sign: float):
    v = _vals(handle, [pts["x"], pts["y"], pts["x"] + pts["y"]])
    slack = sign * (v[0] + v[1] - v[2])
    return slack, float(np.max(np.abs(v)))


def _expr_second_diff(handle, pts, sign: float):
    x, y, z = pts["x"], pts["y"], pts["z"]
    v = _vals(handle, [x + y + z, z, x + z, y + z])
    slack = sign * ((v[0] + v[1]) - (v[2] + v[3]))
    return slack, float(np.max(np.abs(v)))


def _expr_modular(handle, pts, sign: float):
    x, y = pts["x"], pts["y"]
    lo, hi = cones.meet_join(handle.domain, x, y)
    v = _vals(handle, [x, y, hi, lo])
    slack = sign * ((v[0] + v[1]) - (v[2] + v[3]))
    return slack, float(np.max(np.abs(v)))


def _expr_cm(handle, pts, k: int):
    if k == 0:
        v = _vals(handle, [pts["base"]])
        return float(v[0]), float(abs(v[0]))
    xs = [pts[f"x{i + 1}"] for i in range(k)]
    val = kth_diff(handle, xs, pts["base"])
    slack = val if k % 2 == 0 else -val
    scale = max(abs(float(handle(p))) for p in [pts["base"], pts["base"] + sum(xs[1:], xs[0])])
    return slack, scale


def _expr_origin(handle, pts, sign: float):
    v = float(_vals(handle, [pts["zero"]])[0])
    return sign * v, abs(v)


def _expr_alpha_strong(handle, pts, alpha: float):
    sd = second_diff(handle, pts["x"], pts["y"], pts["z"])
    prod = alpha * float(pts["x"].data[0]) * float(pts["y"].data[0])
    return sd - prod, max(abs(sd), abs(prod))


def _expr_lipschitz(handle, pts, lip: float):
    sd = second_diff(handle, pts["x"], pts["y"], pts["z"])
    prod = lip * float(pts["x"].data[0]) * float(pts["y"].data[0])
    return prod - abs(sd), max(abs(sd), abs(prod))


def _log_ratio(x: float, y: float, z: float) -> float:
    return (np.log1p(x + y + z) + np.log1p(z)) - (np.log1p(x + z) + np.log1p(y + z))


def _expr_double_bound(handle, pts, upper: bool):
    x, y, z = (float(pts[k].data[0]) for k in ("x", "y", "z"))
    d = _log_ratio(x, y, z)
    slack = (x * y - d) if upper else (x * y + d)
    return slack, max(abs(x * y), abs(d))


_EXPR_PARAM = re.compile(r"^(?P<name>[a-z0-9-]+)(\[(?P<arg>[^\]]*)\])?$")


def evaluate_expression(handle: FunctionHandle | None, expression: str, points: dict):
    """Evaluate a witness expression at named points: returns ``(slack, s)``.

    This is the authoritative scalar path: check() re-evaluates every found
    violation through it, so stored witness margins reproduce exactly.
    """
    m = _EXPR_PARAM.match(expression)
    if not m:
        raise ParameterError(f"malformed expression {expression!r}")
    name, arg = m.group("name"), m.group("arg")
    if name == "subadd":
        return _expr_subadd(handle, points, 1.0)
    if name == "superadd":
        return _expr_subadd(handle, points, -1.0)
    if name == "second-diff-nonpos":
        return _expr_second_diff(handle, points, -1.0)
    if name in ("second-diff-nonneg", "comonotone-strong-superadd"):
        return _expr_second_diff(handle, points, 1.0)
    if name == "submodular":
        return _expr_modular(handle, points, 1.0)
    if name == "supermodular":
        return _expr_modular(handle, points, -1.0)
    if name == "completely-monotone":
        return _expr_cm(handle, points, int(arg.split("=")[1]))
    if name == "origin-nonneg":
        return _expr_origin(handle, points, 1.0)
    if name == "origin-nonpos":
        return _expr_origin(handle, points, -1.0)
    if name == "alpha-strong":
        return _expr_alpha_strong(handle, points, float(arg.split("=")[1]))
    if name == "lipschitz-box":
        return _expr_lipschitz(handle, points, float(arg.split("=")[1]))
    if name == "double-bound-upper":
        return _expr_double_bound(handle, points, True)
    if name == "double-bound-lower":
        return _expr_double_bound(handle, points, False)
    raise ParameterError(f"unknown expression {expression!r}")


def _popoviciu_evaluator(handle: FunctionHandle, f: ScalarFunction, reverse: bool):
    sign = -1.0 if reverse else 1.0

    def ev(expression: str, pts: dict):
        x, y, z = pts["x"], pts["y"], pts["z"]
        if expression.startswith("popoviciu-three-point"):
            fv = f(_vals(handle, [x + y + z, z, x + z, y + z]))
            slack = sign * ((fv[0] + fv[1]) - (fv[2] + fv[3]))
        elif expression.startswith("popoviciu-symmetrized"):
            fv = f(_vals(handle, [x, y, z, x + y + z, x + y, y + z, x + z]))
            slack = sign * ((fv[0] + fv[1] + fv[2]) / 3.0 + fv[3] - (2.0 / 3.0) * (fv[4] + fv[5] + fv[6]))
        else:
            return evaluate_expression(handle, expression, pts)
        return float(slack), float(np.max(np.abs(fv)))

    return ev


def reevaluate_witness(
    handle: FunctionHandle | None,
    witness: Witness,
    scalar_fn: ScalarFunction | None = None,
    reverse: bool = False,
) -> float:
    """Recompute the witness margin from its stored points.

    Three-point (Popoviciu-style) expressions need the composed scalar
    function passed back in; everything else re-evaluates from the handle
    alone.
    """
    if witness.expression.startswith("popoviciu"):
        if scalar_fn is None:
            raise ParameterError("re-evaluating a three-point witness needs scalar_fn")
        ev = _popoviciu_evaluator(handle, scalar_fn, reverse)
        slack, _ = ev(witness.expression, witness.points)
        return float(slack)
    slack, _ = evaluate_expression(handle, witness.expression, witness.points)
    return float(slack)


# ---------------------------------------------------------------------------
# shrinking
# ---------------------------------------------------------------------------


def _shrink(handle, expression: str, points: dict, init_margin: float, evaluator=None):
    """Halve coordinates of the witness points greedily.

    A step is accepted only when the re-evaluated slack stays at or below
    the initially found margin, so shrinking never weakens the violation
    (homogeneous functions would otherwise shrink the witness all the way to
    the detection threshold).  Capped at 200 accepted steps.
    """
    if evaluator is None:
        evaluator = lambda expr, pts: evaluate_expression(handle, expr, pts)
    current = dict(points)
    margin = init_margin
    # allow one-ulp-scale wobble so flat directions (margin independent of a
    # point) still collapse toward the origin
    ceiling = init_margin + 1e-12 * max(1.0, abs(init_margin))
    accepted = 0
    while accepted < _SHRINK_CAP:
        any_accept = False
        for name in sorted(current):
            pt = current[name]
            data = pt.data
            if pt.kind == MATRIX:
                idxs = [(i, j) for i in range(pt.dim) for j in range(i, pt.dim)]
            else:
                idxs = list(np.ndindex(data.shape))
            for idx in idxs:
                if accepted >= _SHRINK_CAP:
                    break
                trial = np.array(data, copy=True)
                if pt.kind == MATRIX:
                    i, j = idx
                    if trial[i, j] == 0.0:
                        continue
                    trial[i, j] *= 0.5
                    trial[j, i] = trial[i, j]
                else:
                    if trial[idx] == 0.0:
                        continue
                    trial[idx] *= 0.5
                cand = dict(current)
                cand[name] = Point(pt.kind, trial, _validated=True)
                try:
                    m2, _ = evaluator(expression, cand)
                except DomainError:
                    continue
                if np.isfinite(m2) and m2 <= ceiling:
                    current = cand
                    margin = float(m2)
                    data = trial
                    accepted += 1
                    any_accept = True
        if not any_accept:
            break
    return current, margin


# ---------------------------------------------------------------------------
# vectorized trial machinery
# ---------------------------------------------------------------------------


def _draw(cone: ConeSpec, cfg: CheckConfig, stream: int, count: int) -> np.ndarray:
    rng = Rng(cfg.seed, stream)
    return cones.sample_batch(cone, rng, count, cfg.scale, cfg.boundary_prob)


def _point_of(cone: ConeSpec, row: np.ndarray) -> Point:
    return Point(cone.point_kind, row, _validated=True)


@dataclass
class _Component:
    expression: str
    slack: np.ndarray  # (T,)
    scale: np.ndarray  # (T,)
    roles: tuple[str, ...]


def _batch(handle: FunctionHandle, arr: np.ndarray) -> np.ndarray:
    return handle.batch(arr)


def _abs_max(*arrays: np.ndarray) -> np.ndarray:
    out = np.abs(arrays[0])
    for a in arrays[1:]:
        out = np.maximum(out, np.abs(a))
    return out


def _additivity_components(handle, cfg, base, strong: bool, sign: float):
    cone = handle.domain
    t = cfg.trials - (1 if _origin_expression(handle, _sign_name(sign, strong)) else 0)
    t = max(t, 1)
    x = _draw(cone, cfg, base + _STREAM_X, t)
    y = _draw(cone, cfg, base + _STREAM_Y, t)
    vx, vy, vxy = _batch(handle, x), _batch(handle, y), _batch(handle, x + y)
    comps = [
        _Component(
            "subadd" if sign > 0 else "superadd",
            sign * (vx + vy - vxy),
            _abs_max(vx, vy, vxy),
            ("x", "y"),
        )
    ]
    points = {"x": x, "y": y}
    if strong:
        z = _draw(cone, cfg, base + _STREAM_Z, t)
        vz, vxz, vyz, vxyz = (
            _batch(handle, z),
            _batch(handle, x + z),
            _batch(handle, y + z),
            _batch(handle, x + y + z),
        )
        comps.append(
            _Component(
                "second-diff-nonpos" if sign > 0 else "second-diff-nonneg",
                -sign * ((vxyz + vz) - (vxz + vyz)),
                _abs_max(vz, vxz, vyz, vxyz),
                ("x", "y", "z"),
            )
        )
        points["z"] = z
    return comps, points, t


def _second_diff_components(handle, cfg, base, sign: float, expression: str, origin: bool):
    cone = handle.domain
    t = cfg.trials - (1 if origin else 0)
    t = max(t, 1)
    x = _draw(cone, cfg, base + _STREAM_X, t)
    y = _draw(cone, cfg, base + _STREAM_Y, t)
    z = _draw(cone, cfg, base + _STREAM_Z, t)
    vz, vxz, vyz, vxyz = (
        _batch(handle, z),
        _batch(handle, x + z),
        _batch(handle, y + z),
        _batch(handle, x + y + z),
    )
    comp = _Component(
        expression, sign * ((vxyz + vz) - (vxz + vyz)), _abs_max(vz, vxz, vyz, vxyz), ("x", "y", "z")
    )
    return [comp], {"x": x, "y": y, "z": z}, t


def _modular_components(handle, cfg, base, sign: float):
    cone = handle.domain
    if not cone.supports_lattice:
        raise CapabilityError(
            f"{cone.family!r} has no lattice operations; submodularity checks need them"
        )
    t = max(cfg.trials, 1)
    x = _draw(cone, cfg, base + _STREAM_X, t)
    y = _draw(cone, cfg, base + _STREAM_Y, t)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    vx, vy, vhi, vlo = _batch(handle, x), _batch(handle, y), _batch(handle, hi), _batch(handle, lo)
    comp = _Component(
        "submodular" if sign > 0 else "supermodular",
        sign * ((vx + vy) - (vhi + vlo)),
        _abs_max(vx, vy, vhi, vlo),
        ("x", "y"),
    )
    return [comp], {"x": x, "y": y}, t


def _comonotone_components(handle, cfg, base):
    cone = handle.domain
    if cone.point_kind != VECTOR:
        raise CapabilityError("comonotone checks need a vector-kind cone")
    t = cfg.trials - (1 if handle.domain.contains_origin else 0)
    t = max(t, 1)
    n = cone.dim
    x, y = cones.comonotone_pair_batch(n, Rng(cfg.seed, base + _STREAM_PAIR), t, cfg.scale)
    z = cones.sample_batch(
        cones.nonneg_orthant(n), Rng(cfg.seed, base + _STREAM_Z), t, cfg.scale, cfg.boundary_prob
    )
    vz, vxz, vyz, vxyz = (
        _batch(handle, z),
        _batch(handle, x + z),
        _batch(handle, y + z),
        _batch(handle, x + y + z),
    )
    comp = _Component(
        "comonotone-strong-superadd",
        (vxyz + vz) - (vxz + vyz),
        _abs_max(vz, vxz, vyz, vxyz),
        ("x", "y", "z"),
    )
    return [comp], {"x": x, "y": y, "z": z}, t


def _cm_components(handle, cfg, base):
    cone = handle.domain
    t = max(cfg.trials, 1)
    comps = []
    points = {}
    b = _draw(cone, cfg, base + _STREAM_BASE, t)
    points["base"] = b
    v0 = _batch(handle, b)
    comps.append(_Component("completely-monotone[k=0]", v0.copy(), np.abs(v0), ("base",)))
    for k in range(1, cfg.order_cap + 1):
        steps = [
            _draw(cone, cfg, base + _STREAM_STEPS + 16 * k + i, t) for i in range(k)
        ]
        for i, s in enumerate(steps):
            points[f"x{i + 1}@k={k}"] = s
        subset_sums = [b]
        for s_idx in range(1, 1 << k):
            low = (s_idx & -s_idx).bit_length() - 1
            subset_sums.append(subset_sums[s_idx & (s_idx - 1)] + steps[low])
        stacked = np.stack(subset_sums)  # (2^k, T, ...)
        vals = _batch(handle, stacked.reshape((-1,) + stacked.shape[2:])).reshape(1 << k, t)
        parity = np.array([bin(s).count("1") % 2 for s in range(1 << k)])
        slack = np.sum(vals[parity == 0], axis=0) - np.sum(vals[parity == 1], axis=0)
        comps.append(
            _Component(
                f"completely-monotone[k={k}]",
                slack,
                np.max(np.abs(vals), axis=0),
                ("base",) + tuple(f"x{i + 1}@k={k}" for i in range(k)),
            )
        )
    return comps, points, t


def _sign_name(sign: float, strong: bool) -> str:
    if sign > 0:
        return PropertyLabel.STRONG_SUBADD.value if strong else PropertyLabel.SUBADD.value
    return PropertyLabel.STRONG_SUPERADD.value if strong else PropertyLabel.SUPERADD.value


def _origin_expression(handle: FunctionHandle, prop: str) -> str | None:
    """Which origin sign condition (if any) applies to this property."""
    if not handle.domain.contains_origin:
        return None
    if prop in (PropertyLabel.SUBADD.value, PropertyLabel.STRONG_SUBADD.value):
        return "origin-nonneg"
    if prop in (
        PropertyLabel.SUPERADD.value,
        PropertyLabel.STRONG_SUPERADD.value,
        PropertyLabel.COMONOTONE_STRONG_SUPERADD.value,
    ):
        return "origin-nonpos"
    return None


def _reduce_trials(
    handle: FunctionHandle,
    prop_name: str,
    comps: list[_Component],
    points: dict,
    t: int,
    cfg: CheckConfig,
    origin_expr: str | None,
    stream_base: int,
    mode: str = "check",
    evaluator=None,
) -> CheckReport:
    """Shared tail of every randomized check: thresholds, skip accounting,
    witness extraction, shrinking, report assembly."""
    if evaluator is None:
        evaluator = lambda expr, pts: evaluate_expression(handle, expr, pts)
    cone = handle.domain
    finite = np.ones(t, dtype=bool)
    for c in comps:
        finite &= np.isfinite(c.slack) & np.isfinite(c.scale)
    skipped = int(t - finite.sum())

    origin_slack = None
    origin_scale = 0.0
    if origin_expr is not None:
        zero = cone.zero()
        try:
            origin_slack, origin_scale = evaluator(origin_expr, {"zero": zero})
        except DomainError:
            skipped += 1

    total = t + (1 if origin_expr is not None else 0)
    if skipped > _SKIP_BUDGET * total:
        raise NumericFailure(
            f"{skipped}/{total} trials skipped on domain errors for {handle.label!r}; "
            f"budget is {_SKIP_BUDGET:.0%}"
        )

    worst = np.inf
    best_candidate = None  # (slack, expression, trial_index or -1 for origin)
    if origin_slack is not None:
        thr = cfg.tol_abs + cfg.tol_rel * origin_scale
        worst = min(worst, float(origin_slack))
        if origin_slack < -thr:
            best_candidate = (float(origin_slack), origin_expr, -1)

    for c in comps:
        sl = np.where(finite, c.slack, np.inf)
        if sl.size == 0:
            continue
        worst = min(worst, float(sl.min()))
        thr = cfg.tol_abs + cfg.tol_rel * c.scale
        viol = sl < -thr
        if viol.any():
            idx = int(np.argmin(np.where(viol, sl, np.inf)))
            cand = (float(sl[idx]), c.expression, idx)
            if best_candidate is None or cand[0] < best_candidate[0]:
                best_candidate = cand

    witness = None
    verdict = NO_VIOLATION
    if best_candidate is not None:
        verdict = VIOLATION
        _, expression, idx = best_candidate
        if idx == -1:
            pts = {"zero": cone.zero()}
        else:
            comp = next(c for c in comps if c.expression == expression)
            pts = {}
            for role in comp.roles:
                arr = points[role]
                pts[role.split("@")[0]] = _point_of(cone, arr[idx])
        margin, _ = evaluator(expression, pts)
        margin = float(margin)
        if cfg.shrink:
            pts, margin = _shrink(handle, expression, pts, margin, evaluator)
        witness = Witness(points=pts, margin=margin, expression=expression)
        worst = margin

    if not np.isfinite(worst):
        worst = float("inf") if skipped == 0 else float("nan")

    return CheckReport(
        property=prop_name,
        verdict=verdict,
        trials_run=total,
        worst_margin=float(worst),
        witness=witness,
        skipped=skipped,
        config=cfg,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# public checks
# ---------------------------------------------------------------------------


def check(
    target,
    property: PropertyLabel | str,
    cfg: CheckConfig | None = None,
    *,
    params: dict | None = None,
    dim: int | None = None,
    _stream_base: int = 0,
) -> CheckReport:
    """Randomized check of a property label against a catalog entry or handle."""
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target, params, dim)
    prop = PropertyLabel(property)
    base = _stream_base

    if prop in (PropertyLabel.SUBADD, PropertyLabel.SUPERADD):
        sign = 1.0 if prop == PropertyLabel.SUBADD else -1.0
        origin = _origin_expression(handle, prop.value)
        comps, points, t = _additivity_components(handle, cfg, base, strong=False, sign=sign)
    elif prop in (PropertyLabel.STRONG_SUBADD, PropertyLabel.STRONG_SUPERADD):
        sign = 1.0 if prop == PropertyLabel.STRONG_SUBADD else -1.0
        origin = _origin_expression(handle, prop.value)
        comps, points, t = _additivity_components(handle, cfg, base, strong=True, sign=sign)
    elif prop in (PropertyLabel.SECOND_DIFF_NONPOS, PropertyLabel.SECOND_DIFF_NONNEG):
        sign = -1.0 if prop == PropertyLabel.SECOND_DIFF_NONPOS else 1.0
        origin = None
        comps, points, t = _second_diff_components(handle, cfg, base, sign, prop.value, False)
    elif prop in (PropertyLabel.SUBMODULAR, PropertyLabel.SUPERMODULAR):
        sign = 1.0 if prop == PropertyLabel.SUBMODULAR else -1.0
        origin = None
        comps, points, t = _modular_components(handle, cfg, base, sign)
    elif prop == PropertyLabel.COMONOTONE_STRONG_SUPERADD:
        origin = _origin_expression(handle, prop.value)
        comps, points, t = _comonotone_components(handle, cfg, base)
    elif prop == PropertyLabel.COMPLETELY_MONOTONE:
        origin = None
        comps, points, t = _cm_components(handle, cfg, base)
    else:  # pragma: no cover - exhaustive over the enum
        raise CapabilityError(f"no randomized check for {prop!r}")

    return _reduce_trials(handle, prop.value, comps, points, t, cfg, origin, base)


def refute(
    target,
    property: PropertyLabel | str,
    cfg: CheckConfig | None = None,
    *,
    params: dict | None = None,
    dim: int | None = None,
) -> CheckReport:
    """Counterexample search: the check run over the scale ladder
    {0.1, 1, 10} with boundary-biased sampling, merged into one report."""
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target, params, dim)
    third = cfg.trials // 3
    counts = [third, third, cfg.trials - 2 * third]
    reports = []
    for rung, (mult, cnt) in enumerate(zip((0.1, 1.0, 10.0), counts)):
        if cnt < 1:
            continue
        sub = replace(
            cfg,
            trials=cnt,
            scale=cfg.scale * mult,
            boundary_prob=max(cfg.boundary_prob, 0.5),
        )
        reports.append(check(handle, property, sub, _stream_base=1000 * (rung + 1)))

    verdict = VIOLATION if any(r.found_violation for r in reports) else NO_VIOLATION
    witness = None
    worst = min(r.worst_margin for r in reports)
    for r in reports:
        if r.witness is not None and (witness is None or r.witness.margin < witness.margin):
            witness = r.witness
    return CheckReport(
        property=PropertyLabel(property).value,
        verdict=verdict,
        trials_run=sum(r.trials_run for r in reports),
        worst_margin=witness.margin if witness is not None else worst,
        witness=witness,
        skipped=sum(r.skipped for r in reports),
        config=cfg,
        mode="refute",
    )


def _require_scalar_domain(handle: FunctionHandle):
    if handle.domain.point_kind != VECTOR or handle.domain.dim != 1:
        raise CapabilityError("this check needs a scalar (one-dimensional) domain")


def check_alpha_strong(target, alpha: float, cfg: CheckConfig | None = None) -> CheckReport:
    """Second differences of an alpha-strongly convex rule dominate
    ``alpha * x * y``."""
    if not alpha > 0:
        raise ParameterError("alpha must be positive")
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target)
    _require_scalar_domain(handle)
    cone = handle.domain
    t = max(cfg.trials, 1)
    x = _draw(cone, cfg, _STREAM_X, t)
    y = _draw(cone, cfg, _STREAM_Y, t)
    z = _draw(cone, cfg, _STREAM_Z, t)
    vz, vxz, vyz, vxyz = (
        _batch(handle, z),
        _batch(handle, x + z),
        _batch(handle, y + z),
        _batch(handle, x + y + z),
    )
    sd = (vxyz + vz) - (vxz + vyz)
    prod = alpha * x[:, 0] * y[:, 0]
    comp = _Component(
        f"alpha-strong[alpha={alpha!r}]", sd - prod, _abs_max(sd, prod), ("x", "y", "z")
    )
    return _reduce_trials(
        handle, f"alpha-strong[alpha={alpha!r}]", [comp], {"x": x, "y": y, "z": z}, t, cfg, None, 0
    )


def check_lipschitz_box(target, lip: float, cfg: CheckConfig | None = None) -> CheckReport:
    """|second difference| is boxed by ``L * x * y`` when the derivative is
    L-Lipschitz."""
    if not lip > 0:
        raise ParameterError("L must be positive")
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target)
    _require_scalar_domain(handle)
    cone = handle.domain
    t = max(cfg.trials, 1)
    x = _draw(cone, cfg, _STREAM_X, t)
    y = _draw(cone, cfg, _STREAM_Y, t)
    z = _draw(cone, cfg, _STREAM_Z, t)
    vz, vxz, vyz, vxyz = (
        _batch(handle, z),
        _batch(handle, x + z),
        _batch(handle, y + z),
        _batch(handle, x + y + z),
    )
    sd = (vxyz + vz) - (vxz + vyz)
    prod = lip * x[:, 0] * y[:, 0]
    comp = _Component(
        f"lipschitz-box[L={lip!r}]", prod - np.abs(sd), _abs_max(sd, prod), ("x", "y", "z")
    )
    return _reduce_trials(
        handle, f"lipschitz-box[L={lip!r}]", [comp], {"x": x, "y": y, "z": z}, t, cfg, None, 0
    )


def check_remark_double_inequality(cfg: CheckConfig | None = None) -> CheckReport:
    """``exp(xy) >= (1+z)(1+x+y+z) / ((1+x+z)(1+y+z)) >= exp(-xy)`` on
    nonnegative triples, tested in the log domain."""
    cfg = cfg or CheckConfig()
    cone = cones.nonneg_orthant(1)
    handle = FunctionHandle("log1p", cone, lambda rows: np.log1p(rows[:, 0]))
    t = max(cfg.trials, 1)
    x = _draw(cone, cfg, _STREAM_X, t)[:, 0]
    y = _draw(cone, cfg, _STREAM_Y, t)[:, 0]
    z = _draw(cone, cfg, _STREAM_Z, t)[:, 0]
    d = (np.log1p(x + y + z) + np.log1p(z)) - (np.log1p(x + z) + np.log1p(y + z))
    prod = x * y
    scale = _abs_max(prod, d)
    comps = [
        _Component("double-bound-upper", prod - d, scale, ("x", "y", "z")),
        _Component("double-bound-lower", prod + d, scale, ("x", "y", "z")),
    ]
    pts = {"x": x[:, None], "y": y[:, None], "z": z[:, None]}
    return _reduce_trials(handle, "exp-poly-double-bound", comps, pts, t, cfg, None, 0)


def check_chebyshev(u, v, p, tol: float = 1e-9) -> CheckReport:
    """Chebyshev's algebraic inequality ``<u,p><v,p> <= <uv,p>`` for
    comonotone u, v and a probability vector p."""
    ua = u.data if isinstance(u, Point) else np.asarray(u, dtype=np.float64)
    va = v.data if isinstance(v, Point) else np.asarray(v, dtype=np.float64)
    pa = p.data if isinstance(p, Point) else np.asarray(p, dtype=np.float64)
    if ua.shape != va.shape or ua.shape != pa.shape or ua.ndim != 1:
        raise ShapeError("u, v, p must be vectors of one shared length")
    if not cones.comonotonic(ua, va, tol):
        raise PreconditionError("u and v are not comonotone")
    if np.any(pa < -1e-12) or abs(float(pa.sum()) - 1.0) > 1e-12:
        raise PreconditionError("p must be a probability vector (nonnegative, summing to 1)")
    mean_uv = float((ua * va) @ pa)
    mean_u = float(ua @ pa)
    mean_v = float(va @ pa)
    margin = mean_uv - mean_u * mean_v
    s = max(abs(mean_uv), abs(mean_u * mean_v))
    verdict = NO_VIOLATION if margin >= -(tol + 1e-12 * s) else VIOLATION
    witness = None
    if verdict == VIOLATION:
        witness = Witness(
            points={"u": Point.vector(ua), "v": Point.vector(va), "p": Point.vector(pa)},
            margin=margin,
            expression="chebyshev-product",
        )
    return CheckReport(
        property="chebyshev-product",
        verdict=verdict,
        trials_run=1,
        worst_margin=margin,
        witness=witness,
        skipped=0,
        config=CheckConfig(trials=1, tol_abs=tol),
    )


@dataclass(frozen=True)
class MajorizationPair:
    """Two equal-length sequences with partial-sum domination
    ``sum_{k<=m} a_k <= sum_{k<=m} b_k`` for every m."""

    a: np.ndarray
    b: np.ndarray

    def __init__(self, a, b):
        object.__setattr__(self, "a", np.asarray(a, dtype=np.float64))
        object.__setattr__(self, "b", np.asarray(b, dtype=np.float64))
        if self.a.shape != self.b.shape or self.a.ndim != 1 or self.a.size < 1:
            raise ShapeError("majorization pair needs two equal-length vectors")

    def validate(self, direction: str, tol: float = 1e-12) -> None:
        ca, cb = np.cumsum(self.a), np.cumsum(self.b)
        bad = np.flatnonzero(ca > cb + tol)
        if bad.size:
            raise PreconditionError(
                f"partial-sum domination fails at index {int(bad[0])}: "
                f"{ca[bad[0]]!r} > {cb[bad[0]]!r}"
            )
        if direction == "a-nonincreasing":
            steps = np.flatnonzero(self.a[:-1] < self.a[1:] - tol)
            if steps.size:
                raise PreconditionError(f"a is not nonincreasing at index {int(steps[0])}")
        elif direction == "b-nondecreasing":
            steps = np.flatnonzero(self.b[:-1] > self.b[1:] + tol)
            if steps.size:
                raise PreconditionError(f"b is not nondecreasing at index {int(steps[0])}")
        else:
            raise ParameterError(f"unknown direction {direction!r}")


def _spot_check_shape(f: ScalarFunction, lo: float, hi: float, *, nondecreasing: bool, convex: bool):
    """Finite-difference sanity check of the monotonicity/curvature the
    caller asserts for f on [lo, hi]."""
    lo = max(lo, f.lo)
    hi = min(hi, f.hi)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    grid = np.linspace(lo + 0.02 * span, hi - 0.02 * span, 33)
    h1 = max(span * 1e-5, 1e-9)
    h2 = max(span * 1e-3, 1e-6)
    g1 = np.clip(grid, lo + h1, hi - h1)
    g2 = np.clip(grid, lo + h2, hi - h2)
    d1 = (f(g1 + h1) - f(g1 - h1)) / (2 * h1)
    d2 = (f(g2 + h2) - 2.0 * f(g2) + f(g2 - h2)) / (h2 * h2)
    tol1 = 1e-6 * max(1.0, float(np.max(np.abs(d1))))
    tol2 = 1e-5 * max(1.0, float(np.max(np.abs(d2))))
    if nondecreasing and np.any(d1 < -tol1):
        raise PreconditionError(f"{f.label} is not nondecreasing on [{lo}, {hi}]")
    if not nondecreasing and np.any(d1 > tol1):
        raise PreconditionError(f"{f.label} is not nonincreasing on [{lo}, {hi}]")
    if convex and np.any(d2 < -tol2):
        raise PreconditionError(f"{f.label} is not convex on [{lo}, {hi}]")
    if not convex and np.any(d2 > tol2):
        raise PreconditionError(f"{f.label} is not concave on [{lo}, {hi}]")


def tomic_weyl(pair: MajorizationPair, f: ScalarFunction, direction: str) -> CheckReport:
    """Weak-majorization comparison of ``sum f(a)`` and ``sum f(b)``.

    ``a-nonincreasing`` needs f nondecreasing convex and concludes
    ``sum f(a) <= sum f(b)``; ``b-nondecreasing`` needs f nonincreasing
    convex and concludes the reverse.
    """
    pair.validate(direction)
    lo = float(min(pair.a.min(), pair.b.min()))
    hi = float(max(pair.a.max(), pair.b.max()))
    forward = direction == "a-nonincreasing"
    _spot_check_shape(f, lo, hi, nondecreasing=forward, convex=True)
    fa = float(np.sum(f(pair.a)))
    fb = float(np.sum(f(pair.b)))
    margin = (fb - fa) if forward else (fa - fb)
    s = max(abs(fa), abs(fb))
    thr = 1e-9 + 1e-12 * s
    verdict = NO_VIOLATION if margin >= -thr else VIOLATION
    witness = None
    if verdict == VIOLATION:
        witness = Witness(
            points={"a": Point.vector(pair.a), "b": Point.vector(pair.b)},
            margin=margin,
            expression=f"tomic-weyl[{direction}]",
        )
    return CheckReport(
        property=f"tomic-weyl[{direction}]",
        verdict=verdict,
        trials_run=1,
        worst_margin=margin,
        witness=witness,
        skipped=0,
        config=CheckConfig(trials=1),
    )


def check_popoviciu(
    target, f: ScalarFunction, cfg: CheckConfig | None = None, *, params=None, dim=None
) -> CheckReport:
    """Three-point inequality for a monotone nonnegative strongly
    superadditive rule composed with a nondecreasing convex function, plus
    its symmetrized form; both reverse when f is flagged nonincreasing
    concave."""
    from .catalog import CatalogEntry, SourceStatus, lookup

    cfg = cfg or CheckConfig()
    if isinstance(target, (str, CatalogEntry)):
        entry = lookup(target) if isinstance(target, str) else target
        status = entry.labels.get(PropertyLabel.STRONG_SUPERADD)
        if status not in (SourceStatus.ASSERTED, SourceStatus.CONSISTENT):
            raise PreconditionError(
                f"entry {entry.id!r} is not claimed strongly superadditive"
            )
    handle = resolve_handle(target, params, dim)
    cone = handle.domain

    reverse = f.nondecreasing is False and f.convex is False

    # monotonicity and nonnegativity spot check on 100 ordered pairs
    spot = 100
    u = cones.sample_batch(cone, Rng(cfg.seed, _STREAM_SPOT_U), spot, cfg.scale, 0.0)
    v = cones.sample_batch(cone, Rng(cfg.seed, _STREAM_SPOT_V), spot, cfg.scale, 0.0)
    fu, fuv = _batch(handle, u), _batch(handle, u + v)
    ok = np.isfinite(fu) & np.isfinite(fuv)
    thr = cfg.tol_abs + cfg.tol_rel * np.maximum(np.abs(fu), np.abs(fuv))
    bad = ok & ((fu > fuv + thr) | (fu < -thr))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise PreconditionError(
            f"{handle.label!r} fails the monotone/nonnegative spot check at the pair "
            f"u={u[i].tolist()!r}, u+v={(u + v)[i].tolist()!r}"
        )
    lo_f, hi_f = float(np.nanmin(fu)), float(np.nanmax(fuv))
    _spot_check_shape(f, lo_f, hi_f, nondecreasing=not reverse, convex=not reverse)

    t = max(cfg.trials, 1)
    x = _draw(cone, cfg, _STREAM_X, t)
    y = _draw(cone, cfg, _STREAM_Y, t)
    z = _draw(cone, cfg, _STREAM_Z, t)
    combos = [x, y, z, x + y, x + z, y + z, x + y + z]
    vals = [_batch(handle, c) for c in combos]

    def apply_f(arr):
        with np.errstate(all="ignore"):
            inside = (arr >= f.lo) & (arr <= f.hi)
            return np.where(inside, f.fn(np.clip(arr, f.lo, f.hi)), np.nan)

    fx, fy, fz, fxy, fxz, fyz, fxyz = (apply_f(a) for a in vals)
    sign = -1.0 if reverse else 1.0
    slack13 = sign * ((fxyz + fz) - (fxz + fyz))
    slack_sym = sign * ((fx + fy + fz) / 3.0 + fxyz - (2.0 / 3.0) * (fxy + fyz + fxz))
    scale = _abs_max(fx, fy, fz, fxy, fxz, fyz, fxyz)
    suffix = "reversed" if reverse else "forward"
    comps = [
        _Component(f"popoviciu-three-point[{f.label};{suffix}]", slack13, scale, ("x", "y", "z")),
        _Component(f"popoviciu-symmetrized[{f.label};{suffix}]", slack_sym, scale, ("x", "y", "z")),
    ]
    pts = {"x": x, "y": y, "z": z}
    prop = f"popoviciu[{handle.label};f={f.label}]"
    evaluator = _popoviciu_evaluator(handle, f, reverse)
    return _reduce_trials(handle, prop, comps, pts, t, cfg, None, 0, evaluator=evaluator)
