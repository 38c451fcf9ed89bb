"""Numeric certificates for sufficient conditions.

Unlike the randomized checks, these verify a *sufficient* condition (Hessian
entry signs, cross partials only, monotonicity of the differential, or an
explicit finite Laplace representation) on sampled interior points.  A
``CERTIFIED_NUMERIC`` verdict is sampled evidence, never a proof; the
vocabulary deliberately has no stronger word.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import cones
from .catalog import PropertyLabel, resolve_handle
from .checkers import NO_VIOLATION, VIOLATION, CheckConfig, CheckReport, Witness
from .cones import MATRIX, VECTOR, ConeSpec, Point, Rng
from .diffops import FunctionHandle
from .errors import (
    CapabilityError,
    CertificateError,
    DomainError,
    NumericFailure,
)

CERTIFIED = "CERTIFIED_NUMERIC"
REFUSED = "REFUSED"

_RESAMPLE_BUDGET = 0.10
# sign tests on finite-difference Hessians tolerate this much noise,
# relative to the largest entry seen
_HESS_SIGN_TOL = 1e-6
_DIRECTIONAL_TOL = 1e-6

_STREAM_POINTS, _STREAM_V, _STREAM_W, _STREAM_MATS = 41, 42, 43, 44


@dataclass(frozen=True)
class Certificate:
    """Outcome of a sampled sufficient-condition verification."""

    method: str
    property: str
    verdict: str
    points: int
    seed: int
    refusal_witness: dict | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_json(self) -> dict:
        rw = None
        if self.refusal_witness is not None:
            rw = {
                k: (v.to_json() if isinstance(v, Point) else v)
                for k, v in sorted(self.refusal_witness.items())
            }
        return {
            "method": self.method,
            "property": self.property,
            "verdict": self.verdict,
            "points": self.points,
            "seed": self.seed,
            "refusal_witness": rw,
        }

    def json_line(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _interior_batch(cone: ConeSpec, rng: Rng, count: int, scale: float) -> np.ndarray:
    """Samples pushed away from the boundary so finite-difference stencils
    stay inside the cone."""
    out = cones.sample_batch(cone, rng, count, scale, boundary_prob=0.0)
    pad = 0.05 * scale
    if cone.family == cones.PSD_CONE:
        out = out + pad * np.eye(cone.dim)
    elif cone.family != cones.FULL_SPACE:
        out = out + pad
    return out


def _origin_ok(handle: FunctionHandle, want_nonneg: bool, cfg: CheckConfig):
    """Sign of the value at the origin, when the origin is in the cone and
    the handle is defined there.  Returns (ok, value or None)."""
    if not handle.domain.contains_origin:
        return True, None
    try:
        v0 = handle(handle.domain.zero())
    except DomainError:
        return True, None
    thr = cfg.tol_abs + cfg.tol_rel * abs(v0)
    ok = (v0 >= -thr) if want_nonneg else (v0 <= thr)
    return ok, v0


def _batched_hessians(handle: FunctionHandle, pts: np.ndarray) -> np.ndarray:
    """Central-difference Hessians for a stack of interior points; rows with
    domain failures come back as NaN matrices."""
    count, n = pts.shape
    hs = 1e-4 * np.maximum(1.0, np.abs(pts).max(axis=1))
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    rows = [pts]
    for i, j in pairs:
        ei = np.zeros(n)
        ej = np.zeros(n)
        ei[i] = 1.0
        ej[j] = 1.0
        step_i = hs[:, None] * ei
        step_j = hs[:, None] * ej
        rows.extend([pts + step_i + step_j, pts + step_i - step_j,
                     pts - step_i + step_j, pts - step_i - step_j])
    stacked = np.concatenate(rows, axis=0)
    vals = handle.batch(stacked).reshape(len(rows), count)
    hess = np.full((count, n, n), np.nan)
    for k, (i, j) in enumerate(pairs):
        vpp, vpm, vmp, vmm = vals[1 + 4 * k : 5 + 4 * k]
        hij = (vpp - vpm - vmp + vmm) / (4.0 * hs * hs)
        hess[:, i, j] = hij
        hess[:, j, i] = hij
    return hess


def _sampled_hessians(handle: FunctionHandle, points: int, cfg: CheckConfig):
    """Interior points plus their FD Hessians, with the resample budget."""
    cone = handle.domain
    if cone.point_kind != VECTOR:
        raise CapabilityError(
            "entrywise Hessian certification is defined for vector domains; "
            "matrix domains use differential monotonicity instead"
        )
    pool = _interior_batch(cone, Rng(cfg.seed, _STREAM_POINTS), 2 * points, cfg.scale)
    hess = _batched_hessians(handle, pool)
    good = np.isfinite(hess).all(axis=(1, 2))
    failures = int((~good[:points]).sum())
    if failures > _RESAMPLE_BUDGET * points:
        raise NumericFailure(
            f"{failures}/{points} Hessian stencils failed for {handle.label!r}"
        )
    keep = np.flatnonzero(good)[:points]
    if keep.size < points:
        raise NumericFailure(
            f"could not collect {points} interior Hessians for {handle.label!r}"
        )
    return pool[keep], hess[keep]


def _hessian_sign_certificate(
    handle, points, cfg, *, off_diagonal_only: bool, nonneg: bool, method: str, prop: str,
    origin_nonneg: bool | None,
) -> Certificate:
    pts, hess = _sampled_hessians(handle, points, cfg)
    refusal = None
    if origin_nonneg is not None:
        ok, v0 = _origin_ok(handle, origin_nonneg, cfg)
        if not ok:
            refusal = {"point": handle.domain.zero(), "index": None, "value": float(v0),
                       "reason": "origin sign condition"}
    if refusal is None:
        n = hess.shape[1]
        tol = _HESS_SIGN_TOL * np.maximum(1.0, np.abs(hess).reshape(len(hess), -1).max(axis=1))
        for k in range(len(hess)):
            for i in range(n):
                for j in range(n):
                    if off_diagonal_only and i == j:
                        continue
                    v = hess[k, i, j]
                    bad = (v < -tol[k]) if nonneg else (v > tol[k])
                    if bad:
                        refusal = {
                            "point": Point(VECTOR, pts[k], _validated=True),
                            "index": [i, j],
                            "value": float(v),
                            "reason": "second partial derivative of the wrong sign",
                        }
                        break
                if refusal:
                    break
            if refusal:
                break
    return Certificate(
        method=method,
        property=prop,
        verdict=REFUSED if refusal else CERTIFIED,
        points=points,
        seed=cfg.seed,
        refusal_witness=refusal,
    )


def certify_hessian_sign(
    target, sign: str, points: int = 200, cfg: CheckConfig | None = None,
    *, params=None, dim=None,
) -> Certificate:
    """All second partials share the requested sign at sampled interior
    points, plus the origin sign condition; certifies the strong
    subadditivity (nonpos) or superadditivity (nonneg) sufficient condition."""
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target, params, dim)
    if sign not in ("nonpos", "nonneg"):
        raise CapabilityError(f"sign must be 'nonpos' or 'nonneg', got {sign!r}")
    nonneg = sign == "nonneg"
    prop = (PropertyLabel.STRONG_SUPERADD if nonneg else PropertyLabel.STRONG_SUBADD).value
    return _hessian_sign_certificate(
        handle, points, cfg,
        off_diagonal_only=False, nonneg=nonneg, method="HESSIAN_SIGN", prop=prop,
        origin_nonneg=not nonneg,
    )


def certify_topkis(
    target, mode: str, points: int = 200, cfg: CheckConfig | None = None,
    *, params=None, dim=None,
) -> Certificate:
    """Cross-partial-only form: off-diagonal second partials nonpositive
    certifies submodularity, nonnegative certifies supermodularity."""
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target, params, dim)
    if mode not in ("submodular", "supermodular"):
        raise CapabilityError(f"mode must be 'submodular' or 'supermodular', got {mode!r}")
    nonneg = mode == "supermodular"
    return _hessian_sign_certificate(
        handle, points, cfg,
        off_diagonal_only=True, nonneg=nonneg, method="TOPKIS_CROSS", prop=mode,
        origin_nonneg=None,
    )


def certify_differential_monotone(
    target, direction: str, pairs: int = 200, cfg: CheckConfig | None = None,
    *, params=None, dim=None,
) -> Certificate:
    """Directional derivatives compared on ordered pairs u <= u + v along
    positive directions w: nonincreasing differentials certify strong
    subadditivity, nondecreasing ones strong superadditivity."""
    cfg = cfg or CheckConfig()
    handle = resolve_handle(target, params, dim)
    if direction not in ("nonincreasing", "nondecreasing"):
        raise CapabilityError(
            f"direction must be 'nonincreasing' or 'nondecreasing', got {direction!r}"
        )
    increasing = direction == "nondecreasing"
    prop = (PropertyLabel.STRONG_SUPERADD if increasing else PropertyLabel.STRONG_SUBADD).value
    cone = handle.domain

    count = 2 * pairs
    u = _interior_batch(cone, Rng(cfg.seed, _STREAM_POINTS), count, cfg.scale)
    v = cones.sample_batch(cone, Rng(cfg.seed, _STREAM_V), count, cfg.scale, 0.0)
    w = _interior_batch(cone, Rng(cfg.seed, _STREAM_W), count, cfg.scale)

    h1 = 1e-5 * np.maximum(1.0, np.abs(u.reshape(count, -1)).max(axis=1))
    uv = u + v
    h2 = 1e-5 * np.maximum(1.0, np.abs(uv.reshape(count, -1)).max(axis=1))
    hshape = (count,) + (1,) * (u.ndim - 1)
    rows = np.concatenate([
        u + h1.reshape(hshape) * w, u - h1.reshape(hshape) * w,
        uv + h2.reshape(hshape) * w, uv - h2.reshape(hshape) * w,
    ])
    vals = handle.batch(rows).reshape(4, count)
    g1 = (vals[0] - vals[1]) / (2.0 * h1)
    g2 = (vals[2] - vals[3]) / (2.0 * h2)
    slack = (g2 - g1) if increasing else (g1 - g2)
    good = np.isfinite(slack)
    failures = int((~good[:pairs]).sum())
    if failures > _RESAMPLE_BUDGET * pairs:
        raise NumericFailure(f"{failures}/{pairs} directional stencils failed")
    keep = np.flatnonzero(good)[:pairs]
    if keep.size < pairs:
        raise NumericFailure(f"could not collect {pairs} directional comparisons")

    refusal = None
    ok0, v0 = _origin_ok(handle, want_nonneg=not increasing, cfg=cfg)
    if not ok0:
        refusal = {"point": cone.zero(), "index": None, "value": float(v0),
                   "reason": "origin sign condition"}
    if refusal is None:
        tol = _DIRECTIONAL_TOL * np.maximum(1.0, np.maximum(np.abs(g1[keep]), np.abs(g2[keep])))
        bad = slack[keep] < -tol
        if bad.any():
            k = keep[int(np.flatnonzero(bad)[0])]
            kind = cone.point_kind
            refusal = {
                "point": Point(kind, u[k], _validated=True),
                "step": Point(kind, v[k], _validated=True),
                "direction": Point(kind, w[k], _validated=True),
                "index": None,
                "value": float(slack[k]),
                "reason": "directional derivative moved the wrong way along the order",
            }
    return Certificate(
        method="DIFFERENTIAL_MONOTONE",
        property=prop,
        verdict=REFUSED if refusal else CERTIFIED,
        points=pairs,
        seed=cfg.seed,
        refusal_witness=refusal,
    )


# ---------------------------------------------------------------------------
# Laplace-atom certificates of complete monotonicity
# ---------------------------------------------------------------------------


def dual_member(cone: ConeSpec, u: Point) -> bool:
    """Membership in the dual cone under the natural pairing (orthants and
    the PSD cone are self-dual; the full space has the trivial dual)."""
    if u.kind != cone.point_kind or u.dim != cone.dim:
        return False
    d = u.data
    fam = cone.family
    if fam in (cones.NONNEG_ORTHANT, cones.POSITIVE_ORTHANT, cones.GRID_LP_POSITIVE):
        return bool(np.all(d >= 0.0))
    if fam == cones.PSD_CONE:
        return bool(np.linalg.eigvalsh(d)[0] >= -1e-12)
    if fam == cones.FULL_SPACE:
        return bool(np.all(np.abs(d) <= 1e-12))
    if fam == cones.PRODUCT:
        off = 0
        for f in cone.factors:
            if not dual_member(f, Point(VECTOR, d[off : off + f.dim], _validated=True)):
                return False
            off += f.dim
        return True
    raise CapabilityError(f"no dual-cone rule for {fam!r}")


@dataclass(frozen=True)
class LaplaceCertificate:
    """Finite atomic measure: nonnegative weights on dual-cone points.

    The induced function ``x -> sum_i w_i exp(-<x, u_i>)`` is completely
    monotone by construction, and its shift-and-center at any interior point
    is strongly superadditive.
    """

    atoms: tuple

    def __init__(self, atoms):
        packed = []
        for w, u in atoms:
            if not np.isfinite(w) or w < 0:
                raise CertificateError(f"atom weight must be nonnegative, got {w!r}")
            if not isinstance(u, Point):
                raise CertificateError("atom locations must be Points")
            packed.append((float(w), u))
        if not packed:
            raise CertificateError("a Laplace certificate needs at least one atom")
        object.__setattr__(self, "atoms", tuple(packed))

    def validate_for(self, cone: ConeSpec) -> None:
        for k, (_, u) in enumerate(self.atoms):
            if not dual_member(cone, u):
                raise CertificateError(
                    f"atom {k} is not in the dual cone of {cone.family}({cone.dim})"
                )

    def to_json(self):
        return [[w, u.to_json()] for w, u in self.atoms]


def laplace_eval(cert: LaplaceCertificate, x: Point) -> float:
    """``sum_i w_i exp(-<x, u_i>)`` with the kind-appropriate pairing."""
    total = 0.0
    for w, u in cert.atoms:
        total += w * float(np.exp(-x.inner(u)))
    return total


def laplace_as_handle(cert: LaplaceCertificate, cone: ConeSpec) -> FunctionHandle:
    """Function handle for the certified mixture; validates the atoms
    against the cone's dual first."""
    cert.validate_for(cone)
    weights = np.array([w for w, _ in cert.atoms])
    locs = np.stack([u.data for _, u in cert.atoms])

    if cone.point_kind == VECTOR:
        def batch(rows):
            return np.exp(-(rows @ locs.T)) @ weights
    else:
        def batch(rows):
            pair = np.einsum("tij,aij->ta", rows, locs)
            return np.exp(-pair) @ weights

    return FunctionHandle(f"laplace-mixture[{len(cert.atoms)} atoms]", cone, batch)


# ---------------------------------------------------------------------------
# quadrature validation of the beta = 1/2 determinant representation
# ---------------------------------------------------------------------------

_QMC_NODES = 10 ** 6
_PRIMES = (2, 3, 5, 7)
_GAUSS_NODE_CACHE: dict[int, np.ndarray] = {}


def _halton(count: int, dims: int) -> np.ndarray:
    """Radical-inverse Halton sequence (bases 2,3,5,7), indices from 1."""
    out = np.empty((count, dims))
    idx = np.arange(1, count + 1, dtype=np.int64)
    for d in range(dims):
        b = _PRIMES[d]
        x = np.zeros(count)
        f = 1.0
        i = idx.copy()
        while i.max() > 0:
            f /= b
            x += f * (i % b)
            i //= b
        out[:, d] = x
    return out


def _gaussian_nodes(dims: int) -> np.ndarray:
    """Fixed low-discrepancy Gaussian nodes with density exp(-x^2)/sqrt(pi)
    per coordinate; seed-independent by design."""
    if dims not in _GAUSS_NODE_CACHE:
        u = _halton(_QMC_NODES, dims)
        _GAUSS_NODE_CACHE[dims] = ndtri(u) / np.sqrt(2.0)
    return _GAUSS_NODE_CACHE[dims]


def gaussian_representation_margin(a: np.ndarray) -> tuple[float, float, float]:
    """(estimate, exact, relative error) for the Gaussian-integral identity
    giving ``det(I + A) ** (-1/2)``."""
    n = a.shape[0]
    z = _gaussian_nodes(n)
    q = np.einsum("ti,ij,tj->t", z, a, z)
    est = float(np.mean(np.exp(-q)))
    lam = np.linalg.eigvalsh(a)
    exact = float(np.exp(-0.5 * np.sum(np.log1p(lam))))
    if not (np.isfinite(est) and np.isfinite(exact)) or exact <= 0:
        raise NumericFailure("quadrature produced a non-finite value")
    return est, exact, abs(est - exact) / exact


def gaussian_detcert_check(n: int, cfg: CheckConfig | None = None) -> CheckReport:
    """Quasi-Monte-Carlo validation of the square-root reciprocal
    determinant representation on random PSD matrices with operator norm at
    most 2; relative tolerance 1e-3 with 10^6 fixed nodes."""
    cfg = cfg or CheckConfig()
    if n > 4:
        raise CapabilityError("the quadrature validation supports orders up to 4")
    g = Rng(cfg.seed, _STREAM_MATS).generator
    tol = 1e-3
    worst = np.inf
    witness = None
    for _ in range(cfg.trials):
        gm = g.normal(size=(n, n))
        a = gm @ gm.T
        lam_max = float(np.linalg.eigvalsh(a)[-1])
        a *= 2.0 * g.uniform(0.05, 1.0) / lam_max
        _, _, relerr = gaussian_representation_margin(a)
        slack = tol - relerr
        if slack < worst:
            worst = slack
            if slack < 0:
                witness = Witness(
                    points={"A": Point(MATRIX, a)},
                    margin=slack,
                    expression="gaussian-det-representation",
                )
    return CheckReport(
        property="gaussian-det-representation",
        verdict=VIOLATION if witness is not None else NO_VIOLATION,
        trials_run=cfg.trials,
        worst_margin=float(worst),
        witness=witness,
        skipped=0,
        config=cfg,
    )


def check_det_trace_monotone(n: int, cfg: CheckConfig | None = None) -> CheckReport:
    """``det(U) trace(U^-1) <= det(V) trace(V^-1)`` on random ordered pairs
    U <= V of positive-definite matrices."""
    cfg = cfg or CheckConfig()
    cone = cones.psd_cone(n)
    u = _interior_batch(cone, Rng(cfg.seed, _STREAM_POINTS), cfg.trials, cfg.scale)
    step = cones.sample_batch(cone, Rng(cfg.seed, _STREAM_V), cfg.trials, cfg.scale, 0.0)
    v = u + step

    def phi(mats):
        lam = np.linalg.eigvalsh(mats)
        return np.prod(lam, axis=1) * np.sum(1.0 / lam, axis=1)

    fu, fv = phi(u), phi(v)
    slack = fv - fu
    thr = cfg.tol_abs + cfg.tol_rel * np.maximum(np.abs(fu), np.abs(fv))
    viol = slack < -thr
    witness = None
    if viol.any():
        k = int(np.argmin(np.where(viol, slack, np.inf)))
        witness = Witness(
            points={"U": Point(MATRIX, u[k]), "V": Point(MATRIX, v[k])},
            margin=float(slack[k]),
            expression="det-trace-inverse-monotone",
        )
    return CheckReport(
        property="det-trace-inverse-monotone",
        verdict=VIOLATION if witness is not None else NO_VIOLATION,
        trials_run=cfg.trials,
        worst_margin=float(slack.min()),
        witness=witness,
        skipped=0,
        config=cfg,
    )
