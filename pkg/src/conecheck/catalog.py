"""Built-in catalog of functions on cones with their claimed properties.

Every entry carries a domain cone, default parameters, a set of property
labels with a status, and a short source note.  Status semantics:

* ``asserted``      -- the cited source claims the property; these entries
                       form the must-pass randomized suite.
* ``consistent``    -- not claimed outright by the source but true and kept
                       in the must-pass suite.
* ``refuted-candidate`` -- the claim fails spot checks; the refuter is
                       expected to produce a witness, and the entry is
                       excluded from the must-pass suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

import numpy as np

from . import cones
from .cones import ConeSpec, Rng
from .diffops import FunctionHandle
from .errors import ParameterError, UnknownEntryError
from .numkernel import CLAMP_WINDOW, gamma

__all__ = [
    "PropertyLabel",
    "SourceStatus",
    "CatalogEntry",
    "builtin_entries",
    "lookup",
    "instantiate",
    "resolve_handle",
]


class PropertyLabel(str, Enum):
    SUBADD = "subadd"
    SUPERADD = "superadd"
    STRONG_SUBADD = "strong-subadd"
    STRONG_SUPERADD = "strong-superadd"
    SECOND_DIFF_NONNEG = "second-diff-nonneg"
    SECOND_DIFF_NONPOS = "second-diff-nonpos"
    SUBMODULAR = "submodular"
    SUPERMODULAR = "supermodular"
    COMPLETELY_MONOTONE = "completely-monotone"
    COMONOTONE_STRONG_SUPERADD = "comonotone-strong-superadd"


class SourceStatus(str, Enum):
    ASSERTED = "asserted"
    CONSISTENT = "consistent"
    REFUTED_CANDIDATE = "refuted-candidate"


def _closure(labels: dict) -> dict:
    """Strong labels imply the plain additivity label and the matching
    second-difference sign; add the implied labels (same status) for
    asserted/consistent claims."""
    out = dict(labels)
    implied = {
        PropertyLabel.STRONG_SUBADD: (PropertyLabel.SUBADD, PropertyLabel.SECOND_DIFF_NONPOS),
        PropertyLabel.STRONG_SUPERADD: (PropertyLabel.SUPERADD, PropertyLabel.SECOND_DIFF_NONNEG),
    }
    for strong, extras in implied.items():
        status = out.get(strong)
        if status in (SourceStatus.ASSERTED, SourceStatus.CONSISTENT):
            for lab in extras:
                out.setdefault(lab, status)
    return out


@dataclass(frozen=True)
class CatalogEntry:
    """A named function with parameters, domain, labels and a source note."""

    id: str
    default_dim: int
    fixed_dim: bool
    default_params: MappingProxyType
    labels: MappingProxyType
    source: str
    notes: str = ""
    _factory: object = field(default=None, repr=False, compare=False)

    def handle(self, params: dict | None = None, dim: int | None = None) -> FunctionHandle:
        return instantiate(self, params, dim)

    def to_json(self) -> dict:
        dom = instantiate(self, None, None).domain.to_json()
        return {
            "id": self.id,
            "domain": dom,
            "labels": sorted(lab.value for lab in self.labels),
            "status": {lab.value: st.value for lab, st in sorted(self.labels.items())},
            "source": self.source,
        }


def _entry(
    id: str,
    factory,
    labels: dict,
    source: str,
    default_dim: int = 1,
    fixed_dim: bool = True,
    default_params: dict | None = None,
    notes: str = "",
) -> CatalogEntry:
    return CatalogEntry(
        id=id,
        default_dim=default_dim,
        fixed_dim=fixed_dim,
        default_params=MappingProxyType(dict(default_params or {})),
        labels=MappingProxyType(_closure(labels)),
        source=source,
        notes=notes,
        _factory=factory,
    )


def _param_error(entry_id: str, message: str) -> ParameterError:
    return ParameterError(f"{entry_id}: {message}")


def _vec_param(value, n: int, entry_id: str, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise _param_error(entry_id, f"parameter {name!r} must have length {n}")
    return arr


# ---------------------------------------------------------------------------
# scalar entries on the closed half-line
# ---------------------------------------------------------------------------


def _scalar_handle(entry_id: str, fn, domain: ConeSpec | None = None) -> FunctionHandle:
    dom = domain if domain is not None else cones.nonneg_orthant(1)

    def batch(rows: np.ndarray) -> np.ndarray:
        return fn(rows[:, 0])

    return FunctionHandle(entry_id, dom, batch)


def _make_affine_power(p: dict, n: int) -> FunctionHandle:
    m, nn, pp, alpha = p["m"], p["n"], p["p"], p["alpha"]
    if not 0.0 <= alpha <= 1.0:
        raise _param_error("affine-power", f"alpha must lie in [0, 1], got {alpha}")
    if nn < 0 or pp < 0:
        raise _param_error("affine-power", "n and p must be nonnegative")

    def fn(x):
        return m * x + nn + pp * np.where(x > 0, x, 0.0) ** alpha

    return _scalar_handle("affine-power", fn)


def _make_one_minus_sqrt1p(p: dict, n: int) -> FunctionHandle:
    alpha = p["alpha"]
    if not alpha > 0:
        raise _param_error("one-minus-sqrt1p", f"alpha must be positive, got {alpha}")
    return _scalar_handle("one-minus-sqrt1p", lambda x: 1.0 - np.sqrt(1.0 + alpha * x * x))


def _make_neg_xlogx_shift(p: dict, n: int) -> FunctionHandle:
    alpha = p["alpha"]
    if not 0.0 <= alpha <= 1.0:
        raise _param_error("neg-xlogx-shift", f"alpha must lie in [0, 1], got {alpha}")

    def fn(x):
        t = x + alpha
        return np.where(t > 0.0, -t * np.log(np.maximum(t, 1e-300)), 0.0)

    return _scalar_handle("neg-xlogx-shift", fn)


def _make_log1p(p: dict, n: int) -> FunctionHandle:
    return _scalar_handle("log1p", np.log1p)


def _make_neg_log_cosh(p: dict, n: int) -> FunctionHandle:
    # log(cosh x) = |x| + log1p(exp(-2|x|)) - log 2, stable for large x
    def fn(x):
        a = np.abs(x)
        return -(a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0))

    return _scalar_handle("neg-log-cosh", fn)


def _make_e_minus_1px_pow(p: dict, n: int) -> FunctionHandle:
    # value at 0 is the limit of e - (1+x)^(1/x), which is exactly 0
    def fn(x):
        with np.errstate(all="ignore"):
            core = np.exp(np.log1p(x) / np.where(x > 0.0, x, 1.0))
        return np.where(x > 0.0, np.e - core, 0.0)

    return _scalar_handle("e-minus-1px-pow", fn)


def _make_one_minus_exp_neg(p: dict, n: int) -> FunctionHandle:
    return _scalar_handle("one-minus-exp-neg", lambda x: -np.expm1(-x))


def _make_sigmoid(p: dict, n: int) -> FunctionHandle:
    return _scalar_handle("sigmoid", lambda x: 1.0 / (1.0 + np.exp(-x)))


def _make_half_sq(term: str, sign: float):
    trig = {"log1p": np.log1p, "sin": np.sin, "cos": np.cos}[term]
    word = "plus" if sign > 0 else "minus"
    name = f"half-sq-{word}-{term}"

    def factory(p: dict, n: int) -> FunctionHandle:
        return _scalar_handle(name, lambda x: 0.5 * x * x + sign * trig(x))

    return name, factory


def _make_x_gamma_minus_1(p: dict, n: int) -> FunctionHandle:
    # x * Gamma(x) = Gamma(x + 1), continuous at 0 with value 1
    return _scalar_handle("x-gamma-minus-1", lambda x: gamma(x + 1.0) - 1.0)


def _make_reciprocal(p: dict, n: int) -> FunctionHandle:
    def fn(x):
        return np.where(x > 0.0, 1.0 / np.where(x > 0.0, x, 1.0), np.nan)

    return _scalar_handle("reciprocal", fn, cones.positive_orthant(1))


# ---------------------------------------------------------------------------
# multivariate entries on orthants / products
# ---------------------------------------------------------------------------


def _make_shannon(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        t = np.where(rows > 0.0, rows * np.log(np.maximum(rows, 1e-300)), 0.0)
        out = -np.sum(t, axis=1)
        return np.where(np.any(rows < 0.0, axis=1), np.nan, out)

    def hessian(pt):
        return np.diag(-1.0 / pt.data)

    return FunctionHandle("shannon-entropy", cones.nonneg_orthant(n), batch, hessian=hessian)


def _make_sq_norm(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        return np.sum(rows * rows, axis=1)

    return FunctionHandle(
        "sq-norm", cones.nonneg_orthant(n), batch, hessian=lambda pt: 2.0 * np.eye(pt.dim)
    )


def _make_inner_product(p: dict, n: int) -> FunctionHandle:
    dom = cones.product(cones.nonneg_orthant(n), cones.nonneg_orthant(n))

    def batch(rows):
        return np.sum(rows[:, :n] * rows[:, n:], axis=1)

    return FunctionHandle("inner-product", dom, batch)


def _make_concave_of_linear(p: dict, n: int) -> FunctionHandle:
    inner_id = p["inner"]
    inner = lookup(inner_id)
    if inner.default_dim != 1 or inner.labels.get(PropertyLabel.STRONG_SUBADD) not in (
        SourceStatus.ASSERTED,
        SourceStatus.CONSISTENT,
    ):
        raise _param_error(
            "concave-of-linear", f"inner entry {inner_id!r} must be a scalar strong-subadd entry"
        )
    a = _vec_param(p["a"], n, "concave-of-linear", "a")
    if np.any(a < 0):
        raise _param_error("concave-of-linear", "weight vector a must be nonnegative")
    ih = instantiate(inner)

    def batch(rows):
        return ih.batch((rows @ a)[:, None])

    return FunctionHandle(f"concave-of-linear[{inner_id}]", cones.nonneg_orthant(n), batch)


def _make_geomean2(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        prod = rows[:, 0] * rows[:, 1]
        return np.where(prod >= 0.0, np.sqrt(np.maximum(prod, 0.0)), np.nan)

    return FunctionHandle("geomean2", cones.nonneg_orthant(2), batch)


def _make_pairwise_diff_convex(p: dict, n: int) -> FunctionHandle:
    q = p["q"]
    if not q >= 2.0:
        raise _param_error("pairwise-diff-convex", f"exponent q must be >= 2 for a C^2 rule, got {q}")
    iu, ju = np.triu_indices(n, k=1)

    def batch(rows):
        d = rows[:, iu] - rows[:, ju]
        return np.sum(np.abs(d) ** q, axis=1)

    return FunctionHandle("pairwise-diff-convex", cones.nonneg_orthant(n), batch)


def _make_jensen_gap(p: dict, n: int) -> FunctionHandle:
    lam = _vec_param(p["weights"], n, "jensen-gap", "weights")
    if np.any(lam < 0):
        raise _param_error("jensen-gap", "weights must be nonnegative")
    if p["inner"] != "neg-square":
        raise _param_error("jensen-gap", f"unsupported inner rule {p['inner']!r} (only neg-square)")

    def f(t):
        return -t * t

    def batch(rows):
        return f(rows @ lam) - (f(rows) @ lam)

    return FunctionHandle("jensen-gap", cones.nonneg_orthant(n), batch)


def _make_nonneg_poly(p: dict, n: int) -> FunctionHandle:
    monomials = p.get("monomials")
    if monomials is None:
        monomials = [(1.0,) + tuple(2 if k == i else 0 for k in range(n)) for i in range(n)]
        monomials += [
            (0.5,) + tuple(1 if k in (i, j) else 0 for k in range(n))
            for i in range(n)
            for j in range(i + 1, n)
        ]
    rows_m = [np.asarray(m, dtype=np.float64) for m in monomials]
    for m in rows_m:
        if m.shape != (n + 1,):
            raise _param_error("nonneg-poly", f"each monomial needs 1 + {n} numbers")
        if m[0] < 0:
            raise _param_error("nonneg-poly", "coefficients must be nonnegative")
        if np.all(m[1:] == 0):
            raise _param_error("nonneg-poly", "constant term must be zero")

    coeffs = np.array([m[0] for m in rows_m])
    exps = np.array([m[1:] for m in rows_m])

    def batch(rows):
        out = np.zeros(rows.shape[0])
        for c, e in zip(coeffs, exps):
            term = np.ones(rows.shape[0])
            for k in range(n):
                if e[k]:
                    term = term * rows[:, k] ** e[k]
            out += c * term
        return out

    return FunctionHandle("nonneg-poly", cones.nonneg_orthant(n), batch)


def _make_lse(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        m = np.max(rows, axis=1)
        return m + np.log(np.mean(np.exp(rows - m[:, None]), axis=1))

    def hessian(pt):
        w = np.exp(pt.data - pt.data.max())
        w = w / w.sum()
        return np.diag(w) - np.outer(w, w)

    return FunctionHandle("lse", cones.full_space(n), batch, hessian=hessian)


def _make_lp_power_norm(p: dict, n: int) -> FunctionHandle:
    pw, h = p["p"], p["h"]
    if not pw > 1.0:
        raise _param_error("lp-power-norm", f"exponent must satisfy p > 1, got {pw}")
    dom = cones.grid_lp_positive(n, pw, h)

    def batch(rows):
        return h * np.sum(np.abs(rows) ** pw, axis=1)

    return FunctionHandle("lp-power-norm", dom, batch)


# ---------------------------------------------------------------------------
# matrix entries on the PSD cone
# ---------------------------------------------------------------------------


def _make_det(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        return np.linalg.det(rows)

    return FunctionHandle("det", cones.psd_cone(n), batch)


def _default_pencil_matrices(count: int, order: int) -> np.ndarray:
    g = Rng(0xC0DE, 7).generator
    mats = np.empty((count, order, order))
    for i in range(count):
        m = g.normal(size=(order, order))
        mats[i] = m @ m.T / order + 0.5 * np.eye(order)
    return mats


def _make_logdet_pencil(p: dict, n: int) -> FunctionHandle:
    order = int(p["order"])
    mats = p.get("matrices")
    mats = _default_pencil_matrices(n, order) if mats is None else np.asarray(mats, dtype=np.float64)
    if mats.shape != (n, order, order):
        raise _param_error("logdet-pencil", f"need {n} matrices of order {order}")
    for i, m in enumerate(mats):
        if np.abs(m - m.T).max() > 1e-10 or np.linalg.eigvalsh(m)[0] <= 0:
            raise _param_error("logdet-pencil", f"matrix {i} is not symmetric positive definite")

    def batch(rows):
        pencil = np.einsum("tk,kij->tij", rows, mats)
        sign, logabs = np.linalg.slogdet(pencil)
        return np.where(sign > 0, logabs, np.nan)

    return FunctionHandle("logdet-pencil", cones.nonneg_orthant(n), batch)


def _make_trace_pow(p: dict, n: int) -> FunctionHandle:
    pw = p["p"]
    if not 0.0 <= pw <= 2.0:
        raise _param_error("trace-pow", f"exponent must lie in [0, 2], got {pw}")

    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        bad = np.any(w < -CLAMP_WINDOW, axis=1)
        wc = np.maximum(w, 0.0)
        with np.errstate(all="ignore"):
            powed = np.where(wc > 0.0, wc ** pw, 0.0)
        return np.where(bad, np.nan, np.sum(powed, axis=1))

    return FunctionHandle(f"trace-pow[p={pw!r}]", cones.psd_cone(n), batch)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_GL_X = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


def _make_trace_hansen(p: dict, n: int) -> FunctionHandle:
    pw = p["p"]
    if not 0.0 < pw <= 1.0:
        raise _param_error("trace-hansen", f"exponent must lie in (0, 1], got {pw}")
    # F(t) = int_0^t (1 + s^p)^(1/p) ds via Gauss-Legendre after s = t*w^(1/p),
    # which regularizes the s^p kink at the origin
    wsub = _GL_X ** (1.0 / pw)
    jac = (1.0 / pw) * _GL_X ** ((1.0 - pw) / pw)

    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        bad = np.any(w < -CLAMP_WINDOW, axis=1)
        lam = np.maximum(w, 0.0)[..., None]
        s = lam * wsub
        integrand = (1.0 + s ** pw) ** (1.0 / pw) * lam * jac
        f_vals = integrand @ _GL_W
        return np.where(bad, np.nan, np.sum(f_vals, axis=1))

    return FunctionHandle(f"trace-hansen[p={pw!r}]", cones.psd_cone(n), batch)


def _make_vn_entropy(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        bad = np.any(w < -CLAMP_WINDOW, axis=1)
        wc = np.maximum(w, 0.0)
        t = np.where(wc > 0.0, wc * np.log(np.maximum(wc, 1e-300)), 0.0)
        return np.where(bad, np.nan, -np.sum(t, axis=1))

    return FunctionHandle("vn-entropy", cones.psd_cone(n), batch)


def _make_logdet(p: dict, n: int) -> FunctionHandle:
    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        ok = w[:, 0] > CLAMP_WINDOW
        return np.where(ok, np.sum(np.log(np.maximum(w, 1e-300)), axis=1), np.nan)

    return FunctionHandle("logdet", cones.psd_cone(n), batch)


def _make_det_recip_pow(p: dict, n: int) -> FunctionHandle:
    beta = p["beta"]
    if beta < 0:
        raise _param_error("det-recip-pow", f"beta must be nonnegative, got {beta}")

    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        ok = w[:, 0] > CLAMP_WINDOW
        return np.where(ok, np.exp(-beta * np.sum(np.log(np.maximum(w, 1e-300)), axis=1)), np.nan)

    return FunctionHandle(f"det-recip-pow[beta={beta!r}]", cones.psd_cone(n), batch)


def _make_det_shift_recip(p: dict, n: int) -> FunctionHandle:
    beta = p["beta"]
    if beta < 0:
        raise _param_error("det-shift-recip", f"beta must be nonnegative, got {beta}")

    def batch(rows):
        w = np.linalg.eigvalsh(rows)
        bad = np.any(w < -0.5, axis=1)  # I + A must stay PD; PSD inputs are fine
        return np.where(bad, np.nan, np.expm1(-beta * np.sum(np.log1p(np.maximum(w, -0.5)), axis=1)))

    return FunctionHandle(f"det-shift-recip[beta={beta!r}]", cones.psd_cone(n), batch)


# ---------------------------------------------------------------------------
# completely monotone families
# ---------------------------------------------------------------------------


def _make_exp_neg_linear(p: dict, n: int) -> FunctionHandle:
    alpha = p["alpha"] if p["alpha"] is not None else 0.5 + np.arange(n) / n
    alpha = _vec_param(alpha, n, "exp-neg-linear", "alpha")
    if np.any(alpha <= 0):
        raise _param_error("exp-neg-linear", "alpha must be strictly positive")

    def batch(rows):
        return np.exp(-(rows @ alpha))

    return FunctionHandle("exp-neg-linear", cones.nonneg_orthant(n), batch)


def _make_inv_power_product(p: dict, n: int) -> FunctionHandle:
    alpha = p["alpha"] if p["alpha"] is not None else 0.5 + 0.5 * np.arange(n)
    alpha = _vec_param(alpha, n, "inv-power-product", "alpha")
    if np.any(alpha <= 0):
        raise _param_error("inv-power-product", "alpha must be strictly positive")

    def batch(rows):
        ok = np.all(rows > 0.0, axis=1)
        logs = np.log(np.where(rows > 0.0, rows, 1.0))
        return np.where(ok, np.exp(-(logs @ alpha)), np.nan)

    return FunctionHandle("inv-power-product", cones.positive_orthant(n), batch)


def _make_logistic_pow(p: dict, n: int) -> FunctionHandle:
    a, beta = p["a"], p["beta"]
    if not a > 0:
        raise _param_error("logistic-pow", f"a must be positive, got {a}")
    if beta < 0:
        raise _param_error("logistic-pow", f"beta must be nonnegative, got {beta}")

    def batch(rows):
        return (1.0 + a * np.exp(-rows[:, 0])) ** beta

    return _scalar_handle_like(f"logistic-pow[a={a!r},beta={beta!r}]", batch)


def _scalar_handle_like(label: str, batch) -> FunctionHandle:
    return FunctionHandle(label, cones.nonneg_orthant(1), batch)


def _elem_sym_2(rows: np.ndarray) -> np.ndarray:
    s1 = np.sum(rows, axis=1)
    s2 = np.sum(rows * rows, axis=1)
    return 0.5 * (s1 * s1 - s2)


def _make_elem_sym_4(p: dict, n: int) -> FunctionHandle:
    beta = p["beta"]
    if beta < 0:
        raise _param_error("elem-sym-4", f"beta must be nonnegative, got {beta}")

    def batch(rows):
        e2 = _elem_sym_2(rows)
        return np.where(e2 > 0.0, e2 ** (-beta), np.nan)

    return FunctionHandle(f"elem-sym-4[beta={beta!r}]", cones.positive_orthant(4), batch)


def _make_elem_sym_4_shifted(p: dict, n: int) -> FunctionHandle:
    beta = p["beta"]
    if beta < 0:
        raise _param_error("elem-sym-4-shifted", f"beta must be nonnegative, got {beta}")
    center = 6.0 ** (-beta)  # value of the unshifted rule at the all-ones point

    def batch(rows):
        e2 = _elem_sym_2(rows + 1.0)
        return np.where(e2 > 0.0, e2 ** (-beta) - center, np.nan)

    return FunctionHandle(f"elem-sym-4-shifted[beta={beta!r}]", cones.nonneg_orthant(4), batch)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

A, C, R = SourceStatus.ASSERTED, SourceStatus.CONSISTENT, SourceStatus.REFUTED_CANDIDATE
L = PropertyLabel


def _build_entries() -> tuple[CatalogEntry, ...]:
    entries: list[CatalogEntry] = []
    add = entries.append

    concave_src = "concave on the half-line with a nonnegative value at 0"
    convex_src = "convex on the half-line with a nonpositive value at 0"

    add(_entry("affine-power", _make_affine_power, {L.STRONG_SUBADD: A}, concave_src,
               default_params={"m": 1.0, "n": 0.5, "p": 2.0, "alpha": 0.5},
               notes="m*x + n + p*x^alpha with alpha in [0,1], n, p >= 0"))
    add(_entry("one-minus-sqrt1p", _make_one_minus_sqrt1p, {L.STRONG_SUBADD: A}, concave_src,
               default_params={"alpha": 1.0}, notes="1 - sqrt(1 + alpha x^2), alpha > 0"))
    add(_entry("neg-xlogx-shift", _make_neg_xlogx_shift, {L.STRONG_SUBADD: A}, concave_src,
               default_params={"alpha": 0.5}, notes="-(x+alpha) log(x+alpha), alpha in [0,1]"))
    add(_entry("log1p", _make_log1p, {L.STRONG_SUBADD: A}, concave_src))
    add(_entry("neg-log-cosh", _make_neg_log_cosh, {L.STRONG_SUBADD: A}, concave_src))
    add(_entry("e-minus-1px-pow", _make_e_minus_1px_pow, {L.STRONG_SUBADD: A}, concave_src,
               notes="e - (1+x)^(1/x), equal to 0 at x = 0 by the limit"))
    add(_entry("one-minus-exp-neg", _make_one_minus_exp_neg, {L.STRONG_SUBADD: A}, concave_src))
    add(_entry("sigmoid", _make_sigmoid, {L.STRONG_SUBADD: A}, concave_src))

    for term, sign in (("log1p", 1.0), ("log1p", -1.0), ("sin", 1.0), ("sin", -1.0), ("cos", -1.0)):
        name, factory = _make_half_sq(term, sign)
        add(_entry(name, factory, {L.STRONG_SUPERADD: A}, convex_src))
    name, factory = _make_half_sq("cos", 1.0)
    add(_entry(name, factory, {L.SECOND_DIFF_NONNEG: A, L.SUPERADD: R},
               "convex, but its value 1 at the origin already breaks two-point superadditivity",
               notes="x^2/2 + cos x; superadditivity fails at x = y = 0"))
    add(_entry("x-gamma-minus-1", _make_x_gamma_minus_1, {L.STRONG_SUPERADD: A}, convex_src,
               notes="x*Gamma(x) - 1 = Gamma(x+1) - 1"))

    add(_entry("reciprocal", _make_reciprocal, {L.SUBADD: A, L.STRONG_SUBADD: R},
               "1/x on the open half-line: subadditive yet convex, so its second differences are positive",
               notes="negative control for the strong version of subadditivity"))

    add(_entry("shannon-entropy", _make_shannon, {L.STRONG_SUBADD: A},
               "coordinatewise sum of concave terms vanishing at 0",
               default_dim=3, fixed_dim=False))
    add(_entry("sq-norm", _make_sq_norm, {L.STRONG_SUPERADD: A},
               "squared Euclidean norm; second differences equal 2<x,y>",
               default_dim=3, fixed_dim=False))
    add(_entry("inner-product", _make_inner_product, {L.STRONG_SUPERADD: A},
               "bilinear pairing on the product of two nonnegative orthants",
               default_dim=3, fixed_dim=False,
               notes="dim parameter is the factor size; points concatenate both factors"))
    add(_entry("concave-of-linear", _make_concave_of_linear, {L.STRONG_SUBADD: A},
               "Hardy-Littlewood-Polya majorization: concave of a positive linear form",
               default_dim=3, fixed_dim=False,
               default_params={"inner": "log1p", "a": 1.0},
               notes="f(<x, a>) for a scalar strong-subadd entry f and a >= 0"))
    add(_entry("geomean2", _make_geomean2, {L.SUPERADD: C, L.STRONG_SUBADD: R},
               "bivariate geometric mean: concave and 0 at the origin, yet its "
               "second differences change sign",
               default_dim=2))
    add(_entry("pairwise-diff-convex", _make_pairwise_diff_convex, {L.STRONG_SUBADD: R},
               "sum of convex functions of coordinate differences; off-diagonal "
               "curvature is nonpositive but the diagonal is positive",
               default_dim=3, fixed_dim=False, default_params={"q": 2.0},
               notes="sum over i<j of |x_i - x_j|^q, q >= 2"))
    add(_entry("jensen-gap", _make_jensen_gap, {L.STRONG_SUBADD: R},
               "Jensen gap of a concave rule; the gap of -t^2 equals a positive "
               "semidefinite quadratic, so second differences can be positive",
               default_dim=2, fixed_dim=False,
               default_params={"inner": "neg-square", "weights": 0.5},
               notes="f(sum lam_i x_i) - sum lam_i f(x_i) with f = -t^2"))
    add(_entry("nonneg-poly", _make_nonneg_poly, {L.STRONG_SUPERADD: A},
               "polynomial with nonnegative coefficients and zero constant term",
               default_dim=3, fixed_dim=False, default_params={"monomials": None},
               notes="monomials parameter rows are (coeff, e_1, ..., e_N)"))
    add(_entry("lse", _make_lse,
               {L.SUBMODULAR: A, L.COMONOTONE_STRONG_SUPERADD: A, L.STRONG_SUBADD: R},
               "log-sum-exp from convex optimization; submodular by Topkis' "
               "criterion, strongly subadditive only along comonotone directions",
               default_dim=3, fixed_dim=False))

    add(_entry("lp-power-norm", _make_lp_power_norm, {L.STRONG_SUPERADD: A},
               "p-th power of the grid L^p norm; its differential is monotone "
               "on the positive cone",
               default_dim=16, fixed_dim=False, default_params={"p": 2.0, "h": 1.0 / 16.0},
               notes="h * sum |f_i|^p on M grid points, p > 1; dim parameter is M"))

    add(_entry("det", _make_det, {L.STRONG_SUPERADD: A},
               "F. Zhang, Matrix Theory, sec. 7.2 ex. 36 (determinant on the PSD cone)",
               default_dim=3, fixed_dim=False))
    add(_entry("logdet-pencil", _make_logdet_pencil,
               {L.SECOND_DIFF_NONPOS: A, L.STRONG_SUBADD: R},
               "log det of a positive-definite pencil: concave with antitone "
               "differential, but two-point subadditivity fails near 0 "
               "(already for one matrix: log(x+y) vs log x + log y)",
               default_dim=3, fixed_dim=False, default_params={"order": 3, "matrices": None},
               notes="x -> log det(sum x_i A_i) for PD A_i; dim parameter is the weight count"))
    add(_entry("trace-pow", _make_trace_pow, {L.STRONG_SUBADD: A, L.STRONG_SUPERADD: A},
               "Bouhtou-Gaubert-Sagnol, lemma 5.3 (trace of matrix powers)",
               default_dim=3, fixed_dim=False, default_params={"p": 0.5},
               notes="strong-subadd needs p in [0,1]; strong-superadd needs p in [1,2]"))
    add(_entry("trace-hansen", _make_trace_hansen, {L.STRONG_SUPERADD: A},
               "F. Hansen: (1+t^p)^(1/p) is operator monotone for p in (0,1]",
               default_dim=3, fixed_dim=False, default_params={"p": 0.5},
               notes="trace F(A) with F(t) the antiderivative of (1+s^p)^(1/p)"))
    add(_entry("vn-entropy", _make_vn_entropy, {L.STRONG_SUBADD: A},
               "von Neumann entropy -trace(A log A); log is operator monotone",
               default_dim=3, fixed_dim=False))
    add(_entry("logdet", _make_logdet, {L.SECOND_DIFF_NONNEG: R, L.SECOND_DIFF_NONPOS: C},
               "log det on the PD cone: neither subadditive nor superadditive; "
               "concave with an antitone differential, so its second differences "
               "are nonpositive (A=B=C=I already refutes the nonnegative form)",
               default_dim=3, fixed_dim=False))
    add(_entry("det-recip-pow", _make_det_recip_pow, {L.COMPLETELY_MONOTONE: A},
               "Scott-Sokal, thm 1.3: (det A)^(-beta) is completely monotone "
               "iff beta is in {0, 1/2, 1, ...} or beta >= (N-1)/2",
               default_dim=2, fixed_dim=False, default_params={"beta": 0.5}))
    add(_entry("det-shift-recip", _make_det_shift_recip, {L.STRONG_SUPERADD: A},
               "(det(I+A))^(-beta) - 1: shift-and-center of a completely "
               "monotone rule, for the same beta values",
               default_dim=2, fixed_dim=False, default_params={"beta": 0.5},
               notes="must-pass values of beta match the completely monotone range"))

    add(_entry("exp-neg-linear", _make_exp_neg_linear, {L.COMPLETELY_MONOTONE: A},
               "exponential of a negative linear form, the prototype Laplace atom",
               default_dim=3, fixed_dim=False, default_params={"alpha": None},
               notes="exp(-<alpha, x>) with alpha > 0 (default alpha varies by coordinate)"))
    add(_entry("inv-power-product", _make_inv_power_product, {L.COMPLETELY_MONOTONE: A},
               "product of negative coordinate powers on the open orthant",
               default_dim=3, fixed_dim=False, default_params={"alpha": None},
               notes="prod x_i^(-alpha_i) with alpha_i > 0"))
    add(_entry("logistic-pow", _make_logistic_pow, {L.COMPLETELY_MONOTONE: A},
               "Scott-Sokal, ex. 2.5: (1 + a e^{-x})^beta is completely monotone "
               "iff beta is a nonnegative integer",
               default_params={"a": 1.0, "beta": 1.0},
               notes="non-integer beta is the designated refutation target"))
    add(_entry("elem-sym-4", _make_elem_sym_4, {L.COMPLETELY_MONOTONE: A},
               "Scott-Sokal, cor. 1.6: negative powers of the second elementary "
               "symmetric polynomial in four variables, beta = 0 or beta >= 1",
               default_dim=4, default_params={"beta": 1.0}))
    add(_entry("elem-sym-4-shifted", _make_elem_sym_4_shifted, {L.STRONG_SUPERADD: A},
               "shift-and-center of the four-variable elementary symmetric rule",
               default_dim=4, default_params={"beta": 1.0},
               notes="Phi(x + 1) - Phi(1) for the same beta range"))

    return tuple(entries)


_ENTRIES = _build_entries()
_BY_ID = {e.id: e for e in _ENTRIES}
assert len(_BY_ID) == len(_ENTRIES), "catalog ids must be unique"


def builtin_entries() -> tuple[CatalogEntry, ...]:
    """All built-in entries, in a fixed order."""
    return _ENTRIES


def lookup(entry_id: str) -> CatalogEntry:
    """Entry by id; unknown ids raise with the list of valid ids."""
    try:
        return _BY_ID[entry_id]
    except KeyError:
        raise UnknownEntryError(
            f"unknown catalog id {entry_id!r}; valid ids: {', '.join(sorted(_BY_ID))}"
        ) from None


def instantiate(
    entry: CatalogEntry | str, params: dict | None = None, dim: int | None = None
) -> FunctionHandle:
    """Concrete handle on a concrete cone; parameters are validated against
    the entry's documented ranges."""
    if isinstance(entry, str):
        entry = lookup(entry)
    merged = dict(entry.default_params)
    if params:
        unknown = sorted(set(params) - set(merged))
        if unknown:
            raise _param_error(entry.id, f"unknown parameters {unknown}")
        merged.update(params)
    n = entry.default_dim if dim is None else int(dim)
    if n < 1:
        raise _param_error(entry.id, f"dimension must be positive, got {dim}")
    if entry.fixed_dim and n != entry.default_dim:
        raise _param_error(entry.id, f"dimension is fixed at {entry.default_dim}")
    return entry._factory(merged, n)


def resolve_handle(target, params: dict | None = None, dim: int | None = None) -> FunctionHandle:
    """Accept an entry id, a CatalogEntry, or a FunctionHandle."""
    if isinstance(target, FunctionHandle):
        return target
    if isinstance(target, (CatalogEntry, str)):
        return instantiate(target, params, dim)
    raise ParameterError(f"cannot resolve {target!r} to a function handle")
