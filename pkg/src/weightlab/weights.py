"""Characteristic constants and oscillation norms with extremal witnesses.

Every functional here is a supremum over the realized balls of a per-ball
expression in averages, minima, and maxima of (transforms of) the weight:

  ap_constant      sup (avg w) * (avg w**(-1/(p-1)))**(p-1)
  a1_constant      sup (avg w) / (min over ball of w)
  ainf_constant    sup (avg w) * exp(-avg log w)
  rhs_constant     sup (avg w**s)**(1/s) / (avg w)
  rhinf_constant   sup (max over ball of w) / (avg w)
  bmo_norm         sup avg |f - f_B|
  blo_norm         sup (avg f - min over ball of f)
  buo_norm         sup (max over ball of f - avg f)

Essential suprema and infima reduce to ball maxima and minima because
zero-mass points are rejected at ingestion. a1 and rhinf each have an
equivalent pointwise form through the maximal and minimal functions; both
are computed and must agree (the shared average table makes the two
suprema exactly equal), with the alternate value stored on the result.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParams, NonpositiveWeight
from .operators import maximal, minimal
from .space import FiniteMetricMeasureSpace, FunctionalResult

# beyond this dynamic range exp/log round-off dominates the comparisons
CONDITIONING_RANGE = 1e12
CROSS_FORM_RTOL = 1e-12


def _as_weight(space: FiniteMetricMeasureSpace, w, positive: bool = True) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (space.n,):
        raise NonpositiveWeight(f"weight must have shape ({space.n},), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise NonpositiveWeight("weight has non-finite entries")
    if positive:
        if np.any(w <= 0.0):
            raise NonpositiveWeight("weight must be strictly positive")
    elif np.any(w < 0.0):
        raise NonpositiveWeight("weight must be nonnegative")
    return w


def _conditioning(w: np.ndarray) -> tuple[str, ...]:
    rng = float(w.max() / w.min()) if w.min() > 0 else np.inf
    if rng > CONDITIONING_RANGE:
        return (f"weight dynamic range {rng:.2e} exceeds {CONDITIONING_RANGE:.0e}; "
                "log/exp round-off may dominate",)
    return ()


def ap_constant(space: FiniteMetricMeasureSpace, w, p: float) -> FunctionalResult:
    """Muckenhoupt constant for exponent p in (1, inf)."""
    if not p > 1.0:
        raise InvalidParams("ap_constant needs p > 1")
    w = _as_weight(space, w)
    fam = space.ball_family
    a = fam.averages_at_pos(w)
    b = fam.averages_at_pos(np.power(w, -1.0 / (p - 1.0)))
    value, ref = fam.sup_over_balls(a * np.power(b, p - 1.0))
    return FunctionalResult(f"A_p(p={p:g})", value, ref, warnings=_conditioning(w))


def a1_constant(space: FiniteMetricMeasureSpace, w) -> FunctionalResult:
    """A_1 constant: sup over balls of (avg w) / (min over ball of w).

    Cross-checked against the pointwise form max_x Mw(x) / w(x); the two
    suprema range over the same quotient set so they agree exactly.
    """
    w = _as_weight(space, w)
    fam = space.ball_family
    a = fam.averages_at_pos(w)
    mn = fam.running_min_at_pos(w)
    value, ref = fam.sup_over_balls(a / mn)
    mw = maximal(space, w).values
    ratios = mw / w
    point = int(ratios.argmax())
    alt = float(ratios[point])
    _require_cross_agreement("A_1", value, alt)
    return FunctionalResult("A_1", value, ref, point=point, alt_value=alt,
                            warnings=_conditioning(w))


def ainf_constant(space: FiniteMetricMeasureSpace, w) -> FunctionalResult:
    """A_inf constant: sup over balls of (avg w) * exp(-avg log w)."""
    w = _as_weight(space, w)
    fam = space.ball_family
    a = fam.averages_at_pos(w)
    g = fam.averages_at_pos(np.log(w))
    value, ref = fam.sup_over_balls(a * np.exp(-g))
    return FunctionalResult("A_inf", value, ref, warnings=_conditioning(w))


def rhs_constant(space: FiniteMetricMeasureSpace, w, s: float) -> FunctionalResult:
    """Reverse Holder constant: sup over balls of (avg w**s)**(1/s) / (avg w).

    Nonnegative weights are allowed; balls averaging to zero are skipped,
    and the all-zero weight is rejected.
    """
    if not s > 1.0:
        raise InvalidParams("rhs_constant needs s > 1")
    w = _as_weight(space, w, positive=False)
    if not np.any(w > 0.0):
        raise NonpositiveWeight("weight is identically zero")
    fam = space.ball_family
    a = fam.averages_at_pos(w)
    ps = fam.averages_at_pos(np.power(w, s))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.power(ps, 1.0 / s) / a
    vals = np.where(a > 0.0, vals, -np.inf)
    value, ref = fam.sup_over_balls(vals)
    return FunctionalResult(f"RH_s(s={s:g})", value, ref, warnings=_conditioning(w[w > 0]))


def rhinf_constant(space: FiniteMetricMeasureSpace, w) -> FunctionalResult:
    """RH_inf constant: sup over balls of (max over ball of w) / (avg w).

    Cross-checked against the pointwise form max_x w(x) / mw(x); exact
    agreement for the same reason as a1_constant.
    """
    w = _as_weight(space, w)
    fam = space.ball_family
    a = fam.averages_at_pos(w)
    mx = fam.running_max_at_pos(w)
    value, ref = fam.sup_over_balls(mx / a)
    mw = minimal(space, w).values
    ratios = w / mw
    point = int(ratios.argmax())
    alt = float(ratios[point])
    _require_cross_agreement("RH_inf", value, alt)
    return FunctionalResult("RH_inf", value, ref, point=point, alt_value=alt,
                            warnings=_conditioning(w))


def _require_cross_agreement(kind: str, value: float, alt: float) -> None:
    if abs(value - alt) > CROSS_FORM_RTOL * max(abs(value), abs(alt), 1.0):
        raise ArithmeticError(
            f"{kind} forms disagree: ball form {value!r} vs pointwise form {alt!r}")


def bmo_norm(space: FiniteMetricMeasureSpace, f) -> FunctionalResult:
    """sup over balls of avg |f - f_B|."""
    f = np.asarray(f, dtype=np.float64)
    fam = space.ball_family
    a = fam.averages_at_pos(f)
    n = space.n
    vals = np.empty((n, n))
    tri = np.tril(np.ones((n, n)), k=0)  # row j: members are positions <= j
    for c in range(n):
        fs = f[fam.order[c]]
        mus = fam.sorted_measure[c]
        dev = np.abs(fs[None, :] - a[c][:, None]) * mus[None, :]
        vals[c] = (dev * tri).sum(axis=1) / fam.prefix_measure[c]
    vals[:, 0] = 0.0  # singletons oscillate exactly zero
    value, ref = fam.sup_over_balls(vals)
    return FunctionalResult("BMO", value, ref)


def blo_norm(space: FiniteMetricMeasureSpace, f) -> FunctionalResult:
    """sup over balls of (avg f - min over ball of f)."""
    f = np.asarray(f, dtype=np.float64)
    fam = space.ball_family
    vals = fam.averages_at_pos(f) - fam.running_min_at_pos(f)
    value, ref = fam.sup_over_balls(vals)
    return FunctionalResult("BLO", value, ref)


def buo_norm(space: FiniteMetricMeasureSpace, f) -> FunctionalResult:
    """sup over balls of (max over ball of f - avg f)."""
    f = np.asarray(f, dtype=np.float64)
    fam = space.ball_family
    vals = fam.running_max_at_pos(f) - fam.averages_at_pos(f)
    value, ref = fam.sup_over_balls(vals)
    return FunctionalResult("BUO", value, ref)


def transform(w, kind: str, exponent: float | None = None, other=None) -> np.ndarray:
    """Pointwise weight transform: power(s), inverse, product(phi), log, exp."""
    w = np.asarray(w, dtype=np.float64)
    if kind == "power":
        if exponent is None:
            raise InvalidParams("power transform needs an exponent")
        _check_positive_entries(w, "power")
        return np.power(w, exponent)
    if kind == "inverse":
        _check_positive_entries(w, "inverse")
        return 1.0 / w
    if kind == "product":
        if other is None:
            raise InvalidParams("product transform needs a second vector")
        return w * np.asarray(other, dtype=np.float64)
    if kind == "log":
        _check_positive_entries(w, "log")
        return np.log(w)
    if kind == "exp":
        return np.exp(w)
    raise InvalidParams(f"unknown transform {kind!r}")


def _check_positive_entries(w: np.ndarray, kind: str) -> None:
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise NonpositiveWeight(f"{kind} transform needs strictly positive entries")
