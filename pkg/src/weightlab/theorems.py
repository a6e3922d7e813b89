"""Machine checks of the constant-explicit weight inequalities.

Each check computes both sides of an inequality or equality from the
operator and constant modules and emits CheckReports. Hard checks assert
relations whose every term is computable: limiting-class sandwiches,
commutation gaps, Harnack bounds, power and duality identities. Claims
whose constants are unspecified functions of the doubling constant are
reported without assertion (report_unquantified).

Conventions. All suprema and pointwise extrema are over the realized
balls / the n points; inequalities pass at relative slack tol.ineq on the
passing side; equalities at tol.eq, relaxed when the weight's dynamic
range makes exp/log round-off dominate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import factorization
from .operators import maximal, minimal, natural_maximal, natural_minimal
from .report import (
    CheckReport,
    Tolerances,
    aggregate_verdict,
    digest,
    equality_report,
    error_report,
    inequality_report,
    soft_report,
)
from .space import FiniteMetricMeasureSpace
from .weights import (
    a1_constant,
    ainf_constant,
    ap_constant,
    blo_norm,
    bmo_norm,
    buo_norm,
    rhinf_constant,
    rhs_constant,
    _as_weight,
)


def _worst_point(arr: np.ndarray, mode: str = "max") -> dict:
    i = int(arr.argmax() if mode == "max" else arr.argmin())
    return {"point": i, "value": float(arr[i])}


def check_commutation(space, w, tol: Tolerances = Tolerances(),
                      inputs: str = "") -> list[CheckReport]:
    """Gap of log against the natural extremal operators on a positive weight.

    Asserts, pointwise, 0 <= log(Mnat w) - Mnat(log w) <= log A_inf(w) and
    the same for the natural minimal operator.
    """
    w = _as_weight(space, w)
    logw = np.log(w)
    bound = float(np.log(ainf_constant(space, w).value))
    out = []
    for name, op in (("natural_max", natural_maximal), ("natural_min", natural_minimal)):
        gap = np.log(op(space, w).values) - op(space, logw).values
        out.append(inequality_report(
            f"commutation.{name}",
            [("nonneg", 0.0, float(gap.min())), ("upper", float(gap.max()), bound)],
            tol.ineq, inputs,
            witness=_worst_point(gap),
        ))
    return out


def check_oscillation_characterization(space, f, tol: Tolerances = Tolerances(),
                                       inputs: str = "") -> list[CheckReport]:
    """Oscillation norms against the natural extremal deviation.

    || f ||_BLO equals max_x (Mnat f - f)(x), and || f ||_BUO equals
    max_x (f - mnat f)(x); exact on a finite space, where every point is a
    Lebesgue point.
    """
    f = np.asarray(f, dtype=np.float64)
    dev_up = natural_maximal(space, f).values - f
    dev_dn = f - natural_minimal(space, f).values
    return [
        equality_report("oscillation.blo",
                        [("blo", blo_norm(space, f).value, float(dev_up.max()))],
                        tol.eq, inputs, witness=_worst_point(dev_up)),
        equality_report("oscillation.buo",
                        [("buo", buo_norm(space, f).value, float(dev_dn.max()))],
                        tol.eq, inputs, witness=_worst_point(dev_dn)),
    ]


def check_harnack(space, w, p: float, tol: Tolerances = Tolerances(),
                  inputs: str = "") -> list[CheckReport]:
    """Two Harnack bounds on the ball oscillation of a positive weight.

    (i)  max_B w <= A_1(w) A_1(1/w) min_B w for every ball;
    (ii) max_B w <= C(w) A_p(w) C(1/w) A_p(1/w) min_B w, with C the RH_inf
         constants, following the chain that composes the two conditions.
    """
    w = _as_weight(space, w)
    winv = 1.0 / w
    fam = space.ball_family
    ratio = fam.running_max_at_pos(w) / fam.running_min_at_pos(w)
    lhs, ref = fam.sup_over_balls(ratio)
    rhs1 = a1_constant(space, w).value * a1_constant(space, winv).value
    rhs2 = (rhinf_constant(space, w).value * ap_constant(space, w, p).value
            * rhinf_constant(space, winv).value * ap_constant(space, winv, p).value)
    wit = {"center": ref.center, "rank": ref.rank, "radius": ref.radius}
    return [
        inequality_report("harnack.a1_pair", [("bound", lhs, rhs1)],
                          tol.ineq, inputs, witness=wit),
        inequality_report("harnack.rhinf_ap_pair", [("bound", lhs, rhs2)],
                          tol.ineq, inputs, witness=wit,
                          detail={"p": p}),
    ]


def check_a1_characterization(space, w, tol: Tolerances = Tolerances(),
                              inputs: str = "") -> CheckReport:
    """Sandwich exp(||log w||_BLO) <= A_1(w) <= A_inf(w) exp(||log w||_BLO)."""
    w = _as_weight(space, w)
    blo = blo_norm(space, np.log(w)).value
    mid = a1_constant(space, w).value
    ainf = ainf_constant(space, w).value
    lo, hi = float(np.exp(blo)), float(ainf * np.exp(blo))
    return inequality_report(
        "a1_characterization",
        [("lower", lo, mid), ("upper", mid, hi)],
        tol.ineq, inputs,
        detail={"blo_log_w": blo, "a1": mid, "ainf": ainf},
    )


def check_rhinf_characterization(space, w, tol: Tolerances = Tolerances(),
                                 inputs: str = "") -> CheckReport:
    """Sandwich C <= exp(||log w||_BUO) <= C * A_inf(w), C the RH_inf constant."""
    w = _as_weight(space, w)
    c = rhinf_constant(space, w).value
    mid = float(np.exp(buo_norm(space, np.log(w)).value))
    ainf = ainf_constant(space, w).value
    return inequality_report(
        "rhinf_characterization",
        [("lower", c, mid), ("upper", mid, float(c * ainf))],
        tol.ineq, inputs,
        detail={"rhinf": c, "exp_buo": mid, "ainf": ainf},
    )


def check_converse_chain(space, w, tol: Tolerances = Tolerances(),
                         inputs: str = "") -> list[CheckReport]:
    """The three-step chain bounding M(Mw) by a computable multiple of Mw.

    (a) Mnat(log w) <= log Mw <= log A_inf(w) + Mnat(log w), pointwise;
    (b) the same sandwich for Mw in place of w;
    (c) M(Mw) <= A_inf(Mw) A_inf(w) exp(||Mnat log w||_BLO) Mw, pointwise.
    """
    w = _as_weight(space, w)
    logw = np.log(w)
    mw = maximal(space, w).values
    log_mw = np.log(mw)
    mnat_logw = natural_maximal(space, logw).values
    ainf_w = ainf_constant(space, w).value
    mmw = maximal(space, mw).values
    mnat_logmw = natural_maximal(space, log_mw).values
    ainf_mw = ainf_constant(space, mw).value

    def sandwich(check_id, low_arr, mid_arr, const):
        gap_lo = low_arr - mid_arr
        gap_hi = mid_arr - low_arr
        return inequality_report(
            check_id,
            [("lower", float(gap_lo.max()), 0.0),
             ("upper", float(gap_hi.max()), float(np.log(const)))],
            tol.ineq, inputs, witness=_worst_point(gap_hi),
        )

    blo_mnat = blo_norm(space, mnat_logw).value
    k = float(ainf_mw * ainf_w * np.exp(blo_mnat))
    ratio = mmw / mw
    return [
        sandwich("converse_chain.w", mnat_logw, log_mw, ainf_w),
        sandwich("converse_chain.mw", mnat_logmw, np.log(mmw), ainf_mw),
        inequality_report("converse_chain.final",
                          [("bound", float(ratio.max()), k)],
                          tol.ineq, inputs, witness=_worst_point(ratio),
                          detail={"blo_mnat_log_w": blo_mnat}),
    ]


def check_power_props(space, w, s: float, p: float,
                      tol: Tolerances = Tolerances(),
                      inputs: str = "") -> list[CheckReport]:
    """Power-transform relations between the weight classes.

    (a) ||log w**s||_BLO = s ||log w||_BLO and the BUO twin (exact);
    (b) A_1(w) <= A_inf(w) A_1(w**s)**(1/s);
    (c) A_q(w**s) <= (A_p(w) RH_s(w))**s with q = s(p-1)+1;
    (d) A_p(w) <= A_q(w**s)**(1/s) and RH_s(w) <= A_q(w**s)**(1/s).
    """
    w = _as_weight(space, w)
    q = s * (p - 1.0) + 1.0
    ws = np.power(w, s)
    logw, logws = np.log(w), np.log(ws)
    eq_tol = tol.eq_for(ws)
    a = equality_report(
        "power_props.log_scaling",
        [("blo", blo_norm(space, logws).value, s * blo_norm(space, logw).value),
         ("buo", buo_norm(space, logws).value, s * buo_norm(space, logw).value)],
        eq_tol, inputs, detail={"s": s},
    )
    a1_ws = a1_constant(space, ws).value
    b = inequality_report(
        "power_props.a1_from_power",
        [("bound", a1_constant(space, w).value,
          float(ainf_constant(space, w).value * a1_ws ** (1.0 / s)))],
        tol.ineq, inputs, detail={"s": s, "a1_ws": a1_ws},
    )
    aq_ws = ap_constant(space, ws, q).value
    ap_w = ap_constant(space, w, p).value
    rhs_w = rhs_constant(space, w, s).value
    c = inequality_report(
        "power_props.ap_forward",
        [("bound", aq_ws, float((ap_w * rhs_w) ** s))],
        tol.ineq, inputs, detail={"q": q, "ap_w": ap_w, "rhs_w": rhs_w},
    )
    d = inequality_report(
        "power_props.ap_converse",
        [("ap", ap_w, float(aq_ws ** (1.0 / s))),
         ("rhs", rhs_w, float(aq_ws ** (1.0 / s)))],
        tol.ineq, inputs, detail={"q": q, "aq_ws": aq_ws},
    )
    return [a, b, c, d]


def check_multiplier(space, phi, w, tol: Tolerances = Tolerances(),
                     inputs: str = "") -> CheckReport:
    """Products of weights on the upper-oscillation side.

    || log(phi w) ||_BUO <= ||log phi||_BUO + ||log w||_BUO, and the product's
    RH_inf constant is controlled by exp of its BUO norm.
    """
    phi = _as_weight(space, phi)
    w = _as_weight(space, w)
    prod = phi * w
    buo_prod = buo_norm(space, np.log(prod)).value
    return inequality_report(
        "multiplier",
        [("subadd", buo_prod,
          float(buo_norm(space, np.log(phi)).value + buo_norm(space, np.log(w)).value)),
         ("rhinf", rhinf_constant(space, prod).value, float(np.exp(buo_prod)))],
        tol.ineq, inputs,
    )


def check_duality(space, w, p: float, tol: Tolerances = Tolerances(),
                  inputs: str = "") -> list[CheckReport]:
    """Conjugate-exponent identities for the power w**(1-p).

    A_p(w**(1-p)) = A_p'(w)**(p-1) with 1/p + 1/p' = 1, and
    ||log w**(1-p)||_BUO = (p-1) ||log w||_BLO.
    """
    w = _as_weight(space, w)
    p_conj = p / (p - 1.0)
    wdual = np.power(w, 1.0 - p)
    eq_tol = tol.eq_for(wdual)
    return [
        equality_report(
            "duality.ap",
            [("identity", ap_constant(space, wdual, p).value,
              float(ap_constant(space, w, p_conj).value ** (p - 1.0)))],
            eq_tol, inputs, detail={"p": p, "p_conj": p_conj},
        ),
        equality_report(
            "duality.oscillation",
            [("identity", buo_norm(space, np.log(wdual)).value,
              float((p - 1.0) * blo_norm(space, np.log(w)).value))],
            eq_tol, inputs, detail={"p": p},
        ),
    ]


def report_unquantified(space, w, s: float, tol: Tolerances = Tolerances(),
                        inputs: str = "") -> list[CheckReport]:
    """Constants the general theory leaves as unspecified functions of C_d.

    Computes and reports, without asserting: the reverse Holder and A_1
    constants of Mw, the A_1 constant of (M w**s)**(1/s), and the
    oscillation-to-BMO ratios of the four extremal operators at f = log w.
    Hard-asserts only the exact identities ||mnat f||_BUO = ||Mnat(-f)||_BLO
    and ||Mf||_BLO = ||Mnat|f|||_BLO.
    """
    w = _as_weight(space, w)
    f = np.log(w)
    mw = maximal(space, w).values
    mws_root = np.power(maximal(space, np.power(w, s)).values, 1.0 / s)
    f_bmo = bmo_norm(space, f).value
    mf = maximal(space, f).values
    quantities = {
        "rhs_Mw": rhs_constant(space, mw, s).value,
        "a1_Mw": a1_constant(space, mw).value,
        "a1_root_Mws": a1_constant(space, mws_root).value,
        "bmo_f": f_bmo,
        "s": s,
    }
    blo_mnat_f = blo_norm(space, natural_maximal(space, f).values).value
    blo_mf = blo_norm(space, mf).value
    buo_mnat_min_f = buo_norm(space, natural_minimal(space, f).values).value
    buo_minimal_f = buo_norm(space, minimal(space, f).values).value
    for name, val in (("ratio_blo_Mnat_f", blo_mnat_f),
                      ("ratio_blo_Mf", blo_mf),
                      ("ratio_buo_mnat_f", buo_mnat_min_f),
                      ("ratio_buo_mf", buo_minimal_f)):
        quantities[name] = val / f_bmo if f_bmo > 0.0 else None
    reports = [soft_report("unquantified.constants", quantities, inputs)]
    reports.append(equality_report(
        "unquantified.minimal_duality",
        [("identity", buo_mnat_min_f,
          blo_norm(space, natural_maximal(space, -f).values).value)],
        tol.eq, inputs,
    ))
    reports.append(equality_report(
        "unquantified.abs_identity",
        [("identity", blo_mf,
          blo_norm(space, natural_maximal(space, np.abs(f)).values).value)],
        tol.eq, inputs,
    ))
    return reports


@dataclass(frozen=True)
class SuiteParams:
    p: float = 2.0
    s: float = 2.0
    tol: Tolerances = field(default_factory=Tolerances)
    include_factorization: bool = True
    factor_first_only: bool = True  # one factorization per instance suffices
    include_soft: bool = True
    factor_options: "factorization.FactorOptions | None" = None


def run_suite(space: FiniteMetricMeasureSpace, weights: dict[str, np.ndarray],
              params: SuiteParams = SuiteParams(), label: str = "",
              ) -> list[CheckReport]:
    """Run every check on a space and its named weights.

    Per-check errors become failed report entries; the suite never aborts.
    The aggregate verdict is pass exactly when every hard check passes.
    Report order is fixed by (weight name in given order, check id).
    """
    reports: list[CheckReport] = []
    names = list(weights)

    def run(check_id, fn):
        try:
            result = fn()
            reports.extend(result if isinstance(result, list) else [result])
        except Exception as exc:  # a failed entry, never an aborted suite
            reports.append(error_report(check_id, exc))

    for name in names:
        w = np.asarray(weights[name], dtype=np.float64)
        tag = f"{label}{name}"
        inp = digest(space.dist, space.measure, w, params.p, params.s)
        tol = params.tol
        run(f"{tag}.commutation", lambda: _prefix(tag, check_commutation(space, w, tol, inp)))
        run(f"{tag}.oscillation", lambda: _prefix(
            tag, check_oscillation_characterization(
                space, np.log(_as_weight(space, w)), tol, inp)))
        run(f"{tag}.harnack", lambda: _prefix(tag, check_harnack(space, w, params.p, tol, inp)))
        run(f"{tag}.a1_characterization", lambda: _prefix(
            tag, [check_a1_characterization(space, w, tol, inp)]))
        run(f"{tag}.rhinf_characterization", lambda: _prefix(
            tag, [check_rhinf_characterization(space, w, tol, inp)]))
        run(f"{tag}.converse_chain", lambda: _prefix(
            tag, check_converse_chain(space, w, tol, inp)))
        run(f"{tag}.power_props", lambda: _prefix(
            tag, check_power_props(space, w, params.s, params.p, tol, inp)))
        run(f"{tag}.duality", lambda: _prefix(tag, check_duality(space, w, params.p, tol, inp)))
        if params.include_soft:
            run(f"{tag}.unquantified", lambda: _prefix(
                tag, report_unquantified(space, w, params.s, tol, inp)))
        if params.include_factorization and not (params.factor_first_only
                                                 and name != names[0]):
            run(f"{tag}.factorization", lambda: _prefix(
                tag, _factorization_reports(space, w, params, inp)))
    if names:
        phi_name, w_name = (names[0], names[1 % len(names)])
        inp = digest(space.dist, space.measure, weights[phi_name], weights[w_name])
        run(f"{label}{phi_name}*{w_name}.multiplier", lambda: _prefix(
            f"{label}{phi_name}*{w_name}",
            [check_multiplier(space, weights[phi_name], weights[w_name],
                              params.tol, inp)]))
    return reports


def _prefix(tag: str, reports: list[CheckReport]) -> list[CheckReport]:
    return [replace(r, check_id=f"{tag}.{r.check_id}") for r in reports]


def _factorization_reports(space, w, params: SuiteParams, inputs: str):
    options = params.factor_options or factorization.SUITE_OPTIONS
    pair = factorization.refined_jones(space, w, params.p, params.s, options)
    return factorization.verify_factorization(space, w, pair, params.tol,
                                              inputs=inputs)


__all__ = [
    "CheckReport", "Tolerances", "SuiteParams", "aggregate_verdict",
    "check_commutation", "check_oscillation_characterization", "check_harnack",
    "check_a1_characterization", "check_rhinf_characterization",
    "check_converse_chain", "check_power_props", "check_multiplier",
    "check_duality", "report_unquantified", "run_suite",
]
