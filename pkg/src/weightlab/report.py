"""Machine-readable verdicts for single inequality or equality checks.

A CheckReport records one checked relation: the binding left and right
hand sides, the margin, a pass/fail/soft-report verdict, and the witness
that produced the binding values. Multi-sided relations (sandwiches) fold
into one report whose lhs/rhs are the binding side; all sides are kept in
`detail`.

Comparisons are relative with a unit floor: a side passes when
    rhs - lhs >= -tol * max(|lhs|, |rhs|, 1)      (inequalities)
    |lhs - rhs| <= tol * max(|lhs|, |rhs|, 1)     (equalities)
so near-zero quantities compare at absolute tolerance tol.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_INEQ_TOL = 1e-9
DEFAULT_EQ_TOL = 1e-12
# equality tolerance degrades once the weight's dynamic range passes this
EQ_RELAX_RANGE = 1e6
EQ_RELAXED_TOL = 1e-9


@dataclass(frozen=True)
class Tolerances:
    ineq: float = DEFAULT_INEQ_TOL
    eq: float = DEFAULT_EQ_TOL

    def eq_for(self, w) -> float:
        w = np.asarray(w, dtype=np.float64)
        if w.size and w.min() > 0 and w.max() / w.min() > EQ_RELAX_RANGE:
            return max(self.eq, EQ_RELAXED_TOL)
        return self.eq


def _scale(lhs: float, rhs: float) -> float:
    return max(abs(lhs), abs(rhs), 1.0)


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    inputs: str
    lhs: float
    rhs: float
    margin: float
    verdict: str  # pass | fail | soft-report | error
    witness: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)
    kind: str = "inequality"  # inequality | equality | report
    tolerance: float = DEFAULT_INEQ_TOL

    @property
    def hard(self) -> bool:
        return self.kind in ("inequality", "equality")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass" or self.verdict == "soft-report"

    def to_dict(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "id": self.check_id,
            "inputs": self.inputs,
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "margin": num(self.margin),
            "verdict": self.verdict,
            "witness": self.witness,
            "detail": self.detail,
            "kind": self.kind,
            "tolerance": self.tolerance,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def inequality_report(check_id: str, sides, tol: float, inputs: str = "",
                      witness: dict | None = None, detail: dict | None = None,
                      ) -> CheckReport:
    """One report asserting every `(name, lhs, rhs)` side with lhs <= rhs."""
    scaled = [(rhs - lhs) / _scale(lhs, rhs) for _, lhs, rhs in sides]
    worst = int(np.argmin(scaled))
    name, lhs, rhs = sides[worst]
    info = dict(detail or {})
    for nm, lo, hi in sides:
        info[f"{nm}.lhs"] = lo
        info[f"{nm}.rhs"] = hi
    info["binding"] = name
    verdict = "pass" if all(s >= -tol for s in scaled) else "fail"
    return CheckReport(check_id, inputs, float(lhs), float(rhs),
                       float(rhs - lhs), verdict, witness or {}, info,
                       "inequality", tol)


def equality_report(check_id: str, sides, tol: float, inputs: str = "",
                    witness: dict | None = None, detail: dict | None = None,
                    ) -> CheckReport:
    """One report asserting every `(name, lhs, rhs)` side with lhs == rhs."""
    scaled = [abs(rhs - lhs) / _scale(lhs, rhs) for _, lhs, rhs in sides]
    worst = int(np.argmax(scaled))
    name, lhs, rhs = sides[worst]
    info = dict(detail or {})
    for nm, lo, hi in sides:
        info[f"{nm}.lhs"] = lo
        info[f"{nm}.rhs"] = hi
    info["binding"] = name
    verdict = "pass" if all(s <= tol for s in scaled) else "fail"
    return CheckReport(check_id, inputs, float(lhs), float(rhs),
                       float(abs(lhs - rhs)), verdict, witness or {}, info,
                       "equality", tol)


def soft_report(check_id: str, quantities: dict, inputs: str = "",
                witness: dict | None = None) -> CheckReport:
    """An informational report; never fails, carries named quantities."""
    return CheckReport(check_id, inputs, float("nan"), float("nan"), float("nan"),
                       "soft-report", witness or {}, dict(quantities), "report", 0.0)


def error_report(check_id: str, exc: Exception, inputs: str = "") -> CheckReport:
    return CheckReport(check_id, inputs, float("nan"), float("nan"), float("nan"),
                       "error", {}, {"error": f"{type(exc).__name__}: {exc}"},
                       "inequality", 0.0)


def digest(*parts) -> str:
    h = hashlib.sha1()
    for part in parts:
        if isinstance(part, np.ndarray):
            h.update(np.ascontiguousarray(part).tobytes())
        else:
            h.update(repr(part).encode())
    return h.hexdigest()[:12]


def reports_to_jsonl(reports) -> str:
    return "".join(r.to_json_line() + "\n" for r in reports)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["id", "inputs", "lhs", "rhs", "margin", "verdict", "kind"])
    for r in reports:
        writer.writerow([r.check_id, r.inputs, repr(r.lhs), repr(r.rhs),
                         repr(r.margin), r.verdict, r.kind])
    return buf.getvalue()


def aggregate_verdict(reports) -> bool:
    """True when every hard check passed; soft reports never count."""
    return all(r.verdict == "pass" for r in reports if r.hard)
