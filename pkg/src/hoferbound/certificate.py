"""End-to-end certificate: assumption, constants, generators, depth bound, report."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

from .complex import certificate_lower_bound, min_depth_over_admissible
from .errors import BudgetExceeded, HoferBoundError, Infeasible, SandwichVacuous
from .generators import enumerate_generators
from .geometry import check_assumption
from .profile import SparseCoefficients, make_bump, make_profile, osc, profile_samples, sup_norm
from .scenario import Scenario

__all__ = [
    "Verdict",
    "CertificateReport",
    "run_certificate",
    "asymptotic_slope",
    "emit_report",
    "parse_report",
    "slope_table_csv",
    "plot_profile",
    "require_nonvacuous",
]

REPORT_VERSION = 1
INEQ_TOL = 1e-9


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    applicable: bool
    detail: str


@dataclass(frozen=True)
class CertificateReport:
    """Plain-data certificate; every field is JSON-representable."""

    scenario: str
    n: int
    d: int
    k: int
    R: float
    delta: float
    coefficients: tuple[tuple[int, float], ...]
    assumption: dict
    l_k: float
    L: float
    C0: float
    A: float
    C: float
    sup_norm: float
    osc: float
    B_low: float
    certified_floor: float
    vacuous: bool
    certificate: dict
    brute_force: dict | None
    verdicts: tuple[Verdict, ...]
    generators: tuple[dict, ...]

    @property
    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_json(self) -> dict:
        out = asdict(self)
        out["coefficients"] = [[i, v] for i, v in self.coefficients]
        out["verdicts"] = [asdict(v) for v in self.verdicts]
        out["generators"] = list(self.generators)
        out["report_version"] = REPORT_VERSION
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CertificateReport":
        data = dict(data)
        data.pop("report_version", None)
        data["coefficients"] = tuple((int(i), float(v)) for i, v in data["coefficients"])
        data["verdicts"] = tuple(Verdict(**v) for v in data["verdicts"])
        data["generators"] = tuple(data["generators"])
        return cls(**data)


def _difference(s: Scenario) -> SparseCoefficients:
    return s.a - s.b


def run_certificate(s: Scenario, brute_force: bool = False) -> CertificateReport:
    """Certificate for the coefficient difference a - b of scenario ``s``."""
    diff = _difference(s)
    bump = make_bump(s.R, s.delta)
    p = make_profile(bump, diff)
    m, q, x1, c, k = s.manifold, s.submanifold, s.endpoint, s.homotopy_class, s.k
    cap = p.max_slope
    report = check_assumption(m, q, x1, c, k, max(cap, 1e-12))
    n, d = report.n, report.d
    l_k, L = report.l_k, report.L
    C0 = 2.0 * s.R * L
    A = -l_k / (2.0 * bump.slope_min)
    C = max(C0, A)

    gens = enumerate_generators(m, q, x1, c, p)
    vals = diff.values()
    lo = min([0.0, *vals])
    hi = max([0.0, *vals])
    sn, up = sup_norm(diff), osc(diff)
    cert = certificate_lower_bound(gens.for_complex())
    B_low = cert.bound

    def window(grades, pick):
        return [g.action for g in gens if g.grading in grades and pick(g)]

    verdicts = []
    low_win = window({d - k - 1, d - k + 1}, lambda g: True)
    worst = min(low_win, default=math.inf)
    verdicts.append(Verdict("window-low", worst >= -C0, True,
                            f"min action in gradings {d - k - 1},{d - k + 1}: {worst!r} >= -C0 = {-C0!r}"))
    high_win = window({n + k - 1, n + k + 1}, lambda g: True)
    worst = max(high_win, default=-math.inf)
    verdicts.append(Verdict("window-high", worst <= C0, True,
                            f"max action in gradings {n + k - 1},{n + k + 1}: {worst!r} <= C0 = {C0!r}"))
    if lo < -A:
        hits = window({d - k}, lambda g: g.action <= lo)
        verdicts.append(Verdict("deep-low", bool(hits), True,
                                f"{len(hits)} generator(s) of grading {d - k} with action <= {lo!r}"))
    else:
        verdicts.append(Verdict("deep-low", True, False, f"min coefficient {lo!r} >= -A = {-A!r}"))
    if hi > A:
        hits = window({n + k}, lambda g: g.action >= hi)
        verdicts.append(Verdict("deep-high", bool(hits), True,
                                f"{len(hits)} generator(s) of grading {n + k} with action >= {hi!r}"))
    else:
        verdicts.append(Verdict("deep-high", True, False, f"max coefficient {hi!r} <= A = {A!r}"))
    floor = sn - C
    vacuous = sn <= C
    if vacuous:
        verdicts.append(Verdict("lower-bound", True, False, f"vacuous: sup norm {sn!r} <= C = {C!r}"))
    else:
        verdicts.append(Verdict("lower-bound", B_low >= floor - INEQ_TOL, True, f"B_low {B_low!r} >= sup - C = {floor!r}"))
    verdicts.append(Verdict("upper-bound", B_low <= up + INEQ_TOL, True, f"B_low {B_low!r} <= osc = {up!r}"))

    bf = None
    if brute_force:
        try:
            beta, witness = min_depth_over_admissible(gens.for_complex())
            bf = {"status": "ok", "min_depth": beta, "entries": sorted(list(e) for e in witness.differential)}
            verdicts.append(Verdict("certificate<=min", B_low <= beta + INEQ_TOL, True,
                                    f"certificate {B_low!r} <= brute-force minimum {beta!r}"))
        except BudgetExceeded as exc:
            bf = {"status": "budget-exceeded", "detail": str(exc)}
        except Infeasible as exc:
            bf = {"status": "infeasible", "detail": str(exc)}

    return CertificateReport(
        scenario=s.name,
        n=n,
        d=d,
        k=k,
        R=s.R,
        delta=s.delta,
        coefficients=diff.entries,
        assumption=report.to_json(),
        l_k=l_k,
        L=L,
        C0=C0,
        A=A,
        C=C,
        sup_norm=sn,
        osc=up,
        B_low=B_low,
        certified_floor=floor,
        vacuous=vacuous,
        certificate=cert.to_json(),
        brute_force=bf,
        verdicts=tuple(verdicts),
        generators=tuple(g.to_json() for g in gens),
    )


def require_nonvacuous(r: CertificateReport) -> CertificateReport:
    if r.vacuous:
        raise SandwichVacuous(f"sup norm {r.sup_norm!r} does not exceed C = {r.C!r}; the lower bound is trivial")
    return r


def asymptotic_slope(s: Scenario, a=None, m_max: int = 10) -> list[dict]:
    """Rows (m, B_low(m a)/m, osc(m a)/m, sup(a) - C/m) for m = 1..m_max."""
    base = SparseCoefficients.from_any(a if a is not None else s.a)
    rows = []
    for m in range(1, m_max + 1):
        r = run_certificate(s.with_coefficients(base.scaled(float(m))))
        rows.append({
            "m": m,
            "lower": r.B_low / m,
            "upper": r.osc / m,
            "floor": sup_norm(base) - r.C / m,
            "C": r.C,
            "ok": r.B_low / m >= sup_norm(base) - r.C / m - INEQ_TOL and r.B_low <= r.osc + INEQ_TOL,
        })
    return rows


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def slope_table_csv(rows: list[dict]) -> str:
    cols = ["m", "lower", "upper", "floor", "C", "ok"]
    return _csv(([r[c] for c in cols] for r in rows), cols)


def _markdown(r: CertificateReport) -> str:
    lines = [f"# Certificate report{': ' + r.scenario if r.scenario else ''}", ""]
    lines.append(f"n = {r.n}, d = {r.d}, k = {r.k}, R = {r.R!r}, delta = {r.delta!r}")
    lines.append("")
    lines.append("| constant | value |")
    lines.append("|---|---|")
    for key in ("l_k", "L", "C0", "A", "C", "sup_norm", "osc", "B_low"):
        lines.append(f"| {key} | {getattr(r, key)!r} |")
    lines.append("")
    lines.append("| check | verdict | detail |")
    lines.append("|---|---|---|")
    for v in r.verdicts:
        status = ("pass" if v.passed else "FAIL") if v.applicable else "n/a"
        lines.append(f"| {v.name} | {status} | {v.detail} |")
    lines.append("")
    if r.vacuous:
        lines.append(f"Sandwich vacuous: sup norm {r.sup_norm!r} <= C = {r.C!r}.")
    else:
        lines.append(f"Sandwich: {r.certified_floor!r} <= distance <= {r.osc!r} (certificate B_low = {r.B_low!r}).")
    if r.brute_force is None:
        lines.append("Brute force not requested: certified lower bound, unverified minimum.")
    elif r.brute_force["status"] == "ok":
        lines.append(f"Depth interval: [{r.B_low!r}, {r.brute_force['min_depth']!r}].")
    else:
        lines.append(f"Brute force {r.brute_force['status']}: certified lower bound, unverified minimum.")
    return "\n".join(lines) + "\n"


def emit_report(r: CertificateReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(r.to_json(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        cols = ["id", "grading", "action", "r", "tau", "morse", "sign_fsecond", "band", "length"]
        rows = sorted(r.generators, key=lambda g: (g["grading"], g["action"]))
        return _csv(([g[c] for c in cols] for g in rows), cols)
    if fmt == "markdown":
        return _markdown(r)
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(text: str) -> CertificateReport:
    return CertificateReport.from_json(json.loads(text))


def plot_profile(s: Scenario, a=None, resolution: int = 1000) -> str:
    """CSV samples (s, f, f', f'') of the profile over [0, R]."""
    coeffs = SparseCoefficients.from_any(a if a is not None else s.a - s.b)
    p = make_profile(make_bump(s.R, s.delta), coeffs)
    data = profile_samples(p, resolution)
    return _csv((tuple(float(x) for x in row) for row in data), ["s", "f", "fprime", "fsecond"])


def describe_error(exc: HoferBoundError) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    clause = getattr(exc, "clause", None)
    if clause is not None:
        out["clause"] = clause
    return out
