"""Higher Futaki invariants, Chow weight and the product test configuration checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Mapping, Sequence

from . import _kernels
from .errors import ConsistencyError, InputError
from .exact_math import AffineForm, format_rational
from .localization import (
    FixedPointData,
    SamplePlan,
    compute_a,
    compute_b,
    fit_affine,
    residue_sum,
    todd_eval,
    _evaluated,
    _point_key,
)
from .toric_fan import DualPolytope, _check_bounded, _kernel_tables, count_lattice_points

__all__ = [
    "Verification",
    "InvariantReport",
    "futaki",
    "donaldson_futaki",
    "chow_weight",
    "compactified_intersection",
    "compactified_intersection_at",
    "verify_bl1",
    "theorem_ratio",
    "verify_theorem_main",
    "lift_shift_check",
    "verify_ehrhart",
    "verify_weighted_ehrhart",
    "compute_coefficients",
    "obstruction_report",
]


@dataclass
class Verification:
    name: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, **self.details}


@dataclass
class InvariantReport:
    n: int
    params: tuple[str, ...]
    a: list[Fraction]
    b: list[AffineForm]
    F: list[AffineForm]  # F[0] is F_1
    verifications: dict[str, Verification] = field(default_factory=dict)

    @property
    def obstructed(self) -> bool:
        return any(not f.is_zero() for f in self.F)

    @property
    def donaldson_futaki(self) -> AffineForm:
        return self.F[0]

    def futaki(self, ell: int) -> AffineForm:
        return self.F[ell - 1]

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verifications.values())


# ---------------------------------------------------------------------------
# Algebraic assembly
# ---------------------------------------------------------------------------

def futaki(a: Sequence[Fraction], b: Sequence[AffineForm], ell: int) -> AffineForm:
    """``(a_0 b_ell - b_0 a_ell) / a_0^2``."""
    if a[0] == 0:
        raise InputError("a_0 vanishes; the invariants are undefined")
    if not 1 <= ell < len(a):
        raise ValueError(f"ell must lie in 1..{len(a) - 1}")
    return (b[ell] * a[0] - b[0] * a[ell]) / (a[0] * a[0])


def donaldson_futaki(a: Sequence[Fraction], b: Sequence[AffineForm]) -> AffineForm:
    return futaki(a, b, 1)


def chow_weight(
    a: Sequence[Fraction], b: Sequence[AffineForm], k: int, point: Mapping[str, Fraction]
) -> Fraction:
    """``w(k) / (k chi(k)) - b_0 / a_0`` at ``point``; the constant tail of ``w`` is taken as 0."""
    n = len(a) - 1
    chi = sum(a[l] * k ** (n - l) for l in range(n + 1))
    if chi == 0:
        raise InputError(f"chi vanishes at k = {k}")
    w = sum(b[l].evaluate(point) * k ** (n + 1 - l) for l in range(n + 1))
    return w / (k * chi) - b[0].evaluate(point) / a[0]


def lift_shift_check(a: Sequence[Fraction], b: Sequence[AffineForm], c: Fraction) -> bool:
    """Changing the linearisation by ``c`` shifts ``b_l`` by ``c a_l``; every F_l must survive."""
    shifted = [bl + al * c for al, bl in zip(a, b)]
    return all(futaki(a, b, l) == futaki(a, shifted, l) for l in range(1, len(a)))


# ---------------------------------------------------------------------------
# Compactified product configuration
# ---------------------------------------------------------------------------

def compactified_intersection_at(
    fixed_points: Sequence[FixedPointData], n: int, ell: int, sample: Mapping[str, Fraction]
) -> Fraction:
    """Localized value of the top intersection of c_1(L)^(n-l+1) Td_l on the compactification.

    Central-fibre fixed points gain the base direction with weight 1; the
    fibre at infinity (trivial action, normal weight -1) contributes half of
    the corresponding intersection number on M.
    """
    if ell < 1:
        raise InputError("ell = 0 is handled through b_0")
    d = n - ell + 1
    key = _point_key(sample)
    central = Fraction(0)
    for fp in fixed_points:
        w, c, den = _evaluated(fp, key)
        if den == 0:
            raise InputError(f"sample is not generic at fixed point {fp.cone.label()}")
        central += c ** d * todd_eval((Fraction(1),) + w, ell) / den
    at_infinity = residue_sum(fixed_points, sample, d, ell - 1) / 2
    return central + at_infinity


def compactified_intersection(
    fixed_points: Sequence[FixedPointData], n: int, ell: int, plan: SamplePlan
) -> AffineForm:
    """Constant-plus-linear reconstruction of :func:`compactified_intersection_at`."""
    vals = [compactified_intersection_at(fixed_points, n, ell, s) for s in plan.samples]
    checks = [(s, compactified_intersection_at(fixed_points, n, ell, s)) for s in plan.checks]
    return fit_affine(plan.params, plan.samples, vals, homogeneous=False, checks=checks,
                      what=f"compactified intersection (l={ell})")


def _chern_number(fixed_points, n, ell, plan) -> Fraction:
    """``int_M c_1^(n-l+1) Td_(l-1)``, checked to be sample independent."""
    values = {residue_sum(fixed_points, s, n - ell + 1, ell - 1) for s in plan.all_points}
    if len(values) != 1:
        raise ConsistencyError(f"Chern number for l={ell} depends on the sample")
    return values.pop()


def verify_bl1(
    fixed_points: Sequence[FixedPointData], n: int, b: Sequence[AffineForm], plan: SamplePlan
) -> Verification:
    """``(n-l+1)! b_l`` against compactified intersection minus the M-side Chern number."""
    per_ell = {}
    ok = True
    for ell in range(1, n + 1):
        scale = factorial(n - ell + 1)
        lhs = b[ell] * scale
        chern = _chern_number(fixed_points, n, ell, plan)
        comp = compactified_intersection(fixed_points, n, ell, plan)
        rhs = comp - chern
        sample_ok = all(
            lhs.evaluate(s) == compactified_intersection_at(fixed_points, n, ell, s) - chern
            for s in plan.all_points
        )
        passed = lhs == rhs and sample_ok
        ok &= passed
        per_ell[str(ell)] = {
            "passed": passed,
            "lhs": lhs.to_json(plan.params),
            "compactified": comp.to_json(plan.params),
            "chern_number_M": format_rational(chern),
        }
    return Verification("bl1", ok, {"per_ell": per_ell})


def theorem_ratio(n: int) -> Fraction:
    """Ratio of the intersection-number formula to F_l: ``(n + 1) / (n!)^2``."""
    return Fraction(n + 1, factorial(n) ** 2)


def verify_theorem_main(
    fixed_points: Sequence[FixedPointData],
    n: int,
    a: Sequence[Fraction],
    b: Sequence[AffineForm],
    plan: SamplePlan,
) -> Verification:
    """Assemble the intersection-number formula at every sample and compare with F_l."""
    vol = factorial(n) * a[0]  # (L^n)
    ratio = theorem_ratio(n)
    observed: set[Fraction] = set()
    per_ell = {}
    ok = True
    for ell in range(1, n + 1):
        chern = _chern_number(fixed_points, n, ell, plan)
        td_number = factorial(n - ell) * a[ell]  # c_1^(n-l) Td_l(M)
        f_ell = futaki(a, b, ell)
        good = True
        for s in plan.all_points:
            top = factorial(n + 1) * b[0].evaluate(s)  # (Lbar^(n+1))
            comp = compactified_intersection_at(fixed_points, n, ell, s)
            rhs = (
                (n + 1) * vol * (comp - chern) - (n - ell + 1) * top * td_number
            ) / (factorial(n) * factorial(n - ell + 1) * vol ** 2)
            f_val = f_ell.evaluate(s)
            if rhs != ratio * f_val:
                good = False
            if f_val != 0:
                observed.add(rhs / f_val)
        ok &= good
        per_ell[str(ell)] = {"passed": good}
    consistent = len(observed) <= 1 and (not observed or observed == {ratio})
    ok &= consistent
    return Verification(
        "theorem_main",
        ok,
        {
            "ratio_expected": format_rational(ratio),
            "ratio_observed": [format_rational(r) for r in sorted(observed)],
            "per_ell": per_ell,
        },
    )


# ---------------------------------------------------------------------------
# Lattice point oracles
# ---------------------------------------------------------------------------

def hilbert_polynomial(a: Sequence[Fraction], k: int) -> Fraction:
    n = len(a) - 1
    return sum(a[l] * k ** (n - l) for l in range(n + 1))


def verify_ehrhart(a: Sequence[Fraction], q: DualPolytope, kmax: int = 2) -> Verification:
    rows = {}
    ok = True
    for k in range(1, kmax + 1):
        expected = hilbert_polynomial(a, k)
        count = count_lattice_points(q, k)
        rows[str(k)] = {"hilbert": format_rational(expected), "lattice_points": count}
        ok &= expected == count
    return Verification("ehrhart", ok, {"per_k": rows})


def lattice_weight_form(q: DualPolytope, k: int, lam: Sequence[AffineForm]) -> AffineForm:
    """Total weight on sections of ``-kK``: the sum of ``-<u, lam>`` over lattice points of ``kQ``."""
    _check_bounded(q)
    a, c, starts = _kernel_tables(q)
    _, sums = _kernels.weighted_sums(a, c, starts, k)
    total = AffineForm()
    for s, f in zip(sums, lam):
        if s:
            total = total - f * int(s)
    return total


def verify_weighted_ehrhart(
    b: Sequence[AffineForm], q: DualPolytope, lam: Sequence[AffineForm], kmax: int = 2
) -> Verification:
    """Compare ``sum_l b_l k^(n+1-l)`` with the weight sum over lattice points.

    The difference is the constant tail of the weight polynomial, expected to vanish.
    """
    n = len(b) - 1
    rows = {}
    ok = True
    for k in range(1, kmax + 1):
        poly = sum((b[l] * k ** (n + 1 - l) for l in range(n + 1)), AffineForm())
        direct = lattice_weight_form(q, k, lam)
        rows[str(k)] = {"tail": (direct - poly).to_json()}
        ok &= direct == poly
    return Verification("weighted_ehrhart", ok, {"per_k": rows})


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def compute_coefficients(
    fixed_points: Sequence[FixedPointData], n: int, plan: SamplePlan
) -> tuple[list[Fraction], list[AffineForm]]:
    a = [compute_a(fixed_points, n, l, plan) for l in range(n + 1)]
    b = [compute_b(fixed_points, n, l, plan) for l in range(n + 1)]
    return a, b


def obstruction_report(
    fixed_points: Sequence[FixedPointData],
    n: int,
    plan: SamplePlan,
    *,
    lift_shifts: Sequence[Fraction] = (),
) -> InvariantReport:
    a, b = compute_coefficients(fixed_points, n, plan)
    F = [futaki(a, b, l) for l in range(1, n + 1)]
    report = InvariantReport(n, plan.params, a, b, F)
    if lift_shifts:
        report.verifications["lift_shift"] = Verification(
            "lift_shift",
            all(lift_shift_check(a, b, c) for c in lift_shifts),
            {"shifts": [format_rational(c) for c in lift_shifts]},
        )
    return report
