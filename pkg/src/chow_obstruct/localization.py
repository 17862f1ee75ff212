"""Equivariant localization on smooth complete toric varieties.

For a one-parameter subgroup ``lam`` every maximal cone contributes a fixed
point whose tangent weights are ``<u_i, lam>`` (``u_i`` the dual basis of the
cone).  Chern-Todd numbers are sums over fixed points of
``c^d * Td_l(w) / prod(w)`` with ``c = sum(w)`` the weight of the canonical
lift to the anticanonical bundle.

Coefficients that depend linearly on ``lam`` are recovered exactly by
evaluating at a few generic rational points and solving a linear system;
surplus points are used as checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Mapping, Sequence

from .errors import ConsistencyError, InputError
from .exact_math import AffineForm, QMatrix, bernoulli_plus, dot_forms, solve
from .toric_fan import MaximalCone, dual_basis

__all__ = [
    "OnePSSpec",
    "FixedPointData",
    "SamplePlan",
    "resolve_lambda",
    "tangent_weights",
    "make_sample_plan",
    "todd_series",
    "todd_eval",
    "residue_sum",
    "compute_a",
    "compute_b",
    "fit_affine",
]

Point = Mapping[str, Fraction]


@dataclass(frozen=True)
class OnePSSpec:
    """A one-parameter subgroup, given explicitly or through a reference chart.

    ``params`` is the declared parameter universe.  For a chart spec,
    ``chart`` lists 0-based vertex indices of a maximal cone and the i-th
    chart coordinate gets weight ``params[i]``.
    """

    params: tuple[str, ...]
    explicit: tuple[AffineForm, ...] | None = None
    chart: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise InputError("parameter names must be distinct")
        if (self.explicit is None) == (self.chart is None):
            raise InputError("give exactly one of an explicit lambda or a chart")
        if self.explicit is not None:
            object.__setattr__(self, "explicit", tuple(self.explicit))
            for f in self.explicit:
                f.check_params(self.params)
        else:
            object.__setattr__(self, "chart", tuple(self.chart))
            if len(self.chart) != len(self.params):
                raise InputError(
                    f"chart has {len(self.chart)} generators but {len(self.params)} parameters"
                )


def resolve_lambda(spec: OnePSSpec, cones: Sequence[MaximalCone], vertices) -> tuple[AffineForm, ...]:
    """Coordinates of ``lam`` as affine forms in the declared parameters.

    For a chart spec ``lam = sum_j p_j v_{r_j}``, so the chart coordinate dual
    to ``v_{r_j}`` carries exactly the weight ``p_j``.
    """
    if spec.explicit is not None:
        n = len(vertices[0])
        if len(spec.explicit) != n:
            raise InputError(f"lambda has {len(spec.explicit)} entries, expected {n}")
        return spec.explicit
    key = tuple(sorted(spec.chart))
    cone = next((c for c in cones if c.vertex_indices == key), None)
    if cone is None:
        raise InputError(
            "chart {" + ",".join(f"v{i + 1}" for i in spec.chart) + "} is not a maximal cone"
        )
    dual_basis(cone)  # raises unless unimodular
    n = len(vertices[0])
    lam = [AffineForm() for _ in range(n)]
    for idx, name in zip(spec.chart, spec.params):
        for i in range(n):
            if vertices[idx][i]:
                lam[i] = lam[i] + AffineForm.var(name, vertices[idx][i])
    return tuple(lam)


@dataclass(frozen=True)
class FixedPointData:
    cone: MaximalCone
    tangent_weights: tuple[AffineForm, ...]
    line_weight: AffineForm

    def evaluate(self, point: Point) -> tuple[list[Fraction], Fraction]:
        w = [f.evaluate(point) for f in self.tangent_weights]
        return w, self.line_weight.evaluate(point)


def tangent_weights(cones: Sequence[MaximalCone], lam: Sequence[AffineForm]) -> list[FixedPointData]:
    out = []
    for c in cones:
        u = dual_basis(c)
        ws = tuple(dot_forms(u.row(i), lam) for i in range(u.rows))
        out.append(FixedPointData(c, ws, sum(ws, AffineForm())))
    return out


# ---------------------------------------------------------------------------
# Sample plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplePlan:
    """Generic evaluation points: ``samples`` feed the solves, ``checks`` verify."""

    params: tuple[str, ...]
    samples: tuple[Mapping[str, Fraction], ...]
    checks: tuple[Mapping[str, Fraction], ...] = ()

    @property
    def all_points(self) -> tuple[Mapping[str, Fraction], ...]:
        return self.samples + self.checks


def is_generic(fixed_points: Sequence[FixedPointData], point: Point) -> bool:
    return all(f.evaluate(point) != 0 for fp in fixed_points for f in fp.tangent_weights)


def make_sample_plan(
    fixed_points: Sequence[FixedPointData],
    params: Sequence[str],
    count: int,
    seed: int = 0,
    *,
    radius: int = 12,
    max_draws: int = 10_000,
) -> SamplePlan:
    """Draw ``count`` generic small-integer points from a seeded generator.

    The first ``len(params) + 1`` points are affinely independent and become
    ``samples``; the rest are ``checks``.
    """
    params = tuple(params)
    m = len(params)
    if count < m + 2:
        raise InputError(f"need at least {m + 2} samples for {m} parameters, got {count}")
    for fp in fixed_points:
        if any(w.is_zero() for w in fp.tangent_weights):
            raise InputError(
                f"degenerate one-parameter subgroup: a tangent weight at {fp.cone.label()} "
                "vanishes identically"
            )
    rng = random.Random(seed)
    samples: list[dict[str, Fraction]] = []
    checks: list[dict[str, Fraction]] = []
    basis: list[list[Fraction]] = []  # echelon rows of [1, p...]
    draws = 0
    while len(samples) + len(checks) < count:
        draws += 1
        if draws > max_draws:
            raise ConsistencyError(f"could not find {count} generic samples in {max_draws} draws")
        point = {p: Fraction(rng.randint(-radius, radius)) for p in params}
        if not is_generic(fixed_points, point):
            continue
        if len(samples) <= m:
            row = [Fraction(1)] + [point[p] for p in params]
            reduced = _reduce(row, basis)
            if reduced is None:
                continue
            basis.append(reduced)
            samples.append(point)
        else:
            checks.append(point)
    return SamplePlan(params, tuple(samples), tuple(checks))


def _reduce(row: list[Fraction], basis: list[list[Fraction]]) -> list[Fraction] | None:
    row = list(row)
    for b in basis:
        piv = next(i for i, x in enumerate(b) if x != 0)
        if row[piv]:
            f = row[piv] / b[piv]
            row = [x - f * y for x, y in zip(row, b)]
    return row if any(row) else None


# ---------------------------------------------------------------------------
# Todd polynomials and residue sums
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _todd_coefficients(degree: int) -> tuple[Fraction, ...]:
    return tuple(b / factorial(k) for k, b in enumerate(bernoulli_plus(degree)))


@lru_cache(maxsize=1 << 16)
def todd_series(weights: tuple[Fraction, ...], degree: int) -> tuple[Fraction, ...]:
    """Coefficients 0..degree of ``prod_i S(w_i x)`` with ``S(y) = y / (1 - exp(-y))``."""
    coeffs = _todd_coefficients(degree)
    series = [Fraction(1)] + [Fraction(0)] * degree
    for w in weights:
        factor = [c * w ** k for k, c in enumerate(coeffs)]
        series = [
            sum((series[i] * factor[k - i] for i in range(k + 1)), Fraction(0))
            for k in range(degree + 1)
        ]
    return tuple(series)


def todd_eval(weights: Sequence[Fraction], ell: int) -> Fraction:
    """Td_ell evaluated on the diagonal endomorphism with the given eigenvalues."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    w = tuple(Fraction(x) for x in weights)
    return todd_series(w, max(ell, len(w) + 1))[ell]


@lru_cache(maxsize=1 << 14)
def _evaluated(fp: "FixedPointData", point: tuple[tuple[str, Fraction], ...]):
    w, c = fp.evaluate(dict(point))
    return tuple(w), c, prod(w)


def _point_key(point: Point) -> tuple[tuple[str, Fraction], ...]:
    return tuple(sorted((k, Fraction(v)) for k, v in point.items()))


def residue_sum(
    fixed_points: Sequence[FixedPointData], sample: Point, c1_power: int, todd_degree: int
) -> Fraction:
    """``sum_q c(q)^d * Td_l(w(q)) / prod w(q)`` at one generic point."""
    key = _point_key(sample)
    total = Fraction(0)
    for fp in fixed_points:
        w, c, den = _evaluated(fp, key)
        if den == 0:
            raise InputError(f"sample is not generic at fixed point {fp.cone.label()}")
        total += c ** c1_power * todd_eval(w, todd_degree) / den
    return total


def compute_a(fixed_points: Sequence[FixedPointData], n: int, ell: int, plan: SamplePlan) -> Fraction:
    """``a_ell`` of the Hilbert polynomial of the anticanonical bundle.

    A Chern number, so every sample must give the same value.
    """
    if not 0 <= ell <= n:
        raise ValueError("ell out of range")
    values = {residue_sum(fixed_points, s, n - ell, ell) for s in plan.all_points}
    if len(values) != 1:
        raise ConsistencyError(f"a_{ell} depends on the sample: {sorted(values)}")
    return values.pop() / factorial(n - ell)


def fit_affine(
    params: Sequence[str],
    samples: Sequence[Point],
    values: Sequence[Fraction],
    *,
    homogeneous: bool,
    checks: Sequence[tuple[Point, Fraction]] = (),
    what: str = "value",
) -> AffineForm:
    """Exact affine (or linear) interpolation, verified on every supplied point."""
    params = tuple(params)
    rows = [([] if homogeneous else [Fraction(1)]) + [s[p] for p in params] for s in samples]
    m = len(rows[0]) if rows else 0
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    for i, r in enumerate(rows):
        red = _reduce(r, basis)
        if red is not None:
            basis.append(red)
            chosen.append(i)
        if len(chosen) == m:
            break
    if len(chosen) < m:
        raise ConsistencyError(f"samples do not determine {what}: rank {len(chosen)} < {m}")
    sol = solve(QMatrix.from_rows([rows[i] for i in chosen]), [values[i] for i in chosen])
    if homogeneous:
        form = AffineForm(Fraction(0), dict(zip(params, sol)))
    else:
        form = AffineForm(sol[0], dict(zip(params, sol[1:])))
    for s, v in list(zip(samples, values)) + list(checks):
        if form.evaluate(s) != v:
            raise ConsistencyError(f"{what} is not affine in the parameters (mismatch at {dict(s)})")
    return form


def compute_b(fixed_points: Sequence[FixedPointData], n: int, ell: int, plan: SamplePlan) -> AffineForm:
    """``b_ell`` of the total-weight polynomial, as a linear form in the parameters."""
    if not 0 <= ell <= n:
        raise ValueError("ell out of range")
    scale = factorial(n - ell + 1)
    vals = [residue_sum(fixed_points, s, n - ell + 1, ell) / scale for s in plan.samples]
    checks = [(s, residue_sum(fixed_points, s, n - ell + 1, ell) / scale) for s in plan.checks]
    if len(checks) < 1 and len(plan.samples) <= len(plan.params):
        raise InputError("sample plan has no verification points")
    return fit_affine(plan.params, plan.samples, vals, homogeneous=True, checks=checks,
                      what=f"b_{ell}")
