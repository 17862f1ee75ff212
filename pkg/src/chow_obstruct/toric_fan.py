"""Face fans of Fano polytopes, smoothness, dual bases and lattice-point counts."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InputError
from .exact_math import QMatrix, bareiss_det, inverse, rank, solve

__all__ = [
    "FanoPolytope",
    "MaximalCone",
    "SmoothnessReport",
    "DualPolytope",
    "face_fan",
    "check_smooth",
    "dual_basis",
    "dual_polytope",
    "count_lattice_points",
    "count_lattice_points_brute",
]


@dataclass(frozen=True)
class FanoPolytope:
    """Lattice polytope given by its vertices, one integer vector per vertex.

    Vertex indices are 0-based in code; input documents and reports use the
    1-based labels ``v1, v2, ...``.
    """

    dim: int
    vertices: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise InputError("dimension must be positive")
        verts = tuple(tuple(int(x) for x in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        for i, v in enumerate(verts):
            if len(v) != self.dim:
                raise InputError(f"vertex v{i + 1} has length {len(v)}, expected {self.dim}")
            if math.gcd(*v) != 1:
                raise InputError(f"vertex v{i + 1} = {list(v)} is not primitive")
        if len(set(verts)) != len(verts):
            dup = next(i for i, v in enumerate(verts) if verts.index(v) != i)
            raise InputError(f"duplicate vertex v{dup + 1}")
        if len(verts) < self.dim + 1 or rank(verts) < self.dim:
            raise InputError("degenerate input: vertices do not span the ambient space")


@dataclass(frozen=True)
class MaximalCone:
    """Cone over one facet; corresponds to one torus-fixed point."""

    vertex_indices: tuple[int, ...]
    generators: QMatrix  # columns are the generating vertices
    normal: tuple[Fraction, ...]  # facet lies on <normal, x> = 1

    @property
    def dual(self) -> QMatrix:
        return dual_basis(self)

    def label(self) -> str:
        return "{" + ",".join(f"v{i + 1}" for i in self.vertex_indices) + "}"


def face_fan(p: FanoPolytope) -> list[MaximalCone]:
    """Enumerate the facets of ``conv(p.vertices)``; one maximal cone per facet.

    Every ``n``-subset of vertices is tested: if it is linearly independent the
    affine hyperplane ``<a, x> = 1`` through it is solved exactly, and the
    subset is accepted iff every other vertex satisfies ``<a, v> <= 1``.
    """
    n = p.dim
    verts = p.vertices
    seen: dict[tuple[Fraction, ...], MaximalCone] = {}
    for subset in itertools.combinations(range(len(verts)), n):
        rows = [list(verts[i]) for i in subset]
        if bareiss_det(rows) == 0:
            continue
        a = tuple(solve(QMatrix.from_rows(rows), [1] * n))
        values = [sum(ai * x for ai, x in zip(a, v)) for v in verts]
        if any(val > 1 for val in values):
            continue
        on_facet = tuple(i for i, val in enumerate(values) if val == 1)
        if len(on_facet) > n:
            raise InputError(
                "non-simplicial facet through "
                + ",".join(f"v{i + 1}" for i in on_facet)
            )
        if a not in seen:
            seen[a] = MaximalCone(
                subset, QMatrix.from_columns([verts[i] for i in subset]), a
            )
    cones = sorted(seen.values(), key=lambda c: c.vertex_indices)
    _check_complete(cones, n)
    return cones


def _check_complete(cones: list[MaximalCone], n: int) -> None:
    # The face fan is complete (origin strictly inside) iff every ridge
    # lies in exactly two facets.
    if not cones:
        raise InputError("origin is not in the interior of the polytope")
    ridges: dict[tuple[int, ...], int] = {}
    for c in cones:
        for r in itertools.combinations(c.vertex_indices, n - 1):
            ridges[r] = ridges.get(r, 0) + 1
    bad = [r for r, k in ridges.items() if k != 2]
    if bad:
        raise InputError(
            "origin is not in the interior of the polytope "
            f"(ridge {[f'v{i + 1}' for i in bad[0]]} lies in {ridges[bad[0]]} facet(s))"
        )


@dataclass(frozen=True)
class SmoothnessReport:
    determinants: tuple[int, ...]  # |det V| per cone, in cone order

    @property
    def smooth(self) -> bool:
        return all(d == 1 for d in self.determinants)

    @property
    def failures(self) -> list[int]:
        return [i for i, d in enumerate(self.determinants) if d != 1]


def check_smooth(cones: Sequence[MaximalCone]) -> SmoothnessReport:
    dets = []
    for c in cones:
        rows = [[int(x) for x in c.generators.row(i)] for i in range(c.generators.rows)]
        dets.append(abs(bareiss_det(rows)))
    return SmoothnessReport(tuple(dets))


@functools.lru_cache(maxsize=None)
def dual_basis(c: MaximalCone) -> QMatrix:
    """Rows ``u_1..u_n`` with ``<u_i, v_j> = delta_ij`` for the cone generators."""
    v = c.generators
    rows = [[int(x) for x in v.row(i)] for i in range(v.rows)]
    d = bareiss_det(rows)
    if d == 0:
        raise InputError(f"cone {c.label()} is singular")
    if abs(d) != 1:
        raise InputError(f"cone {c.label()} is not unimodular (|det| = {abs(d)})")
    return inverse(v)


@dataclass(frozen=True)
class DualPolytope:
    """``{u : <a_i, u> >= c_i}``; also carries its vertices when known."""

    inequalities: tuple[tuple[tuple[int, ...], int], ...]
    vertices: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.inequalities[0][0])


def dual_polytope(p: FanoPolytope, cones: Sequence[MaximalCone] | None = None) -> DualPolytope:
    """The polytope whose ``k``-th dilate's lattice points index sections of ``-kK``.

    Its vertices are ``-normal`` of each facet of ``p``.
    """
    cones = face_fan(p) if cones is None else cones
    ineq = tuple((tuple(v), -1) for v in p.vertices)
    verts = tuple(tuple(-x for x in c.normal) for c in cones)
    return DualPolytope(ineq, verts)


# ---------------------------------------------------------------------------
# Lattice point counting
# ---------------------------------------------------------------------------

def _satisfies(ineq, x) -> bool:
    return all(sum(a * xi for a, xi in zip(normal, x)) >= c for normal, c in ineq)


def _vertices_of(q: DualPolytope) -> list[tuple[Fraction, ...]]:
    if q.vertices:
        return [tuple(Fraction(x) for x in v) for v in q.vertices]
    # fall back to intersecting every n-subset of hyperplanes
    n = q.dim
    out = set()
    for sub in itertools.combinations(q.inequalities, n):
        m = QMatrix.from_rows([a for a, _ in sub])
        try:
            x = tuple(solve(m, [c for _, c in sub]))
        except ZeroDivisionError:
            continue
        if _satisfies(q.inequalities, x):
            out.add(x)
    return sorted(out)


def _check_bounded(q: DualPolytope) -> None:
    n = q.dim
    normals = [a for a, _ in q.inequalities]
    # full rank is necessary; the elimination in _projections catches the rest
    if rank(normals) < n:
        raise InputError("dual polytope is unbounded (normals do not span)")


def _projections(q: DualPolytope) -> list[tuple[list[list[int]], list[Fraction]]]:
    """Exact facet descriptions of the projections of ``q`` onto its leading coordinates.

    Entry ``j`` (1-based length ``j``) describes the projection onto the first ``j``
    coordinates as ``A x >= c``.  Built top-down by Fourier-Motzkin elimination;
    each derived inequality is tightened against the projected vertices and
    kept only if it supports a facet.
    """
    n = q.dim
    verts = _vertices_of(q)
    if not verts:
        raise InputError("dual polytope is empty")
    cur_a = [list(a) for a, _ in q.inequalities]
    cur_c = [Fraction(c) for _, c in q.inequalities]
    levels: list[tuple[list[list[int]], list[Fraction]]] = [None] * (n + 1)  # type: ignore
    levels[n] = (cur_a, cur_c)
    for j in range(n, 1, -1):
        pos = [i for i, a in enumerate(cur_a) if a[j - 1] > 0]
        neg = [i for i, a in enumerate(cur_a) if a[j - 1] < 0]
        if not pos or not neg:
            raise InputError(f"dual polytope is unbounded along coordinate {j}")
        cand: list[list[int]] = [cur_a[i][: j - 1] for i, a in enumerate(cur_a) if a[j - 1] == 0]
        for i in pos:
            for k in neg:
                ai, ak = cur_a[i], cur_a[k]
                cand.append([-ak[j - 1] * x + ai[j - 1] * y for x, y in zip(ai[: j - 1], ak[: j - 1])])
        proj = [v[: j - 1] for v in verts]
        new_a: list[list[int]] = []
        new_c: list[Fraction] = []
        seen = set()
        for a in cand:
            g = math.gcd(*a)
            if g == 0:
                continue
            a = [x // g for x in a]
            key = tuple(a)
            if key in seen:
                continue
            seen.add(key)
            vals = [sum(x * y for x, y in zip(a, v)) for v in proj]
            c = min(vals)
            tight = [list(v) + [1] for v, val in zip(proj, vals) if val == c]
            if rank(tight) < j - 1:
                continue
            new_a.append(a)
            new_c.append(c)
        cur_a, cur_c = new_a, new_c
        levels[j - 1] = (cur_a, cur_c)
    a1 = levels[1][0]
    if not any(a[0] > 0 for a in a1) or not any(a[0] < 0 for a in a1):
        raise InputError("dual polytope is unbounded along coordinate 1")
    return levels


_projection_cache: dict[DualPolytope, tuple] = {}


def _kernel_tables(q: DualPolytope):
    hit = _projection_cache.get(q)
    if hit is not None:
        return hit
    n = q.dim
    levels = _projections(q)
    rows: list[list[int]] = []
    rhs: list[int] = []
    starts = [0]
    for j in range(1, n + 1):
        a_list, c_list = levels[j]
        for a, c in zip(a_list, c_list):
            # clear the denominator so that everything is integral
            d = c.denominator
            rows.append([x * d for x in a] + [0] * (n - j))
            rhs.append(c.numerator)
        starts.append(len(rows))
    tables = (
        np.asarray(rows, dtype=np.int64),
        np.asarray(rhs, dtype=np.int64),
        np.asarray(starts, dtype=np.int64),
    )
    _projection_cache[q] = tables
    return tables


def count_lattice_points(q: DualPolytope, k: int, *, backend: str | None = None) -> int:
    """Number of integer points ``u`` with ``<a_i, u> >= k c_i`` for every inequality.

    Coordinates are fixed one at a time over their exact range on the
    projected polytope; see :mod:`chow_obstruct._kernels` for the inner loop.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    _check_bounded(q)
    a, c, starts = _kernel_tables(q)
    return _kernels.count_points(a, c, starts, int(k), backend=backend)


def count_lattice_points_brute(q: DualPolytope, k: int) -> int:
    """Bounding-box scan; only sensible in very low dimension."""
    verts = _vertices_of(q)
    n = q.dim
    lo = [math.floor(min(v[i] for v in verts) * k) for i in range(n)]
    hi = [math.ceil(max(v[i] for v in verts) * k) for i in range(n)]
    ineq = [(a, k * c) for a, c in q.inequalities]
    return sum(
        1
        for x in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi)))
        if _satisfies(ineq, x)
    )
