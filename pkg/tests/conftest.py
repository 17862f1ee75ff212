from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import pytest

from chow_obstruct.cli import Pipeline
from chow_obstruct.jobfile import load_job

PARAMS_7 = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "gamma")

NILL_PAFFENHOLZ_MATRIX = [
    [1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0],
    [0, 0, 0, -1, -1, -1, 0, 0, 0, 2, 1, -1],
]
# columns of the displayed matrix are the vertices
NILL_PAFFENHOLZ_VERTICES = [tuple(row[j] for row in NILL_PAFFENHOLZ_MATRIX) for j in range(12)]


def s_form():
    """The recurring linear form  alpha1+alpha2+alpha3 - beta1-beta2-beta3 - 2 gamma."""
    from chow_obstruct.exact_math import AffineForm

    f = AffineForm()
    for p in PARAMS_7[:3]:
        f = f + AffineForm.var(p)
    for p in PARAMS_7[3:6]:
        f = f - AffineForm.var(p)
    return f - AffineForm.var("gamma", 2)


@dataclass
class Computed:
    pipeline: Pipeline

    @property
    def job(self):
        return self.pipeline.job

    @property
    def n(self):
        return self.job.polytope.dim

    @property
    def a(self) -> list[Fraction]:
        return self.pipeline.coefficients[0]

    @property
    def b(self):
        return self.pipeline.coefficients[1]


_pipelines: dict[str, Computed] = {}


def computed(name: str) -> Computed:
    if name not in _pipelines:
        _pipelines[name] = Computed(Pipeline(load_job(name)))
    return _pipelines[name]


@pytest.fixture(scope="session")
def sevenfold() -> Computed:
    return computed("nill-paffenholz-7fold")


@pytest.fixture(scope="session", params=["cp1", "cp2", "p1xp1"])
def small(request) -> Computed:
    return computed(request.param)


@pytest.fixture(scope="session", params=["cp1", "cp2", "p1xp1", "nill-paffenholz-7fold"])
def shipped(request) -> Computed:
    return computed(request.param)


# ---------------------------------------------------------------------------
# acceptance summary
# ---------------------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
