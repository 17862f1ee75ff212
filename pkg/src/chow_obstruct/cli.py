"""``chow-obstruct`` command line interface.

Exit codes: 0 success, 1 a requested verification failed, 2 input error,
3 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .errors import ConsistencyError, InputError
from .exact_math import AffineForm, format_rational
from .invariants import (
    InvariantReport,
    Verification,
    compute_coefficients,
    futaki,
    lift_shift_check,
    verify_bl1,
    verify_ehrhart,
    verify_theorem_main,
    verify_weighted_ehrhart,
)
from .jobfile import JobSpec, builtin_examples, load_job
from .localization import FixedPointData, SamplePlan, make_sample_plan, resolve_lambda, tangent_weights
from .toric_fan import MaximalCone, SmoothnessReport, check_smooth, dual_polytope, face_fan

SCHEMA_VERSION = 1
COMMANDS = ("fan", "weights", "invariants", "verify", "all")
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class Pipeline:
    """Lazily computed intermediate results for one job."""

    job: JobSpec
    _cache: dict[str, Any] = field(default_factory=dict)

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def cones(self) -> list[MaximalCone]:
        return self._get("cones", lambda: face_fan(self.job.polytope))

    @property
    def smoothness(self) -> SmoothnessReport:
        return self._get("smooth", lambda: check_smooth(self.cones))

    @property
    def lam(self) -> tuple[AffineForm, ...]:
        def build():
            lam = resolve_lambda(self.job.ops, self.cones, self.job.polytope.vertices)
            return tuple(-f for f in lam) if self.job.flip_sign else lam
        return self._get("lam", build)

    @property
    def fixed_points(self) -> list[FixedPointData]:
        def build():
            if not self.smoothness.smooth:
                bad = [self.cones[i].label() for i in self.smoothness.failures]
                raise InputError(f"fan is not smooth; non-unimodular cones: {', '.join(bad)}")
            return tangent_weights(self.cones, self.lam)
        return self._get("fixed", build)

    @property
    def plan(self) -> SamplePlan:
        return self._get("plan", lambda: make_sample_plan(
            self.fixed_points, self.job.params, self.job.samples, self.job.seed))

    @property
    def coefficients(self):
        n = self.job.polytope.dim
        return self._get("coeffs", lambda: compute_coefficients(self.fixed_points, n, self.plan))

    def report(self) -> InvariantReport:
        a, b = self.coefficients
        n = self.job.polytope.dim
        return InvariantReport(n, self.job.params, a, b, [futaki(a, b, l) for l in range(1, n + 1)])

    def verifications(self) -> dict[str, Verification]:
        n = self.job.polytope.dim
        a, b = self.coefficients
        q = dual_polytope(self.job.polytope, self.cones)
        rng = random.Random(self.job.seed)
        shifts = [Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(5)]
        out = {
            "bl1": verify_bl1(self.fixed_points, n, b, self.plan),
            "theorem_main": verify_theorem_main(self.fixed_points, n, a, b, self.plan),
            "lift_shift": Verification(
                "lift_shift",
                all(lift_shift_check(a, b, c) for c in shifts),
                {"shifts": [format_rational(c) for c in shifts]},
            ),
            "ehrhart": verify_ehrhart(a, q, self.job.ehrhart_kmax),
            "weighted_ehrhart": verify_weighted_ehrhart(b, q, self.lam, self.job.ehrhart_kmax),
        }
        return out


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _labels(idx: Sequence[int]) -> list[int]:
    return [i + 1 for i in idx]


def fan_section(p: Pipeline) -> dict:
    cones = p.cones
    dets = p.smoothness.determinants
    return {
        "cone_count": len(cones),
        "smooth": p.smoothness.smooth,
        "cones": [{"vertices": _labels(c.vertex_indices), "abs_det": d} for c, d in zip(cones, dets)],
    }


def weights_section(p: Pipeline) -> dict:
    order = p.job.params
    return {
        "lambda": [f.to_json(order) for f in p.lam],
        "fixed_points": [
            {
                "cone": _labels(fp.cone.vertex_indices),
                "tangent_weights": [w.to_json(order) for w in fp.tangent_weights],
                "line_weight": fp.line_weight.to_json(order),
            }
            for fp in p.fixed_points
        ],
    }


def invariants_section(p: Pipeline) -> dict:
    r = p.report()
    order = p.job.params
    return {
        "n": r.n,
        "a": [format_rational(x) for x in r.a],
        "b": [f.to_json(order) for f in r.b],
        "F": {str(l): f.to_json(order) for l, f in enumerate(r.F, start=1)},
        "donaldson_futaki": r.donaldson_futaki.to_json(order),
        "obstructed": r.obstructed,
        "weight_tail_assumed_zero": True,
        "samples": [{k: format_rational(s[k]) for k in order} for s in p.plan.samples],
        "checks": [{k: format_rational(s[k]) for k in order} for s in p.plan.checks],
    }


def build_report(p: Pipeline, command: str) -> tuple[dict, bool]:
    job = p.job
    doc: dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "input": {
            "dim": job.polytope.dim,
            "vertices": [list(v) for v in job.polytope.vertices],
            "params": list(job.params),
            "seed": job.seed,
            "samples": job.samples,
            "flip_sign": job.flip_sign,
            "ehrhart_kmax": job.ehrhart_kmax,
        },
    }
    passed = True
    if command in ("fan", "all"):
        doc["fan"] = fan_section(p)
    if command in ("weights", "all"):
        doc["weights"] = weights_section(p)
    if command in ("invariants", "all"):
        doc["invariants"] = invariants_section(p)
    if command in ("verify", "all"):
        ver = p.verifications()
        doc["verifications"] = {k: v.to_json() for k, v in ver.items()}
        passed = all(v.passed for v in ver.values())
    doc["status"] = "ok" if passed else "verification_failed"
    return doc, passed


def render_text(doc: dict) -> str:
    lines = [f"chow-obstruct {doc['command']} (schema {doc['schema']})"]
    params = doc["input"]["params"]

    def form(obj) -> str:
        return AffineForm.from_json(obj).format(params)

    if "fan" in doc:
        f = doc["fan"]
        lines.append(f"fan: {f['cone_count']} maximal cones, smooth = {f['smooth']}")
    if "weights" in doc:
        w = doc["weights"]
        lines.append("lambda = (" + ", ".join(form(x) for x in w["lambda"]) + ")")
        for fp in w["fixed_points"]:
            cone = ",".join(f"v{i}" for i in fp["cone"])
            ws = ", ".join(form(x) for x in fp["tangent_weights"])
            lines.append(f"  {{{cone}}}: [{ws}]  line weight {form(fp['line_weight'])}")
    if "invariants" in doc:
        inv = doc["invariants"]
        for l, x in enumerate(inv["a"]):
            lines.append(f"a_{l} = {x}")
        for l, x in enumerate(inv["b"]):
            lines.append(f"b_{l} = {form(x)}")
        for l, x in inv["F"].items():
            lines.append(f"F_{l} = {form(x)}")
        lines.append(f"obstructed = {inv['obstructed']}")
    if "verifications" in doc:
        for name, v in doc["verifications"].items():
            lines.append(f"[{'PASS' if v['passed'] else 'FAIL'}] {name}")
    lines.append(f"status: {doc['status']}")
    return "\n".join(lines)


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def run(job: JobSpec, command: str) -> tuple[dict, int]:
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    doc, passed = build_report(Pipeline(job), command)
    return doc, EXIT_OK if passed else EXIT_VERIFY


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chow-obstruct",
        description="Higher Futaki invariants of toric Fano manifolds by exact localization.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", required=True,
                    help="job file, or the name of a shipped example (%s)" % ", ".join(builtin_examples()))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--flip-sign", action="store_true", help="replace lambda by -lambda")
    ap.add_argument("--ehrhart-kmax", type=int)
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def _error_doc(kind: str, message: str) -> dict:
    return {"schema": SCHEMA_VERSION, "status": "error", "error": {"type": kind, "message": message}}


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        job = load_job(args.input)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.samples is not None:
            overrides["sample_count"] = args.samples
        if args.flip_sign:
            overrides["flip_sign"] = not job.flip_sign
        if args.ehrhart_kmax is not None:
            overrides["ehrhart_kmax"] = args.ehrhart_kmax
        job = replace(job, **overrides)
        doc, code = run(job, args.command)
    except InputError as exc:
        doc, code = _error_doc("input_error", str(exc)), EXIT_INPUT
    except ConsistencyError as exc:
        doc, code = _error_doc("consistency_error", str(exc)), EXIT_INTERNAL
    if args.format == "json" or "error" in doc:
        sys.stdout.write(dump_json(doc))
    else:
        sys.stdout.write(render_text(doc) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
