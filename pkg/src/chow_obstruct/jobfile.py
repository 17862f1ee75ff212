"""Parser for job documents.

A job document has up to four sections.  Blank lines and ``#`` comments are
ignored; section headers end with a colon, ``dim`` is a one-line field::

    dim = 2
    vertices:
      1 0
      0 1
      -1 -1
    ops:
      chart = 1, 2          # 1-based vertex labels of a maximal cone
      params = a, b
    options:
      seed = 0
      samples = 6
      flip_sign = false
      ehrhart_kmax = 2

Instead of ``chart`` the ``ops`` section may give ``lambda = <form>, <form>, ...``
with one affine form per coordinate, e.g. ``lambda = a, 2*b - a, 1/2 + b``.
``params`` is required either way and fixes the parameter order of all output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import InputError
from .exact_math import AffineForm
from .localization import OnePSSpec
from .toric_fan import FanoPolytope

__all__ = ["JobSpec", "parse_job", "parse_affine", "load_job", "builtin_examples"]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_]*)?\s*"
)


@dataclass(frozen=True)
class JobSpec:
    polytope: FanoPolytope
    ops: OnePSSpec
    seed: int = 0
    sample_count: int | None = None
    flip_sign: bool = False
    ehrhart_kmax: int = 2

    @property
    def params(self) -> tuple[str, ...]:
        return self.ops.params

    @property
    def samples(self) -> int:
        return self.sample_count if self.sample_count is not None else len(self.params) + 4


def parse_affine(text: str, params: tuple[str, ...] | None = None) -> AffineForm:
    """Parse ``"2*a - b/1 + 1/2"``-style linear expressions (coefficients before names)."""
    src = text.strip()
    if not src:
        raise InputError("empty affine form")
    pos = 0
    form = AffineForm()
    first = True
    while pos < len(src):
        m = _TERM.match(src, pos)
        sign, coeff, name = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (coeff is None and name is None):
            raise InputError(f"cannot parse affine form {text!r} at column {pos + 1}")
        if sign is None and not first:
            raise InputError(f"missing operator in affine form {text!r} at column {pos + 1}")
        value = Fraction(coeff) if coeff is not None else Fraction(1)
        if sign == "-":
            value = -value
        form = form + (AffineForm.var(name, value) if name else AffineForm.const(value))
        pos = m.end()
        first = False
    if params is not None:
        form.check_params(params)
    return form


def _split_list(value: str) -> list[str]:
    return [x.strip() for x in value.split(",") if x.strip()]


def _parse_int(value: str, what: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"line {lineno}: {what} must be an integer, got {value!r}") from None


def _parse_bool(value: str, lineno: int) -> bool:
    v = value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise InputError(f"line {lineno}: expected a boolean, got {value!r}")


def parse_job(document: str) -> JobSpec:
    dim: int | None = None
    vertices: list[tuple[int, ...]] = []
    vertex_lines: list[int] = []
    ops: dict[str, tuple[str, int]] = {}
    options: dict[str, tuple[str, int]] = {}
    section: str | None = None
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":") and "=" not in line:
            section = line[:-1].strip().lower()
            if section not in ("vertices", "ops", "options"):
                raise InputError(f"line {lineno}: unknown section {section!r}")
            continue
        if "=" in line:
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lower()
            if key == "dim":
                dim = _parse_int(value, "dim", lineno)
                section = None
            elif section == "ops" or key in ("chart", "params", "lambda"):
                ops[key] = (value, lineno)
            elif section == "options" or key in ("seed", "samples", "flip_sign", "ehrhart_kmax"):
                options[key] = (value, lineno)
            else:
                raise InputError(f"line {lineno}: unexpected field {key!r}")
            continue
        if section != "vertices":
            raise InputError(f"line {lineno}: unexpected content {line!r}")
        try:
            vertices.append(tuple(int(x) for x in line.split()))
        except ValueError:
            raise InputError(f"line {lineno}: vertex row must contain integers only") from None
        vertex_lines.append(lineno)

    if dim is None:
        raise InputError("missing field 'dim'")
    if not vertices:
        raise InputError("missing section 'vertices'")
    for i, (v, lineno) in enumerate(zip(vertices, vertex_lines)):
        if len(v) != dim:
            raise InputError(
                f"line {lineno}: vertex v{i + 1} has {len(v)} entries, expected {dim}"
            )
    polytope = FanoPolytope(dim, tuple(vertices))

    if "params" not in ops:
        raise InputError("ops section needs 'params'")
    params = tuple(_split_list(ops["params"][0]))
    for p in params:
        if not _NAME.match(p):
            raise InputError(f"line {ops['params'][1]}: invalid parameter name {p!r}")
    if ("chart" in ops) == ("lambda" in ops):
        raise InputError("ops section needs exactly one of 'chart' or 'lambda'")
    if "chart" in ops:
        value, lineno = ops["chart"]
        idx = [_parse_int(x.lstrip("v"), "chart index", lineno) for x in _split_list(value)]
        for i in idx:
            if not 1 <= i <= len(vertices):
                raise InputError(f"line {lineno}: chart index {i} out of range 1..{len(vertices)}")
        if len(idx) != dim:
            raise InputError(f"line {lineno}: chart needs {dim} vertices, got {len(idx)}")
        spec = OnePSSpec(params, chart=tuple(i - 1 for i in idx))
    else:
        value, lineno = ops["lambda"]
        try:
            forms = tuple(parse_affine(x, params) for x in _split_list(value))
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        if len(forms) != dim:
            raise InputError(f"line {lineno}: lambda needs {dim} entries, got {len(forms)}")
        spec = OnePSSpec(params, explicit=forms)

    kwargs = {}
    for key, (value, lineno) in options.items():
        if key == "seed":
            kwargs["seed"] = _parse_int(value, key, lineno)
        elif key == "samples":
            kwargs["sample_count"] = _parse_int(value, key, lineno)
        elif key == "flip_sign":
            kwargs["flip_sign"] = _parse_bool(value, lineno)
        elif key == "ehrhart_kmax":
            kwargs["ehrhart_kmax"] = _parse_int(value, key, lineno)
        else:
            raise InputError(f"line {lineno}: unknown option {key!r}")
    return JobSpec(polytope, spec, **kwargs)


def builtin_examples() -> list[str]:
    root = resources.files("chow_obstruct") / "data"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".job"))


def load_job(source: str | Path) -> JobSpec:
    """Read a job from a path, or from a shipped example given by bare name."""
    path = Path(source)
    if path.exists():
        return parse_job(path.read_text())
    name = str(source)
    if name in builtin_examples():
        text = (resources.files("chow_obstruct") / "data" / f"{name}.job").read_text()
        return parse_job(text)
    raise InputError(f"no such input file or shipped example: {source}")
