"""JSON model files.

A model file is a JSON object::

    {
      "dimension": 6,
      "gram": "split(3,3)",
      "eta": [[4, 5, 6, "1"]],
      "structure": {"epsilon": 1, "preset": "split-para"},
      "lattice_scale": "1"
    }

``gram`` is ``"split(k,l)"``, ``"diag(k,l)"`` or an explicit matrix of
rationals; ``eta`` lists ``[i, j, k, coefficient]`` with 1-based distinct
indices in any order (the sign of the permutation is applied).  Rationals
are integers or ``"p/q"`` strings.  ``structure`` and ``lattice_scale`` are
optional; a structure is a preset name or an explicit ``"matrix"``.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Optional

from .errors import InputError, RejectedError
from .exactlin import Fraction, Matrix, ScalarProduct, as_fraction
from .multilinear import ThreeVector
from .structures import (
    CompatibleStructure,
    complex_block,
    make_structure,
    split_para,
    standard_para_c,
)

DEFAULT_MAX_DIM = 16
_GRAM_PRESET = re.compile(r"^\s*(split|diag)\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_STRUCTURE_PRESET = re.compile(r"^\s*([a-zA-Z-]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")
_KNOWN_KEYS = {"dimension", "gram", "eta", "structure", "lattice_scale"}


def max_dim() -> int:
    raw = os.environ.get("NILFLAT_MAX_DIM", str(DEFAULT_MAX_DIM))
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"NILFLAT_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError("NILFLAT_MAX_DIM must be positive")
    return value


@dataclass(frozen=True)
class ModelFile:
    dimension: int
    g: ScalarProduct
    eta: ThreeVector
    gram_spec: Optional[str] = None
    structure: Optional[CompatibleStructure] = None
    structure_preset: Optional[str] = None
    lattice_scale: Optional[Fraction] = None


def _fail(where: str, message: str):
    raise InputError(f"{where}: {message}")


def _rational(value, where: str) -> Fraction:
    if isinstance(value, float):
        _fail(where, f"floats are not exact, write {value!r} as a \"p/q\" string")
    if isinstance(value, str) and re.search(r"/\s*0+\s*$", value):
        _fail(where, f"zero denominator in {value!r}")
    try:
        return as_fraction(value)
    except InputError as exc:
        _fail(where, str(exc))


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(where, f"expected an integer, got {value!r}")
    return value


def _matrix(value, n: int, where: str) -> Matrix:
    if not isinstance(value, list) or len(value) != n:
        _fail(where, f"expected a list of {n} rows")
    rows = []
    for r, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            _fail(f"{where}[{r}]", f"expected a row of {n} entries")
        rows.append([_rational(x, f"{where}[{r}][{c}]") for c, x in enumerate(row)])
    return Matrix(rows)


def _gram(value, n: int) -> tuple:
    if isinstance(value, str):
        m = _GRAM_PRESET.match(value)
        if not m:
            _fail("gram", f"unknown preset {value!r}; use split(k,l) or diag(k,l)")
        kind, k, l = m.group(1), int(m.group(2)), int(m.group(3))
        size = k + l
        if size != n:
            _fail("gram", f"{value} has dimension {size}, file declares {n}")
        g = ScalarProduct.split(k, l) if kind == "split" else ScalarProduct.diagonal(k, l)
        return g, f"{kind}({k},{l})"
    gram = _matrix(value, n, "gram")
    try:
        return ScalarProduct(gram), None
    except InputError as exc:
        _fail("gram", str(exc))


def _eta(value, n: int) -> ThreeVector:
    if not isinstance(value, list):
        _fail("eta", "expected a list of [i, j, k, coefficient] terms")
    seen = {}
    terms = []
    for t, term in enumerate(value):
        where = f"eta[{t}]"
        if not isinstance(term, list) or len(term) != 4:
            _fail(where, "expected [i, j, k, coefficient]")
        idx = tuple(_int(term[a], f"{where}[{a}]") for a in range(3))
        for a, i in enumerate(idx):
            if not 1 <= i <= n:
                _fail(f"{where}[{a}]", f"index {i} outside 1..{n}")
        if len(set(idx)) != 3:
            _fail(where, f"repeated index in {list(idx)}")
        key = tuple(sorted(idx))
        if key in seen:
            _fail(where, f"duplicate triple {list(key)} (already at eta[{seen[key]}])")
        seen[key] = t
        terms.append((*idx, _rational(term[3], f"{where}[3]")))
    return ThreeVector.from_terms(n, terms)


def _structure(value, n: int, g: ScalarProduct) -> tuple:
    if not isinstance(value, dict):
        _fail("structure", "expected an object with epsilon and preset or matrix")
    extra = set(value) - {"epsilon", "preset", "matrix"}
    if extra:
        _fail("structure", f"unknown keys {sorted(extra)}")
    if "epsilon" not in value:
        _fail("structure", "missing epsilon")
    eps = _int(value["epsilon"], "structure.epsilon")
    if eps not in (1, -1):
        _fail("structure.epsilon", f"must be 1 or -1, got {eps}")
    if ("preset" in value) == ("matrix" in value):
        _fail("structure", "give exactly one of preset and matrix")
    name = None
    if "preset" in value:
        raw = value["preset"]
        m = _STRUCTURE_PRESET.match(raw) if isinstance(raw, str) else None
        if not m:
            _fail("structure.preset", f"malformed preset {raw!r}")
        name, arg = m.group(1), m.group(2)
        if name in ("split-para", "standard-para-C"):
            if n % 2:
                _fail("structure.preset", f"{name} needs an even dimension")
            size = n // 2
            build = split_para if name == "split-para" else standard_para_c
            want_eps = 1
        elif name == "complex-block":
            size, build, want_eps = n, complex_block, -1
        else:
            _fail("structure.preset", f"unknown preset {name!r}")
        if arg is not None and int(arg) != size:
            _fail("structure.preset", f"{raw} does not fit dimension {n}")
        if eps != want_eps:
            _fail("structure.epsilon", f"{name} has epsilon {want_eps:+d}")
        j = build(size)
    else:
        j = _matrix(value["matrix"], n, "structure.matrix")
    try:
        return make_structure(j, g, eps), name
    except RejectedError as exc:
        _fail("structure", f"{exc} (witness {exc.witness})")


def parse_model(text: str) -> ModelFile:
    """Parse and validate a model file; errors name the offending position."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        _fail("top level", "expected a JSON object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        _fail("top level", f"unknown keys {sorted(unknown)}")
    for key in ("dimension", "gram", "eta"):
        if key not in data:
            _fail("top level", f"missing {key!r}")
    n = _int(data["dimension"], "dimension")
    limit = max_dim()
    if not 1 <= n <= limit:
        _fail("dimension", f"{n} outside 1..{limit} (NILFLAT_MAX_DIM)")
    g, gram_spec = _gram(data["gram"], n)
    eta = _eta(data["eta"], n)
    structure = preset = None
    if data.get("structure") is not None:
        structure, preset = _structure(data["structure"], n, g)
    scale = None
    if data.get("lattice_scale") is not None:
        scale = _rational(data["lattice_scale"], "lattice_scale")
        if scale <= 0:
            _fail("lattice_scale", "must be positive")
    return ModelFile(n, g, eta, gram_spec, structure, preset, scale)


def load_model(path: str) -> ModelFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_model(text)


def model_to_dict(model: ModelFile) -> dict:
    out = {
        "dimension": model.dimension,
        "gram": model.gram_spec or model.g.gram.to_strings(),
        "eta": [[i, j, k, str(c)] for (i, j, k), c in model.eta.terms],
    }
    if model.structure is not None:
        s = {"epsilon": model.structure.epsilon}
        if model.structure_preset:
            s["preset"] = model.structure_preset
        else:
            s["matrix"] = model.structure.matrix.to_strings()
        out["structure"] = s
    if model.lattice_scale is not None:
        out["lattice_scale"] = str(model.lattice_scale)
    return out


def emit_model(model: ModelFile) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


__all__ = [
    "DEFAULT_MAX_DIM",
    "ModelFile",
    "max_dim",
    "parse_model",
    "load_model",
    "model_to_dict",
    "emit_model",
]
