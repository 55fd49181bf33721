"""Command dispatch and deterministic JSON reports.

Every command returns a :class:`Report`: a JSON-ready dict with a
``checks`` section mapping check names to ``{"pass": bool, "witness": ...}``.
A report passes iff every check passes.  Rejections raised by the library
are rendered as failed checks carrying their witness.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConsistencyError, InputError, RejectedError
from .exactlin import Matrix, ScalarProduct, Subspace, unit, vector
from .flatgroup import (
    affine_rep,
    algebra_report,
    build_model,
    group_inverse,
    group_mul,
    translation_ideal,
)
from .generators import gen_random, random_cone_element
from .lattice import (
    LatticeBasis,
    centralizer_space,
    commutes_with_lattice,
    find_lattice,
    lattice_closed,
    quotient_report,
    right_translation_agrees,
)
from .modelfile import ModelFile, max_dim, model_to_dict
from .multilinear import ThreeVector, classify_cone
from .structures import classify_regular, derham_split, make_field, nijenhuis, npk_report

COMMANDS = (
    "check", "construct", "classify", "verify-npk", "derham",
    "lattice", "centralizer", "mul", "random-suite",
)


def jsonable(obj):
    """Fractions become ``"p/q"`` strings, tuples become lists."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, Subspace):
        return jsonable(obj.vectors())
    if isinstance(obj, Matrix):
        return obj.to_strings()
    if isinstance(obj, ThreeVector):
        return [[i, j, k, str(c)] for (i, j, k), c in obj.terms]
    return str(obj)


@dataclass
class Report:
    command: str
    data: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def check(self, name: str, ok: bool, witness=None) -> bool:
        self.checks[name] = {"pass": bool(ok), "witness": jsonable(witness)}
        return bool(ok)

    def reject(self, name: str, exc: Exception):
        witness = getattr(exc, "witness", None)
        self.checks[name] = {"pass": False, "witness": jsonable(witness), "error": str(exc)}

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def as_dict(self) -> dict:
        out = {"command": self.command, "passed": self.passed, "checks": self.checks}
        out.update(jsonable(self.data))
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


# -- sections -----------------------------------------------------------------

def _brackets(model) -> list:
    n = model.dim
    c = model.structure_constants
    return [[i + 1, j + 1, list(c[i][j])] for i in range(n) for j in range(i + 1, n)
            if any(c[i][j])]


def _random_vector(rng: random.Random, n: int) -> tuple:
    return vector(rng.randint(-3, 3) for _ in range(n))


def _cone_section(rep: Report, eta, g, structure) -> Optional[object]:
    cone = classify_cone(eta, g, structure)
    rep.data["cone"] = cone.as_dict()
    rep.check("in_cone", cone.in_cone, cone.composition_witness)
    if structure is not None:
        rep.check("anticommutes", cone.anticommutes, cone.anticommutator_witness)
    return cone


def _group_section(rep: Report, model, rng: random.Random, trials: int = 3) -> None:
    n = model.dim
    assoc = hom = True
    witness_a = witness_h = None
    for _ in range(trials):
        x, y, z = (_random_vector(rng, n) for _ in range(3))
        left = group_mul(model, group_mul(model, x, y), z)
        right = group_mul(model, x, group_mul(model, y, z))
        if left != right and assoc:
            assoc, witness_a = False, [x, y, z]
        if affine_rep(model, x) @ affine_rep(model, y) != affine_rep(model, group_mul(model, x, y)) \
                and hom:
            hom, witness_h = False, [x, y]
        if group_mul(model, x, group_inverse(model, x)) != (Fraction(0),) * n:
            rep.check("inverse", False, x)
    rep.check("associativity", assoc, witness_a)
    rep.check("affine_homomorphism", hom, witness_h)


def _algebra_section(rep: Report, eta, g) -> Optional[object]:
    try:
        model = build_model(eta, g)
    except RejectedError as exc:
        rep.reject("construct", exc)
        return None
    alg = algebra_report(model)
    rep.data["algebra"] = alg.as_dict()
    rep.data["brackets"] = _brackets(model)
    rep.check("jacobi", alg.jacobi, (alg.witness or {}).get("jacobi"))
    rep.check("biinvariant", alg.biinvariant, (alg.witness or {}).get("biinvariance"))
    rep.check("flat", alg.flat, (alg.witness or {}).get("curvature"))
    rep.check("two_step", alg.nilpotency_class is not None and alg.nilpotency_class <= 2,
              alg.nilpotency_class)
    ideal = translation_ideal(model)
    rep.data["translation_ideal"] = {"dim": ideal.dim, "basis": ideal}
    return model


def _npk_section(rep: Report, eta, g, structure) -> Optional[object]:
    try:
        fld = make_field(eta, structure, g)
    except RejectedError as exc:
        rep.reject("field", exc)
        return None
    npk = npk_report(fld)
    rep.data["npk"] = npk.as_dict()
    for name, value in npk.as_dict().items():
        if name != "strict":
            rep.check(f"npk.{name}", value)
    n = g.dim
    origin = (Fraction(0),) * n
    e = [unit(n, i) for i in range(n)]
    antisym, witness = True, None
    for i in range(n):
        for j in range(i, n):
            a = nijenhuis(fld, origin, e[i], e[j])
            b = nijenhuis(fld, origin, e[j], e[i])
            if any(x + y for x, y in zip(a, b)):
                antisym, witness = False, [i + 1, j + 1]
                break
        if not antisym:
            break
    rep.check("nijenhuis_antisymmetric", antisym, witness)
    if n >= 2:
        rep.data["nijenhuis_e1_e2_at_0"] = nijenhuis(fld, origin, e[0], e[1])
    return fld


def _regular_section(rep: Report, eta, g, structure) -> None:
    if structure.epsilon != 1:
        return
    try:
        reg = classify_regular(eta, g, structure)
    except RejectedError as exc:
        rep.reject("type", exc)
        return
    rep.data["regular"] = {"type_pq": reg.type_pq, "regular": reg.regular, "s": reg.s}


def _derham_section(rep: Report, eta, g, structure) -> None:
    try:
        split = derham_split(eta, g, structure)
    except RejectedError as exc:
        rep.reject("derham", exc)
        return
    rep.data["derham"] = {
        "l": split.l, "lprime": split.lprime, "v0": split.v0, "dim_v0": split.v0.dim,
    }
    rep.check("derham", True)


def _lattice_of(model_file: ModelFile, eta, g) -> LatticeBasis:
    if model_file.lattice_scale is not None:
        return LatticeBasis.scaled(g.dim, model_file.lattice_scale)
    return find_lattice(eta, g)


def _lattice_section(rep: Report, model, model_file: ModelFile) -> Optional[LatticeBasis]:
    lat = _lattice_of(model_file, model.eta, model.g)
    q = quotient_report(model, lat)
    rep.data["lattice"] = q
    rep.check("lattice_closed", q["closed"], lat.scale)
    return lat if q["closed"] else None


def _centralizer_section(rep: Report, model, lat: LatticeBasis, rng: random.Random) -> None:
    sol = centralizer_space(model, lat)
    n = model.dim
    samples = [unit(n, i) for i in range(n)] + [_random_vector(rng, n)]
    commute = all(commutes_with_lattice(model, lat, sol.at(v)) for v in samples)
    right = all(right_translation_agrees(model, sol.at(v)) for v in samples)
    rep.data["centralizer"] = {"dimension": sol.dimension, "linear_part": "Id - eta_v"}
    rep.check("centralizer_dimension", sol.dimension == n, sol.dimension)
    rep.check("centralizer_commutes", commute)
    rep.check("centralizer_is_right_translation", right)


# -- commands -----------------------------------------------------------------

def _need_structure(model_file: ModelFile, command: str):
    if model_file.structure is None:
        raise InputError(f"{command} needs a structure in the model file")
    return model_file.structure


def _run_model(command: str, mf: ModelFile, seed, options: dict) -> Report:
    rep = Report(command, {"input": model_to_dict(mf)})
    rng = random.Random(0 if seed is None else seed)
    eta, g, structure = mf.eta, mf.g, mf.structure
    if command == "classify":
        cone = _cone_section(rep, eta, g, structure)
        if structure is not None and cone.in_cone:
            _regular_section(rep, eta, g, structure)
        return rep
    if command == "verify-npk":
        structure = _need_structure(mf, command)
        cone = _cone_section(rep, eta, g, structure)
        if cone.in_cone and cone.anticommutes:
            _npk_section(rep, eta, g, structure)
        return rep
    if command == "derham":
        structure = _need_structure(mf, command)
        cone = _cone_section(rep, eta, g, structure)
        if cone.in_cone:
            _derham_section(rep, eta, g, structure)
        return rep
    cone = _cone_section(rep, eta, g, structure if command == "check" else None)
    if not cone.in_cone:
        return rep
    model = _algebra_section(rep, eta, g)
    if model is None:
        return rep
    if command == "construct":
        return rep
    if command == "mul":
        x, y = options.get("x"), options.get("y")
        if x is None or y is None:
            raise InputError("mul needs --x and --y")
        x, y = vector(x), vector(y)
        if len(x) != g.dim or len(y) != g.dim:
            raise InputError(f"--x and --y need {g.dim} entries")
        xy = group_mul(model, x, y)
        rep.data["product"] = {"x": x, "y": y, "xy": xy, "x_inverse": group_inverse(model, x)}
        hom = affine_rep(model, x) @ affine_rep(model, y) == affine_rep(model, xy)
        rep.check("affine_homomorphism", hom, [x, y])
        return rep
    if command == "lattice":
        _lattice_section(rep, model, mf)
        return rep
    if command == "centralizer":
        lat = _lattice_section(rep, model, mf)
        if lat is not None:
            _centralizer_section(rep, model, lat, rng)
        return rep
    # check: everything that applies
    _group_section(rep, model, rng)
    if structure is not None and cone.anticommutes:
        _npk_section(rep, eta, g, structure)
        if cone.j_invariant_support:
            _regular_section(rep, eta, g, structure)
            _derham_section(rep, eta, g, structure)
    lat = _lattice_section(rep, model, mf)
    if lat is not None:
        _centralizer_section(rep, model, lat, rng)
    return rep


# -- random suite ---------------------------------------------------------------

def default_type(signature: tuple, epsilon: int) -> tuple:
    m = signature[0]
    if epsilon == 1:
        return (m // 2, m - m // 2)
    return (m // 2, 0)


def _suite_sample(index: int, seed, signature: tuple, type_pq, epsilon) -> dict:
    rng = random.Random(f"{seed}:{index}")
    rep = Report("sample")
    if epsilon is None:
        g = ScalarProduct.split(*signature)
        eta, structure = random_cone_element(rng, g), None
    else:
        sample = gen_random(None, signature, type_pq, epsilon, rng=rng)
        eta, g, structure = sample.eta, sample.g, sample.structure
    cone = _cone_section(rep, eta, g, structure)
    if cone.in_cone:
        model = _algebra_section(rep, eta, g)
        if model is not None:
            _group_section(rep, model, rng, trials=2)
        if structure is not None and cone.anticommutes:
            fld = make_field(eta, structure, g)
            npk = npk_report(fld)
            rep.check("npk", npk.all_true(),
                      sorted(k for k, v in npk.as_dict().items() if not v and k != "strict"))
            if cone.j_invariant_support:
                _derham_section(rep, eta, g, structure)
            if epsilon == 1 and g.dim <= 10:
                rep.check("pure", cone.pure_plus or cone.pure_minus, cone.type_pq)
    failed = sorted(k for k, c in rep.checks.items() if not c["pass"])
    out = {
        "index": index,
        "eta": eta,
        "support_dim": cone.support_dim,
        "passed": not failed,
        "failed": failed,
    }
    if cone.type_pq is not None:
        out["type_pq"] = cone.type_pq
    if failed:
        out["witnesses"] = {k: rep.checks[k]["witness"] for k in failed}
    return jsonable(out)


def random_suite(seed, signature: tuple, type_pq: Optional[tuple], epsilon: Optional[int],
                 count: int) -> Report:
    """``count`` seeded samples; with ``epsilon`` they come from :func:`gen_random`,
    otherwise from random maximal isotropic subspaces of ``split(k, l)``."""
    k, l = signature
    if k < 0 or l < 0 or k + l == 0:
        raise InputError(f"bad signature {signature}")
    if k + l > max_dim():
        raise InputError(f"dimension {k + l} exceeds NILFLAT_MAX_DIM={max_dim()}")
    if count < 0:
        raise InputError("count must be non-negative")
    if epsilon is not None and type_pq is None:
        type_pq = default_type(signature, epsilon)
    rep = Report("random-suite", {
        "input": {"seed": seed, "signature": list(signature), "epsilon": epsilon,
                  "type": list(type_pq) if type_pq else None, "count": count},
    })
    samples = [_suite_sample(i, seed, signature, type_pq, epsilon) for i in range(count)]
    rep.data["samples"] = samples
    bad = [s["index"] for s in samples if not s["passed"]]
    rep.data["summary"] = {"count": count, "passed": count - len(bad)}
    rep.check("all_samples", not bad, bad or None)
    return rep


def run(command: str, model: Optional[ModelFile] = None, seed=None, **options) -> Report:
    """Dispatch ``command``; see :data:`COMMANDS`.

    Library rejections become failed checks; :class:`ConsistencyError` is
    recorded under ``internal``.
    """
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    if command == "random-suite":
        return random_suite(seed, options["signature"], options.get("type_pq"),
                            options.get("epsilon"), options.get("count", 10))
    if model is None:
        raise InputError(f"{command} needs a model file")
    try:
        return _run_model(command, model, seed, options)
    except ConsistencyError as exc:
        rep = Report(command, {"input": model_to_dict(model)})
        rep.reject("internal", exc)
        return rep


__all__ = ["COMMANDS", "Report", "jsonable", "run", "random_suite", "default_type"]
