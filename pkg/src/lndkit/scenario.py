"""Scenario files and reports.

A scenario is a JSON object with exactly the keys ``nvars``, ``trunc_cap``,
``derivations``, ``endos``, ``gradings`` and ``tasks`` (plus an optional
``variables`` name list).  Every task is ``{"op", "args", "expect"?,
"name"?}``; argument values that name a defined derivation, endomorphism or
grading resolve to it, anything else is parsed inline.  All references are
resolved when the file is loaded, so a bad scenario fails before any task
runs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .automorphisms import (
    CONVENTION,
    PolyEndo,
    algebraicity_probe,
    compose,
    exp_derivation,
    group_commutator,
    h_operator,
)
from .certify import (
    build_model_pair,
    certify_non_algebraic,
    certify_not_locally_finite,
    kernel_lift,
)
from .derivations import Derivation, equivalent, is_lnd, krylov, lie_bracket
from .errors import LndkitError, ScenarioError
from .gradings import Grading, check_vertex_lnd, decompose_derivation, decompose_poly, weight_polytope
from .jordan import ad_conjugate, invariant_subspace, jordan_chevalley, jordan_decompose, semisimple_shift_check
from .parse import parse_poly, parse_scalar
from .poly import MultiPoly, OrdAtLeast, TruncContext, format_poly

TOP_KEYS = {"nvars", "trunc_cap", "derivations", "endos", "gradings", "tasks"}
OPTIONAL_KEYS = {"variables"}
REQUIRED = object()


@dataclass(frozen=True)
class Task:
    name: str
    op: str
    args: dict
    expect: str | None


@dataclass(frozen=True)
class Scenario:
    nvars: int
    trunc_cap: int
    derivations: dict[str, Derivation]
    endos: dict[str, PolyEndo]
    gradings: dict[str, Grading]
    tasks: tuple[Task, ...]
    variables: tuple[str, ...] | None = None
    digest: str = ""

    def poly(self, text) -> MultiPoly:
        return parse_poly(str(text), self.nvars, self.variables)

    def format(self, p: MultiPoly) -> str:
        return format_poly(p, self.variables)


# JSON rendering of results


def to_jsonable(obj: Any, names=None) -> Any:
    if isinstance(obj, MultiPoly):
        return format_poly(obj, names)
    if isinstance(obj, (Derivation, PolyEndo)):
        return obj.format(names)
    if isinstance(obj, Grading):
        return [list(r) for r in obj.weights]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, OrdAtLeast):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name), names)
                for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v, names) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, names) for v in obj]
    return obj


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(map(str, k))
    return str(k)


# argument kinds


def _derivation(sc: Scenario, v) -> Derivation:
    if isinstance(v, str) and v in sc.derivations:
        return sc.derivations[v]
    return Derivation.parse(str(v), sc.nvars, sc.variables)


def _endo(sc: Scenario, v) -> PolyEndo:
    if isinstance(v, str) and v in sc.endos:
        return sc.endos[v]
    return PolyEndo.parse(str(v), None, sc.nvars, sc.variables)


def _grading(sc: Scenario, v) -> Grading:
    if isinstance(v, str) and v in sc.gradings:
        return sc.gradings[v]
    return _make_grading(v)


def _make_grading(v) -> Grading:
    if isinstance(v, list):
        return Grading(tuple(tuple(r) for r in v))
    return Grading.parse(str(v))


def _int(sc: Scenario, v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"expected an integer, got {v!r}")
    return v


def _bool(sc: Scenario, v) -> bool:
    if not isinstance(v, bool):
        raise ScenarioError(f"expected a boolean, got {v!r}")
    return v


KINDS: dict[str, Callable] = {
    "derivation": _derivation,
    "endo": _endo,
    "grading": _grading,
    "poly": lambda sc, v: sc.poly(v),
    "polys": lambda sc, v: [sc.poly(x) for x in v],
    "int": _int,
    "bool": _bool,
    "scalar": lambda sc, v: parse_scalar(v),
    "matrix": lambda sc, v: [[parse_scalar(x) for x in row] for row in v],
}


@dataclass
class Outcome:
    verdict: str
    witness: dict = field(default_factory=dict)
    value: Any = None


def _ok(value, **extra) -> Outcome:
    return Outcome("OK", {"value": value, **extra}, value)


# operation handlers; each receives the scenario and resolved arguments


def _op_check_poly(sc, a):
    return _ok(a["poly"])


def _op_apply(sc, a):
    return _ok(a["derivation"].apply(a["poly"]))


def _op_lie_bracket(sc, a):
    return _ok(lie_bracket(a["left"], a["right"]))


def _op_is_lnd(sc, a):
    v = is_lnd(a["derivation"], a["bound"])
    return Outcome(v.status.value, dict(v.witness, bound=v.bound))


def _op_krylov(sc, a):
    ctx = TruncContext(sc.trunc_cap) if a["truncate"] else None
    r = krylov(a["derivation"], a["seed"], a["bound"], ctx)
    return Outcome(r.status.value, {"dims": r.dims, "orders": r.orders, "stabilized_at": r.stabilized_at})


def _op_equivalent(sc, a):
    v = equivalent(a["left"], a["right"], a["bound"])
    return Outcome(v.status.value, v.witness)


def _op_decompose_poly(sc, a):
    return Outcome("OK", {"components": decompose_poly(a["grading"], a["poly"])})


def _op_decompose_derivation(sc, a):
    return Outcome("OK", {"components": decompose_derivation(a["grading"], a["derivation"])})


def _op_weight_polytope(sc, a):
    p = weight_polytope(a["grading"], a["derivation"])
    return Outcome("OK", {"points": p.points, "vertices": p.vertices})


def _op_check_vertex_lnd(sc, a):
    r = check_vertex_lnd(a["grading"], a["derivation"], a["bound"])
    return Outcome(r.status, {
        "vertices": r.polytope.vertices,
        "checks": [{"weight": c.weight, "component": c.component, "verdict": c.verdict.status}
                   for c in r.checks],
    })


def _op_invariant_subspace(sc, a):
    v = invariant_subspace(a["derivation"], a["seeds"], a["bound"])
    return Outcome("OK", {"basis": v.basis, "matrix": v.matrix,
                          "contains_generators": v.contains_generators})


def _op_jordan_chevalley(sc, a):
    s, n = jordan_chevalley(a["matrix"])
    return Outcome("OK", {"semisimple": s, "nilpotent": n})


def _op_jordan_decompose(sc, a):
    p = jordan_decompose(a["derivation"], a["bound"])
    return Outcome("OK", {"semisimple": p.semisimple, "nilpotent": p.nilpotent, "dim": p.subspace.dim})


def _op_ad_conjugate(sc, a):
    return _ok(ad_conjugate(a["shift"], a["derivation"]))


def _op_semisimple_shift_check(sc, a):
    r = semisimple_shift_check(a["derivation"], a["lnd"], a["grading"], a["bound"])
    witness = {"difference": r.difference, "dims": [x.dims for x in r.reports]}
    if r.conjugation is not None:
        witness["conjugation"] = r.conjugation
    if r.note:
        witness["note"] = r.note
    return Outcome(r.status.value, witness)


def _op_exp_derivation(sc, a):
    ctx = TruncContext(sc.trunc_cap) if a["truncate"] else None
    return _ok(exp_derivation(a["derivation"], a["t"], ctx))


def _op_compose(sc, a):
    return _ok(compose(a["left"], a["right"]))


def _op_group_commutator(sc, a):
    c = group_commutator(a["left"], a["right"])
    return Outcome("IDENTITY" if c.is_identity() else "NON_IDENTITY", {"value": c}, c)


def _op_h_operator(sc, a):
    h = h_operator(a["endo"], a["poly"])
    extra = {"lhc": h.lhc()} if h else {}
    return _ok(h, **extra)


def _op_algebraicity_probe(sc, a):
    cap = a["cap"] if a["cap"] is not None else sc.trunc_cap
    r = algebraicity_probe(a["endo"], a["seed"], a["budget"], TruncContext(cap))
    return Outcome(r.status.value, {"lhc_degrees": r.lhc_degrees, "dims": r.dims,
                                    "progression_step": r.progression_step, "footnote": r.footnote})


def _op_build_model_pair(sc, a):
    m = build_model_pair(a["d"])
    return Outcome("VERIFIED" if m.valid else "FAILED",
                   {"derivation": m.derivation, "f1": m.f1, "f2": m.f2, "checks": m.checks})


def _op_kernel_lift(sc, a):
    cap = a["cap"] if a["cap"] is not None else sc.trunc_cap
    return _ok(kernel_lift(a["derivation"], a["g0"], cap))


def _op_certify_not_locally_finite(sc, a):
    s = certify_not_locally_finite(a["derivation"], a["seed"], a["K"])
    return Outcome(s.verdict.value, s.witness)


def _op_certify_non_algebraic(sc, a):
    cap = a["cap"] if a["cap"] is not None else sc.trunc_cap
    s = certify_non_algebraic(a["d"], a["budget"], cap)
    return Outcome(s.verdict.value, s.witness)


# op name -> (handler, {param: (kind, default)}, value kind for expectations)
OPS: dict[str, tuple[Callable, dict[str, tuple[str, Any]], str | None]] = {
    "check_poly": (_op_check_poly, {"poly": ("poly", REQUIRED)}, "poly"),
    "apply": (_op_apply, {"derivation": ("derivation", REQUIRED), "poly": ("poly", REQUIRED)}, "poly"),
    "lie_bracket": (_op_lie_bracket, {"left": ("derivation", REQUIRED), "right": ("derivation", REQUIRED)}, "derivation"),
    "is_lnd": (_op_is_lnd, {"derivation": ("derivation", REQUIRED), "bound": ("int", 32)}, None),
    "krylov": (_op_krylov, {"derivation": ("derivation", REQUIRED), "seed": ("poly", REQUIRED),
                            "bound": ("int", 16), "truncate": ("bool", False)}, None),
    "equivalent": (_op_equivalent, {"left": ("derivation", REQUIRED), "right": ("derivation", REQUIRED),
                                    "bound": ("int", 32)}, None),
    "decompose_poly": (_op_decompose_poly, {"grading": ("grading", REQUIRED), "poly": ("poly", REQUIRED)}, None),
    "decompose_derivation": (_op_decompose_derivation, {"grading": ("grading", REQUIRED),
                                                        "derivation": ("derivation", REQUIRED)}, None),
    "weight_polytope": (_op_weight_polytope, {"grading": ("grading", REQUIRED),
                                              "derivation": ("derivation", REQUIRED)}, None),
    "check_vertex_lnd": (_op_check_vertex_lnd, {"grading": ("grading", REQUIRED),
                                                "derivation": ("derivation", REQUIRED), "bound": ("int", 16)}, None),
    "invariant_subspace": (_op_invariant_subspace, {"derivation": ("derivation", REQUIRED),
                                                    "seeds": ("polys", None), "bound": ("int", 64)}, None),
    "jordan_chevalley": (_op_jordan_chevalley, {"matrix": ("matrix", REQUIRED)}, None),
    "jordan_decompose": (_op_jordan_decompose, {"derivation": ("derivation", REQUIRED), "bound": ("int", 64)}, None),
    "ad_conjugate": (_op_ad_conjugate, {"shift": ("derivation", REQUIRED),
                                        "derivation": ("derivation", REQUIRED)}, "derivation"),
    "semisimple_shift_check": (_op_semisimple_shift_check, {"derivation": ("derivation", REQUIRED),
                                                            "lnd": ("derivation", REQUIRED),
                                                            "grading": ("grading", None), "bound": ("int", 16)}, None),
    "exp_derivation": (_op_exp_derivation, {"derivation": ("derivation", REQUIRED), "t": ("scalar", 1),
                                            "truncate": ("bool", False)}, "endo"),
    "compose": (_op_compose, {"left": ("endo", REQUIRED), "right": ("endo", REQUIRED)}, "endo"),
    "group_commutator": (_op_group_commutator, {"left": ("endo", REQUIRED), "right": ("endo", REQUIRED)}, "endo"),
    "h_operator": (_op_h_operator, {"endo": ("endo", REQUIRED), "poly": ("poly", REQUIRED)}, "poly"),
    "algebraicity_probe": (_op_algebraicity_probe, {"endo": ("endo", REQUIRED), "seed": ("poly", REQUIRED),
                                                    "budget": ("int", 5), "cap": ("int", None)}, None),
    "build_model_pair": (_op_build_model_pair, {"d": ("int", REQUIRED)}, None),
    "kernel_lift": (_op_kernel_lift, {"derivation": ("derivation", REQUIRED), "g0": ("poly", REQUIRED),
                                      "cap": ("int", None)}, "poly"),
    "certify_not_locally_finite": (_op_certify_not_locally_finite, {"derivation": ("derivation", REQUIRED),
                                                                    "seed": ("poly", REQUIRED),
                                                                    "K": ("int", REQUIRED)}, None),
    "certify_non_algebraic": (_op_certify_non_algebraic, {"d": ("int", REQUIRED), "budget": ("int", REQUIRED),
                                                          "cap": ("int", None)}, None),
}

# verdicts that count as failures even without an expectation
FAILURE_VERDICTS = {"FAILED"}


# loading


def _require(cond: bool, message: str):
    if not cond:
        raise ScenarioError(message)


def _build_endo(sc_partial: Scenario, form, endos: dict[str, PolyEndo]) -> PolyEndo:
    sc = dataclasses.replace(sc_partial, endos=endos)
    if isinstance(form, str):
        return PolyEndo.parse(form, None, sc.nvars, sc.variables)
    _require(isinstance(form, dict), f"endomorphism must be a string or object, got {form!r}")
    if "images" in form:
        _require(set(form) <= {"images", "cap"}, f"unknown endomorphism keys {sorted(form)}")
        cap = form.get("cap")
        _require(cap is None or (isinstance(cap, int) and cap >= 1), "endomorphism cap must be a positive integer")
        return PolyEndo.parse(form["images"], cap, sc.nvars, sc.variables)
    if "exp" in form:
        _require(set(form) <= {"exp", "t", "truncate"}, f"unknown endomorphism keys {sorted(form)}")
        ctx = TruncContext(sc.trunc_cap) if form.get("truncate", False) else None
        return exp_derivation(_derivation(sc, form["exp"]), parse_scalar(form.get("t", 1)), ctx)
    if "compose" in form:
        _require(set(form) == {"compose"}, f"unknown endomorphism keys {sorted(form)}")
        parts = form["compose"]
        _require(isinstance(parts, list) and parts, "compose needs a nonempty list")
        result = _endo(sc, parts[0])
        for p in parts[1:]:
            result = compose(result, _endo(sc, p))
        return result
    raise ScenarioError(f"cannot read endomorphism {form!r}")


def _resolve_args(sc: Scenario, task: Task) -> dict:
    handler, params, _ = OPS[task.op]
    unknown = set(task.args) - set(params)
    _require(not unknown, f"task {task.name!r}: unknown arguments {sorted(unknown)}")
    out = {}
    for pname, (kind, default) in params.items():
        if pname in task.args:
            out[pname] = KINDS[kind](sc, task.args[pname])
        elif default is REQUIRED:
            raise ScenarioError(f"task {task.name!r}: missing argument {pname!r}")
        else:
            out[pname] = default
    return out


def load_scenario(source: str | bytes | Path) -> tuple[Scenario, list[dict]]:
    """Parse and validate a scenario; returns it with the resolved task arguments."""
    if isinstance(source, Path):
        source = source.read_bytes()
    raw = source.encode("utf-8") if isinstance(source, str) else source
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"not valid UTF-8 JSON: {exc}") from None
    _require(isinstance(data, dict), "scenario must be a JSON object")
    keys = set(data)
    _require(TOP_KEYS <= keys, f"missing keys {sorted(TOP_KEYS - keys)}")
    _require(keys <= TOP_KEYS | OPTIONAL_KEYS, f"unknown keys {sorted(keys - TOP_KEYS - OPTIONAL_KEYS)}")
    nvars, cap = data["nvars"], data["trunc_cap"]
    _require(isinstance(nvars, int) and not isinstance(nvars, bool) and nvars >= 1, "nvars must be a positive integer")
    _require(isinstance(cap, int) and not isinstance(cap, bool) and cap >= 2, "trunc_cap must be an integer >= 2")
    names = data.get("variables")
    if names is not None:
        _require(isinstance(names, list) and len(names) == nvars and all(isinstance(n, str) for n in names)
                 and len(set(names)) == nvars, "variables must list nvars distinct names")
        names = tuple(names)
    for key in ("derivations", "endos", "gradings"):
        _require(isinstance(data[key], dict), f"{key} must be an object")
    tasks_raw = data["tasks"]
    _require(isinstance(tasks_raw, list) and tasks_raw, "tasks must be a nonempty list")

    try:
        sc = Scenario(nvars, cap, {}, {}, {}, (), names, digest)
        derivs = {}
        for name, text in data["derivations"].items():
            _require(isinstance(text, str), f"derivation {name!r} must be a string")
            derivs[name] = Derivation.parse(text, nvars, names)
        sc = dataclasses.replace(sc, derivations=derivs)
        gradings = {}
        for name, g in data["gradings"].items():
            gradings[name] = _make_grading(g)
            _require(gradings[name].nvars == nvars, f"grading {name!r} has the wrong number of columns")
        sc = dataclasses.replace(sc, gradings=gradings)
        endos: dict[str, PolyEndo] = {}
        for name, form in data["endos"].items():
            endos[name] = _build_endo(sc, form, endos)
        sc = dataclasses.replace(sc, endos=endos)

        tasks = []
        for k, t in enumerate(tasks_raw):
            _require(isinstance(t, dict), f"task {k} must be an object")
            _require(set(t) <= {"op", "args", "expect", "name"}, f"task {k}: unknown keys {sorted(set(t) - {'op', 'args', 'expect', 'name'})}")
            _require(t.get("op") in OPS, f"task {k}: unknown op {t.get('op')!r}")
            args = t.get("args", {})
            _require(isinstance(args, dict), f"task {k}: args must be an object")
            expect = t.get("expect")
            _require(expect is None or isinstance(expect, str), f"task {k}: expect must be a string")
            tasks.append(Task(str(t.get("name", f"{k + 1}:{t['op']}")), t["op"], args, expect))
        sc = dataclasses.replace(sc, tasks=tuple(tasks))
        resolved = [_resolve_args(sc, t) for t in tasks]
    except ScenarioError:
        raise
    except LndkitError as exc:
        raise ScenarioError(str(exc)) from exc
    except (ValueError, TypeError, IndexError) as exc:
        raise ScenarioError(str(exc)) from exc
    return sc, resolved


# running


def _expectation_met(sc: Scenario, task: Task, out: Outcome) -> bool:
    if task.expect == out.verdict:
        return True
    kind = OPS[task.op][2]
    if out.value is None or kind is None:
        return False
    try:
        expected = KINDS[kind](sc, task.expect)
    except (LndkitError, ValueError):
        return False
    return expected == out.value


def run_task(sc: Scenario, task: Task, args: dict, timings: bool = False) -> dict:
    start = time.perf_counter()
    try:
        out = OPS[task.op][0](sc, args)
    except LndkitError as exc:
        out = Outcome(exc.code, {"error": str(exc)})
    micros = int((time.perf_counter() - start) * 1e6) if timings else None
    if task.expect is not None:
        passed = _expectation_met(sc, task, out)
    else:
        is_error = "error" in out.witness
        passed = not is_error and out.verdict not in FAILURE_VERDICTS
    return {
        "name": task.name,
        "op": task.op,
        "args": task.args,
        "verdict": out.verdict,
        "expect": task.expect,
        "passed": passed,
        "witness": to_jsonable(out.witness, sc.variables),
        "micros": micros,
    }


def run(sc: Scenario, resolved: list[dict], jobs: int = 1, timings: bool = False) -> dict:
    """Execute all tasks; records keep the declared order whatever ``jobs`` is."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda ta: run_task(sc, ta[0], ta[1], timings), zip(sc.tasks, resolved)))
    else:
        records = [run_task(sc, t, a, timings) for t, a in zip(sc.tasks, resolved)]
    if not all(r["passed"] for r in records):
        status = "FAILURES"
    elif any(r["verdict"] == "INCONCLUSIVE" for r in records):
        status = "PARTIAL"
    else:
        status = "ALL_VERIFIED"
    return {
        "version": __version__,
        "convention": CONVENTION,
        "scenario_digest": sc.digest,
        "tasks": records,
        "status": status,
    }


def run_scenario(path: str | Path, jobs: int = 1, timings: bool = False) -> dict:
    return run(*load_scenario(Path(path)), jobs=jobs, timings=timings)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def report_text(report: dict) -> str:
    lines = [
        f"lndkit {report['version']}  scenario {report['scenario_digest'][:12]}",
        f"convention: {report['convention']}",
        "",
    ]
    for r in report["tasks"]:
        mark = "PASS" if r["passed"] else "FAIL"
        exp = "" if r["expect"] is None else f"  (expect {r['expect']})"
        lines.append(f"[{mark}] {r['name']}: {r['op']} -> {r['verdict']}{exp}")
        value = r["witness"].get("value") if isinstance(r["witness"], dict) else None
        if value is not None:
            lines.append(f"       = {value}")
        if r["micros"] is not None:
            lines.append(f"       {r['micros']} us")
    lines += ["", f"status: {report['status']}"]
    return "\n".join(lines) + "\n"


def exit_code(report: dict) -> int:
    return 1 if report["status"] == "FAILURES" else 0
