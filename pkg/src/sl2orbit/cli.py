"""Batch command-line front end with JSON input and output.

    sl2orbit <command> [--input FILE] [--tol X] [--tol-branch X] [--seed N] [--samples N]

The request is read from ``--input`` or standard input and validated
against ``schemas/request.schema.json``. Complex numbers are written as
``[re, im]``; tuples as ``{"n": ..., "matrices": [...], "sl2": ...}``.
Exit codes: 0 success, 1 bad input or domain error, 2 numerical failure.
"""

import argparse
import json
import sys
import time
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .core import NTuple, mnorm, random_tuple
from .errors import NumericalFailure, Sl2OrbitError
from .invariants import (
    delta,
    fingerprint,
    fingerprint_words,
    gram,
    invariant_table,
    nu,
    sigma,
    tau,
)
from . import magnus, structure

COMMANDS = (
    "tau", "nu", "sigma", "delta", "gram", "fingerprint", "invariants",
    "stability", "irreducible", "triangularize", "normal-form",
    "fix-generators", "conjugator", "magnus-forward", "magnus-invert",
    "magnus-fiber-check", "vn-forward", "vn-invert", "cs-sample", "sample",
)


class RequestError(Exception):
    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = list(path)


def load_schema(name):
    text = resources.files("sl2orbit").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


# -- (de)serialization ----------------------------------------------------------

def to_json(x):
    """Convert library values into JSON-ready structures."""
    if isinstance(x, NTuple):
        return {"n": x.n, "matrices": to_json(x.matrices), "sl2": bool(x.sl2)}
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return [to_json(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    return x


def scalar(v):
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def parse_tuple(obj, path):
    mats = [[[scalar(e) for e in row] for row in m] for m in obj["matrices"]]
    if "n" in obj and obj["n"] != len(mats):
        raise RequestError(f"n = {obj['n']} but {len(mats)} matrices given", path + ["n"])
    return NTuple(mats, obj.get("sl2"))


def _need(req, key):
    if key not in req:
        raise RequestError(f"'{key}' is required for command {req['command']}", [key])
    return req[key]


def _tuple(req, key="tuple"):
    return parse_tuple(_need(req, key), [key])


def _z(req):
    z = [scalar(v) for v in _need(req, "z")]
    if "n" in req:
        want = 4 * req["n"] - 3 if req["command"] == "vn-invert" else 3 * req["n"] - 3
        if len(z) != want:
            raise RequestError(f"z has length {len(z)}, expected {want} for n = {req['n']}", ["z"])
    return np.array(z, dtype=complex)


def _indices(req, count):
    idx = _need(req, "indices")
    if len(idx) != count:
        raise RequestError(f"expected {count} indices", ["indices"])
    return idx


def _witness(w):
    if w is None:
        return []
    return [{"kind": w.kind, "indices": list(w.indices), "value": to_json(w.value)}]


def _fiber(f):
    out = {
        "status": f.status,
        "orbits": [
            {"pattern": o.pattern, "tuple": to_json(o.tuple), "residual": o.residual}
            for o in f.orbits
        ],
        "notes": to_json(f.notes),
    }
    if f.witness is not None:
        out["witness"] = to_json(f.witness)
    return out


# -- commands ------------------------------------------------------------------

def _scalar_invariant(fn, count):
    def run(req, opt):
        A = _tuple(req)
        idx = _indices(req, count)
        return {"value": to_json(fn(A, *idx)), "indices": idx}, {}, []
    return run


def _gram(req, opt):
    G = gram(_tuple(req), *_indices(req, 3))
    return {"gram": to_json(G), "det": to_json(complex(np.linalg.det(G)))}, {}, []


def _fingerprint(req, opt):
    A = _tuple(req)
    fp = fingerprint(A)
    words = [str(w) for w in fingerprint_words(A.n)]
    return {"words": words, "values": to_json(fp.values)}, {}, []


def _invariants(req, opt):
    return to_json(invariant_table(_tuple(req))), {}, []


def _stability(req, opt):
    v = structure.is_stable(_tuple(req), opt["tol"])
    return {"stable": v.stable}, {}, _witness(v.witness)


def _irreducible(req, opt):
    v = structure.is_irreducible(_tuple(req), opt["tol"])
    return {"irreducible": v.irreducible}, {}, _witness(v.witness)


def _triangularize(req, opt):
    A = _tuple(req)
    r = structure.triangularize(A, opt["tol"])
    res = {}
    if r.triangularizable:
        from .core import conjugate_tuple

        B = conjugate_tuple(r.conjugator, A)
        res["max_lower_left"] = float(np.max(np.abs(B.matrices[:, 1, 0])))
    out = {"triangularizable": r.triangularizable, "conjugator": to_json(r.conjugator)}
    return out, res, _witness(r.witness)


def _normal_form(req, opt):
    B, g = structure.transposition_normal_form(_tuple(req), opt["tol"])
    asym = max(abs(B.matrices[i, 0, 1] - B.matrices[i, 1, 0]) for i in (0, 1))
    return {"tuple": to_json(B), "conjugator": to_json(g)}, {"asymmetry": float(asym)}, []


def _fix_generators(req, opt):
    A = _tuple(req)
    B, change = structure.fix_generators(A, opt["tol"])
    out = {
        "tuple": to_json(B),
        "moves": [list(m) for m in change.moves],
        "words": [str(w) for w in change.words(A.n)],
        "sigma12": to_json(sigma(B, 1, 2)),
        "nu1": to_json(nu(B, 1)),
    }
    return out, {}, []


def _conjugator(req, opt):
    A, B = _tuple(req), _tuple(req, "target")
    g = structure.conjugator(A, B, opt["tol"] if "tol" in req.get("options", {}) else 1e-8)
    res = {}
    if g is not None:
        res["intertwining"] = float(max(mnorm(g @ a - b @ g) for a, b in zip(A.matrices, B.matrices)))
    return {"conjugate": g is not None, "conjugator": to_json(g)}, res, []


def _magnus_forward(req, opt):
    z = magnus.forward_Tn(_tuple(req))
    return {"n": z.n, "z": to_json(z.coords)}, {}, []


def _magnus_invert(req, opt):
    f = magnus.invert_Tn(_z(req), tol_branch=opt["tol_branch"])
    res = {"max_orbit_residual": max((o.residual for o in f.orbits), default=None)}
    return _fiber(f), res, [f.notes] if f.status != magnus.NONEMPTY else []


def _fiber_check(req, opt):
    r = magnus.fiber_cross_check(_tuple(req), tol_branch=opt["tol_branch"])
    out = {"passed": r.passed, "matches": r.matches, "problems": r.problems, "fiber": _fiber(r.fiber)}
    res = {"max_orbit_residual": max((o.residual for o in r.fiber.orbits), default=None)}
    return out, res, []


def _vn_forward(req, opt):
    z = magnus.forward_That_n(_tuple(req))
    return {"n": z.n, "z": to_json(z.coords)}, {}, []


def _vn_invert(req, opt):
    f = magnus.invert_That_n(_z(req), tol_branch=opt["tol_branch"])
    res = {"max_orbit_residual": max((o.residual for o in f.orbits), default=None)}
    return _fiber(f), res, []


def _cs_sample(req, opt):
    ev = structure.culler_shalen_sample(_tuple(req), opt["samples"], opt["seed"])
    out = {
        "samples": ev.samples,
        "max_deviation": ev.max_deviation,
        "word": None if ev.word is None else str(ev.word),
        "trace": to_json(ev.trace),
        "verdict": ev.verdict,
    }
    return out, {}, []


def _sample(req, opt):
    A = random_tuple(_need(req, "n"), opt["seed"])
    return {"tuple": to_json(A)}, {}, []


HANDLERS = {
    "tau": _scalar_invariant(tau, 2),
    "nu": _scalar_invariant(nu, 1),
    "sigma": _scalar_invariant(sigma, 2),
    "delta": _scalar_invariant(delta, 3),
    "gram": _gram,
    "fingerprint": _fingerprint,
    "invariants": _invariants,
    "stability": _stability,
    "irreducible": _irreducible,
    "triangularize": _triangularize,
    "normal-form": _normal_form,
    "fix-generators": _fix_generators,
    "conjugator": _conjugator,
    "magnus-forward": _magnus_forward,
    "magnus-invert": _magnus_invert,
    "magnus-fiber-check": _fiber_check,
    "vn-forward": _vn_forward,
    "vn-invert": _vn_invert,
    "cs-sample": _cs_sample,
    "sample": _sample,
}

DEFAULT_OPTIONS = {"tol": 1e-9, "tol_branch": magnus.DEFAULT_TOL_BRANCH, "seed": 0, "samples": 200}


def validate_request(req):
    try:
        jsonschema.validate(req, load_schema("request"))
    except jsonschema.ValidationError as e:
        raise RequestError(e.message, e.absolute_path) from None


def dispatch(req):
    """Run one validated request; returns the report dictionary (without timing check)."""
    validate_request(req)
    opt = dict(DEFAULT_OPTIONS, **req.get("options", {}))
    start = time.perf_counter()
    result, residuals, witnesses = HANDLERS[req["command"]](req, opt)
    elapsed = time.perf_counter() - start
    return {
        "command": req["command"],
        "input": req,
        "result": result,
        "residuals": residuals,
        "witnesses": to_json(witnesses),
        "timing": {"seconds": elapsed},
        "version": __version__,
    }


def error_report(exc, path=()):
    return {
        "error": {"type": type(exc).__name__, "message": str(exc), "path": list(path)},
        "version": __version__,
    }


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2)


def run(req):
    """Return ``(exit_code, report)`` for a parsed request."""
    try:
        return 0, dispatch(req)
    except RequestError as e:
        return 1, error_report(e, e.path)
    except NumericalFailure as e:
        return 2, error_report(e)
    except (Sl2OrbitError, IndexError) as e:
        return 1, error_report(e)


def build_parser():
    p = argparse.ArgumentParser(prog="sl2orbit", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="request JSON file (default: standard input)")
    p.add_argument("--tol", type=float)
    p.add_argument("--tol-branch", type=float, dest="tol_branch")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.input:
            with open(args.input) as fh:
                text = fh.read()
        else:
            text = sys.stdin.read()
        req = json.loads(text) if text.strip() else {}
        if not isinstance(req, dict):
            raise RequestError("request must be a JSON object")
    except (OSError, json.JSONDecodeError, RequestError) as e:
        print(dumps(error_report(e, getattr(e, "path", []))))
        return 1
    if req.get("command", args.command) != args.command:
        print(dumps(error_report(RequestError("command does not match the request"), ["command"])))
        return 1
    req["command"] = args.command
    for key in ("tol", "tol_branch", "seed", "samples"):
        val = getattr(args, key)
        if val is not None:
            req.setdefault("options", {})[key] = val
    code, report = run(req)
    print(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
