"""
Command-line interface.

Reports go to stdout as JSON, diagnostics to stderr.  Exit codes:

* 0 -- success, or an affirmative verdict (valid, minimal, distinct, converged);
* 1 -- a negative verdict;
* 2 -- invalid input (unreadable document, non-Lie bracket, bad parameters);
* 3 -- numerical failure (divergence, rationalization failure).

The default tolerance is read from the ``NILGEOM_TOL`` environment variable.
"""

import argparse
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import catalog, document
from .algebra import DEFAULT_TOL, gl_act, jacobi_residual, nilpotency_index
from .curvature import F_value, invariant_ricci, moment_map, ricci, scalar_curvature
from .errors import (
    DocumentError,
    FlowDivergence,
    NilgeomError,
    NotLieBracket,
    NotNilpotent,
    RationalizationFailed,
)
from .flow import flow_run
from .minimality import Verdict, critical_type, distinguish, soliton_test
from .structures import (
    StructureKind,
    hypercomplex_residual,
    nijenhuis_residual,
    random_structure_group_element,
    random_structure_orthogonal,
    symplectic_closed_residual,
)

log = logging.getLogger("nilgeom")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def default_tol():
    raw = os.environ.get("NILGEOM_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        log.warning("ignoring invalid NILGEOM_TOL=%r", raw)
        return DEFAULT_TOL


def _emit(args, report):
    indent = None if args.json else 2
    print(json.dumps(report, indent=indent, default=_json_default))


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _load(path):
    try:
        if path == "-":
            return document.loads(sys.stdin.read())
        return document.load(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except DocumentError as exc:
        raise InputError(f"{path}: {exc}") from None


def _structure_checks(mu, gamma):
    kind = gamma.kind
    if kind is StructureKind.SYMPLECTIC:
        return {"closedness": symplectic_closed_residual(mu, gamma)}
    if kind is StructureKind.COMPLEX:
        return {"nijenhuis": nijenhuis_residual(mu, gamma.J)}
    if kind is StructureKind.HYPERCOMPLEX:
        return {
            "nijenhuis": [nijenhuis_residual(mu, j) for j in gamma.j_maps],
            "hypercomplex": hypercomplex_residual(mu, gamma),
        }
    return {}


def cmd_validate(args):
    doc = _load(args.file)
    mu, gamma = doc.bracket, doc.structure
    jac = jacobi_residual(mu)
    try:
        index = nilpotency_index(mu, args.tol, check_jacobi=False)
    except NotNilpotent:
        index = None
    checks = _structure_checks(mu, gamma)
    residuals = [jac] + [v for x in checks.values() for v in np.atleast_1d(x)]
    ok = all(r <= args.tol for r in residuals) and index is not None
    _emit(args, {
        "dim": mu.dim,
        "structure": gamma.kind.value,
        "jacobi": jac,
        "nilpotency_index": index,
        "residuals": checks,
        "tol": args.tol,
        "valid": ok,
    })
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_ricci(args):
    doc = _load(args.file)
    mu, gamma = doc.bracket, doc.structure
    report = {
        "scal": scalar_curvature(mu),
        "ricci": ricci(mu),
        "invariant_ricci": invariant_ricci(mu, gamma),
        "moment_map": moment_map(mu),
    }
    if not mu.is_zero():
        report["F"] = F_value(mu, gamma)
    _emit(args, report)
    return EXIT_OK


def _certificate_report(mu, gamma, tol):
    cert = soliton_test(mu, gamma, tol)
    report = cert.to_dict()
    report["type"] = None
    if cert.is_minimal:
        try:
            report["type"] = str(critical_type(cert))
        except RationalizationFailed as exc:
            report["type_error"] = str(exc)
    return cert, report


def cmd_minimal(args):
    doc = _load(args.file)
    cert, report = _certificate_report(doc.bracket, doc.structure, args.tol)
    _emit(args, report)
    return EXIT_OK if cert.is_minimal else EXIT_NEGATIVE


def cmd_type(args):
    doc = _load(args.file)
    cert, report = _certificate_report(doc.bracket, doc.structure, args.tol)
    if not cert.is_minimal:
        _emit(args, {"verdict": cert.verdict.value, "type": None, "residual": cert.residual})
        return EXIT_NEGATIVE
    _emit(args, {"verdict": cert.verdict.value, "type": report["type"], "c": cert.c})
    if report["type"] is None:
        log.error("%s", report.get("type_error"))
        return EXIT_NUMERIC
    return EXIT_OK


def _perturbed(mu, gamma, scale, seed):
    g = random_structure_group_element(gamma, scale, seed)
    return gl_act(g, mu)


def cmd_flow(args):
    doc = _load(args.file)
    mu, gamma = doc.bracket, doc.structure
    if args.perturb:
        mu = _perturbed(mu, gamma, args.perturb, args.seed)
    trace = flow_run(mu, gamma, step=args.step, max_steps=args.max_steps, grad_tol=args.grad_tol,
                     certificate_tol=args.cert_tol)
    if args.out:
        trace.to_csv(args.out)
    report = {
        "converged": trace.converged,
        "steps": trace.steps,
        "time": trace.times[-1],
        "F_start": trace.f_values[0],
        "F_end": trace.f_values[-1],
        "grad_norm": trace.grad_norms[-1],
        "max_F_increase": trace.max_f_increase(),
        "max_constraint_residual": max(trace.constraint_residuals),
        "certificate": None,
        "type": None,
    }
    cert = trace.final_certificate
    if cert is not None:
        report["certificate"] = cert.to_dict()
        if cert.is_minimal:
            try:
                report["type"] = str(critical_type(cert))
            except RationalizationFailed as exc:
                report["type_error"] = str(exc)
    if args.endpoint:
        document.dump(document.document_for(trace.endpoint, gamma, doc.basis_labels,
                                            {"source": "flow endpoint"}), args.endpoint)
    _emit(args, report)
    return EXIT_OK if trace.converged else EXIT_NEGATIVE


def cmd_distinguish(args):
    a, b = _load(args.file_a), _load(args.file_b)
    if a.structure.kind is not b.structure.kind:
        _emit(args, {"verdict": "distinct", "reason": "structure kinds differ"})
        return EXIT_OK
    sep = distinguish(a.bracket, b.bracket, a.structure, tol=args.tol, normalization=args.normalization)
    _emit(args, {
        "verdict": sep.verdict,
        # an infinite difference (incomparable invariants) is reported as null
        "difference": sep.difference if np.isfinite(sep.difference) else None,
        "reason": sep.reason,
        "invariants": [inv.to_dict() for inv in sep.invariants],
    })
    return EXIT_OK if sep.verdict == "distinct" else EXIT_NEGATIVE


def _parse_params(items):
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} is not of the form key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"parameter {key!r} has non-numeric value {value!r}") from None
    return params


def cmd_catalog(args):
    if args.list or not args.name:
        entries = [
            {"name": e.name, "dim": e.dim, "structure": e.structure_kind.value,
             "params": dict(e.params), "locus": e.locus}
            for e in catalog.CATALOG.values()
        ]
        _emit(args, entries)
        return EXIT_OK
    params = _parse_params(args.param)
    try:
        mu, gamma = catalog.build(args.name, **params)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    doc = document.document_for(mu, gamma, metadata={"catalog": args.name, "params": params})
    text = document.dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_perturb(args):
    doc = _load(args.file)
    mu, gamma = doc.bracket, doc.structure
    if args.orthogonal:
        g = random_structure_orthogonal(gamma, args.seed)
    else:
        g = random_structure_group_element(gamma, args.scale, args.seed)
    new = document.document_for(gl_act(g, mu), gamma, doc.basis_labels, doc.metadata)
    text = document.dumps(new)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="numerical tolerance (default: $NILGEOM_TOL or 1e-9)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="compact single-line JSON output")

    parser = argparse.ArgumentParser(prog="nilgeom", parents=[common],
                                     description="Minimal compatible metrics on nilpotent Lie algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Jacobi, nilpotency and integrability residuals")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ricci", parents=[common], help="Ricci operator, invariant part and moment map")
    p.add_argument("file")
    p.set_defaults(func=cmd_ricci)

    p = sub.add_parser("minimal", parents=[common], help="certify a minimal compatible metric")
    p.add_argument("file")
    p.set_defaults(func=cmd_minimal)

    p = sub.add_parser("type", parents=[common], help="type of a minimal compatible metric")
    p.add_argument("file")
    p.set_defaults(func=cmd_type)

    p = sub.add_parser("flow", parents=[common], help="run the bracket flow towards a minimal metric")
    p.add_argument("file")
    p.add_argument("--step", type=float, default=2.0)
    p.add_argument("--max-steps", type=int, default=5000)
    p.add_argument("--grad-tol", type=float, default=1e-9)
    p.add_argument("--cert-tol", type=float, default=1e-6, help="tolerance for certifying the endpoint")
    p.add_argument("--perturb", type=float, default=0.0, metavar="SCALE",
                   help="start from a random structure-preserving perturbation of this size")
    p.add_argument("--out", help="write the trace as CSV (t, F, scal, grad_norm)")
    p.add_argument("--endpoint", help="write the endpoint bracket as a document")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("distinguish", parents=[common], help="separate two structures by invariants")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--normalization", choices=("scal", "ricci"), default="scal")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("catalog", parents=[common], help="emit a catalog example as a document")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("perturb", parents=[common], help="act on a document by a random structure-group element")
    p.add_argument("file")
    p.add_argument("--scale", type=float, default=0.5)
    p.add_argument("--orthogonal", action="store_true", help="use an isometry of the structure instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_perturb)
    return parser


def main(argv=None):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    propagate, log.propagate = log.propagate, False
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "tol", None) is None:
            args.tol = default_tol()
        args.seed = getattr(args, "seed", 0)
        args.json = getattr(args, "json", False)
        return _dispatch(args)
    finally:
        log.removeHandler(handler)
        log.propagate = propagate


def _dispatch(args):
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, cat, *a, **k: log.warning("%s", msg)
        try:
            return args.func(args)
        except (InputError, NotLieBracket, NotNilpotent) as exc:
            log.error("%s", exc)
            return EXIT_INPUT
        except (FlowDivergence, RationalizationFailed, np.linalg.LinAlgError) as exc:
            log.error("%s", exc)
            return EXIT_NUMERIC
        except NilgeomError as exc:
            log.error("%s", exc)
            return EXIT_NUMERIC
        except ValueError as exc:
            log.error("%s", exc)
            return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
