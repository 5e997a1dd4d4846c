"""Command-line interface: ``cvp <command> ...`` writes a JSON result to stdout."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import continuum, dependence, inner, ivp, optimizer
from .errors import (
    CVPError,
    NoDependentSet,
    NoGerms,
    NotAdmissible,
    NotConverged,
    ParseError,
    TooManyPoints,
    ValidationError,
)
from .io import dumps_result, header, parse_problem, record_block, render_problem

EXIT_OK, EXIT_INVALID, EXIT_NOSOLUTION, EXIT_CAP = 0, 2, 3, 4


def _load(path):
    with open(path, "rb") as fh:
        data = fh.read()
    return data, parse_problem(data)


def _labels_of(idx, inst):
    return [inst.space.labels[i] for i in sorted(idx)]


def cmd_validate(args):
    data, inst = _load(args.file)
    out = header("validate", data, inst)
    out["valid"] = True
    out["n"] = inst.n
    return out, EXIT_OK


def cmd_solve(args):
    data, inst = _load(args.file)
    out = header("solve", data, inst)
    if args.iterative:
        rec = inner.minimize_iterative(inst)
        out["method"] = "projected-gradient"
        out["solutions"] = [record_block(rec, inst.space.labels)]
        return out, EXIT_OK if rec.converged else EXIT_NOSOLUTION
    recs = inner.minimize_exact(inst)
    out["method"] = "support-enumeration"
    out["solutions"] = [record_block(r, inst.space.labels) for r in recs]
    return out, EXIT_OK


def cmd_check(args):
    data, inst = _load(args.file)
    try:
        rho = np.array([float(x) for x in args.measure.replace(",", " ").split()])
    except ValueError:
        raise ValidationError(f"cannot parse measure {args.measure!r}") from None
    phi = inner.resolve_potential(inst)
    from .model import as_measure, el_residuals

    rho = as_measure(rho, inst.n)
    r, sup, lam = el_residuals(rho, phi, inst)
    out = header("check", data, inst)
    out["weights"] = rho
    out["residuals"] = r
    out["el_sup_residual"] = sup
    out["psd_min_eigenvalue"] = lam
    out["certified"] = inner.verify_global_minimizer(rho, phi, inst)
    return out, EXIT_OK


def cmd_admissible(args):
    data, inst = _load(args.file)
    rep = ivp.check_admissible(None, inst)
    out = header("admissible", data, inst)
    out["admissible"] = rep.admissible
    out["lrho0_max"] = rep.lrho0_max
    out["psd_min_eig"] = rep.psd_min_eig
    out["violating_point"] = None if rep.violating_index is None else inst.space.labels[rep.violating_index]
    return out, EXIT_OK if rep.admissible else EXIT_NOSOLUTION


def cmd_ivp(args):
    data, inst = _load(args.file)
    recs = ivp.solve_ivp(None, None, inst)
    out = header("ivp", data, inst)
    out["solutions"] = [record_block(r, inst.space.labels) for r in recs]
    return out, EXIT_OK if recs else EXIT_NOSOLUTION


def cmd_optimize(args):
    data, inst = _load(args.file)
    res = optimizer.optimize(args.problem, None, inst, b_scope=args.b_scope)
    out = header("optimize", data, inst)
    out["problem"] = res.problem
    out["optimum"] = res.optimum
    out["unique"] = res.unique
    out["family"] = {
        "family_dim": res.family_dim,
        "vertices": list(res.family_vertices),
        "basis": [res.family_basis[:, j] for j in range(res.family_basis.shape[1])],
    }
    out["solutions"] = [record_block(r, inst.space.labels) for r in res.solutions]
    out["notes"] = list(res.notes)
    return out, EXIT_OK


def cmd_dod(args):
    data, inst = _load(args.file)
    sets = dependence.maximal_dependent_sets(None, inst)
    out = header("dod", data, inst)
    out["maximal_dependent_sets"] = [_labels_of(S, inst) for S in sets]
    if not sets:
        raise NoDependentSet("no enclosing subset is certified dependent")
    dod = frozenset.intersection(*sets)
    out["domain_of_dependence"] = _labels_of(dod, inst)
    return out, EXIT_OK


def cmd_germs(args):
    data, inst = _load(args.file)
    germs = dependence.solution_germs(None, inst)
    out = header("germs", data, inst)
    out["germs"] = [{"subset": _labels_of(g.subset, inst), "weights": g.rho, "volume": g.volume} for g in germs]
    return out, EXIT_OK if germs else EXIT_NOSOLUTION


def cmd_maximal(args):
    data, inst = _load(args.file)
    rho = dependence.maximal_optimal_solution(None, inst)
    out = header("maximal", data, inst)
    out["weights"] = rho
    out["volume"] = float(np.sum(rho))
    return out, EXIT_OK


def cmd_discretize(args):
    inst = continuum.circle_instance(args.n, args.modified, args.phi_const)
    return render_problem(inst), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvp", description="Causal variational principle solver for finite point spaces")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    for name, fn, help_ in [
        ("validate", cmd_validate, "parse and validate a problem file"),
        ("admissible", cmd_admissible, "check admissibility of the initial data"),
        ("ivp", cmd_ivp, "solve the initial value problem for the file's potential"),
        ("dod", cmd_dod, "maximal dependent sets and the domain of dependence"),
        ("germs", cmd_germs, "solution germs"),
        ("maximal", cmd_maximal, "maximal optimal solution"),
    ]:
        add(name, fn, help_).add_argument("file")
    sp = add("solve", cmd_solve, "minimize the inner action for the file's potential")
    sp.add_argument("file")
    sp.add_argument("--iterative", action="store_true", help="projected gradient instead of enumeration")
    sp = add("check", cmd_check, "Euler-Lagrange residual report for a measure")
    sp.add_argument("file")
    sp.add_argument("--measure", required=True, help="comma-separated weights")
    sp = add("optimize", cmd_optimize, "solve an optimal-potential problem")
    sp.add_argument("file")
    sp.add_argument("--problem", required=True, choices=list("ABCD"), type=str.upper)
    sp.add_argument("--b-scope", choices=["space", "support"], default="space",
                    help="points over which problem B maximizes the potential")
    sp = add("discretize-circle", cmd_discretize, "emit a heat-kernel circle instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--modified", action="store_true")
    sp.add_argument("--phi-const", type=float, default=None)
    return p


def run_command(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        out, code = args.fn(args)
    except (ParseError, ValidationError) as exc:
        print(f"cvp: invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    except TooManyPoints as exc:
        print(f"cvp: {exc}", file=stderr)
        return EXIT_CAP
    except (NotAdmissible, NoDependentSet, NoGerms, NotConverged) as exc:
        print(f"cvp: no solution: {exc}", file=stderr)
        return EXIT_NOSOLUTION
    except OSError as exc:
        print(f"cvp: {exc}", file=stderr)
        return EXIT_INVALID
    except CVPError as exc:
        print(f"cvp: {exc}", file=stderr)
        return EXIT_INVALID
    stdout.write(out if isinstance(out, str) else dumps_result(out))
    if code == EXIT_NOSOLUTION:
        print("cvp: no solution", file=stderr)
    return code


def main(argv=None) -> None:
    sys.exit(run_command(argv))
