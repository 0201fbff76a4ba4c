"""Command line front end.

    lpspin <command> --scenario FILE [--out DIR] [--seed N] [--dt F] [--projection on|off]

Commands: ``simulate``, ``verify``, ``fiber``, ``gauge-orbit``, ``algebra-check``.
Exit status is 0 when every contract holds, 1 on a contract violation or a
numerical error, 2 on a usage or scenario error.

Trajectory CSV columns, in order: ``tau``, ``omega_<l>`` and ``pi_<l>`` for
each label ``l``, ``J_<l1>_<l2>`` for each index pair in increasing order,
``T3``, ``T4``, ``T5``, ``casimir``.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import checks
from .algebra import basis_pairs, independent_components
from .dynamics import integrate_lie_poisson, projection_equivalence
from .fiber import (
    OffSurfaceError as FiberOffSurface,
    fiber_reconstruct,
    membership,
    planarity_certificate,
    spin_surface_point,
)
from .gauge import MULTIPLICATIVE, classify_case, finite_gauge_transform
from .phasespace import constraints_eval, map_f
from .scenario import ScenarioError, parse_scenario

SCHEMA_VERSION = 1
COMMANDS = ("simulate", "verify", "fiber", "gauge-orbit", "algebra-check")

DEVIATION_TOL = 1e-6
DRIFT_TOL = 1e-6
DRIFT_TOL_PROJECTED = 1e-10
CASIMIR_TOL = 1e-6
ROUND_TRIP_TOL = 1e-9
ORBIT_TOL = 1e-10


def _fmt(x):
    return "%.17g" % x


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_json(path, data):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _bivector_columns(labels):
    return [f"J_{labels[i]}_{labels[j]}" for i, j in basis_pairs(len(labels))]


def trajectory_header(labels):
    return (["tau"] + [f"omega_{l}" for l in labels] + [f"pi_{l}" for l in labels]
            + _bivector_columns(labels) + ["T3", "T4", "T5", "casimir"])


def trajectory_rows(traj):
    J = independent_components(traj.bivectors())
    T = traj.diagnostics["constraints"]
    cas = traj.diagnostics["casimir"]
    return np.column_stack([traj.times, traj.omega, traj.pi, J, T, cas])


def _initial_point(sc):
    """Phase point for the scenario, reconstructing it from a bivector if needed."""
    if sc.initial_kind == "phase":
        return sc.initial
    return fiber_reconstruct(spin_surface_point(sc.initial, sc.a, sc.sig), sc.sig)


def _contract(checks_, name, value, tol):
    checks_.append({"name": name, "value": float(value), "tol": tol, "passed": bool(value <= tol)})


def cmd_simulate(sc, out, seed):
    summary = {"schema_version": SCHEMA_VERSION, "command": "simulate", "seed": seed,
               "signature": [sc.sig.k, sc.sig.m], "dt": sc.dt, "span": list(sc.span),
               "projection": sc.projection}
    contracts = []
    if sc.initial_kind == "bivector":
        lp = integrate_lie_poisson(sc.initial, sc.H, sc.sig, sc.span, sc.dt)
        cas = lp.diagnostics["casimir"]
        drift = float(np.max(np.abs(cas - cas[0])))
        header = ["tau"] + _bivector_columns(sc.labels) + ["casimir"]
        _write_csv(os.path.join(out, "lie_poisson.csv"), header,
                   np.column_stack([lp.times, independent_components(lp.states), cas]))
        _contract(contracts, "casimir_drift", drift, CASIMIR_TOL)
    else:
        p0 = _initial_point(sc)
        rep = projection_equivalence(p0, sc.H, sc.a, sc.gauges, sc.span, sc.dt, sc.sig,
                                     projection=sc.projection)
        header = trajectory_header(sc.labels)
        for i, traj in enumerate(rep.canonical):
            _write_csv(os.path.join(out, f"trajectory_{i}.csv"), header, trajectory_rows(traj))
        lp = rep.lie_poisson
        _write_csv(os.path.join(out, "lie_poisson.csv"), ["tau"] + _bivector_columns(sc.labels) + ["casimir"],
                   np.column_stack([lp.times, independent_components(lp.states), lp.diagnostics["casimir"]]))
        summary.update(rep.as_dict())
        summary["initial"] = {"omega": p0.omega.tolist(), "pi": p0.pi.tolist()}
        _contract(contracts, "projection_deviation", rep.deviation, DEVIATION_TOL)
        _contract(contracts, "gauge_spread", rep.gauge_spread, DEVIATION_TOL)
        _contract(contracts, "constraint_drift", rep.constraint_drift,
                  DRIFT_TOL_PROJECTED if sc.projection else DRIFT_TOL)
        _contract(contracts, "casimir_drift", rep.casimir_drift, CASIMIR_TOL)
    summary["contracts"] = contracts
    summary["passed"] = all(c["passed"] for c in contracts)
    _write_json(os.path.join(out, "summary.json"), summary)
    return summary["passed"]


def _report(sc, seed, command, results):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "signature": [sc.sig.k, sc.sig.m],
        "checks": [r.as_dict() for r in results],
        "passed": all(r.passed for r in results),
    }


def cmd_verify(sc, out, seed):
    rng = np.random.default_rng(seed)
    report = _report(sc, seed, "verify", checks.property_suite(sc.sig, rng))
    _write_json(os.path.join(out, "report.json"), report)
    return report["passed"]


def cmd_algebra_check(sc, out, seed):
    rng = np.random.default_rng(seed)
    results = checks.check_algebra(sc.sig, rng) + [checks.check_homomorphism(sc.sig, rng, 200)]
    report = _report(sc, seed, "algebra-check", results)
    _write_json(os.path.join(out, "report.json"), report)
    return report["passed"]


def _betas(sc, multiplicative):
    if sc.betas:
        return np.array(sc.betas)
    grid = np.linspace(-1.0, 1.0, sc.orbit_samples)
    return np.exp(grid) if multiplicative else np.pi * grid


def _orbit(p, sc):
    case = classify_case(p, sc.sig)
    betas = _betas(sc, case.tag in MULTIPLICATIVE)
    return case, betas, [finite_gauge_transform(p, b, sc.sig, case) for b in betas]


def _orbit_rows(betas, orbit):
    return np.array([np.concatenate([[b], q.omega, q.pi]) for b, q in zip(betas, orbit)])


def cmd_fiber(sc, out, seed):
    J = map_f(sc.initial) if sc.initial_kind == "phase" else sc.initial
    verdict = membership(J, sc.a, sc.sig)
    if not verdict:
        raise FiberOffSurface(f"J is not on the spin surface ({verdict.reason})")
    p = fiber_reconstruct(spin_surface_point(J, sc.a, sc.sig), sc.sig)
    case, betas, orbit = _orbit(p, sc)
    contracts = []
    _contract(contracts, "round_trip", float(np.max(np.abs(map_f(p) - J))), ROUND_TRIP_TOL)
    _contract(contracts, "constraints", float(np.max(np.abs(constraints_eval(p, sc.a, sc.sig)))), ROUND_TRIP_TOL)
    _contract(contracts, "orbit_projection", max(float(np.max(np.abs(map_f(q) - J))) for q in orbit), ORBIT_TOL)
    _, planar = planarity_certificate(orbit, J)
    _contract(contracts, "planarity", planar, ROUND_TRIP_TOL)
    labels = sc.labels
    _write_csv(os.path.join(out, "fiber_orbit.csv"),
               ["beta"] + [f"omega_{l}" for l in labels] + [f"pi_{l}" for l in labels], _orbit_rows(betas, orbit))
    report = {"schema_version": SCHEMA_VERSION, "command": "fiber", "seed": seed,
              "signature": [sc.sig.k, sc.sig.m], "case": case.tag,
              "preimage": {"omega": p.omega.tolist(), "pi": p.pi.tolist()},
              "membership": {"rank": verdict.rank, "casimir_residual": verdict.casimir_residual},
              "contracts": contracts, "passed": all(c["passed"] for c in contracts)}
    _write_json(os.path.join(out, "fiber.json"), report)
    return report["passed"]


def cmd_gauge_orbit(sc, out, seed):
    p = _initial_point(sc)
    case, betas, orbit = _orbit(p, sc)
    J = map_f(p)
    inv = np.array([sc.sig.inner(p.omega, p.omega), sc.sig.inner(p.pi, p.pi), sc.sig.inner(p.omega, p.pi)])
    inv_dev = 0.0
    for q in orbit:
        inv_q = np.array([sc.sig.inner(q.omega, q.omega), sc.sig.inner(q.pi, q.pi), sc.sig.inner(q.omega, q.pi)])
        inv_dev = max(inv_dev, float(np.max(np.abs(inv_q - inv))) / max(1.0, float(np.max(np.abs(inv)))))
    # group law: composing two elements equals the element with combined parameter
    law = 0.0
    for b1, b2 in zip(betas[:-1], betas[1:]):
        q1 = finite_gauge_transform(p, b1, sc.sig, case)
        q12 = finite_gauge_transform(q1, b2, sc.sig)
        combined = b1 * b2 if case.tag in MULTIPLICATIVE else b1 + b2
        ref = finite_gauge_transform(p, combined, sc.sig, case)
        law = max(law, float(np.max(np.abs(q12.as_array() - ref.as_array()))))
    contracts = []
    _contract(contracts, "orbit_projection", max(float(np.max(np.abs(map_f(q) - J))) for q in orbit), ORBIT_TOL)
    _contract(contracts, "invariants", inv_dev, 1e-12)
    _contract(contracts, "group_law", law, ORBIT_TOL)
    labels = sc.labels
    _write_csv(os.path.join(out, "gauge_orbit.csv"),
               ["beta"] + [f"omega_{l}" for l in labels] + [f"pi_{l}" for l in labels], _orbit_rows(betas, orbit))
    report = {"schema_version": SCHEMA_VERSION, "command": "gauge-orbit", "seed": seed,
              "signature": [sc.sig.k, sc.sig.m], "case": case.tag, "sigma": case.sigma,
              "swapped": case.swapped, "contracts": contracts,
              "passed": all(c["passed"] for c in contracts)}
    _write_json(os.path.join(out, "gauge_orbit.json"), report)
    return report["passed"]


HANDLERS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "fiber": cmd_fiber,
    "gauge-orbit": cmd_gauge_orbit,
    "algebra-check": cmd_algebra_check,
}


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid step {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("dt must be positive")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="lpspin", description="so(k,m) spin dynamics through a canonical embedding")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--out", default=None, help="output directory (default: scenario 'output' or .)")
    parser.add_argument("--seed", type=_seed, default=0, help="seed for randomized checks")
    parser.add_argument("--dt", type=_positive, default=None, help="override the scenario step")
    parser.add_argument("--projection", choices=("on", "off"), default=None,
                        help="override the scenario projection flag")
    return parser


def run(command, scenario, out=".", seed=0):
    """Run one command on a parsed scenario; returns the exit status (0 or 1)."""
    os.makedirs(out, exist_ok=True)
    return 0 if HANDLERS[command](scenario, out, seed) else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sc = parse_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"lpspin: scenario error: {exc}", file=sys.stderr)
        return 2
    if args.dt is not None:
        sc.dt = args.dt
    if args.projection is not None:
        sc.projection = args.projection == "on"
    out = args.out if args.out is not None else sc.output
    try:
        status = run(args.command, sc, out, args.seed)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"lpspin: {args.command} failed for {args.scenario}: {exc}", file=sys.stderr)
        return 1
    print(f"lpspin {args.command}: {'ok' if status == 0 else 'contract violated'} (output in {out})")
    return status


if __name__ == "__main__":
    sys.exit(main())
