"""Scenario files: JSON configuration for the command line tool.

Example::

    {
      "signature": [0, 3],
      "constraints": [-1, -1, 0],
      "hamiltonian": {"linear": [[0, 1, 0.5]]},
      "initial": {"omega": [1, 0, 0], "pi": [0, 1, 0]},
      "gauges": [{"kind": "zero"}, {"kind": "constant", "value": 1},
                 {"kind": "sinusoid", "amp": 1, "freq": 2}],
      "span": [0, 12.566370614359172],
      "dt": 0.001
    }

``initial`` is one of ``{"omega", "pi"}``, ``{"bivector"}`` (Lie-Poisson flow
only) or ``{"fiber"}`` (a bivector whose preimage is reconstructed).
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import Signature
from .dynamics import GaugeProfile
from .phasespace import ConstraintParams, DegenerateConstraintsError, HamiltonianSpec, PhasePoint

TOP_LEVEL = {
    "signature", "labels", "constraints", "hamiltonian", "initial", "gauges",
    "span", "dt", "projection", "output", "betas", "orbit_samples",
}
GAUGE_FIELDS = {"kind", "value", "amp", "freq", "phase"}


class ScenarioError(ValueError):
    """Invalid scenario; the message names the offending field."""


@dataclass
class Scenario:
    sig: Signature
    a: ConstraintParams
    H: HamiltonianSpec
    initial_kind: str
    initial: object
    labels: tuple = ()
    gauges: list = field(default_factory=lambda: [GaugeProfile.zero()])
    span: tuple = (0.0, 1.0)
    dt: float = 1e-3
    projection: bool = False
    output: str = "."
    betas: tuple = ()
    orbit_samples: int = 50

    @property
    def n(self):
        return self.sig.n


def _fail(path, msg):
    raise ScenarioError(f"field '{path}': {msg}")


def _vector(value, n, path):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected a list of numbers")
    if arr.shape != (n,):
        _fail(path, f"expected {n} numbers, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        _fail(path, "non-finite value")
    return arr


def _matrix(value, n, path):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected a nested list of numbers")
    if arr.shape != (n, n):
        _fail(path, f"expected a {n}x{n} matrix, got shape {arr.shape}")
    if np.max(np.abs(arr + arr.T)) > 1e-12 * max(1.0, float(np.max(np.abs(arr)))):
        _fail(path, "matrix is not antisymmetric")
    return 0.5 * (arr - arr.T)


def _gauge(entry, i):
    path = f"gauges[{i}]"
    if not isinstance(entry, dict):
        _fail(path, "expected an object")
    extra = set(entry) - GAUGE_FIELDS
    if extra:
        _fail(f"{path}.{sorted(extra)[0]}", "unknown field")
    kind = entry.get("kind", "zero")
    try:
        if kind == "zero":
            return GaugeProfile.zero()
        if kind == "constant":
            return GaugeProfile.constant(float(entry.get("value", 0.0)))
        if kind == "sinusoid":
            return GaugeProfile.sinusoid(float(entry.get("amp", 1.0)), float(entry.get("freq", 1.0)),
                                         float(entry.get("phase", 0.0)))
    except (TypeError, ValueError) as exc:
        _fail(path, str(exc))
    _fail(f"{path}.kind", f"unknown gauge kind {kind!r} (zero, constant, sinusoid)")


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    extra = set(data) - TOP_LEVEL
    if extra:
        _fail(sorted(extra)[0], "unknown field")
    for key in ("signature", "constraints", "initial"):
        if key not in data:
            _fail(key, "required field missing")

    sg = data["signature"]
    if not (isinstance(sg, (list, tuple)) and len(sg) == 2 and all(isinstance(x, int) and x >= 0 for x in sg)):
        _fail("signature", "expected [k, m] with non-negative integers")
    try:
        sig = Signature(*sg)
    except ValueError as exc:
        _fail("signature", str(exc))
    n = sig.n

    labels = data.get("labels", [str(i) for i in range(n)])
    if not (isinstance(labels, list) and len(labels) == n and all(isinstance(x, str) for x in labels)):
        _fail("labels", f"expected {n} strings")
    if len(set(labels)) != n:
        _fail("labels", "labels must be distinct")

    c = data["constraints"]
    if isinstance(c, dict):
        extra = set(c) - {"a3", "a4", "a5"}
        if extra:
            _fail(f"constraints.{sorted(extra)[0]}", "unknown field")
        c = [c.get("a3"), c.get("a4"), c.get("a5")]
    if not (isinstance(c, (list, tuple)) and len(c) == 3):
        _fail("constraints", "expected [a3, a4, a5]")
    try:
        a = ConstraintParams(*(float(x) for x in c))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DegenerateConstraintsError):
            _fail("constraints", f"degenerate constants: {exc}")
        _fail("constraints", "expected three numbers")

    h = data.get("hamiltonian", {})
    if not isinstance(h, dict):
        _fail("hamiltonian", "expected an object")
    extra = set(h) - {"linear", "scalar"}
    if extra:
        _fail(f"hamiltonian.{sorted(extra)[0]}", "unknown field")
    comps = {}
    for i, entry in enumerate(h.get("linear", [])):
        path = f"hamiltonian.linear[{i}]"
        if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
            _fail(path, "expected [mu, nu, value]")
        mu, nu, val = entry
        if not (isinstance(mu, int) and isinstance(nu, int) and 0 <= mu < n and 0 <= nu < n and mu != nu):
            _fail(path, f"indices must be distinct integers in [0, {n})")
        if not isinstance(val, (int, float)):
            _fail(path, "value must be a number")
        if mu > nu:
            mu, nu, val = nu, mu, -val
        comps[(mu, nu)] = comps.get((mu, nu), 0.0) + float(val)
    try:
        H = HamiltonianSpec.from_components(n, comps, tuple(float(x) for x in h.get("scalar", ())))
    except (TypeError, ValueError) as exc:
        _fail("hamiltonian", str(exc))

    init = data["initial"]
    if not isinstance(init, dict):
        _fail("initial", "expected an object")
    keys = set(init)
    if keys == {"omega", "pi"}:
        kind, initial = "phase", PhasePoint(_vector(init["omega"], n, "initial.omega"),
                                            _vector(init["pi"], n, "initial.pi"))
    elif keys == {"bivector"}:
        kind, initial = "bivector", _matrix(init["bivector"], n, "initial.bivector")
    elif keys == {"fiber"}:
        kind, initial = "fiber", _matrix(init["fiber"], n, "initial.fiber")
    else:
        bad = sorted(keys - {"omega", "pi", "bivector", "fiber"})
        _fail(f"initial.{bad[0]}" if bad else "initial", "expected {omega, pi}, {bivector} or {fiber}")

    gauges = [_gauge(g, i) for i, g in enumerate(data.get("gauges", [{"kind": "zero"}]))]
    if not gauges:
        _fail("gauges", "at least one gauge profile is required")

    span = data.get("span", [0.0, 1.0])
    if not (isinstance(span, (list, tuple)) and len(span) == 2):
        _fail("span", "expected [t0, t1]")
    span = (float(span[0]), float(span[1]))
    if not span[1] > span[0]:
        _fail("span", "t1 must exceed t0")
    dt = data.get("dt", 1e-3)
    if not (isinstance(dt, (int, float)) and dt > 0):
        _fail("dt", "expected a positive number")
    projection = data.get("projection", False)
    if not isinstance(projection, bool):
        _fail("projection", "expected true or false")
    output = data.get("output", ".")
    if not isinstance(output, str):
        _fail("output", "expected a directory path")
    betas = data.get("betas", [])
    if not (isinstance(betas, list) and all(isinstance(b, (int, float)) for b in betas)):
        _fail("betas", "expected a list of numbers")
    samples = data.get("orbit_samples", 50)
    if not (isinstance(samples, int) and samples > 0):
        _fail("orbit_samples", "expected a positive integer")

    return Scenario(sig, a, H, kind, initial, tuple(labels), gauges, span, float(dt), projection,
                    output, tuple(float(b) for b in betas), samples)


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file; JSON syntax errors report line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)
