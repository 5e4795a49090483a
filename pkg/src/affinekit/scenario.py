"""Scenario files: JSON schema, validation, round-trip serialization.

Schema (version 1)::

    {
      "schema_version": 1,
      "name": "...",                      # optional
      "n": 2, "N": 1,
      "kinetic": {"translational": "dalembert", "internal": "af-af"},
      "inertia": {"M": 1.0, "J": [[...]], "I": ..., "A": ..., "B": ...,
                  "H": [[...]], "Lten": [[...]], "Rten": [[...]]}
          or     {"per_body": [ {...}, ... ]}        # heterogeneous bodies
      "potential": {"one_body": [...], "binary": [...], "dilatation": {...}},
      "initial": {"bodies": [{"x": [...], "phi": [[...]],
                              "p": [...], "pi": [[...]]}]}
          or     {"generate": {"scale": 0.2}}        # drawn from the run seed
      "integrator": {"method": "implicit_midpoint", "dt": 1e-3, "T": 1.0},
      "seed": 0
    }

Required keys: n, N, kinetic.translational, kinetic.internal, inertia.
Defaults: method implicit_midpoint, dt 1e-3, T 1.0, seed 0, empty potential,
generated initial state with scale 0.2.

One-body potential terms::

    {"kind": "harmonic_x", "stiffness": 1.0, "center": [0, 0]}
    {"kind": "invariant", "a": 1, "fn": {"kind": "harmonic", "stiffness": 1.0,
                                         "center": 2.0}}

Binary terms::

    {"arg": "r" | "D" | "K:a" | "Mbar:a", "fn": { ... scalar fn ... }}

Scalar fn kinds: poly (coeffs, shift), harmonic (stiffness, center),
harmonic_log (stiffness, ref), lj (epsilon, sigma).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import INTEGRATION_METHODS, PhaseState
from .errors import ParseError, ValidationError
from .kinematics import SystemConfig
from .kinetics import InertiaParams, KineticModel, MomentumState
from .potentials import (BinaryTerm, DilatationTerm, HarmonicFn, InvariantTerm,
                         LennardJonesFn, LogHarmonicFn, PolyFn, PotentialSpec,
                         TranslationalHarmonic)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    n: int
    N: int
    model: KineticModel
    params: object                      # InertiaParams or tuple of them
    potential: PotentialSpec
    initial: PhaseState | None          # None means: generate from seed
    generate_scale: float
    method: str
    dt: float
    T: float
    seed: int
    name: str = ""
    out_dir: str = ""                   # default artifact directory, CLI --out wins
    schema_version: int = SCHEMA_VERSION

    def initial_state(self) -> PhaseState:
        if self.initial is not None:
            return self.initial
        return generate_initial(self.n, self.N, self.seed, self.generate_scale)


def generate_initial(n: int, N: int, seed: int, scale: float = 0.2) -> PhaseState:
    """Deterministic random initial state near the identity configuration."""
    rng = np.random.Generator(np.random.Philox(seed))
    x = scale * rng.standard_normal((N, n))
    phi = np.stack([np.eye(n) + scale * rng.standard_normal((n, n)) for _ in range(N)])
    for K in range(N):
        while np.linalg.det(phi[K]) < 0.2:
            phi[K] = np.eye(n) + scale * rng.standard_normal((n, n))
    p = scale * rng.standard_normal((N, n))
    pi = scale * rng.standard_normal((N, n, n))
    return PhaseState(config=SystemConfig(x=x, phi=phi),
                      mom=MomentumState(p=p, pi=pi), time=0.0)


# ---------------------------------------------------------------------------
# dict -> domain objects

def _need(d: dict, key: str, path: str):
    if key not in d:
        raise ValidationError(f"missing required key {path!r}")
    return d[key]


def _scalar_fn_from_dict(d: dict, path: str):
    kind = _need(d, "kind", f"{path}.kind")
    try:
        if kind == "poly":
            return PolyFn(coeffs=tuple(float(c) for c in _need(d, "coeffs", f"{path}.coeffs")),
                          shift=float(d.get("shift", 0.0)))
        if kind == "harmonic":
            return HarmonicFn(stiffness=float(_need(d, "stiffness", f"{path}.stiffness")),
                              center=float(d.get("center", 0.0)))
        if kind == "harmonic_log":
            return LogHarmonicFn(stiffness=float(_need(d, "stiffness", f"{path}.stiffness")),
                                 ref=float(d.get("ref", 1.0)))
        if kind == "lj":
            return LennardJonesFn(epsilon=float(_need(d, "epsilon", f"{path}.epsilon")),
                                  sigma=float(_need(d, "sigma", f"{path}.sigma")))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad scalar function under {path!r}: {exc}") from exc
    raise ValidationError(f"unknown scalar function kind {kind!r} at {path!r}")


def _scalar_fn_to_dict(fn) -> dict:
    if isinstance(fn, PolyFn):
        return {"kind": "poly", "coeffs": list(fn.coeffs), "shift": fn.shift}
    if isinstance(fn, HarmonicFn):
        return {"kind": "harmonic", "stiffness": fn.stiffness, "center": fn.center}
    if isinstance(fn, LogHarmonicFn):
        return {"kind": "harmonic_log", "stiffness": fn.stiffness, "ref": fn.ref}
    if isinstance(fn, LennardJonesFn):
        return {"kind": "lj", "epsilon": fn.epsilon, "sigma": fn.sigma}
    raise TypeError(f"unknown scalar function {fn!r}")


def _potential_from_dict(d: dict | None) -> PotentialSpec:
    if not d:
        return PotentialSpec()
    one_body = []
    for i, term in enumerate(d.get("one_body", [])):
        path = f"potential.one_body[{i}]"
        kind = _need(term, "kind", f"{path}.kind")
        if kind == "harmonic_x":
            one_body.append(TranslationalHarmonic(
                stiffness=float(_need(term, "stiffness", f"{path}.stiffness")),
                center=tuple(term.get("center", ()))))
        elif kind == "invariant":
            one_body.append(InvariantTerm(
                a=int(_need(term, "a", f"{path}.a")),
                fn=_scalar_fn_from_dict(_need(term, "fn", f"{path}.fn"), f"{path}.fn")))
        else:
            raise ValidationError(f"unknown one-body term kind {kind!r} at {path!r}")
    binary = []
    for i, term in enumerate(d.get("binary", [])):
        path = f"potential.binary[{i}]"
        try:
            binary.append(BinaryTerm(
                arg=str(_need(term, "arg", f"{path}.arg")),
                fn=_scalar_fn_from_dict(_need(term, "fn", f"{path}.fn"), f"{path}.fn")))
        except ValueError as exc:
            raise ValidationError(f"{path}: {exc}") from exc
    dil = None
    if "dilatation" in d and d["dilatation"] is not None:
        dd = d["dilatation"]
        dil = DilatationTerm(kappa=float(_need(dd, "kappa", "potential.dilatation.kappa")),
                             d_ref=float(dd.get("d_ref", 1.0)))
    return PotentialSpec(one_body=tuple(one_body), binary=tuple(binary), dil=dil)


def _potential_to_dict(spec: PotentialSpec) -> dict:
    out: dict = {}
    if spec.one_body:
        terms = []
        for t in spec.one_body:
            if isinstance(t, TranslationalHarmonic):
                terms.append({"kind": "harmonic_x", "stiffness": t.stiffness,
                              "center": list(t.center)})
            else:
                terms.append({"kind": "invariant", "a": t.a,
                              "fn": _scalar_fn_to_dict(t.fn)})
        out["one_body"] = terms
    if spec.binary:
        out["binary"] = [{"arg": t.arg, "fn": _scalar_fn_to_dict(t.fn)} for t in spec.binary]
    if spec.dil is not None:
        out["dilatation"] = {"kappa": spec.dil.kappa, "d_ref": spec.dil.d_ref}
    return out


def _inertia_from_dict(d: dict, path: str = "inertia") -> InertiaParams:
    known = {"M", "J", "I", "A", "B", "H", "Lten", "Rten"}
    unknown = set(d) - known
    if unknown:
        raise ValidationError(f"unknown keys under {path!r}: {sorted(unknown)}")
    kwargs = {}
    for key in known:
        if key in d and d[key] is not None:
            val = d[key]
            kwargs[key] = np.asarray(val, dtype=float) if isinstance(val, list) else float(val)
    try:
        return InertiaParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad inertia parameters at {path!r}: {exc}") from exc


def _inertia_to_dict(p: InertiaParams) -> dict:
    out: dict = {"M": p.M}
    for key in ("I", "A", "B"):
        val = getattr(p, key)
        if val is not None:
            out[key] = val
    for key in ("J", "H", "Lten", "Rten"):
        val = getattr(p, key)
        if val is not None:
            out[key] = val.tolist()
    return out


def _initial_from_dict(d: dict | None, n: int, N: int):
    """Returns (PhaseState or None, generate_scale)."""
    if d is None:
        return None, 0.2
    if "generate" in d:
        return None, float(d["generate"].get("scale", 0.2))
    bodies = _need(d, "bodies", "initial.bodies")
    if len(bodies) != N:
        raise ValidationError(f"initial.bodies has {len(bodies)} entries, expected N = {N}")
    x = np.zeros((N, n))
    phi = np.zeros((N, n, n))
    p = np.zeros((N, n))
    pi = np.zeros((N, n, n))
    for K, b in enumerate(bodies):
        path = f"initial.bodies[{K}]"
        x[K] = np.asarray(_need(b, "x", f"{path}.x"), dtype=float)
        phi[K] = np.asarray(_need(b, "phi", f"{path}.phi"), dtype=float)
        p[K] = np.asarray(b.get("p", np.zeros(n)), dtype=float)
        pi[K] = np.asarray(b.get("pi", np.zeros((n, n))), dtype=float)
    try:
        config = SystemConfig(x=x, phi=phi)
    except ValueError as exc:
        raise ValidationError(f"bad initial state: {exc}") from exc
    return PhaseState(config=config, mom=MomentumState(p=p, pi=pi), time=0.0), 0.2


def scenario_from_dict(d: dict) -> Scenario:
    version = int(d.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version}")
    n = int(_need(d, "n", "n"))
    N = int(_need(d, "N", "N"))
    if not 1 <= n <= 4:
        raise ValidationError("n must be between 1 and 4")
    if N < 1:
        raise ValidationError("N must be at least 1")
    kin = _need(d, "kinetic", "kinetic")
    translational = _need(kin, "translational", "kinetic.translational")
    internal = _need(kin, "internal", "kinetic.internal")
    try:
        model = KineticModel(translational=translational, internal=internal)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    inertia = _need(d, "inertia", "inertia")
    if "per_body" in inertia:
        entries = inertia["per_body"]
        if len(entries) != N:
            raise ValidationError(f"inertia.per_body has {len(entries)} entries, expected N = {N}")
        params = tuple(_inertia_from_dict(e, f"inertia.per_body[{i}]")
                       for i, e in enumerate(entries))
    else:
        params = _inertia_from_dict(inertia)
    potential = _potential_from_dict(d.get("potential"))
    initial, scale = _initial_from_dict(d.get("initial"), n, N)
    integ = d.get("integrator", {})
    method = integ.get("method", "implicit_midpoint")
    if method not in INTEGRATION_METHODS:
        raise ValidationError(f"integrator.method must be one of {INTEGRATION_METHODS}")
    dt = float(integ.get("dt", 1e-3))
    T = float(integ.get("T", 1.0))
    if dt <= 0:
        raise ValidationError("integrator.dt must be positive")
    if T < 0:
        raise ValidationError("integrator.T must be non-negative")
    out_dir = str(d.get("output", {}).get("dir", "")) if isinstance(d.get("output"), dict) else ""
    return Scenario(n=n, N=N, model=model, params=params, potential=potential,
                    initial=initial, generate_scale=scale, method=method, dt=dt,
                    T=T, seed=int(d.get("seed", 0)), name=str(d.get("name", "")),
                    out_dir=out_dir, schema_version=version)


def scenario_to_dict(s: Scenario) -> dict:
    out: dict = {
        "schema_version": s.schema_version,
        "n": s.n,
        "N": s.N,
        "kinetic": {"translational": s.model.translational, "internal": s.model.internal},
        "integrator": {"method": s.method, "dt": s.dt, "T": s.T},
        "seed": s.seed,
    }
    if s.name:
        out["name"] = s.name
    if s.out_dir:
        out["output"] = {"dir": s.out_dir}
    if isinstance(s.params, InertiaParams):
        out["inertia"] = _inertia_to_dict(s.params)
    else:
        out["inertia"] = {"per_body": [_inertia_to_dict(p) for p in s.params]}
    pot = _potential_to_dict(s.potential)
    if pot:
        out["potential"] = pot
    if s.initial is None:
        out["initial"] = {"generate": {"scale": s.generate_scale}}
    else:
        out["initial"] = {"bodies": [
            {"x": s.initial.config.x[K].tolist(),
             "phi": s.initial.config.phi[K].tolist(),
             "p": s.initial.mom.p[K].tolist(),
             "pi": s.initial.mom.pi[K].tolist()}
            for K in range(s.N)
        ]}
    return out


def bundled_scenario_path(name: str):
    """Path of a scenario shipped with the package (name without .json)."""
    from importlib.resources import files

    path = files("affinekit") / "scenarios" / f"{name}.json"
    if not path.is_file():
        available = sorted(p.name[:-5] for p in (files("affinekit") / "scenarios").iterdir()
                           if p.name.endswith(".json"))
        raise FileNotFoundError(f"no bundled scenario {name!r}; available: {available}")
    return path


def parse_scenario(path) -> Scenario:
    """Load and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return scenario_from_dict(data)


def serialize_scenario(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(s), fh, indent=2, sort_keys=True)
        fh.write("\n")
