"""TOML experiment configuration.

Example::

    [field]
    p = 3
    k = 1

    [curve]            # omit for P^1
    components = 2
    nodes = [[0, 0, 1, 0]]      # comp_a, point_a, comp_b, point_b

    [bundle]
    degrees = [1, 1]

    [divisor]
    points = [[0, 1, 1]]        # component, point, multiplicity
    jets = [[[1]], [[1]], [[1]]]  # per variable, per point, Taylor coefficients

    [equation]
    kind = "fermat"             # or "explicit" with monomials = [[[2,0,0], 1], ...]
    d = 2
    n = 2

    [run]
    extensions = 2
    budget = 1000000000
    seed = 0

A point is an element index (finite rational point), "inf", or a list of
coefficients of a monic irreducible polynomial (low degree first).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field as dc_field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .counting import EquationSpec
from .curve import ClosedPoint, CurveModel, DivisorSpec, LineBundleSpec, Node, check_divisor, is_irreducible_over
from .errors import ValidationError
from .field import FieldSpec, make_field


@dataclass
class ExperimentConfig:
    raw: dict
    field: FieldSpec | None = None
    curve: CurveModel | None = None
    bundle: LineBundleSpec | None = None
    divisor: DivisorSpec | None = None
    jets: list | None = None
    equation: EquationSpec | None = None
    extensions: int = 2
    budget: int | None = None
    seed: int = 0
    twist: int = 1
    sample: int = 0
    workers: int = 1
    sections: dict = dc_field(default_factory=dict)

    @property
    def has_experiment(self) -> bool:
        return self.curve is not None and self.bundle is not None and self.equation is not None


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValidationError(f"{what} must be an exact integer, got {x!r}")
    return x


def parse_point(F: FieldSpec, raw) -> ClosedPoint:
    if raw == "inf":
        return ClosedPoint.infinity()
    if isinstance(raw, int) and not isinstance(raw, bool):
        if not 0 <= raw < F.q:
            raise ValidationError(f"point {raw} is not an element of F_{F.q}")
        return ClosedPoint.rational(F, raw)
    if isinstance(raw, list) and raw and all(isinstance(c, int) for c in raw):
        if raw[-1] != 1:
            raise ValidationError(f"point polynomial {raw} must be monic")
        if not is_irreducible_over(F, raw):
            raise ValidationError(f"point polynomial {raw} is not irreducible")
        return ClosedPoint(tuple(raw))
    raise ValidationError(f"cannot read point {raw!r}")


def load(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config is not valid TOML: {exc}") from exc
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}") from exc
    return from_dict(raw)


def loads(text: str) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config is not valid TOML: {exc}") from exc
    return from_dict(raw)


def from_dict(raw: dict) -> ExperimentConfig:
    """Validate every section; the first failing precondition is raised."""
    cfg = ExperimentConfig(raw)
    run = raw.get("run", {})
    cfg.extensions = _int(run.get("extensions", 2), "run.extensions")
    if cfg.extensions < 1:
        raise ValidationError("run.extensions must be >= 1")
    if "budget" in run:
        cfg.budget = _int(run["budget"], "run.budget")
    cfg.seed = _int(run.get("seed", 0), "run.seed")
    cfg.twist = _int(run.get("twist", 1), "run.twist")
    cfg.sample = _int(run.get("sample", 0), "run.sample")
    cfg.workers = _int(run.get("workers", 1), "run.workers")
    for key in ("gate", "witness", "grid", "moduli"):
        if key in raw:
            cfg.sections[key] = raw[key]

    if "field" in raw:
        f = raw["field"]
        cfg.field = make_field(_int(f.get("p"), "field.p"), _int(f.get("k", 1), "field.k"))
        F = cfg.field
        if not 0 < cfg.twist < F.q:
            raise ValidationError("run.twist must be a nonzero field element")
        c = raw.get("curve", {})
        comps = _int(c.get("components", 1), "curve.components")
        nodes = []
        for nd in c.get("nodes", []):
            if len(nd) != 4:
                raise ValidationError(f"node {nd} needs [comp_a, point_a, comp_b, point_b]")
            nodes.append(Node(_int(nd[0], "node component"), parse_point(F, nd[1]),
                              _int(nd[2], "node component"), parse_point(F, nd[3])))
        cfg.curve = CurveModel(F, comps, tuple(nodes))
        if "bundle" in raw:
            degs = tuple(_int(x, "bundle degree") for x in raw["bundle"].get("degrees", []))
            if len(degs) != comps:
                raise ValidationError(f"bundle.degrees needs {comps} entries")
            cfg.bundle = LineBundleSpec(degs)
        if "divisor" in raw:
            dv = raw["divisor"]
            pts = []
            for entry in dv.get("points", []):
                if len(entry) != 3:
                    raise ValidationError(f"divisor point {entry} needs [component, point, multiplicity]")
                pts.append((_int(entry[0], "divisor component"), parse_point(F, entry[1]),
                            _int(entry[2], "multiplicity")))
            cfg.divisor = DivisorSpec(tuple(pts)) if pts else None
            if cfg.divisor is not None:
                check_divisor(cfg.curve, cfg.divisor)
            cfg.jets = dv.get("jets")
        if "equation" in raw:
            eq = raw["equation"]
            kind = eq.get("kind", "fermat")
            d = _int(eq.get("d"), "equation.d")
            n = _int(eq.get("n"), "equation.n")
            if kind == "fermat":
                cfg.equation = EquationSpec.fermat(d, n)
            else:
                monos = []
                for ex, coef in eq.get("monomials", []):
                    coef = _int(coef, "monomial coefficient")
                    if not 0 <= coef < F.q:
                        raise ValidationError(f"coefficient {coef} is not an element of F_{F.q}")
                    monos.append((tuple(ex), coef))
                cfg.equation = EquationSpec(kind, d, n + 1, tuple(monos))
        if cfg.divisor is not None and cfg.equation is not None:
            if cfg.jets is None or len(cfg.jets) != cfg.equation.n_plus_1:
                raise ValidationError("divisor.jets needs one entry per variable")
    elif any(k in raw for k in ("curve", "bundle", "divisor", "equation")):
        raise ValidationError("a [field] table is required for curve experiments")
    return cfg
