"""Experiment configuration: YAML text in, fully resolved :class:`ExperimentConfig` out.

Validation collects every problem it finds instead of stopping at the first,
so a broken file is reported in one pass.
"""

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .averaging import CHECKS, MIN_MC_SCALE, AveragingError, QuadratureSpec, coupling_nodes
from .measures import MeasureError, measure_from_dict
from .operators import (
    Modulation,
    OperatorConfig,
    OperatorError,
    PeriodicBackground,
    QuasiPeriodicBackground,
)
from .transforms import GridSpec, TransformError

FORMATS = ("csv", "json", "svg")
SECTIONS = ("measures", "grids", "operator", "quadrature", "mc", "checks", "spectra", "output", "seed")
MEASURE_CHECKS = {"reciprocal-ratio", "borel-hoelder", "aggregated", "dilation", "translation", "site-average"}
MC_CHECKS = {"mc-site-independence", "mc-smoothed-bound"}


class ConfigError(ValueError):
    """Raised with the complete list of violations in ``errors``."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ExperimentConfig:
    measures: dict
    grids: dict
    operator: OperatorConfig
    quadrature: QuadratureSpec
    mc: dict
    checks: list
    spectra: list
    output: dict
    seed: int
    source: dict = field(repr=False, default_factory=dict)

    def to_dict(self):
        """Canonical mapping; parsing it again yields the same mapping."""
        return canonical(self.source)

    def digest(self):
        text = yaml.safe_dump(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()


def bundled_configs():
    root = resources.files("idslab") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".yaml"))


def resolve_path(path):
    """A filesystem path, or the name of a bundled config (with or without ``.yaml``)."""
    p = Path(path)
    if p.exists():
        return p
    root = resources.files("idslab") / "configs"
    for name in (str(path), f"{path}.yaml"):
        cand = root / name
        if cand.is_file():
            return Path(str(cand))
    return p


def _alphas(raw, where, errors):
    vals = raw if isinstance(raw, list) else [raw]
    out = []
    for a in vals:
        try:
            a = float(a)
        except (TypeError, ValueError):
            errors.append(f"{where}: alpha {a!r} is not a number")
            continue
        if not 0.0 < a <= 1.0:
            errors.append(f"{where}: alpha outside (0,1]: {a}")
        out.append(a)
    return out


def _background(raw):
    if raw is None or raw.get("type", "none") == "none":
        return None
    kind = raw["type"]
    if kind == "periodic":
        return PeriodicBackground(raw["values"])
    if kind == "quasiperiodic":
        return QuasiPeriodicBackground(
            raw.get("amplitude", 1.0),
            raw.get("frequency", QuasiPeriodicBackground.frequency),
            raw.get("phase", 0.0),
        )
    raise OperatorError(f"unknown background type {kind!r}")


def _modulation(raw):
    raw = raw or {"type": "stationary"}
    return Modulation(raw.get("type", "stationary"), float(raw.get("delta", 0.0)), tuple(raw.get("values", ())))


def _site(raw, cfg, where, errors):
    if raw is None or raw == "center":
        return cfg.center() if cfg else 0
    try:
        if isinstance(raw, list):
            return cfg.site(raw)
        s = int(raw)
    except (OperatorError, TypeError, ValueError) as exc:
        errors.append(f"{where}: bad site {raw!r} ({exc})")
        return 0
    if cfg is not None and not 0 <= s < cfg.n_sites:
        errors.append(f"{where}: site {s} outside the box of {cfg.n_sites} sites")
    return s


def parse_config(data):
    """Resolve a parsed mapping into an :class:`ExperimentConfig` or raise :class:`ConfigError`."""
    errors = []
    if not isinstance(data, dict):
        raise ConfigError(["config root must be a mapping"])
    for key in data:
        if key not in SECTIONS:
            errors.append(f"unknown section {key!r}")

    measures = {}
    for name, lit in (data.get("measures") or {}).items():
        try:
            measures[name] = measure_from_dict(lit, measures)
        except MeasureError as exc:
            errors.append(f"measures.{name}: {exc}")

    grids = {}
    for name, g in (data.get("grids") or {}).items():
        try:
            grids[name] = GridSpec(tuple(g["x_range"]), g.get("x_count", 401), tuple(g["eps_range"]),
                                   g.get("eps_count", 81), g.get("spacing", "log"))
        except (KeyError, TypeError, TransformError) as exc:
            errors.append(f"grids.{name}: {exc}")

    operator = None
    if data.get("operator") is not None:
        op = data["operator"]
        try:
            law = op.get("single_site", {"type": "delta", "at": 0.0})
            operator = OperatorConfig(
                int(op.get("dimension", 1)), int(op.get("side", 1)), measure_from_dict(law, measures),
                _background(op.get("background")), _modulation(op.get("modulation")),
                float(op.get("coupling", 1.0)),
            )
        except (MeasureError, OperatorError, KeyError, TypeError, ValueError) as exc:
            errors.append(f"operator: {exc}")

    try:
        quad = dict(data.get("quadrature") or {})
        if quad.get("truncation") is not None:
            quad["truncation"] = tuple(float(t) for t in quad["truncation"])
        quadrature = QuadratureSpec(**quad)
    except (TypeError, ValueError) as exc:
        errors.append(f"quadrature: {exc}")
        quadrature = QuadratureSpec()

    mc = data.get("mc")
    if mc is not None:
        if "seed" not in mc and "seed" not in data:
            errors.append("mc: seed required whenever mc is requested")
        if operator is None:
            errors.append("mc: needs an operator section")
        if int(mc.get("realizations", 0)) < 1:
            errors.append("mc: realizations must be at least 1")
        lo = min((mc.get("scales") or {}).get("range", [MIN_MC_SCALE]))
        if lo < MIN_MC_SCALE:
            errors.append(f"mc: smoothing scale {lo} below the finite-box floor {MIN_MC_SCALE}")
        mc = dict(mc)
        mc["alpha"] = _alphas(mc.get("alpha", 1.0), "mc", errors)
        mc["sites"] = [_site(s, operator, "mc.sites", errors) for s in mc.get("sites", ["center"])]

    checks = []
    for k, chk in enumerate(data.get("checks") or []):
        where = f"checks[{k}]"
        cid = chk.get("id") if isinstance(chk, dict) else None
        if cid not in CHECKS:
            errors.append(f"{where}: unknown check {cid!r}")
            continue
        item = dict(chk)
        for key in ("measure", "sigma"):
            if key in item and item[key] not in measures:
                errors.append(f"{where}: unknown measure {item[key]!r}")
        if cid in MEASURE_CHECKS and "measure" not in item:
            errors.append(f"{where}: needs a 'measure'")
        if "grid" in item and item["grid"] not in grids:
            errors.append(f"{where}: unknown grid {item['grid']!r}")
        if cid != "reciprocal-ratio":
            item["alpha"] = _alphas(item.get("alpha", 1.0), where, errors)
        if cid in ("site-average", "modulated-site", "weighted-total"):
            if operator is None:
                errors.append(f"{where}: needs an operator section")
            else:
                sites = item.get("sites", [item.get("site", "center")])
                item["sites"] = [_site(s, operator, where, errors) for s in sites]
        if cid in MC_CHECKS and mc is None:
            errors.append(f"{where}: needs an mc section")
        checks.append(item)

    if operator is not None:
        laws = [("operator.single_site", operator.single_site)]
        laws += [(f"checks[{k}]", measures[c["measure"]]) for k, c in enumerate(checks)
                 if c["id"] == "site-average" and c.get("measure") in measures]
        for where, law in laws:
            try:
                coupling_nodes(law, quadrature)
            except AveragingError as exc:
                errors.append(f"{where}: {exc}")

    spectra = []
    for k, sp in enumerate(data.get("spectra") or []):
        if operator is None:
            errors.append(f"spectra[{k}]: needs an operator section")
            break
        item = dict(sp)
        item["site"] = _site(sp.get("site", "center"), operator, f"spectra[{k}]", errors)
        spectra.append(item)

    output = dict(data.get("output") or {})
    fmts = output.get("formats", list(FORMATS))
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        errors.append(f"output: unknown formats {bad}")
    output["formats"] = [f for f in FORMATS if f in fmts]
    output.setdefault("dir", "idslab-out")

    seed = data.get("seed", (mc or {}).get("seed", 0))
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(measures, grids, operator, quadrature, mc, checks, spectra, output,
                            int(seed), data)


def canonical(data):
    """Normalize a raw mapping: measures expanded to explicit literals, keys sorted."""
    out = dict(data)
    if "measures" in out:
        resolved = {}
        for name, lit in (out["measures"] or {}).items():
            resolved[name] = measure_from_dict(lit, resolved)
        out["measures"] = {k: v.to_dict() for k, v in resolved.items()}
    return yaml.safe_load(yaml.safe_dump(out, sort_keys=True))


def load_config(path):
    """Read and validate a config file; :class:`ConfigError` lists every problem."""
    path = resolve_path(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    return loads_config(text, str(path))


def loads_config(text, name="<string>"):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{name}:{mark.line + 1}:{mark.column + 1}" if mark else name
        raise ConfigError([f"{where}: parse error: {getattr(exc, 'problem', exc)}"]) from exc
    return parse_config(data or {})


def validate_config(path):
    """``(config, [])`` on success, ``(None, errors)`` otherwise."""
    try:
        return load_config(path), []
    except ConfigError as exc:
        return None, exc.errors


def serialize_config(cfg):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)
