"""Run a validated experiment config and write its artifacts.

Stages run in dependency order: measures, transforms, spectral, averaging,
checks.  CSV and JSON artifacts depend only on (config, seed); wall-clock
timings go to ``timings.txt`` so they never disturb the reproducible files.
"""

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .averaging import (
    CHECKS,
    check_bound,
    combine_weighted,
    disorder_average_site,
    mc_average_transform,
)
from .measures import scale_measure
from .operators import background_operator, build_hamiltonian, sample_disorder
from .plotting import emit_plot
from .spectral import arcsine_cdf, spectral_measure
from .transforms import hoelder_constant_direct

STAGES = ("measures", "transforms", "spectral", "averaging", "checks")
ISOLATED_CHECKS = {"reciprocal-ratio", "borel-hoelder", "aggregated", "dilation", "translation"}


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        self.stage = stage
        super().__init__(f"stage {stage!r}: {type(exc).__name__}: {exc}")


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    version: str
    timings: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    out_dir: str = ""

    @property
    def failed(self):
        return [r for r in self.reports if not r.passed]

    @property
    def exit_status(self):
        return 1 if (self.errors or self.failed) else 0

    def to_dict(self):
        return {
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "artifacts": self.artifacts,
            "reports": len(self.reports),
            "failed": len(self.failed),
            "errors": self.errors,
        }


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (dict, list)):
        return json.dumps(_jsonable(v), sort_keys=True, separators=(",", ":"))
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


class _Writer:
    def __init__(self, out_dir, formats, manifest):
        self.out = Path(out_dir)
        self.formats = set(formats)
        self.manifest = manifest
        self.out.mkdir(parents=True, exist_ok=True)

    def _record(self, path):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.manifest.artifacts.append({"path": path.name, "sha256": digest})

    def text(self, name, text, fmt):
        if fmt not in self.formats:
            return None
        path = self.out / name
        path.write_text(text)
        self._record(path)
        return path

    def csv(self, name, header, rows):
        return self.text(name, csv_text(header, rows), "csv")

    def json(self, name, obj):
        return self.text(name, json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n", "json")

    def plot(self, name, table, kind, **opts):
        if "svg" not in self.formats:
            return None
        path = emit_plot(table, kind, self.out / name, **opts)
        self._record(path)
        return path


def _grid(cfg, name):
    return None if name is None else cfg.grids[name]


def _sweep_rows(ys, scales, vals):
    return [(float(y), float(a), float(vals[i, k])) for i, y in enumerate(ys) for k, a in enumerate(scales)]


def _reports_for(chk, cfg, state, seed):
    """Expand one config entry into the reports it denotes (alpha list, c list, sites)."""
    cid = chk["id"]
    m = cfg.measures
    alphas = chk.get("alpha", [1.0])
    if cid == "reciprocal-ratio":
        kw = {}
        if "y_range" in chk:
            kw["ys"] = np.linspace(*chk["y_range"], int(chk.get("y_count", 101)))
        if "a_range" in chk:
            kw["scales"] = np.geomspace(*chk["a_range"], int(chk.get("a_count", 61)))
        r = check_bound(cid, sigma=m[chk["measure"]], **kw)
        r.params["measure"] = chk["measure"]
        return [r]
    out = []
    if cid == "borel-hoelder":
        for a in alphas:
            r = check_bound(cid, mu=m[chk["measure"]], alpha=a, grid=_grid(cfg, chk.get("grid")))
            out.append(r)
    elif cid == "aggregated":
        sigma = m[chk.get("sigma", chk["measure"])]
        for a in alphas:
            out.append(check_bound(cid, sigma=sigma, mu=m[chk["measure"]], alpha=a,
                                   grid=_grid(cfg, chk.get("grid"))))
    elif cid in ("dilation", "translation"):
        for c in chk.get("c", [2.0]):
            for a in alphas:
                out.append(check_bound(cid, mu=m[chk["measure"]], c=c, alpha=a))
    elif cid == "site-average":
        npts = int(chk.get("test_points", 20))
        pts = np.linspace(-2.5, 2.5, npts) + 1j * np.geomspace(1e-2, 1.0, npts) if npts else None
        for site in chk["sites"]:
            A = background_operator(cfg.operator, sample_disorder(cfg.operator, seed, 0), site)
            for a in alphas:
                r = check_bound(cid, A=A, phi=site, mu=m[chk["measure"]], alpha=a, quad=cfg.quadrature,
                                test_points=pts)
                r.params["site"] = int(site)
                r.seeds = [seed]
                out.append(r)
    elif cid == "modulated-site":
        for site in chk["sites"]:
            for a in alphas:
                out.append(check_bound(cid, cfg=cfg.operator, site=site, alpha=a, seed=seed,
                                       realizations=int(chk.get("realizations", 1)), quad=cfg.quadrature))
    elif cid == "weighted-total":
        op = cfg.operator
        sites = chk["sites"]
        shells = np.abs(op.offset()[sites]).max(axis=1)
        betas = np.asarray(chk.get("betas", 2.0 ** (-shells.astype(float))), dtype=float)
        betas = betas / betas.sum()
        an = op.coupling * op.modulation_values()[sites]
        reals = int(chk.get("realizations", 1))
        nus = [disorder_average_site(op, s, reals, seed, cfg.quadrature) for s in sites]
        for a in alphas:
            d_mu = hoelder_constant_direct(op.single_site, a).constant
            _, r = combine_weighted(list(zip(betas, nus)), a, an, d_mu, shells=shells)
            r.seeds = [seed]
            r.params.update({"sites": [int(s) for s in sites], "realizations": reals})
            out.append(r)
    elif cid == "mc-site-independence":
        out.append(check_bound(cid, table=state["mc"], i=int(chk.get("i", 0)), j=int(chk.get("j", 1))))
    elif cid == "mc-smoothed-bound":
        table = state["mc"]
        k = int(chk.get("site_index", 0))
        op = cfg.operator
        law = scale_measure(op.single_site, 1.0 / (op.coupling * op.modulation_values()[table.sites[k]]))
        for a in alphas:
            d_mu = hoelder_constant_direct(law, a).constant
            out.append(check_bound(cid, table=table, d_mu=d_mu, alpha=a, site=k))
    return out


def _table_artifacts(writer, k, report):
    stem = f"check-{k:02d}-{report.check}"
    for name, table in report.tables.items():
        if name == "sweep":
            ys, scales, vals = table
            writer.csv(f"{stem}-sweep.csv", ["y", "a", "value"], _sweep_rows(ys, scales, vals))
            writer.plot(f"{stem}-sweep.svg", table, "sweep", title=report.check)
        elif name == "profile":
            x, y = table
            writer.csv(f"{stem}-profile.csv", ["a", "value"], zip(np.asarray(x).tolist(), np.asarray(y).tolist()))
            writer.plot(f"{stem}-profile.svg", (x, y, report.rhs), "profile", title=report.check)


def _stage_spectral(cfg, writer, seed):
    op = cfg.operator
    H = build_hamiltonian(op, sample_disorder(op, seed, 0))
    for k, sp in enumerate(cfg.spectra):
        meas = spectral_measure(H, sp["site"])
        writer.csv(f"spectrum-{k:02d}.csv", ["eigenvalue", "weight"], meas.rows())
        x = meas.eigenvalues
        f = np.cumsum(meas.weights) / meas.total()
        overlay = None
        if sp.get("overlay") == "arcsine":
            ox = np.linspace(-2.0, 2.0, 401)
            overlay = (ox, arcsine_cdf(ox))
            dist = float(np.max(np.abs(f - arcsine_cdf(x))))
            dist = max(dist, float(np.max(np.abs(np.concatenate([[0.0], f[:-1]]) - arcsine_cdf(x)))))
            writer.csv(f"spectrum-{k:02d}-arcsine.csv", ["site", "sup_distance"], [(sp["site"], dist)])
        writer.plot(f"spectrum-{k:02d}-cdf.svg", (x, f, overlay), "cdf", title=f"site {sp['site']}")


def _axis(spec, default):
    spec = spec or default
    lo, hi = spec["range"]
    n = int(spec.get("count", 11))
    if spec.get("spacing", "linear") == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _stage_mc(cfg, writer, seed, workers):
    mc = cfg.mc
    energies = _axis(mc.get("energies"), {"range": [-2.5, 3.5], "count": 61})
    scales = _axis(mc.get("scales"), {"range": [0.05, 1.0], "count": 11, "spacing": "log"})
    table = mc_average_transform(cfg.operator, mc["sites"], energies, scales, int(mc["realizations"]),
                                 seed, workers if workers is not None else mc.get("workers"))
    writer.csv("mc-table.csv", ["site", "E", "a", "mean_im_F", "stderr", "N"], table.rows())
    rows = []
    for alpha in mc["alpha"]:
        w = table.scales[:, None] ** (1.0 - alpha)
        for s, site in enumerate(table.sites):
            sup = (w * table.mean[s]).max(axis=1)
            rows += [(alpha, site, float(a), float(v)) for a, v in zip(table.scales, sup)]
            writer.plot(f"mc-profile-site{site}-alpha{alpha:g}.svg", (table.scales, sup), "profile",
                        title=f"site {site}, alpha {alpha:g}", ylabel="a^(1-alpha) sup_E E[Im F]")
    writer.csv("mc-profile.csv", ["alpha", "site", "a", "weighted_sup"], rows)
    return table


def run_experiment(cfg, out_dir=None, workers=None, formats=None, seed=None):
    """Execute ``cfg`` and return its :class:`RunManifest`.

    A stage that raises is recorded in ``manifest.errors`` with its stage name
    and the remaining stages are skipped; check failures never raise.
    """
    if seed is None:
        seed = cfg.seed
        mc_seed = int((cfg.mc or {}).get("seed", seed))
    else:
        seed = mc_seed = int(seed)
    out_dir = Path(out_dir or cfg.output["dir"])
    manifest = RunManifest(cfg.digest(), seed, __version__, out_dir=str(out_dir))
    writer = _Writer(out_dir, formats or cfg.output["formats"], manifest)
    state = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            fn()
        except Exception as exc:  # recorded with context, reported through exit status
            manifest.errors.append(str(StageError(name, exc)))
            return False
        finally:
            manifest.timings[name] = time.perf_counter() - t0
        return True

    def measures():
        rows = []
        for name, m in cfg.measures.items():
            lo, hi = m.support()
            rows.append((name, type(m).__name__, float(lo), float(hi), m.to_dict()))
        writer.csv("measures.csv", ["name", "kind", "support_lo", "support_hi", "literal"], rows)

    def transforms():
        for k, chk in enumerate(cfg.checks):
            if chk["id"] in ISOLATED_CHECKS:
                state[k] = _reports_for(chk, cfg, state, seed)

    def spectral():
        if cfg.spectra:
            _stage_spectral(cfg, writer, seed)

    def averaging():
        if cfg.mc is not None:
            state["mc"] = _stage_mc(cfg, writer, mc_seed, workers)

    def checks():
        for k, chk in enumerate(cfg.checks):
            if k not in state:
                state[k] = _reports_for(chk, cfg, state, seed)
            manifest.reports += state[k]
        for k, r in enumerate(manifest.reports):
            _table_artifacts(writer, k, r)
        writer.json("reports.json", [r.to_dict() for r in manifest.reports])
        writer.csv("verification.csv", ["index", "inequality", "parameters", "lhs", "rhs", "margin", "pass"],
                   [(k, r.check, r.params, float(r.lhs), float(r.rhs), float(r.margin), r.passed)
                    for k, r in enumerate(manifest.reports)])
        if manifest.reports:
            writer.plot("bound-margins.svg", manifest.reports, "bound-margin")

    for name, fn in zip(STAGES, (measures, transforms, spectral, averaging, checks)):
        if not stage(name, fn):
            break
    writer.json("manifest.json", manifest.to_dict())
    timing = "".join(f"{k} {v:.3f}\n" for k, v in manifest.timings.items())
    (out_dir / "timings.txt").write_text(timing)
    return manifest


def list_checks():
    return [(cid, doc) for cid, (_, doc) in sorted(CHECKS.items())]


__all__ = ["RunManifest", "StageError", "csv_text", "list_checks", "run_experiment"]
