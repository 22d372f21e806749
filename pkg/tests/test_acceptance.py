"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from idslab.averaging import (
    QuadratureSpec,
    average_over_site,
    check_bound,
    mc_average_transform,
    site_average_residual,
)
from idslab.config import load_config, parse_config
from idslab.measures import delta, uniform
from idslab.operators import (
    LatticeOperator,
    OperatorConfig,
    build_hamiltonian,
    sample_disorder,
    split_rank_one,
)
from idslab.runner import run_experiment
from idslab.spectral import arcsine_cdf, rank_one_residual, spectral_measure
from idslab.transforms import (
    hoelder_constant_borel,
    hoelder_constant_direct,
    reciprocal_imag_ratio,
)

from conftest import measure_zoo

RESULTS = []


def verdict(number, title, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail} ({elapsed:.2f}s / {budget:g}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_reciprocal_ratio_universal_bound():
    t0 = time.perf_counter()
    ys = np.linspace(-5, 5, 101)[:, None]
    a = np.geomspace(1e-4, 10, 61)[None, :]
    worst = {name: float(np.abs(reciprocal_imag_ratio(m, ys, a)).max()) for name, m in measure_zoo().items()}
    top = max(worst.values())
    verdict(1, "|a / Im(1/F)| <= 2 + 1e-9 on the zoo", top <= 2 + 1e-9,
            f"max {top:.12f} ({max(worst, key=worst.get)})", time.perf_counter() - t0, 10)


def test_criterion_2_borel_bound():
    t0 = time.perf_counter()
    ok, parts = True, []
    for alpha in (0.5, 1.0):
        d = hoelder_constant_direct(uniform(), alpha)
        b = hoelder_constant_borel(uniform(), alpha, d.grid)
        rhs = 2**alpha * np.pi * d.constant
        ok &= b.grid_sup <= rhs
        parts.append(f"alpha={alpha}: {b.grid_sup:.6f} <= {rhs:.6f}")
        if alpha == 1.0:
            ok &= np.pi - 0.05 <= b.grid_sup <= np.pi + 1e-6
            parts.append(f"pi-window {np.pi - b.grid_sup:.2e} below pi")
    verdict(2, "Borel sup <= 2^alpha pi d_direct", ok, "; ".join(parts), time.perf_counter() - t0, 10)


def test_criterion_3_dichotomy():
    t0 = time.perf_counter()
    ok, parts = True, []
    for alpha in (0.5, 1.0):
        d = hoelder_constant_direct(uniform(), alpha)
        b = hoelder_constant_borel(uniform(), alpha, d.grid)
        sandwich = d.constant <= 2 ** (1 - alpha) * b.constant <= 2 * np.pi * d.constant
        ok &= d.finite and b.finite and sandwich
        dd, db = hoelder_constant_direct(delta(), alpha), hoelder_constant_borel(delta(), alpha)
        slopes = (dd.divergence_slope, db.divergence_slope)
        ok &= not dd.finite and not db.finite and all(abs(s - alpha) <= 0.05 for s in slopes)
        parts.append(f"alpha={alpha}: uniform {d.constant:.4f}/{b.constant:.4f}, "
                     f"delta slopes {slopes[0]:.3f}/{slopes[1]:.3f}")
    verdict(3, "finite vs divergent dichotomy", ok, "; ".join(parts), time.perf_counter() - t0, 5)


def test_criterion_4_rank_one_identity():
    t0 = time.perf_counter()
    gen = np.random.default_rng(4)
    worst = 0.0
    for case in range(100):
        n = int(gen.integers(1, 51))
        cfg = OperatorConfig(1, n, uniform(-2, 2))
        H = build_hamiltonian(cfg, sample_disorder(cfg, 1000 + case))
        split = split_rank_one(H, int(gen.integers(0, n)))
        im = 10 ** gen.uniform(-3, 0) * gen.choice([-1, 1])
        z = complex(gen.uniform(-3, 3), im)
        worst = max(worst, rank_one_residual(split, z) * abs(im))
    verdict(4, "rank-one resolvent identity", worst <= 1e-10,
            f"max residual*|Im z| = {worst:.2e}", time.perf_counter() - t0, 5)


def test_criterion_5_site_average():
    t0 = time.perf_counter()
    nu0 = average_over_site(LatticeOperator.from_matrix([[0.0]]), 0, uniform())
    d0 = hoelder_constant_direct(nu0, 1.0).constant
    ok = abs(d0 - 1.0) <= 0.02 and d0 <= 2 * np.pi
    parts = [f"(a) d_nu={d0:.6f}"]
    A = build_hamiltonian(OperatorConfig(1, 50), np.zeros(50))
    site = 24
    pts = np.linspace(-2.5, 2.5, 20) + 1j * np.geomspace(1e-2, 1, 20)
    for alpha in (0.5, 1.0):
        r = check_bound("site-average", A=A, phi=site, mu=uniform(), alpha=alpha,
                        quad=QuadratureSpec("spectral-shift", 64), test_points=pts)
        ok &= r.passed and r.margin > 0 and r.extra["identity_residual"] <= 1e-6
        parts.append(f"(b) alpha={alpha}: {r.lhs:.4f} <= {r.rhs:.4f}, residual {r.extra['identity_residual']:.1e}")
    gauss = QuadratureSpec("gauss-legendre", 64)
    res_gl = float(site_average_residual(A, site, uniform(), pts, gauss).max())
    ok &= res_gl <= 1e-6
    parts.append(f"gauss-64 residual {res_gl:.1e}")
    verdict(5, "site-averaged measure bound", ok, "; ".join(parts), time.perf_counter() - t0, 60)


def test_criterion_6_scaling():
    t0 = time.perf_counter()
    ok, worst = True, {"dilation": 0.0, "translation": 0.0}
    for c in (2.0, -3.0, 0.5):
        for alpha in (0.5, 1.0):
            for check in worst:
                r = check_bound(check, mu=uniform(), c=c, alpha=alpha)
                ok &= r.passed
                unit = r.extra["unit"]
                worst[check] = max(worst[check], r.lhs / unit if unit > 0 else 0.0)
    verdict(6, "dilation and translation covariance", ok,
            f"worst deviation {worst['dilation']:.3f} units (<=2), {worst['translation']:.3f} units (<=1)",
            time.perf_counter() - t0, 10)


def anderson_table(workers=None):
    cfg = OperatorConfig(1, 500, uniform())
    return mc_average_transform(cfg, [249, 250], np.linspace(-2.5, 3.5, 61), np.geomspace(0.05, 1, 11),
                                200, seed=7, workers=workers)


def test_criterion_7_anderson_scenario():
    t0 = time.perf_counter()
    table = anderson_table()
    indep = check_bound("mc-site-independence", table=table)
    bound = check_bound("mc-smoothed-bound", table=table, d_mu=1.0, alpha=1.0)
    ok = indep.passed and bound.passed
    verdict(7, "Anderson box L=500, N=200", ok,
            f"(i) max |diff|/stderr {indep.lhs:.3f} <= 3; (ii) sup-3se {bound.lhs:.4f} <= {bound.rhs:.4f}",
            time.perf_counter() - t0, 300)


def test_criterion_8_free_laplacian_arcsine():
    t0 = time.perf_counter()
    n = 2000
    sm = spectral_measure(build_hamiltonian(OperatorConfig(1, n), np.zeros(n)), (n - 1) // 2)
    f = np.cumsum(sm.weights)
    ref = arcsine_cdf(sm.eigenvalues)
    dist = float(max(np.abs(f - ref).max(), np.abs(f - sm.weights - ref).max()))
    verdict(8, "free Laplacian vs arcsine", dist <= 0.01, f"sup distance {dist:.2e}",
            time.perf_counter() - t0, 60)


def _csv_bytes(path):
    return {p.name: p.read_bytes() for p in sorted(path.glob("*.csv"))}


def test_criterion_9_worker_determinism(tmp_path):
    t0 = time.perf_counter()
    site_cfg = parse_config({
        "seed": 0,
        "measures": {"unit": {"type": "uniform", "interval": [0.0, 1.0]}},
        "operator": {"dimension": 1, "side": 50, "single_site": {"type": "delta", "at": 0.0}},
        "quadrature": {"rule": "spectral-shift", "nodes": 64},
        "checks": [{"id": "site-average", "measure": "unit", "site": 24, "alpha": [0.5, 1.0]}],
    })
    mc_cfg = load_config("anderson_ids")
    same, names = True, []
    for label, cfg in (("site-average", site_cfg), ("anderson", mc_cfg)):
        runs = [run_experiment(cfg, out_dir=tmp_path / f"{label}-{w}", workers=w, formats=["csv"])
                for w in (1, 3)]
        a, b = (_csv_bytes(tmp_path / f"{label}-{w}") for w in (1, 3))
        same &= bool(a) and a == b and all(r.exit_status == 0 for r in runs)
        names += list(a)
    verdict(9, "byte-identical CSVs across worker counts", same, f"{len(names)} CSV files compared",
            time.perf_counter() - t0, 600)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
