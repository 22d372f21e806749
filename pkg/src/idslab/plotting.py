"""Deterministic SVG figures for sweeps, distribution functions and bound margins."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("sweep", "cdf", "bound-margin", "profile")
COLOR_CAP = 2.0


def _save(fig, path):
    with plt.rc_context({"svg.hashsalt": "idslab", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def _sweep(ax, fig, table, cap, title):
    ys, scales, vals = (np.asarray(t, dtype=float) for t in table)
    vals = np.abs(vals.reshape(ys.size, scales.size))
    if vals.size == 1:
        ax.plot(ys, scales, "o", gid="data")
    else:
        mesh = ax.pcolormesh(ys, scales, vals.T, shading="nearest", vmin=0.0, vmax=cap)
        fig.colorbar(mesh, ax=ax, label=f"value (capped at {cap:g})")
    if scales.size > 1 and scales.min() > 0 and scales.max() / scales.min() > 50:
        ax.set_yscale("log")
    ax.set_xlabel("y")
    ax.set_ylabel("a")
    ax.set_title(title or "sweep")


def _cdf(ax, table, title):
    x, f = (np.asarray(t, dtype=float) for t in table[:2])
    ax.step(x, f, where="post", label="spectral measure", marker="o" if x.size == 1 else None, gid="data")
    if len(table) > 2 and table[2] is not None:
        ox, of = (np.asarray(t, dtype=float) for t in table[2])
        ax.plot(ox, of, "--", label="arcsine law")
    ax.set_xlabel("E")
    ax.set_ylabel("distribution function")
    ax.legend(loc="upper left")
    ax.set_title(title or "cumulative spectral measure")


def _bound_margin(ax, reports, title):
    labels = [f"{k}:{r.check}" for k, r in enumerate(reports)]
    ratio = []
    for r in reports:
        lhs, rhs = float(r.lhs), float(r.rhs)
        ratio.append(lhs / rhs if np.isfinite(lhs) and np.isfinite(rhs) and rhs > 0 else np.nan)
    ratio = np.asarray(ratio)
    colors = ["tab:green" if r.passed else "tab:red" for r in reports]
    pos = np.arange(len(reports))
    ax.barh(pos, np.nan_to_num(ratio, nan=COLOR_CAP), color=colors)
    ax.axvline(1.0, color="k", lw=0.8)
    ax.set_yticks(pos, labels)
    ax.set_xlabel("lhs / rhs")
    ax.set_title(title or "bound margins")


def _profile(ax, table, title, ylabel):
    x, y = (np.asarray(t, dtype=float) for t in table[:2])
    ax.plot(x, y, marker="o" if x.size < 30 else None, gid="data")
    if x.size > 1 and x.min() > 0 and x.max() / x.min() > 10:
        ax.set_xscale("log")
    if len(table) > 2 and table[2] is not None:
        ax.axhline(float(table[2]), color="k", ls="--", lw=0.8, label="bound")
        ax.legend()
    ax.set_xlabel("a")
    ax.set_ylabel(ylabel or "value")
    ax.set_title(title or "profile")


def emit_plot(table, kind, path, title=None, cap=COLOR_CAP, ylabel=None):
    """Write one SVG figure and return ``path``.

    ``sweep`` takes ``(ys, scales, values)`` with values shaped
    ``(len(ys), len(scales))``; ``cdf`` takes ``(x, F)`` plus an optional
    ``(x, F)`` overlay; ``bound-margin`` a list of reports; ``profile`` takes
    ``(x, y)`` and an optional horizontal bound.  Output bytes depend only on
    the inputs.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; known: {KINDS}")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "sweep":
        _sweep(ax, fig, table, cap, title)
    elif kind == "cdf":
        _cdf(ax, table, title)
    elif kind == "bound-margin":
        _bound_margin(ax, table, title)
    else:
        _profile(ax, table, title, ylabel)
    fig.tight_layout()
    return _save(fig, path)
