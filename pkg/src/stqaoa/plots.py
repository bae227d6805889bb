"""Figure panels for ensemble records: SVG files plus the CSV behind each one.

SVG output is byte-stable: no date metadata and a fixed id salt.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .experiments import _csv, _mean_stderr, _write_atomic

__all__ = ["scatter_rows", "sweep_rows", "rounds_rows", "emit_plots"]

_SVG_META = {"Date": None, "Creator": None}


def _gw_k(sub: str) -> int | None:
    if sub == "gw":
        return 1
    if sub.startswith("gw:"):
        return int(sub[3:])
    return None


def scatter_rows(records) -> list[dict]:
    """Per-graph (B of QAOA p, B of ST-QAOA r) pairs for p == r and r == 2p."""
    rows = []
    for rec in records:
        qaoa = {e["rounds"]: e for e in rec["results"] if e["algorithm"] == "qaoa"}
        for e in rec["results"]:
            if e["algorithm"] != "st-qaoa":
                continue
            r = e["rounds"]
            for p in sorted({r, r // 2} & set(qaoa)):
                if p == r or 2 * p == r:
                    cc = e["cc"]
                    rows.append({
                        "index": rec["index"], "sub": e["sub"], "p": p, "r": r,
                        "B_qaoa": qaoa[p]["cq"] / cc, "B_st_qaoa": e["B"],
                    })
    rows.sort(key=lambda x: (x["sub"], x["r"], x["p"], x["index"]))
    return rows


def sweep_rows(records, rounds: int = 1) -> list[dict]:
    """Mean B of ST-QAOA against GW best-of-k, one row per k found."""
    by_k: dict[int, list[float]] = {}
    for rec in records:
        for e in rec["results"]:
            k = _gw_k(e["sub"])
            if e["algorithm"] == "st-qaoa" and e["rounds"] == rounds and k is not None:
                by_k.setdefault(k, []).append(e["B"])
    rows = []
    for k in sorted(by_k):
        mean, err = _mean_stderr(by_k[k])
        rows.append({"k": k, "count": len(by_k[k]), "mean_B": mean, "stderr_B": err})
    return rows


def rounds_rows(records) -> list[dict]:
    """Mean B against round count for QAOA and ST-QAOA, per subroutine."""
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        for e in rec["results"]:
            if e["algorithm"] in ("qaoa", "st-qaoa"):
                groups.setdefault((e["sub"], e["algorithm"], e["rounds"]), []).append(e["B"])
    rows = []
    for (sub, algo, rounds) in sorted(groups):
        mean, err = _mean_stderr(groups[sub, algo, rounds])
        rows.append({"sub": sub, "algorithm": algo, "rounds": rounds, "count": len(groups[sub, algo, rounds]),
                     "mean_B": mean, "stderr_B": err})
    return rows


def _include_one(ax, axis="y"):
    lo, hi = ax.get_ylim() if axis == "y" else ax.get_xlim()
    pad = 0.02 * max(hi - lo, 1e-3)
    lo, hi = min(lo, 1 - pad), max(hi, 1 + pad)
    (ax.set_ylim if axis == "y" else ax.set_xlim)(lo, hi)


def _save(fig: Figure, path: Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": "stqaoa", "svg.fonttype": "path"}):
        tmp = path.with_name(path.name + ".tmp")
        fig.savefig(tmp, format="svg", metadata=_SVG_META)
    tmp.replace(path)


def _scatter_figure(rows) -> Figure:
    subs = sorted({r["sub"] for r in rows})
    fig = Figure(figsize=(4.2 * len(subs), 4))
    for i, sub in enumerate(subs):
        ax = fig.add_subplot(1, len(subs), i + 1)
        sub_rows = [r for r in rows if r["sub"] == sub]
        for p, r in sorted({(x["p"], x["r"]) for x in sub_rows}):
            pts = [x for x in sub_rows if x["p"] == p and x["r"] == r]
            ax.scatter([x["B_qaoa"] for x in pts], [x["B_st_qaoa"] for x in pts], s=12,
                       label=f"QAOA p={p} vs ST-QAOA r={r}")
        _include_one(ax, "x")
        _include_one(ax, "y")
        lo = min(ax.get_xlim()[0], ax.get_ylim()[0])
        hi = max(ax.get_xlim()[1], ax.get_ylim()[1])
        ax.plot([lo, hi], [lo, hi], color="grey", lw=0.8)
        ax.axhline(1, color="black", ls="--", lw=0.8)
        ax.axvline(1, color="black", ls="--", lw=0.8)
        ax.set_xlabel("B (QAOA)")
        ax.set_ylabel("B (ST-QAOA)")
        ax.set_title(f"subroutine: {sub}")
        ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def _errorbar_axes(ax, xs, means, errs, label, marker="o"):
    ax.errorbar(xs, means, yerr=errs, marker=marker, capsize=3, label=label)


def _sweep_figure(rows) -> Figure:
    fig = Figure(figsize=(4.5, 4))
    ax = fig.add_subplot(1, 1, 1)
    _errorbar_axes(ax, [r["k"] for r in rows], [r["mean_B"] for r in rows], [r["stderr_B"] for r in rows],
                   "ST-QAOA r=1 (GW best of k)")
    ax.axhline(1, color="black", ls="--", lw=0.8)
    _include_one(ax)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("GW repetitions k")
    ax.set_ylabel("<B>")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _rounds_figure(rows) -> Figure:
    subs = [s for s in ("rst", "gw") if any(r["sub"] == s for r in rows)]
    subs += sorted({r["sub"] for r in rows} - set(subs))
    fig = Figure(figsize=(4.5 * len(subs), 4))
    for i, sub in enumerate(subs):
        ax = fig.add_subplot(1, len(subs), i + 1)
        for algo, marker in (("qaoa", "o"), ("st-qaoa", "s")):
            pts = [r for r in rows if r["sub"] == sub and r["algorithm"] == algo]
            if pts:
                _errorbar_axes(ax, [r["rounds"] for r in pts], [r["mean_B"] for r in pts],
                               [r["stderr_B"] for r in pts], algo.upper(), marker)
        ax.axhline(1, color="black", ls="--", lw=0.8, label=f"{sub} baseline")
        _include_one(ax)
        ax.set_xlabel("rounds (p or r)")
        ax.set_ylabel("<B>")
        ax.set_title(f"subroutine: {sub}")
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def emit_plots(records, out) -> list[Path]:
    """Write every panel the records support; returns the paths written.

    Panels: ``scatter`` (B of ST-QAOA vs B of QAOA per graph), ``gw_sweep``
    (mean B vs GW repetitions), ``rounds`` (mean B vs p for each subroutine).
    """
    records = list(records)
    if not records or not any(rec["results"] for rec in records):
        raise ValueError("no results to plot")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, rows, columns, make):
        if not rows:
            return
        csv_path = out / f"{name}.csv"
        _write_atomic(csv_path, _csv(rows, columns))
        svg_path = out / f"{name}.svg"
        _save(make(rows), svg_path)
        written.extend([csv_path, svg_path])

    emit("scatter", scatter_rows(records), ["index", "sub", "p", "r", "B_qaoa", "B_st_qaoa"], _scatter_figure)
    emit("gw_sweep", sweep_rows(records), ["k", "count", "mean_B", "stderr_B"], _sweep_figure)
    emit("rounds", rounds_rows(records), ["sub", "algorithm", "rounds", "count", "mean_B", "stderr_B"],
         _rounds_figure)
    return written
