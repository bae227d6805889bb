"""
A small ensemble, end to end
============================

Same pipeline as the command line tool: records per graph, a CSV summary,
an audit pass and SVG panels. The equivalent shell session is

    stqaoa run --n 10 --count 6 --starts 4 --algo qaoa --algo st-qaoa \
        --sub rst --sub gw --rounds 1-2 --out demo_output
    stqaoa gw-sweep --n 10 --count 6 --starts 4 --k 1,4 --out demo_output
    stqaoa audit --out demo_output
    stqaoa plot --out demo_output
"""

from pathlib import Path

from stqaoa.experiments import AlgoSpec, EnsembleConfig, audit, gw_repetition_sweep, run_ensemble
from stqaoa.plots import emit_plots

out = Path("demo_output")
algos = tuple(AlgoSpec(a, r, s) for a in ("qaoa", "st-qaoa") for s in ("rst", "gw") for r in (1, 2))
cfg = EnsembleConfig(n=10, degree=3, count=6, seed=0, algos=algos, starts=4)

records, rows = run_ensemble(cfg, out)
for row in rows:
    print(f"{row['algorithm']:8s} r={row['rounds']} {row['sub']:4s} <B> = {row['mean_B']:.4f} +- {row['stderr_B']:.4f}")

sweep_records, table = gw_repetition_sweep(EnsembleConfig(n=10, degree=3, count=6, seed=0, starts=4), (1, 4), out=out)
for row in table:
    print(f"GW best of {row['k']}: <B> = {row['mean_B']:.4f}")

print("audit problems:", audit(records + sweep_records))
for path in emit_plots(records + sweep_records, out / "plots"):
    print("wrote", path)
