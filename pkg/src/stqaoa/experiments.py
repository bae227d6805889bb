"""Ensemble experiments: performance ratios of variational circuits vs classical solvers.

Results are written as one JSON record per graph plus CSV summaries. Every
random choice is derived from a master seed by :func:`derive_seed`, keyed by
graph index and algorithm label, so any subset of graphs reruns identically.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .classical_solvers import (
    GwConfig,
    SolverResult,
    solve_brute_force,
    solve_gw_best_of,
    solve_random_tree,
)
from .optimizer import OptimizeConfig, optimize
from .quantum_sim import (
    ST_QAOA_CLASSICAL_POINT,
    build_exact_st_circuit,
    build_qaoa_circuit,
    build_st_qaoa_circuit,
    build_vst_circuit,
    evaluate,
    qaoa_embedding_params,
    sample_bitstrings,
    simulate,
)
from .signed_graph import SignedGraph, format_graph, parse_graph, random_regular_graph

__all__ = [
    "SCHEMA_VERSION",
    "WORKERS_ENV",
    "ALGORITHMS",
    "AlgoSpec",
    "EnsembleConfig",
    "derive_seed",
    "performance_ratio",
    "generate_ensemble",
    "run_classical",
    "process_graph",
    "run_ensemble",
    "summarize",
    "gw_repetition_sweep",
    "audit",
    "load_records",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
WORKERS_ENV = "STQAOA_WORKERS"
ALGORITHMS = ("qaoa", "st-qaoa", "vst", "exact-st")


def derive_seed(master: int, *key) -> int:
    """Stable 64-bit seed for ``key`` (ints and strings) under ``master``."""
    words = tuple(k if isinstance(k, int) else zlib.crc32(str(k).encode()) for k in key)
    ss = np.random.SeedSequence(master, spawn_key=words)
    return int(ss.generate_state(1, np.uint64)[0])


def performance_ratio(cq: float, cc: float) -> float:
    if cc <= 0:
        raise ValueError(f"classical value must be positive, got {cc}")
    return cq / cc


def canonical_sub(sub: str) -> str:
    sub = sub.strip().lower()
    if sub in ("rst", "gw"):
        return sub
    if sub.startswith("gw:"):
        k = int(sub[3:])
        if k < 1:
            raise ValueError(f"bad repetition count in {sub!r}")
        return "gw" if k == 1 else f"gw:{k}"
    raise ValueError(f"unknown subroutine {sub!r} (rst, gw, gw:k)")


@dataclass(frozen=True)
class AlgoSpec:
    algorithm: str
    rounds: int
    sub: str

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        object.__setattr__(self, "sub", canonical_sub(self.sub))
        if self.algorithm in ("vst", "exact-st"):
            object.__setattr__(self, "rounds", 1)
        elif self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "AlgoSpec":
        algorithm, rounds, sub = text.split(":", 2)
        return cls(algorithm, int(rounds), sub)

    @property
    def label(self) -> str:
        return f"{self.algorithm}:{self.rounds}:{self.sub}"


@dataclass(frozen=True)
class EnsembleConfig:
    n: int = 16
    degree: int = 3
    count: int = 50
    sign: int = -1
    seed: int = 0
    algos: tuple[AlgoSpec, ...] = ()
    starts: int = 20
    warm_start: bool = True
    sampled: bool = False
    shots: int = 1024
    optimizer: OptimizeConfig = field(default_factory=OptimizeConfig)
    gw: GwConfig = field(default_factory=GwConfig)

    @classmethod
    def paper_scale(cls, **kw) -> "EnsembleConfig":
        kw.setdefault("count", 250)
        kw.setdefault("starts", 100)
        return cls(**kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algos"] = [a.label for a in self.algos]
        return d

    @property
    def subs(self) -> list[str]:
        return sorted({a.sub for a in self.algos})

    def compute_hash(self) -> str:
        """Hash of everything that affects a per-graph record."""
        d = self.to_dict()
        d.pop("count")
        d["version"] = __version__
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def generate_ensemble(n: int, degree: int, count: int, seed: int, sign: int = -1) -> list[SignedGraph]:
    """``count`` connected random regular graphs; graph i depends only on (seed, i)."""
    graphs = []
    for i in range(count):
        rng = np.random.default_rng(derive_seed(seed, "graph", i))
        while True:
            g = random_regular_graph(n, degree, sign, rng)
            if g.is_connected():
                break
        graphs.append(g)
    return graphs


def graph_hash(g: SignedGraph) -> str:
    return hashlib.sha256(format_graph(g).encode()).hexdigest()


def run_classical(g: SignedGraph, sub: str, seed: int, gw: GwConfig | None = None) -> SolverResult:
    sub = canonical_sub(sub)
    if sub == "rst":
        return solve_random_tree(g, seed)
    k = 1 if sub == "gw" else int(sub[3:])
    return solve_gw_best_of(g, k, seed, gw)


def _classical_entry(res: SolverResult) -> dict:
    meta = {k: v for k, v in res.meta.items() if k != "wall_time"}
    return {
        "value": res.value,
        "cut": str(res.cut),
        "root": res.tree.root,
        "tree": [list(e) for e in res.tree.edge_order],
        "meta": meta,
    }


class _GraphRun:
    """Per-graph state: classical results and cached QAOA optima."""

    def __init__(self, index: int, g: SignedGraph, cfg: EnsembleConfig):
        self.index = index
        self.g = g
        self.cfg = cfg
        self.classical: dict[str, SolverResult] = {}
        self.qaoa: dict[int, object] = {}

    def seed(self, *key) -> int:
        return derive_seed(self.cfg.seed, self.index, *key)

    def sub_result(self, sub: str) -> SolverResult:
        if sub not in self.classical:
            base = "gw" if sub.startswith("gw") else sub
            # every gw:k shares the same base seed so repetitions are nested
            self.classical[sub] = run_classical(self.g, sub, self.seed("classical", base), self.cfg.gw)
        return self.classical[sub]

    def qaoa_report(self, p: int):
        if p not in self.qaoa:
            c = build_qaoa_circuit(self.g, p)
            self.qaoa[p] = optimize(c, self.g, self.cfg.starts, self.seed("opt", f"qaoa:{p}"), self.cfg.optimizer)
        return self.qaoa[p]

    def quantum(self, spec: AlgoSpec):
        """(circuit, params, cq, optimizer summary or None, optimizer seed)."""
        g, cfg = self.g, self.cfg
        if spec.algorithm == "qaoa":
            rep = self.qaoa_report(spec.rounds)
            return build_qaoa_circuit(g, spec.rounds), rep.best_params, rep.best_value, rep.summary(), rep.seed
        res = self.sub_result(spec.sub)
        opt_seed = self.seed("opt", spec.label)
        if spec.algorithm == "exact-st":
            c = build_exact_st_circuit(res.tree, g)
            return c, np.zeros(0), evaluate(c, (), g), None, None
        if spec.algorithm == "vst":
            c = build_vst_circuit(res.tree)
            warm = []
            if cfg.warm_start:
                signs = [s for _, _, s in res.tree.edge_order]
                warm.append(np.concatenate([np.array(signs) * np.pi / 4, np.full(len(signs), np.pi / 4)]))
        else:
            r = spec.rounds
            c = build_st_qaoa_circuit(g, res, r)
            warm = []
            if cfg.warm_start:
                warm.append(np.concatenate([ST_QAOA_CLASSICAL_POINT, np.zeros(3 * (r - 1))]))
                if r >= 2:
                    k = r // 2
                    emb = qaoa_embedding_params(self.qaoa_report(k).best_params)
                    warm.append(np.concatenate([emb, np.zeros(3 * r - emb.size)]))
        rep = optimize(c, g, cfg.starts, opt_seed, cfg.optimizer, warm_starts=warm)
        return c, rep.best_params, rep.best_value, rep.summary(), opt_seed


def process_graph(index: int, g: SignedGraph, cfg: EnsembleConfig) -> dict:
    """Run every configured algorithm on one graph and return its record."""
    run = _GraphRun(index, g, cfg)
    record = {
        "schema": SCHEMA_VERSION,
        "index": index,
        "graph_hash": graph_hash(g),
        "config_hash": cfg.compute_hash(),
        "graph": format_graph(g),
        "optimum": solve_brute_force(g).value,
        "classical": {},
        "results": [],
        "errors": [],
    }
    for sub in cfg.subs:
        try:
            record["classical"][sub] = _classical_entry(run.sub_result(sub))
        except Exception as exc:  # recorded, not fatal
            record["errors"].append({"stage": f"classical:{sub}", "error": repr(exc)})
    for spec in cfg.algos:
        if spec.sub not in record["classical"]:
            continue
        try:
            c, params, cq, summary, opt_seed = run.quantum(spec)
        except Exception as exc:
            record["errors"].append({"stage": spec.label, "error": repr(exc)})
            continue
        cc = record["classical"][spec.sub]["value"]
        entry = {
            "algorithm": spec.algorithm,
            "rounds": spec.rounds,
            "sub": spec.sub,
            "cq": cq,
            "cc": cc,
            "B": performance_ratio(cq, cc),
            "seed": opt_seed,
            "optimizer": summary,
        }
        if cfg.sampled:
            state = simulate(c, params)
            bits = sample_bitstrings(state, cfg.shots, run.seed("shots", spec.label))
            entry["sampled_best"] = int(max(_cut_values(g, bits)))
        record["results"].append(entry)
    return record


def _cut_values(g: SignedGraph, bits: np.ndarray) -> np.ndarray:
    u, v, s = g.edge_arrays
    differ = bits[:, u] != bits[:, v]
    return np.where(s == -1, differ, ~differ).sum(axis=1)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _record_path(out: Path, index: int) -> Path:
    return out / "records" / f"graph_{index:04d}.json"


def _load_if_current(path: Path, g: SignedGraph, cfg_hash: str) -> dict | None:
    if not path.exists():
        return None
    try:
        rec = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if rec.get("graph_hash") != graph_hash(g) or rec.get("config_hash") != cfg_hash or rec.get("errors"):
        return None
    return rec


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_ensemble(cfg: EnsembleConfig, out=None, workers: int | None = None, graphs=None):
    """Run ``cfg`` over the ensemble; returns ``(records, summary_rows)``.

    With ``out`` set, records go to ``out/records/`` and existing records
    whose graph and config hashes match are reused instead of recomputed.
    """
    graphs = graphs if graphs is not None else generate_ensemble(cfg.n, cfg.degree, cfg.count, cfg.seed, cfg.sign)
    out = Path(out) if out is not None else None
    cfg_hash = cfg.compute_hash()
    records: list[dict | None] = [None] * len(graphs)
    todo = []
    if out is not None:
        (out / "records").mkdir(parents=True, exist_ok=True)
        (out / "graphs").mkdir(parents=True, exist_ok=True)
        for i, g in enumerate(graphs):
            gpath = out / "graphs" / f"graph_{i:04d}.txt"
            if not gpath.exists() or gpath.read_text() != format_graph(g):
                _write_atomic(gpath, format_graph(g))
            records[i] = _load_if_current(_record_path(out, i), g, cfg_hash)
    todo = [i for i, r in enumerate(records) if r is None]
    log.info("ensemble: %d graphs, %d cached, %d to run", len(graphs), len(graphs) - len(todo), len(todo))

    def store(i, rec):
        records[i] = rec
        if out is not None:
            _write_atomic(_record_path(out, i), _dumps(rec))

    n_workers = _worker_count(workers)
    if n_workers == 1 or len(todo) <= 1:
        for i in todo:
            store(i, process_graph(i, graphs[i], cfg))
    else:
        with ProcessPoolExecutor(n_workers) as pool:
            futures = {i: pool.submit(process_graph, i, graphs[i], cfg) for i in todo}
            for i in todo:
                store(i, futures[i].result())

    rows = summarize(records)
    if out is not None:
        _write_atomic(out / "config.json", _dumps(cfg.to_dict()))
        _write_atomic(out / "records.csv", records_csv(records))
        _write_atomic(out / "summary.csv", rows_csv(rows))
    return records, rows


def load_records(out) -> list[dict]:
    paths = sorted((Path(out) / "records").glob("graph_*.json"))
    return [json.loads(p.read_text()) for p in paths]


def _mean_stderr(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    err = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return float(arr.mean()), err


def summarize(records) -> list[dict]:
    """Ensemble means per (algorithm, rounds, sub), recomputable from the records."""
    groups: dict[tuple, list[dict]] = {}
    optimum = {}
    for rec in records:
        for e in rec["results"]:
            key = (e["algorithm"], e["sub"], e["rounds"])
            groups.setdefault(key, []).append(e)
            optimum[id(e)] = rec["optimum"]
    rows = []
    for key in sorted(groups):
        es = groups[key]
        mean_b, err_b = _mean_stderr([e["B"] for e in es])
        rows.append({
            "algorithm": key[0],
            "rounds": key[2],
            "sub": key[1],
            "count": len(es),
            "mean_B": mean_b,
            "stderr_B": err_b,
            "min_B": min(e["B"] for e in es),
            "max_B": max(e["B"] for e in es),
            "mean_cq": _mean_stderr([e["cq"] for e in es])[0],
            "mean_cc": _mean_stderr([e["cc"] for e in es])[0],
            "mean_cq_over_opt": _mean_stderr([e["cq"] / optimum[id(e)] for e in es])[0],
            "mean_cc_over_opt": _mean_stderr([e["cc"] / optimum[id(e)] for e in es])[0],
        })
    return rows


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def rows_csv(rows: list[dict]) -> str:
    columns = ["algorithm", "rounds", "sub", "count", "mean_B", "stderr_B", "min_B", "max_B",
               "mean_cq", "mean_cc", "mean_cq_over_opt", "mean_cc_over_opt"]
    return _csv(rows, columns)


def records_csv(records) -> str:
    rows = []
    for rec in records:
        for e in rec["results"]:
            rows.append({
                "index": rec["index"], "graph_hash": rec["graph_hash"][:16], "optimum": rec["optimum"],
                "algorithm": e["algorithm"], "rounds": e["rounds"], "sub": e["sub"],
                "cq": e["cq"], "cc": e["cc"], "B": e["B"],
            })
    return _csv(rows, ["index", "graph_hash", "optimum", "algorithm", "rounds", "sub", "cq", "cc", "B"])


def gw_repetition_sweep(cfg: EnsembleConfig, ks=(1, 4, 16), rounds: int = 1, out=None,
                        workers: int | None = None, graphs=None):
    """Mean B of ST-QAOA over GW-best-of-k subroutines, for each k.

    Seeds follow :func:`run_ensemble`, so the k=1 column is the same
    computation as an ``st-qaoa:<rounds>:gw`` run with the same config.
    Returns ``(records, table_rows)``.
    """
    ks = sorted(set(int(k) for k in ks))
    algos = tuple(AlgoSpec("st-qaoa", rounds, f"gw:{k}") for k in ks)
    sweep_cfg = replace(cfg, algos=algos)
    sub_out = Path(out) / "gw_sweep" if out is not None else None
    records, _ = run_ensemble(sweep_cfg, sub_out, workers, graphs)
    table = []
    for k, spec in zip(ks, algos):
        entries = [(e, rec["optimum"]) for rec in records for e in rec["results"]
                   if e["algorithm"] == "st-qaoa" and e["sub"] == spec.sub and e["rounds"] == rounds]
        mean_b, err_b = _mean_stderr([e["B"] for e, _ in entries])
        table.append({
            "k": k,
            "count": len(entries),
            "mean_B": mean_b,
            "stderr_B": err_b,
            "min_B": min((e["B"] for e, _ in entries), default=math.nan),
            "mean_cc_over_opt": _mean_stderr([e["cc"] / opt for e, opt in entries])[0],
            "mean_cq_over_opt": _mean_stderr([e["cq"] / opt for e, opt in entries])[0],
        })
    if out is not None:
        cols = ["k", "count", "mean_B", "stderr_B", "min_B", "mean_cc_over_opt", "mean_cq_over_opt"]
        _write_atomic(Path(out) / "gw_sweep.csv", _csv(table, cols))
    return records, table


def audit(records, summary_rows=None, tol: float = 1e-9) -> list[str]:
    """Consistency problems in a set of records (empty list when clean).

    Checks stored ratios, the ST-QAOA guarantee against its own subroutine,
    QAOA-embedding dominance, and (optionally) that summary rows match a
    fresh recomputation.
    """
    problems = []
    for rec in records:
        idx = rec["index"]
        g = parse_graph(rec["graph"])
        if graph_hash(g) != rec["graph_hash"]:
            problems.append(f"graph {idx}: hash mismatch")
        for err in rec.get("errors", []):
            problems.append(f"graph {idx}: {err['stage']} failed: {err['error']}")
        qaoa = {e["rounds"]: e["cq"] for e in rec["results"] if e["algorithm"] == "qaoa"}
        for e in rec["results"]:
            tag = f"graph {idx} {e['algorithm']}:{e['rounds']}:{e['sub']}"
            if e["B"] != e["cq"] / e["cc"]:
                problems.append(f"{tag}: stored B != cq/cc")
            if e["cc"] < 1:
                problems.append(f"{tag}: classical value {e['cc']} < 1")
            if e["cq"] > rec["optimum"] + tol:
                problems.append(f"{tag}: cq {e['cq']} exceeds optimum {rec['optimum']}")
            if e["algorithm"] == "st-qaoa":
                if e["B"] < 1 - tol:
                    problems.append(f"{tag}: B = {e['B']!r} < 1")
                k = e["rounds"] // 2
                if e["rounds"] % 2 == 0 and k in qaoa and e["cq"] < qaoa[k] - tol:
                    problems.append(f"{tag}: cq {e['cq']!r} below qaoa:{k} {qaoa[k]!r}")
    if summary_rows is not None:
        fresh = summarize(records)
        if rows_csv(fresh) != rows_csv(summary_rows):
            problems.append("summary does not match records")
    return problems


def read_summary_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for k, v in row.items():
            if k in ("rounds", "count"):
                row[k] = int(v)
            elif k not in ("algorithm", "sub"):
                row[k] = float(v)
    return rows


def random_signed_graph(n: int, rng: np.random.Generator, extra: float = 0.4) -> SignedGraph:
    """Connected graph: a random tree plus each other pair with probability ``extra``; random signs."""
    order = rng.permutation(n)
    edges = {}
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(0, k)])
        edges[min(a, b), max(a, b)] = None
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in edges and rng.random() < extra:
                edges[a, b] = None
    return SignedGraph(n, tuple((a, b, int(rng.choice((-1, 1)))) for a, b in sorted(edges)))


def vst_check(draws: int = 100, max_n: int = 12, seed: int = 0) -> list[dict]:
    """Compare the closed-form VST objective with the simulated circuit on random draws."""
    from .signed_graph import random_spanning_tree
    from .vst_classical import vst_objective

    rng = np.random.default_rng(seed)
    rows = []
    for d in range(draws):
        n = int(rng.integers(2, max_n + 1))
        g = random_signed_graph(n, rng)
        t = random_spanning_tree(g, rng)
        gamma = rng.uniform(-np.pi, np.pi, n - 1)
        beta = rng.uniform(-np.pi, np.pi, n - 1)
        closed = vst_objective(g, t, gamma, beta)
        simulated = evaluate(build_vst_circuit(t), np.concatenate([gamma, beta]), g)
        rows.append({"draw": d, "n": n, "edges": g.n_edges, "closed_form": closed,
                     "statevector": simulated, "error": abs(closed - simulated)})
    return rows
