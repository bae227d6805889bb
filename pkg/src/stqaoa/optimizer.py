"""Multi-start gradient ascent over circuit parameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .quantum_sim import Circuit, compile_circuit, evaluate, objective_vector
from .signed_graph import SignedGraph

__all__ = ["OptimizeConfig", "StartTrace", "OptimizeReport", "gradient", "adjoint_gradient", "optimize"]


@dataclass(frozen=True)
class OptimizeConfig:
    max_iter: int = 500
    tol: float = 1e-10  # stop when one accepted step gains less than this
    initial_step: float = 0.5
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-12
    # first trial step is min(initial_step, growth * last accepted step); 0 disables
    step_growth: float = 0.0
    init_low: float = -np.pi / 2
    init_high: float = np.pi / 2
    direction: str = "bfgs"  # or "steepest"
    gradient: str = "adjoint"  # or "fd"
    fd_step: float = 1e-5
    record_trajectory: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StartTrace:
    start_index: int
    warm: bool
    initial_value: float
    final_value: float
    iterations: int
    converged: bool
    values: list[float] | None = None


@dataclass
class OptimizeReport:
    best_params: np.ndarray
    best_value: float
    starts: int
    traces: list[StartTrace]
    seed: int | None
    config: OptimizeConfig = field(default_factory=OptimizeConfig)

    @property
    def best_start(self) -> int:
        return max(range(len(self.traces)), key=lambda k: (self.traces[k].final_value, -k))

    def summary(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_params": [float(x) for x in self.best_params],
            "starts": self.starts,
            "best_start": self.best_start,
            "iterations": [t.iterations for t in self.traces],
            "converged": sum(t.converged for t in self.traces),
            "seed": self.seed,
        }


def gradient(c: Circuit, params, g: SignedGraph, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of <C> with step ``h``."""
    params = np.asarray(params, dtype=float)
    if params.size != c.n_params:
        raise ValueError(f"circuit takes {c.n_params} params, got {params.size}")
    out = np.zeros(c.n_params)
    for k in range(c.n_params):
        step = np.zeros(c.n_params)
        step[k] = h
        out[k] = (evaluate(c, params + step, g) - evaluate(c, params - step, g)) / (2 * h)
    return out


def adjoint_gradient(c: Circuit, params, g: SignedGraph) -> np.ndarray:
    """Exact gradient of <C> by one forward and one reverse sweep."""
    params = np.asarray(params, dtype=float)
    if params.size != c.n_params:
        raise ValueError(f"circuit takes {c.n_params} params, got {params.size}")
    return compile_circuit(c).value_and_grad(params, objective_vector(g))[1]


def _ascend(f, fg, x0, cfg: OptimizeConfig):
    """Monotone ascent from ``x0``; every accepted step passes the Armijo test.

    With ``direction="bfgs"`` the step follows an inverse-Hessian estimate of
    the negated objective, falling back to the gradient whenever that
    estimate stops pointing uphill.
    """
    x = np.array(x0, dtype=float)
    value, grad = fg(x)
    trace = [value] if cfg.record_trajectory else None
    initial = value
    H = np.eye(x.size)
    last_step = cfg.initial_step
    converged = False
    it = 0
    while it < cfg.max_iter:
        if not np.any(grad):
            converged = True
            break
        d = H @ grad if cfg.direction == "bfgs" else grad
        slope = float(grad @ d)
        if slope <= 0:
            H = np.eye(x.size)
            d, slope = grad, float(grad @ grad)
        t = 1.0 if cfg.direction == "bfgs" else cfg.initial_step
        if cfg.step_growth > 0:
            t = min(t, cfg.step_growth * last_step)
        while True:
            cand = x + t * d
            cand_value = f(cand)
            if cand_value >= value + cfg.armijo * t * slope:
                break
            t *= cfg.shrink
            if t < cfg.min_step:
                cand = None
                break
        if cand is None:
            converged = True
            break
        it += 1
        gain = cand_value - value
        cand_value, cand_grad = fg(cand)
        if cfg.direction == "bfgs":
            # update for the minimisation of -f: y = -(g_new - g_old)
            s_vec = cand - x
            y_vec = grad - cand_grad
            sy = float(s_vec @ y_vec)
            if sy > 1e-12:
                rho = 1.0 / sy
                I = np.eye(x.size)
                H = (I - rho * np.outer(s_vec, y_vec)) @ H @ (I - rho * np.outer(y_vec, s_vec)) + rho * np.outer(s_vec, s_vec)
        x, value, grad = cand, cand_value, cand_grad
        last_step = t
        if trace is not None:
            trace.append(value)
        if gain < cfg.tol:
            converged = True
            break
    return x, value, initial, it, converged, trace


def optimize(
    c: Circuit,
    g: SignedGraph,
    starts: int = 100,
    seed=None,
    config: OptimizeConfig | None = None,
    warm_starts=(),
) -> OptimizeReport:
    """Best of ``starts`` random starts plus any ``warm_starts``.

    Warm starts run first (indices 0..). Random starts are uniform in
    ``[init_low, init_high)`` per parameter. Ties go to the lowest index.
    """
    cfg = config or OptimizeConfig()
    if starts < 0 or (starts == 0 and not len(warm_starts)):
        raise ValueError("need at least one start")
    if c.n_qubits != g.n_vertices:
        raise ValueError(f"circuit has {c.n_qubits} qubits, graph has {g.n_vertices} vertices")
    compiled = compile_circuit(c)
    cost = objective_vector(g)

    def f(x):
        return compiled.expectation(x, cost)

    if cfg.gradient == "adjoint":
        def fg(x):
            return compiled.value_and_grad(x, cost)
    elif cfg.gradient == "fd":
        def fg(x):
            return f(x), gradient(c, x, g, cfg.fd_step)
    else:
        raise ValueError(f"unknown gradient method {cfg.gradient!r}")

    if c.n_params == 0:
        value = f(np.zeros(0))
        trace = StartTrace(0, False, value, value, 0, True, [value] if cfg.record_trajectory else None)
        return OptimizeReport(np.zeros(0), value, 1, [trace], seed, cfg)

    rng = np.random.default_rng(seed)
    inits = [(np.asarray(w, dtype=float), True) for w in warm_starts]
    for w, _ in inits:
        if w.shape != (c.n_params,):
            raise ValueError(f"warm start has shape {w.shape}, expected ({c.n_params},)")
    inits += [(rng.uniform(cfg.init_low, cfg.init_high, c.n_params), False) for _ in range(starts)]

    traces = []
    best_x, best_value = None, -np.inf
    for k, (x0, warm) in enumerate(inits):
        x, value, initial, it, conv, trace = _ascend(f, fg, x0, cfg)
        traces.append(StartTrace(k, warm, initial, value, it, conv, trace))
        if value > best_value:
            best_x, best_value = x, value
    return OptimizeReport(best_x, best_value, len(inits), traces, seed, cfg)
