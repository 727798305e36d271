"""Averaging dynamics x(k) = W_k x(k-1) over freshly sampled graphs.

Each step turns the current graph realization into a row-stochastic
weight matrix (every node averages itself with its out-neighbors) and
applies it to the state. Row-stochasticity keeps every state inside the
convex hull of the previous ones, so the spread max(x) - min(x) can only
shrink; a run stops once it drops below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import DirectedGraph, ModelParams

__all__ = [
    "DEFAULT_MAX_STEPS",
    "DEFAULT_TOL",
    "ConsensusOutcome",
    "NonConvergenceError",
    "run_consensus",
    "step",
    "weight_matrix",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEPS = 10**6


class NonConvergenceError(RuntimeError):
    """The spread failed to drop below tolerance within the step budget."""

    def __init__(self, message: str, steps: int | None = None, spread: float | None = None):
        super().__init__(message)
        self.steps = steps
        self.spread = spread


def weight_matrix(graph: DirectedGraph) -> np.ndarray:
    """Row-stochastic weights of one realization.

    w_ij = (a_ij + [i == j]) / (d_i + 1): node i averages its own state
    with those of its d_i out-neighbors. The implicit self-loop keeps the
    normalizer positive even for isolated nodes.
    """
    w = graph.adjacency.astype(float)
    np.fill_diagonal(w, 1.0)
    w /= (graph.out_degrees + 1.0)[:, None]
    return w


def step(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """One synchronous update W @ x."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or w.shape != (x.size, x.size):
        raise ValueError(f"shape mismatch: W is {w.shape}, x has length {x.size}")
    return w @ x


@dataclass(frozen=True)
class ConsensusOutcome:
    """End state of one run: agreed value, steps taken, final spread."""

    value: float
    steps: int
    spread: float


def run_consensus(
    params: ModelParams,
    x0,
    rng: np.random.Generator,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> ConsensusOutcome:
    """Iterate with an independent graph per step until the spread is < tol.

    The reported value is the mean of the final state, which is within
    tol of every coordinate and always inside [min(x0), max(x0)]. A run
    that exhausts max_steps raises NonConvergenceError rather than
    returning a truncated state.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    x = np.array(x0, dtype=float)
    if x.ndim != 1 or x.size != params.n:
        raise ValueError(f"x0 must be a length-{params.n} vector")

    n = params.n
    eye = np.eye(n)
    steps = 0
    spread = float(x.max() - x.min())
    while spread >= tol:
        if steps >= max_steps:
            raise NonConvergenceError(
                f"spread {spread:.3e} still >= tol {tol:.1e} after {max_steps} steps",
                steps=steps,
                spread=spread,
            )
        # Inlined sample_graph + weight_matrix; same draws, no per-step objects.
        adj = (rng.random((n, n)) < params.p).astype(float)
        np.fill_diagonal(adj, 0.0)
        w = (adj + eye) / (adj.sum(axis=1) + 1.0)[:, None]
        x = w @ x
        steps += 1
        spread = float(x.max() - x.min())
    return ConsensusOutcome(value=float(x.mean()), steps=steps, spread=spread)
