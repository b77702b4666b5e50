"""Green function of the absorbed walk, in voltage form.

The expected number of visits G(x) by simple random walk from the origin
(counting the start, stopping at a sink) satisfies a discrete Dirichlet
problem; dividing by degree gives the voltage v = G/deg, which obeys

    mean of v over the neighbors of x  =  v(x) - 1{x=origin}/deg(origin)

at every non-sink x, with v = 0 on sinks.  Solving for v instead of G keeps
the system a plain neighbor-averaging one with a single unit source and
avoids degree bookkeeping; G is reconstructed as v * deg.  The escape
probability (never returning to the origin) is 1/G(origin).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import AbortedMaxSteps, DimensionMismatch, InvalidParameter, NonConvergence
from .graphs import Graph
from .rng import philox_generator

DEFAULT_TOL = 1e-12
DEFAULT_WALK_CAP = 10**8
_MC_CHUNK = 512


@dataclass(frozen=True)
class HarmonicProfile:
    """Solved voltage v = G/deg with its Green function and escape probability."""

    voltage: np.ndarray
    green: np.ndarray
    escape_probability: float
    residual: float

    def __post_init__(self):
        self.voltage.setflags(write=False)
        self.green.setflags(write=False)


@dataclass(frozen=True)
class VisitEstimates:
    """Monte Carlo visit-count estimates with per-vertex standard errors."""

    visits: np.ndarray
    stderr: np.ndarray
    walks: int


def _dirichlet_system(g: Graph):
    """Sparse (D - A) system over non-sink vertices, with multiplicity."""
    live = np.flatnonzero(~g.is_sink)
    pos = -np.ones(g.num_vertices, dtype=np.int64)
    pos[live] = np.arange(live.size)

    rows, cols, vals = [], [], []
    for li, x in enumerate(live):
        rows.append(li)
        cols.append(li)
        vals.append(float(g.degree(int(x))))
        for y in g.adjacency[x]:
            if pos[y] >= 0:
                rows.append(li)
                cols.append(pos[y])
                vals.append(-1.0)
    mat = sp.csc_matrix(
        (vals, (rows, cols)), shape=(live.size, live.size), dtype=np.float64
    )
    # duplicate (row, col) entries are summed by scipy, which is what parallel
    # edges between two live vertices would need; live pairs are simple anyway
    rhs = np.zeros(live.size)
    rhs[pos[g.origin]] = 1.0
    return live, mat, rhs


def residual(g: Graph, profile) -> float:
    """Max defect of the neighbor-averaging equations over non-sink vertices."""
    v = profile.voltage if isinstance(profile, HarmonicProfile) else np.asarray(profile, dtype=np.float64)
    if v.shape != (g.num_vertices,):
        raise DimensionMismatch(
            f"profile has {v.shape} entries for a graph with {g.num_vertices} vertices"
        )
    deg = g.degrees.astype(np.float64)
    # no vertex has an empty adjacency, so reduceat segments are all nonempty
    neighbor_sums = np.add.reduceat(v[g.adj_flat], g.adj_indptr[:-1])
    defect = neighbor_sums / deg - v
    defect[g.origin] += 1.0 / deg[g.origin]
    defect[g.is_sink] = 0.0
    return float(np.max(np.abs(defect)))


def solve_harmonic(g: Graph, tol: float = DEFAULT_TOL) -> HarmonicProfile:
    """Solve the voltage system to max residual <= tol.

    Uses a direct sparse factorization plus iterative refinement; raises
    NonConvergence if refinement stalls above tol.
    """
    if tol <= 0:
        raise InvalidParameter(f"tol must be positive, got {tol}")

    live, mat, rhs = _dirichlet_system(g)
    lu = splu(mat)
    hv = lu.solve(rhs)

    def assemble(values):
        v = np.zeros(g.num_vertices)
        v[live] = values
        # clip roundoff-scale negatives; true voltages are nonnegative
        v[(v < 0) & (v > -1e-12)] = 0.0
        return v

    v = assemble(hv)
    res = residual(g, v)
    for _ in range(3):
        if res <= tol:
            break
        hv = hv + lu.solve(rhs - mat @ hv)
        v = assemble(hv)
        res = residual(g, v)
    if res > tol:
        raise NonConvergence(f"residual {res:.3e} above tolerance {tol:.3e}")

    green = v * g.degrees
    return HarmonicProfile(
        voltage=v,
        green=green,
        escape_probability=1.0 / float(green[g.origin]),
        residual=res,
    )


def mc_green(g: Graph, walks: int, seed: int, max_steps: int = DEFAULT_WALK_CAP) -> VisitEstimates:
    """Estimate visit counts from independent absorbed walks started at the origin.

    Walks run until they step onto a sink; the arrival at the sink is not
    counted as a visit.  Deterministic in (graph, walks, seed): walk i draws
    from Philox stream i // chunk regardless of how chunks are scheduled.
    """
    if walks < 1:
        raise InvalidParameter(f"walks must be >= 1, got {walks}")

    nv = g.num_vertices
    deg = g.degrees
    indptr = g.adj_indptr
    flat = g.adj_flat
    sink = g.is_sink

    total = np.zeros(nv)
    total_sq = np.zeros(nv)
    for start in range(0, walks, _MC_CHUNK):
        m = min(_MC_CHUNK, walks - start)
        rng = philox_generator(seed, stream=start // _MC_CHUNK)
        counts = np.zeros((m, nv), dtype=np.int64)
        counts[:, g.origin] = 1
        pos = np.full(m, g.origin, dtype=np.int64)
        rows = np.arange(m)
        steps = 0
        while rows.size:
            if steps >= max_steps:
                raise AbortedMaxSteps(f"a walk exceeded {max_steps} steps before absorption")
            u = rng.random(rows.size)
            d = deg[pos]
            k = np.minimum((u * d).astype(np.int64), d - 1)
            nxt = flat[indptr[pos] + k]
            running = ~sink[nxt]
            rows = rows[running]
            pos = nxt[running]
            np.add.at(counts, (rows, pos), 1)
            steps += 1
        total += counts.sum(axis=0)
        total_sq += (counts.astype(np.float64) ** 2).sum(axis=0)

    mean = total / walks
    if walks > 1:
        var = (total_sq - walks * mean**2) / (walks - 1)
        stderr = np.sqrt(np.maximum(var, 0.0) / walks)
    else:
        stderr = np.zeros(nv)
    return VisitEstimates(visits=mean, stderr=stderr, walks=walks)
