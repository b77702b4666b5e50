"""Edge weights and rotor configurations.

The weight of the edge at mechanism position i of vertex x is

    w(x, i) = -(1/deg(x)) * sum_{j=0}^{deg(x)-1} j * v(target at position (i+j+1) mod deg(x))

where v is the solved voltage.  Indices are taken modulo deg(x), so the
j = deg(x)-1 term wraps around to the base edge's own target.  Advancing the
rotor changes the weight by

    w(next) - w(current) = -v(target of next) + mean of v over the neighbors of x,

which is the increment the conserved experiment invariant relies on, and the
cyclic sum of increments around any vertex telescopes to zero.  A rotor
configuration pointing every vertex at a minimal-weight edge maximizes the
escape rate of the resulting rotor walk.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, SinkHasNoRotor
from .graphs import Graph, RotorMechanism
from .harmonic import HarmonicProfile
from .rng import philox_generator

logger = logging.getLogger(__name__)

# weights closer than this are treated as exact ties so solver noise cannot
# flip the chosen rotor between runs
TIE_TOL = 1e-13


@dataclass(frozen=True)
class RotorConfig:
    """Current rotor of every vertex, as an index into the mechanism order.

    pos has one entry per vertex; sinks carry -1 (they have no rotor).
    """

    pos: tuple[int, ...]


@dataclass(frozen=True)
class WeightTable:
    """Weights of all directed edges, flattened in mechanism-position order."""

    values: np.ndarray
    indptr: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def at(self, x: int, i: int) -> float:
        return float(self.values[self.indptr[x] + i])

    def vertex_slice(self, x: int) -> np.ndarray:
        return self.values[self.indptr[x]:self.indptr[x + 1]]


def _check_edge(g: Graph, x: int, i: int) -> None:
    if not (0 <= x < g.num_vertices):
        raise IndexOutOfRange(f"vertex id {x} out of range")
    if bool(g.is_sink[x]):
        raise SinkHasNoRotor(f"vertex {g.labels[x]} is a sink")
    if not (0 <= i < g.degree(x)):
        raise IndexOutOfRange(f"mechanism index {i} out of range for degree {g.degree(x)}")


def edge_weight(g: Graph, mech: RotorMechanism, profile: HarmonicProfile, x: int, i: int) -> float:
    """Weight of the edge at mechanism position i of non-sink vertex x."""
    _check_edge(g, x, i)
    v = profile.voltage
    order = mech.order[x]
    d = len(order)
    acc = 0.0
    for j in range(1, d):
        acc += j * v[order[(i + j + 1) % d]]
    return -acc / d


def weight_table(g: Graph, mech: RotorMechanism, profile: HarmonicProfile) -> WeightTable:
    """Weights of every directed edge of every non-sink vertex."""
    if profile.voltage.shape != (g.num_vertices,):
        raise DimensionMismatch("profile does not match the graph")
    v = profile.voltage
    values = np.zeros(int(mech.indptr[-1]))
    for x in range(g.num_vertices):
        order = mech.order[x]
        d = len(order)
        if d == 0:
            continue
        tv = v[np.fromiter(order, dtype=np.int64, count=d)]
        base = int(mech.indptr[x])
        j = np.arange(d)
        for i in range(d):
            values[base + i] = -float(np.dot(j, tv[(i + 1 + j) % d])) / d
    return WeightTable(values=values, indptr=mech.indptr)


def weight_increment(g: Graph, mech: RotorMechanism, profile: HarmonicProfile, x: int, i: int) -> float:
    """Weight change when the rotor at x advances off the edge at position i."""
    _check_edge(g, x, i)
    d = g.degree(x)
    return edge_weight(g, mech, profile, x, (i + 1) % d) - edge_weight(g, mech, profile, x, i)


def min_weight_config(g: Graph, wt: WeightTable) -> RotorConfig:
    """Rotor configuration pointing each vertex at a minimal-weight edge.

    Weights within TIE_TOL of the minimum count as tied; ties resolve to the
    smallest mechanism index.
    """
    pos = [-1] * g.num_vertices
    ties = 0
    for x in range(g.num_vertices):
        if g.is_sink[x]:
            continue
        ws = wt.vertex_slice(x)
        near = np.flatnonzero(ws <= ws.min() + TIE_TOL)
        if near.size > 1:
            ties += 1
        pos[x] = int(near[0])
    if ties:
        logger.debug("min-weight ties at %d of %d vertices", ties, g.num_vertices)
    return RotorConfig(pos=tuple(pos))


def count_min_weight_ties(g: Graph, wt: WeightTable) -> int:
    """Number of vertices whose minimal weight is attained by several edges."""
    ties = 0
    for x in range(g.num_vertices):
        if g.is_sink[x]:
            continue
        ws = wt.vertex_slice(x)
        if np.flatnonzero(ws <= ws.min() + TIE_TOL).size > 1:
            ties += 1
    return ties


def random_config(g: Graph, seed: int) -> RotorConfig:
    """Independent uniformly random rotor at every non-sink vertex."""
    rng = philox_generator(seed)
    pos = [-1] * g.num_vertices
    for x in range(g.num_vertices):
        if not g.is_sink[x]:
            pos[x] = int(rng.integers(0, g.degree(x)))
    return RotorConfig(pos=tuple(pos))


def check_config(g: Graph, config: RotorConfig) -> None:
    """Validate bounds: -1 at sinks, 0 <= pos < deg elsewhere."""
    if len(config.pos) != g.num_vertices:
        raise DimensionMismatch("config length does not match vertex count")
    for x, p in enumerate(config.pos):
        if g.is_sink[x]:
            if p != -1:
                raise DimensionMismatch(f"sink {g.labels[x]} must carry rotor index -1")
        elif not (0 <= p < g.degree(x)):
            raise DimensionMismatch(f"rotor index {p} out of range at {g.labels[x]}")
