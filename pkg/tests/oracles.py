"""Independent reference implementations used only by tests.

Deliberately naive: the Green function is solved densely in visit-count form
(the package solves a sparse voltage-form system), and the experiment is a
line-by-line transcription of its defining recurrence with no bookkeeping
shortcuts.  Agreement between these and the package is the main correctness
evidence, so nothing here may import from the modules it checks beyond the
plain data containers.
"""
from __future__ import annotations

import numpy as np


def dense_green(g):
    """Visit counts G, voltage v = G/deg and escape probability 1/G(origin).

    Solves (I - P^T) G = e_origin densely, where P(y, x) is the one-step
    transition probability (with edge multiplicity) and sinks kill the walk.
    """
    n = g.num_vertices
    live = [x for x in range(n) if x not in g.sinks]
    pos = {x: k for k, x in enumerate(live)}

    mat = np.eye(len(live))
    for y in live:
        deg = len(g.adjacency[y])
        for x in g.adjacency[y]:
            if x in pos:
                mat[pos[x], pos[y]] -= 1.0 / deg
    rhs = np.zeros(len(live))
    rhs[pos[g.origin]] = 1.0

    sol = np.linalg.solve(mat, rhs)
    green = np.zeros(n)
    for x, k in pos.items():
        green[x] = sol[k]
    voltage = np.zeros(n)
    for x in range(n):
        voltage[x] = green[x] / len(g.adjacency[x])
    return green, voltage, 1.0 / green[g.origin]


class ReferenceRun:
    """Result of the naive simulation: final state plus full history."""

    def __init__(self, positions, returned, rho, t, history, visited):
        self.positions = positions
        self.returned = returned
        self.rho = rho
        self.t = t
        self.history = history  # list of (t, positions tuple, rho tuple)
        self.visited = visited

    @property
    def survivors(self) -> int:
        return sum(1 for r in self.returned if not r)


def reference_run(g, mech, config, n, max_steps=10**7) -> ReferenceRun:
    """Transcribe the recurrence: at step t, particle (t+1) mod n acts.

    A particle that has returned to the origin or sits on a sink does
    nothing; otherwise the rotor at its vertex advances and the particle
    follows it.  Runs until no particle can act; t then equals one past the
    final acting step (trailing idle steps are not executed).
    """
    positions = [g.origin] * n
    returned = [False] * n
    rho = list(config.pos)
    visited = {g.origin}
    history = [(0, tuple(positions), tuple(rho))]
    t = 0

    def someone_can_act():
        return any(
            not returned[i] and positions[i] not in g.sinks for i in range(n)
        )

    while someone_can_act():
        if t >= max_steps:
            raise RuntimeError(f"reference run unsettled after {t} steps")
        i = (t + 1) % n
        if not returned[i] and positions[i] not in g.sinks:
            x = positions[i]
            rho[x] = (rho[x] + 1) % len(mech.order[x])
            positions[i] = mech.order[x][rho[x]]
            visited.add(positions[i])
            if positions[i] == g.origin:
                returned[i] = True
        t += 1
        history.append((t, tuple(positions), tuple(rho)))

    return ReferenceRun(positions, returned, rho, t, history, visited)


def reference_invariant(g, voltage, weight_of, positions, rho, rho0, visited, t, n):
    """Conserved quantity from a raw snapshot.

    weight_of(x, i) gives the weight of edge i at vertex x; the rotor-weight
    displacement is summed over visited non-sink vertices only.
    """
    total = sum(voltage[p] for p in positions)
    total += min(t, n) / len(g.adjacency[g.origin])
    for x in visited:
        if x not in g.sinks:
            total += weight_of(x, rho[x]) - weight_of(x, rho0[x])
    return total


def reference_edge_weight(g, mech, voltage, x, i):
    """Definition of the edge weight, written as the plain modular sum."""
    order = mech.order[x]
    d = len(order)
    return -sum(j * voltage[order[(i + j + 1) % d]] for j in range(d)) / d
