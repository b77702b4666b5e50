"""
Voltages, Green values, and escape probabilities
================================================

A particle performing a simple random walk on a finite graph with absorbing
sinks visits each vertex some expected number of times before it is absorbed.
That expectation, as a function of the start vertex and divided by vertex
degree, solves a discrete Dirichlet problem: it is harmonic away from the
origin, has a unit source at the origin, and vanishes on the sinks.

This script solves that system on a few graphs and cross-checks the result
against direct Monte Carlo simulation.
"""
import numpy as np

from rotorwalk import (
    build_lattice_ball,
    build_path,
    mc_green,
    residual,
    solve_harmonic,
    srw_escape_mc,
)

# A three-vertex path: origin 0, middle vertex 1, absorbing sink 2.
# From the origin the walker must step to the middle; from the middle it
# flips a coin between the origin and the sink.
g = build_path(3)
profile = solve_harmonic(g)

print("three-vertex path", g.labels)
print("  voltage  (expected visits / degree):", profile.voltage)
print("  green    (expected visits):         ", profile.green)
print("  escape probability alpha = 1/G(o):  ", profile.escape_probability)
print("  solver residual:                    ", profile.residual)

# The residual is the max defect of the defining equations; a hand-made
# profile that is off by 0.1 at one vertex reports exactly that defect.
bad = np.array([2.0, 1.1, 0.0])
print("  residual of a perturbed profile:    ", residual(g, bad))

# Monte Carlo cross-check: run 100k random walks from o until absorption and
# count visits per vertex. The estimates agree with the solver within a few
# standard errors.
est = mc_green(g, walks=100_000, seed=0)
print("\nMonte Carlo on the path (100k walks)")
for x, lab in enumerate(g.labels):
    se = est.stderr[x]
    print(f"  vertex {lab}: mc = {est.visits[x]:.4f} +- {se:.4f}   exact = {profile.green[x]:.4f}")

# Truncated lattice balls: vertices of Z^3 within distance R of the origin,
# with the boundary shell collapsed into sinks. Growing R adds return routes,
# so the expected visit count at the origin grows and the escape probability
# falls toward the infinite-lattice value (about 0.66).
print("\nZ^3 balls of growing radius")
for r in (2, 4, 6, 8, 10):
    p = solve_harmonic(build_lattice_ball(3, r))
    print(f"  R = {r:2d}:  G(o) = {p.green[0]:.6f}   alpha_R = {p.escape_probability:.6f}")

# Direct simulation of the escape event itself: fraction of walks from o that
# reach a sink before returning to o.
g10 = build_lattice_ball(3, 10)
alpha = solve_harmonic(g10).escape_probability
p_hat, se = srw_escape_mc(g10, 100_000, seed=1)
print(f"\nescape frequency on the R=10 ball: {p_hat:.4f} +- {se:.4f} (solver: {alpha:.4f})")
