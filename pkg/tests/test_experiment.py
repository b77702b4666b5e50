import pytest

from rotorwalk import (
    AbortedMaxSteps,
    DimensionMismatch,
    InvalidParameter,
    ParticleStatus,
    RotorConfig,
    build_path,
    compute_invariant,
    default_mechanism,
    init_experiment,
    min_weight_config,
    random_config,
    range_at,
    run_until_settled,
    shuffled_mechanism,
    solve_harmonic,
    step,
    survivors_at,
    weight_table,
)

from oracles import reference_invariant, reference_run


def test_p3_two_particle_trace(p3_solved):
    """Every intermediate state of the n=2 run, frozen by hand.

    Particle 1 moves at even t, particle 0 at odd t.  Expected states by t:
    positions of particle 0: o o a a o; particle 1: o a a s s;
    rotor index at a:        0 0 0 1 0.
    """
    g, mech, profile, wt = p3_solved
    cfg = min_weight_config(g, wt)
    state = init_experiment(g, mech, cfg, 2)

    o, a, s = 0, 1, 2
    expect_p0 = [o, o, a, a, o]
    expect_p1 = [o, a, a, s, s]
    expect_rho_a = [0, 0, 0, 1, 0]

    for t in range(5):
        assert state.t == t
        assert state.positions[0] == expect_p0[t]
        assert state.positions[1] == expect_p1[t]
        assert state.rho[a] == expect_rho_a[t]
        assert compute_invariant(state, profile, wt) == 4.0
        if t < 4:
            step(state)

    assert state.settled
    assert state.statuses == [ParticleStatus.RETURNED, ParticleStatus.ABSORBED]
    assert survivors_at(state) == 1
    assert range_at(state) == {o, a, s}


def test_p3_even_counts_escape_exactly_half(p3_solved):
    g, mech, profile, wt = p3_solved
    cfg = min_weight_config(g, wt)
    for k in range(1, 9):
        state = init_experiment(g, mech, cfg, 2 * k)
        run_until_settled(state)
        assert state.survivors == k
        assert compute_invariant(state, profile, wt) == pytest.approx(
            4.0 * k, abs=1e-12
        )


def test_single_particle_bad_config_returns(p3_solved):
    # rotor at a parked on the sink edge: the advance sends the walker home
    g, mech, profile, wt = p3_solved
    state = init_experiment(g, mech, RotorConfig(pos=(0, 1, -1)), 1)
    run_until_settled(state)
    assert state.survivors == 0
    assert state.t == 2
    assert state.statuses == [ParticleStatus.RETURNED]


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
@pytest.mark.parametrize("mech_seed", [None, 5, 6])
@pytest.mark.parametrize("config_kind", ["min", "random"])
def test_engine_matches_reference(small_graph, n, mech_seed, config_kind):
    g = small_graph
    mech = default_mechanism(g) if mech_seed is None else shuffled_mechanism(g, mech_seed)
    profile = solve_harmonic(g)
    wt = weight_table(g, mech, profile)
    config = min_weight_config(g, wt) if config_kind == "min" else random_config(g, n)

    ref = reference_run(g, mech, config, n)
    state = init_experiment(g, mech, config, n)
    run_until_settled(state)

    assert state.t == ref.t
    assert state.positions == ref.positions
    assert state.rho == ref.rho
    assert state.survivors == ref.survivors
    assert state.range == ref.visited
    for i in range(n):
        assert (state.status[i] == ParticleStatus.RETURNED) == ref.returned[i]


def test_stepwise_equals_reference_history(small_graph):
    g = small_graph
    mech = shuffled_mechanism(g, 2)
    profile = solve_harmonic(g)
    wt = weight_table(g, mech, profile)
    config = random_config(g, 77)
    n = 3

    ref = reference_run(g, mech, config, n)
    state = init_experiment(g, mech, config, n)
    for t, positions, rho in ref.history:
        assert state.t == t
        assert tuple(state.positions) == positions
        assert tuple(state.rho) == rho
        if t < ref.t:
            step(state)
    assert state.settled


def test_invariant_matches_reference_formula(small_graph):
    g = small_graph
    mech = default_mechanism(g)
    profile = solve_harmonic(g)
    wt = weight_table(g, mech, profile)
    config = random_config(g, 3)
    n = 4
    state = init_experiment(g, mech, config, n)

    def weight_of(x, i):
        return wt.at(x, i)

    visited = {g.origin}
    while not state.settled:
        step(state)
        if state.last_event is not None:
            visited.add(state.last_event[2])
        expected = reference_invariant(
            g, profile.voltage, weight_of,
            state.positions, state.rho, list(config.pos), visited, state.t, n,
        )
        assert compute_invariant(state, profile, wt) == pytest.approx(expected, abs=1e-12)


def test_resume_after_manual_steps(small_graph):
    g = small_graph
    mech = shuffled_mechanism(g, 1)
    config = random_config(g, 9)
    n = 5

    full = init_experiment(g, mech, config, n)
    run_until_settled(full)

    resumed = init_experiment(g, mech, config, n)
    for _ in range(7):  # stop mid-round on purpose
        if resumed.settled:
            break
        step(resumed)
    run_until_settled(resumed)

    assert resumed.t == full.t
    assert resumed.positions == full.positions
    assert resumed.rho == full.rho
    assert resumed.status == full.status


def test_observer_sees_every_move(small_graph):
    # idle turns of finished particles are skipped; actual moves are not
    g = small_graph
    mech = shuffled_mechanism(g, 4)
    cfg = random_config(g, 13)
    n = 4
    moves = []
    state = init_experiment(g, mech, cfg, n)
    run_until_settled(state, observer=lambda st: moves.append(st.t - 1))
    ref = reference_run(g, mech, cfg, n)
    changed = [
        t for t, (prev, cur) in enumerate(zip(ref.history, ref.history[1:]))
        if prev[1] != cur[1]
    ]
    assert moves == changed


def test_max_steps_aborts(p3_solved):
    g, mech, _, wt = p3_solved
    cfg = min_weight_config(g, wt)
    state = init_experiment(g, mech, cfg, 8)
    with pytest.raises(AbortedMaxSteps):
        run_until_settled(state, max_steps=3)
    state2 = init_experiment(g, mech, cfg, 8)
    with pytest.raises(AbortedMaxSteps):
        run_until_settled(state2, max_steps=3, observer=lambda st: None)


def test_settled_run_is_idempotent(p3_solved):
    g, mech, _, wt = p3_solved
    cfg = min_weight_config(g, wt)
    state = init_experiment(g, mech, cfg, 2)
    run_until_settled(state)
    t, positions = state.t, list(state.positions)
    run_until_settled(state)
    step(state)  # terminal mover: a no-op that still advances the clock
    assert state.positions == positions
    assert state.t == t + 1


def test_input_validation(p3_solved):
    g, mech, profile, wt = p3_solved
    cfg = min_weight_config(g, wt)
    with pytest.raises(InvalidParameter):
        init_experiment(g, mech, cfg, 0)
    state = init_experiment(g, mech, cfg, 1)
    with pytest.raises(InvalidParameter):
        run_until_settled(state, max_steps=0)
    other = solve_harmonic(build_path(5))
    with pytest.raises(DimensionMismatch):
        compute_invariant(state, other, wt)
