"""Command-line interface.

Subcommands:
    green    solve the voltage/Green profile, print alpha and residual
    rho-min  build the weight table and the weight-minimizing configuration
    run      run the n-particle escape experiment and write reports
    verify   run the built-in property suite

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 runtime abort (non-convergence or step-budget exhaustion).

A YAML config file can stand in for flags (--config-file); explicitly
given flags win over file values.  All randomness is seeded; defaults are
fixed constants, never the clock, so identical invocations give identical
bytes in every written artifact.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .analysis import EscapeReport, InvariantTracker, escape_sweep
from .errors import (
    AbortedMaxSteps,
    DimensionMismatch,
    GraphInvalid,
    InvalidParameter,
    NonConvergence,
)
from .experiment import ParticleStatus, init_experiment, run_until_settled
from .graphs import (
    Graph,
    build_bary_tree,
    build_lattice_ball,
    build_path,
    default_mechanism,
    load_edge_list,
    shuffled_mechanism,
)
from .harmonic import solve_harmonic
from .serialize import (
    config_csv,
    load_config_csv,
    profile_csv,
    report_csv,
    report_json,
    trace_writer,
    weights_csv,
)
from .verify import all_passed, run_verification
from .weights import count_min_weight_ties, min_weight_config, random_config, weight_table

_DEFAULTS = {
    "mechanism": "default",
    "seed_mech": 0,
    "config": "rho-min",
    "seed_config": 0,
    "n": [1],
    "check_invariant": False,
    "max_steps": 10**9,
    "quick": False,
    "inject_corruption": False,
}

_FILE_KEYS = {
    "path", "lattice", "tree", "edges", "origin", "sinks",
    "mechanism", "seed_mech", "config", "seed_config", "n",
    "check_invariant", "out_dir", "trace", "max_steps",
}


def _int_token(tok) -> int:
    """Accept bare ints and `key=value` tokens such as d=3 or r=8."""
    s = str(tok)
    if "=" in s:
        s = s.split("=", 1)[1]
    try:
        return int(s)
    except ValueError:
        raise InvalidParameter(f"expected an integer, got {tok!r}")


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [_int_token(v) for v in value]
    return [_int_token(tok) for tok in str(value).split(",") if tok.strip()]


def _str_list(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [tok.strip() for tok in str(value).split(",") if tok.strip()]


def _merge_config_file(ns: argparse.Namespace) -> None:
    """File values fill options the command line left unset."""
    if not getattr(ns, "config_file", None):
        return
    text = Path(ns.config_file).read_text()
    data = yaml.safe_load(text)
    if data is None:
        return
    if not isinstance(data, dict):
        raise InvalidParameter("config file must be a mapping of option names to values")
    graph_section = data.pop("graph", None)
    if isinstance(graph_section, dict):
        data.update(graph_section)
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise InvalidParameter(f"unknown config file keys: {sorted(unknown)}")
    for key, value in data.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, value)


def _fill_defaults(ns: argparse.Namespace) -> None:
    for key, value in _DEFAULTS.items():
        if getattr(ns, key, None) is None and hasattr(ns, key):
            setattr(ns, key, value)


def _build_graph(ns: argparse.Namespace) -> Graph:
    given = [k for k in ("path", "lattice", "tree", "edges") if getattr(ns, k, None) is not None]
    if hasattr(ns, "graph") and ns.graph is not None:
        if given:
            raise InvalidParameter("give either --graph or a graph family flag, not both")
        return _parse_graph_spec(ns.graph)
    if len(given) != 1:
        raise InvalidParameter(
            "exactly one of --path, --lattice, --tree, --edges is required"
        )
    kind = given[0]
    if kind == "path":
        return build_path(_int_token(ns.path))
    if kind == "lattice":
        d, r = _int_list(ns.lattice)
        return build_lattice_ball(d, r)
    if kind == "tree":
        b, depth = _int_list(ns.tree)
        return build_bary_tree(b, depth)
    if ns.origin is None or ns.sinks is None:
        raise InvalidParameter("--edges needs --origin and --sinks")
    text = Path(ns.edges).read_text()
    return load_edge_list(text, ns.origin, _str_list(ns.sinks))


def _parse_graph_spec(spec: str) -> Graph:
    """Compact graph spec: path:3, lattice:2,5, tree:2,6."""
    kind, _, rest = spec.partition(":")
    params = _int_list(rest) if rest else []
    if kind == "path" and len(params) == 1:
        return build_path(params[0])
    if kind == "lattice" and len(params) == 2:
        return build_lattice_ball(*params)
    if kind == "tree" and len(params) == 2:
        return build_bary_tree(*params)
    raise InvalidParameter(
        f"bad graph spec {spec!r}; use path:K, lattice:D,R or tree:B,DEPTH"
    )


def _build_mechanism(g: Graph, ns: argparse.Namespace):
    if ns.mechanism == "default":
        return default_mechanism(g)
    if ns.mechanism == "shuffled":
        return shuffled_mechanism(g, _int_token(ns.seed_mech))
    raise InvalidParameter(f"unknown mechanism {ns.mechanism!r}")


def _build_config(g: Graph, mech, wt, ns: argparse.Namespace):
    choice = ns.config
    if choice == "rho-min":
        return min_weight_config(g, wt)
    if choice == "random":
        return random_config(g, _int_token(ns.seed_config))
    return load_config_csv(g, mech, Path(choice).read_text())


def _parse_n(ns: argparse.Namespace) -> list[int]:
    values = _int_list(ns.n)
    if not values or any(v < 1 for v in values):
        raise InvalidParameter("--n must list positive particle counts")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidParameter("--n must be strictly ascending")
    return values


def _out_dir(ns: argparse.Namespace) -> Optional[Path]:
    if getattr(ns, "out_dir", None) is None:
        return None
    out = Path(ns.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_green(ns: argparse.Namespace) -> int:
    g = _build_graph(ns)
    profile = solve_harmonic(g)
    print(f"graph: {g.describe()}")
    print(f"alpha={profile.escape_probability!r} residual={profile.residual:.3e}")
    out = _out_dir(ns)
    if out is not None:
        (out / "profile.csv").write_text(profile_csv(g, profile))
        print(f"wrote {out / 'profile.csv'}")
    return 0


def cmd_rho_min(ns: argparse.Namespace) -> int:
    g = _build_graph(ns)
    mech = _build_mechanism(g, ns)
    profile = solve_harmonic(g)
    wt = weight_table(g, mech, profile)
    config = min_weight_config(g, wt)
    ties = count_min_weight_ties(g, wt)
    print(f"graph: {g.describe()} mechanism: {mech.describe()}")
    print(f"tie-break events: {ties}")
    out = _out_dir(ns) or Path(".")
    (out / "weights.csv").write_text(weights_csv(g, mech, wt))
    (out / "config.csv").write_text(config_csv(g, config))
    print(f"wrote {out / 'weights.csv'} and {out / 'config.csv'}")
    return 0


def _trace_path(base: Path, n: int, multiple: bool) -> Path:
    if not multiple:
        return base
    return base.with_name(f"{base.stem}-n{n}{base.suffix or '.csv'}")


def _run_traced(g, mech, config, n_values, profile, ns) -> EscapeReport:
    """Sweep with per-move trace rows; mirrors escape_sweep's report."""
    wt = weight_table(g, mech, profile)
    alpha = profile.escape_probability
    base = Path(ns.trace)
    rates, gaps, steps = [], [], []
    worst = None
    t0 = time.perf_counter()

    for n in n_values:
        state = init_experiment(g, mech, config, n)
        tracker = InvariantTracker(state, profile, wt)
        with open(_trace_path(base, n, len(n_values) > 1), "w") as fh:
            w = trace_writer(fh)

            def observer(st):
                mover, x, y = st.last_event
                status = st.status[mover]
                if status == ParticleStatus.RETURNED:
                    change = "returned"
                elif status == ParticleStatus.ABSORBED:
                    change = "absorbed"
                elif x == st.graph.origin:
                    change = "left-origin"
                else:
                    change = ""
                w.writerow([
                    st.t - 1, mover, g.labels[x], g.labels[y],
                    change, st.survivors, repr(tracker.current()),
                ])

            run_until_settled(state, max_steps=ns.max_steps, observer=observer)
        if ns.check_invariant:
            dev = tracker.finish()
            worst = dev if worst is None else max(worst, dev)
        rates.append(state.survivors / n)
        gaps.append(rates[-1] - alpha)
        steps.append(state.t)

    return EscapeReport(
        graph=g.describe(),
        mechanism=mech.describe(),
        config="min-weight" if config == min_weight_config(g, wt) else "custom",
        alpha=alpha,
        n_values=list(n_values),
        rates=rates,
        gaps=gaps,
        steps=steps,
        max_invariant_dev=worst,
        runtime_s=time.perf_counter() - t0,
    )


def cmd_run(ns: argparse.Namespace) -> int:
    g = _build_graph(ns)
    mech = _build_mechanism(g, ns)
    profile = solve_harmonic(g)
    wt = weight_table(g, mech, profile)
    config = _build_config(g, mech, wt, ns)
    n_values = _parse_n(ns)

    if ns.trace:
        report = _run_traced(g, mech, config, n_values, profile, ns)
    else:
        report = escape_sweep(
            g, mech, config, n_values,
            profile=profile,
            check_invariant=ns.check_invariant,
            max_steps=ns.max_steps,
        )

    for n, rate, gap in zip(report.n_values, report.rates, report.gaps):
        print(f"n={n} escaped={round(rate * n)} rate={rate!r} gap={gap!r}")
    print(f"alpha={report.alpha!r}")
    if report.max_invariant_dev is not None:
        print(f"max_invariant_dev={report.max_invariant_dev!r}")

    out = _out_dir(ns)
    if out is not None:
        (out / "report.json").write_text(report_json(report))
        (out / "report.csv").write_text(report_csv(report))
        print(f"wrote {out / 'report.json'} and {out / 'report.csv'}")
    else:
        sys.stdout.write(report_json(report))
    return 0


def cmd_verify(ns: argparse.Namespace) -> int:
    graphs = None
    if ns.graph is not None:
        graphs = [_parse_graph_spec(ns.graph)]
    records = run_verification(
        quick=bool(ns.quick), graphs=graphs, inject_corruption=bool(ns.inject_corruption)
    )
    name_w = max(len(r.name) for r in records)
    for r in records:
        status = "pass" if r.ok else "FAIL"
        detail = f"  ({r.detail})" if r.detail and not r.ok else ""
        print(f"{r.name:<{name_w}}  {status}  max_dev={r.max_dev:.3e}  tol={r.tol:.3e}{detail}")
    if all_passed(records):
        print("all checks passed")
        return 0
    print("verification FAILED", file=sys.stderr)
    return 1


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--path", metavar="K", help="path graph on K vertices")
    p.add_argument("--lattice", nargs=2, metavar=("D", "R"),
                   help="lattice ball, e.g. --lattice d=3 r=8")
    p.add_argument("--tree", nargs=2, metavar=("B", "DEPTH"),
                   help="complete B-ary tree with sink leaves")
    p.add_argument("--edges", metavar="FILE", help="edge-list file")
    p.add_argument("--origin", help="origin label (edge-list graphs)")
    p.add_argument("--sinks", help="comma-separated sink labels (edge-list graphs)")
    p.add_argument("--config-file", metavar="FILE",
                   help="YAML file supplying any of these options; flags win")


def _add_mech_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mechanism", choices=["default", "shuffled"],
                   help="edge ordering at each vertex (default: default)")
    p.add_argument("--seed-mech", help="seed for --mechanism shuffled (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorwalk",
        description="Escape-rate experiments for rotor walks on sink-truncated graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_green = sub.add_parser("green", help="solve the voltage profile")
    _add_graph_flags(p_green)
    p_green.add_argument("--out-dir", help="write profile.csv here")
    p_green.set_defaults(func=cmd_green)

    p_rho = sub.add_parser("rho-min", help="build the weight-minimizing configuration")
    _add_graph_flags(p_rho)
    _add_mech_flags(p_rho)
    p_rho.add_argument("--out-dir", help="write weights.csv and config.csv here (default .)")
    p_rho.set_defaults(func=cmd_rho_min)

    p_run = sub.add_parser("run", help="run the escape experiment")
    _add_graph_flags(p_run)
    _add_mech_flags(p_run)
    p_run.add_argument("--config",
                       help="rotor configuration: rho-min, random, or a config.csv path")
    p_run.add_argument("--seed-config", help="seed for --config random (default 0)")
    p_run.add_argument("--n", help="comma-separated ascending particle counts")
    p_run.add_argument("--check-invariant", action="store_const", const=True,
                       help="track the conserved quantity during the run")
    p_run.add_argument("--trace", metavar="FILE",
                       help="write a per-move CSV trace (FILE-n{n}.csv for multiple n)")
    p_run.add_argument("--out-dir", help="write report.json and report.csv here")
    p_run.add_argument("--max-steps", help="abort unsettled runs past this step count")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="run the property suite")
    p_ver.add_argument("--quick", action="store_const", const=True,
                       help="small fixtures and sample counts")
    p_ver.add_argument("--graph", metavar="SPEC",
                       help="verify one graph only: path:K, lattice:D,R or tree:B,DEPTH")
    p_ver.add_argument("--inject-corruption", action="store_const", const=True,
                       help="add negative controls that must fail")
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        _merge_config_file(ns)
        _fill_defaults(ns)
        if hasattr(ns, "max_steps"):
            ns.max_steps = _int_token(ns.max_steps)
        return ns.func(ns)
    except SystemExit as exc:  # argparse --help (0) or usage error (2)
        code = exc.code
        return code if isinstance(code, int) else 2
    except (GraphInvalid, InvalidParameter, DimensionMismatch, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, AbortedMaxSteps) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
