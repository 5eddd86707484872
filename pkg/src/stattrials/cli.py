"""Command-line entry point: every experiment as a subcommand writing CSV.

Reals are printed with 6 significant digits.  Each run also produces a
manifest of ``key=value`` lines (the full parameter set after defaults);
feeding it back with ``--config`` reproduces the CSV byte for byte.

Exit codes: 0 success, 2 invalid arguments, 3 simulation failure.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import arq_channel, pendulum, percolation, process_sim, random_walk, scattering, symbol_channel
from .errors import SimulationError
from .rng import new
from .stats import Histogram, histogram, summarize

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3

# keys that configure the run itself and are never read from a config file
_META = {"command", "config", "out", "manifest"}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# value parsing and formatting
# --------------------------------------------------------------------------

def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None


def _matrix(text: str) -> list[list[float]]:
    return [_float_list(row) for row in text.split(";") if row.strip()]


def fmt(x) -> str:
    """CSV cell: integers verbatim, reals to 6 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    out = format(x, ".6g")
    return "0" if out == "-0" else out


def _render_param(value) -> str:
    """Exact textual form of a parameter, re-parsable by the same flag."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        if value and isinstance(value[0], list):
            return ";".join(_render_param(row) for row in value)
        return ",".join(_render_param(v) for v in value)
    return str(value)


class Table:
    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *cells):
        self.rows.append(cells)

    def render(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(c) for c in row) + "\n")
        return buf.getvalue()


def histogram_table(h: Histogram) -> Table:
    t = Table(["lo", "hi", "count"])
    t.add(-math.inf, h.lo, h.underflow)
    edges = h.edges
    for k in range(h.bins):
        t.add(edges[k], edges[k + 1], h.counts[k])
    t.add(h.hi, math.inf, h.overflow)
    return t


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_walk(a) -> Table:
    if a.table == "curve":
        t = Table(["N", "msd", "stderr"])
        for n, msd, se in random_walk.msd_curve(a.steps_list, a.trials, a.seed, a.threads):
            t.add(n, msd, se)
        return t
    z = random_walk.final_positions(a.steps, a.trials, a.seed, threads=a.threads)
    if a.table == "histogram":
        return histogram_table(histogram(z, -a.steps - 1, a.steps + 1, a.bins))
    t = Table(["trial", "z"])
    for i, v in enumerate(z):
        t.add(i, int(v))
    return t


def cmd_pendulum(a) -> Table:
    params = pendulum.PendulumParams(
        g=a.g, length=a.length, mass=a.mass, damping=a.damping, drag_coeff=a.drag_coeff,
        wind_mean=a.wind_mean, wind_halfwidth=a.wind_halfwidth, wind_refresh=a.wind_refresh,
        dt=a.dt, t_total=a.t_total, burn_in=a.burn_in, seed=a.seed)
    traj = pendulum.simulate(params)
    if a.table == "trajectory":
        t = Table(["t", "phi", "omega"])
        for k in range(len(traj)):
            t.add(traj.t[k], traj.phi[k], traj.omega[k])
        return t
    hist, st = pendulum.angle_distribution(traj, params, bins=a.bins)
    if a.table == "histogram":
        return histogram_table(hist)
    t = Table(["n", "mean", "variance", "std", "stderr"])
    t.add(st.n, st.mean, st.variance, st.std, st.stderr)
    return t


def cmd_scatter(a) -> Table:
    if a.single_center:
        centers = [((0.0, 0.0), a.strength)]
    else:
        centers = scattering.two_atoms(a.separation, a.strength)
    cfg = scattering.ScatteringConfig(
        centers=centers, mass=a.mass, v0=a.v0, start_x=a.start_x, stop_x=a.stop_x,
        b_range=(a.b_min, a.b_max), dt=a.dt, max_steps=a.max_steps, particles=a.trials, seed=a.seed)
    hist, outcomes = scattering.sweep(cfg, bins=a.bins, threads=a.threads)
    failed = sum(1 for o in outcomes if not o.ok)
    if failed:
        print(f"warning: {failed} of {len(outcomes)} trajectories failed", file=sys.stderr)
    if a.table == "histogram":
        return histogram_table(hist)
    t = Table(["b", "alpha", "energy_drift"])
    for o in outcomes:
        t.add(o.b, o.alpha, o.energy_drift)
    return t


def cmd_percolation(a) -> Table | str:
    if a.table in ("grid", "labels"):
        grid = percolation.generate_grid(a.size, a.p, new(a.seed))
        if a.table == "grid":
            return grid.dump() + "\n"
        return percolation.label_clusters(grid).dump() + "\n"
    curve = percolation.sweep_P(a.size, a.p_list, a.trials, a.seed, a.threads)
    t = Table(["p", "P", "stderr", "trials"])
    for row in curve.points:
        t.add(*row)
    return t


def cmd_process(a) -> Table:
    spec = process_sim.ProcessSpec(tuple(a.durations), tuple(a.success_probs))
    totals = process_sim.totals(spec, a.trials, a.seed, a.threads)
    if a.table == "trials":
        t = Table(["trial", "total"])
        for i, v in enumerate(totals):
            t.add(i, v)
        return t
    if a.trials < 2:
        raise ValueError("the summary table needs at least 2 trials")
    st = summarize(totals)
    mean, var = process_sim.analytic_moments(spec)
    t = Table(["mean", "variance", "std", "stderr", "analytic_mean", "analytic_variance"])
    t.add(st.mean, st.variance, st.std, st.stderr, mean, var)
    return t


def cmd_arq(a) -> Table:
    t = Table(["p", "D", "N_K", "t", "retransmissions", "v"])
    for p in a.bit_error_p:
        cfg = arq_channel.ArqConfig(a.frame_len, p, a.frames, a.model, a.quantize or None,
                                    a.max_attempts, a.seed)
        r = arq_channel.simulate(cfg)
        t.add(p, r.frame_len, r.n_frames, r.total_tacts, r.retransmissions, r.throughput)
    return t


def cmd_arq_sweep(a) -> Table:
    t = Table(["p", "D", "v_sim", "v_analytic"])
    for p in a.bit_error_p:
        for pt in arq_channel.sweep_frame_length(p, a.d_min, a.d_max, a.frames, a.seed, a.threads,
                                                 a.quantize or None):
            t.add(p, pt.frame_len, pt.v_sim, pt.v_analytic)
    return t


def cmd_capacity(a) -> Table:
    t = Table(["p", "C_emp", "C_bsc", "D_opt"])
    for row in arq_channel.capacity_curve(a.p_list, a.d_max, a.frames, a.seed, a.threads):
        t.add(row.p, row.c_emp, row.c_bsc, row.d_opt)
    return t


def cmd_symbol_channel(a) -> Table:
    st = symbol_channel.estimate_error_rate(a.source, a.matrix, a.trials, a.seed, a.window, a.tolerance)
    if a.table == "running":
        t = Table(["n", "error_rate"])
        for n in range(a.stride, a.trials + 1, a.stride):
            t.add(n, st.running[n - 1])
        return t
    if a.table == "confusion":
        n_in, n_out = st.confusion.shape
        names = [f"a{j + 1}" for j in range(n_in)]
        names += ["b"] if n_out == n_in + 1 else [f"b{j + 1}" for j in range(n_out - n_in)]
        t = Table(["input"] + names)
        for i in range(n_in):
            t.add(f"a{i + 1}", *st.confusion[i])
        return t
    t = Table(["trials", "error_rate", "analytic", "first_stable_n", "errors_any_mismatch",
               "errors_erasure_only", "analytic_erasure"])
    t.add(st.n_sent, st.error_rate, symbol_channel.analytic_error_rate(a.source, a.matrix),
          st.first_stable_n, st.n_errors, st.errors_erasure_only,
          symbol_channel.analytic_erasure_rate(a.source, a.matrix))
    return t


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, trials: int | None, tables: list[str]) -> None:
    p.add_argument("--seed", type=_u64, default=1, help="root seed (default 1)")
    if trials is not None:
        p.add_argument("--trials", type=_positive_int, default=trials)
    p.add_argument("--bins", type=_positive_int, default=50)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--table", choices=tables, default=tables[0])
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--manifest", default=None, help="manifest path (default: OUT.manifest)")
    p.add_argument("--config", default=None, help="key=value parameter file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stattrials", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("walk", help="1-d random walk ensembles")
    _common(p, 10_000, ["trials", "curve", "histogram"])
    p.add_argument("--steps", type=_nonneg_int, default=100)
    p.add_argument("--steps-list", type=_int_list, default=[50, 100, 200, 400])
    p.set_defaults(handler=cmd_walk)

    p = sub.add_parser("pendulum", help="pendulum in a random air stream")
    _common(p, None, ["summary", "trajectory", "histogram"])
    d = pendulum.PendulumParams()
    for name in ("g", "length", "mass", "damping", "drag_coeff", "wind_mean", "wind_halfwidth",
                 "wind_refresh", "dt", "t_total", "burn_in"):
        p.add_argument("--" + name.replace("_", "-"), type=float, default=getattr(d, name))
    p.set_defaults(handler=cmd_pendulum)

    p = sub.add_parser("scatter", help="alpha-particle deflection by repulsive centers")
    _common(p, 10_000, ["particles", "histogram"])
    d = scattering.ScatteringConfig()
    p.add_argument("--single-center", action="store_true")
    p.add_argument("--separation", type=float, default=2.0)
    p.add_argument("--strength", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=d.mass)
    p.add_argument("--v0", type=float, default=d.v0)
    p.add_argument("--start-x", type=float, default=d.start_x)
    p.add_argument("--stop-x", type=float, default=d.stop_x)
    p.add_argument("--b-min", type=float, default=d.b_range[0])
    p.add_argument("--b-max", type=float, default=d.b_range[1])
    p.add_argument("--dt", type=float, default=d.dt)
    p.add_argument("--max-steps", type=_positive_int, default=d.max_steps)
    p.set_defaults(handler=cmd_scatter)

    p = sub.add_parser("percolation", help="site percolation probability P(p)")
    _common(p, 500, ["curve", "grid", "labels"])
    p.add_argument("--size", type=_positive_int, default=64)
    p.add_argument("--p-list", type=_float_list,
                   default=[round(0.5 + 0.02 * k, 2) for k in range(11)])
    p.add_argument("--p", type=float, default=0.593, help="occupation probability for grid/labels dumps")
    p.set_defaults(handler=cmd_percolation)

    p = sub.add_parser("process", help="process with repeated failed operations")
    _common(p, 100_000, ["summary", "trials"])
    p.add_argument("--durations", type=_float_list, default=list(process_sim.DEFAULT_DURATIONS))
    p.add_argument("--success-probs", type=_float_list, default=list(process_sim.DEFAULT_SUCCESS_PROBS))
    p.set_defaults(handler=cmd_process)

    def arq_flags(p, p_default):
        p.add_argument("--bit-error-p", type=_float_list, default=list(p_default))
        p.add_argument("--frames", type=_positive_int, default=500)
        p.add_argument("--quantize", type=_nonneg_int, default=0, help="uniform granularity (0 = full precision)")

    p = sub.add_parser("arq", help="one stop-and-wait ARQ run per error probability")
    _common(p, None, ["summary"])
    arq_flags(p, arq_channel.DEFAULT_ERROR_PROBS)
    p.add_argument("--frame-len", type=int, default=8)
    p.add_argument("--model", choices=arq_channel.MODELS, default=arq_channel.ABSTRACT)
    p.add_argument("--max-attempts", type=_positive_int, default=1_000_000)
    p.set_defaults(handler=cmd_arq)

    p = sub.add_parser("arq-sweep", help="throughput versus frame length")
    _common(p, None, ["sweep"])
    arq_flags(p, (0.02, 0.05, 0.1, 0.3))
    p.add_argument("--d-min", type=int, default=2)
    p.add_argument("--d-max", type=int, default=16)
    p.set_defaults(handler=cmd_arq_sweep)

    p = sub.add_parser("capacity", help="empirical ARQ capacity versus the BSC formula")
    _common(p, None, ["capacity"])
    p.add_argument("--p-list", type=_float_list, default=[0.0, 0.05, 0.1, 0.2, 0.3, 0.4])
    p.add_argument("--d-max", type=int, default=64)
    p.add_argument("--frames", type=_positive_int, default=500)
    p.set_defaults(handler=cmd_capacity)

    p = sub.add_parser("symbol-channel", help="error rate of a stochastic-matrix channel")
    _common(p, 100_000, ["summary", "running", "confusion"])
    p.add_argument("--source", type=_float_list, default=list(symbol_channel.DEFAULT_SOURCE))
    p.add_argument("--matrix", type=_matrix, default=[list(r) for r in symbol_channel.DEFAULT_MATRIX])
    p.add_argument("--window", type=_positive_int, default=200)
    p.add_argument("--tolerance", type=float, default=0.02)
    p.add_argument("--stride", type=_positive_int, default=1, help="row spacing of the running table")
    p.set_defaults(handler=cmd_symbol_channel)
    return parser


# --------------------------------------------------------------------------
# config files and manifests
# --------------------------------------------------------------------------

def parse_config_file(path, known: dict[str, str] | None = None) -> dict[str, str]:
    """Read ``key=value`` lines; ``#`` starts a comment.

    Keys are flag names without the leading dashes.  When ``known`` (flag
    name -> dest) is given, unknown keys raise :class:`UsageError` naming
    the line.  Values are returned as raw strings.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if known is not None and key not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def _flag_table(sub: argparse.ArgumentParser) -> dict[str, argparse.Action]:
    table = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--") and action.dest not in _META and action.dest != "help":
                table[opt[2:]] = action
    return table


def _apply_config(sub, path) -> None:
    flags = _flag_table(sub)
    values = parse_config_file(path, {k: a.dest for k, a in flags.items()})
    defaults = {}
    for key, raw in values.items():
        action = flags[key]
        if isinstance(action, argparse._StoreTrueAction):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise UsageError(f"{path}: {key} expects true or false")
            defaults[action.dest] = raw.lower() in ("true", "1")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"{path}: bad value for {key}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{path}: {key} must be one of {sorted(action.choices)}")
        defaults[action.dest] = value
    sub.set_defaults(**defaults)


def manifest_text(sub, args) -> str:
    lines = [f"# stattrials {__version__}", f"# command={args.command}"]
    if args.out:
        lines.append(f"# out={args.out}")
    for key, action in sorted(_flag_table(sub).items()):
        if action.dest == "threads":
            continue
        lines.append(f"{key}={_render_param(getattr(args, action.dest))}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(_subparser(parser, args.command), args.config)
            args = parser.parse_args(argv)
        sub = _subparser(parser, args.command)
        result = args.handler(args)
        text = result.render() if isinstance(result, Table) else result
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, ValueError) as exc:
        print(f"stattrials: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"stattrials: simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    manifest = manifest_text(sub, args)
    if args.out:
        Path(args.out).write_text(text)
        Path(args.manifest or args.out + ".manifest").write_text(manifest)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
        if args.manifest:
            Path(args.manifest).write_text(manifest)
        else:
            sys.stderr.write(manifest)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
