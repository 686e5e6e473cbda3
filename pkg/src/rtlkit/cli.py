"""Command-line front end.

Exit codes: 0 success, 1 a reproduction check failed, 2 infeasible result,
64 usage error, 65 unparseable input, 66 file I/O error.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, repro
from .boolc import compile_expr, compile_table, parse_truth_table
from .cell import build_cell, cell_to_text, evaluate
from .analog import DividerConfig, output_for_count
from .errors import ArgumentError, CapacityError, DomainError, InfeasibleError, ParseError
from .netlist import component_stats, decompose_fanin, emit_netlist, gen_mux, gen_ripple_adder, parse_netlist
from .profiles import TSMC025_LIKE, DeviceProfile
from .sim import Stimulus, critical_path, simulate

EXIT_OK, EXIT_CHECK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_PARSE, EXIT_IO = 0, 1, 2, 64, 65, 66
US = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path) -> str:
    return Path(path).read_text()


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _ratio(text: str) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or ratio: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _profile(args) -> DeviceProfile:
    p = DeviceProfile.load(args.profile) if args.profile else TSMC025_LIKE
    if getattr(args, "device", None):
        p = p.with_(device=args.device)
    return p


def _stats_line(n) -> str:
    s = component_stats(n)
    kinds = ", ".join(f"{cnt} {k}{fi}" for (k, fi), cnt in sorted(s.gate_counts.items()))
    return (f"{n.name} [{n.technology}]: {s.gate_total} gates ({kinds}); "
            f"{s.memristor_count} memristors, {s.transistor_count} transistors, area {s.area:.4f} um^2")


# ---------------------------------------------------------------- commands ---

def cmd_gate(args) -> int:
    prof = _profile(args)
    fn = args.fn.upper()
    cell = build_cell(fn, args.n, prof, m=args.m, threshold=args.threshold, delta=args.delta)
    out = [f"{fn} gate, n = {args.n}, device = {prof.device}",
           f"m = {float(cell.divider.m):.6g}",
           f"window = ({float(cell.window.low):.4f}, {float(cell.window.high):.4f})",
           f"threshold = {float(cell.effective_threshold):.6g} V",
           "", cell_to_text(cell).rstrip(), "", "k_high  v0          out"]
    ks = list(range(args.n + 1))
    if len(ks) > 8:
        ks = ks[:3] + [None] + ks[-3:]
    for k in ks:
        if k is None:
            out.append("...")
            continue
        bits = [1] * k + [0] * (args.n - k)
        v0 = output_for_count(cell.divider, k)
        out.append(f"{k:<7} {float(v0):<11.6f} {evaluate(cell, bits)}")
    print("\n".join(out))
    return EXIT_OK


def cmd_compile(args) -> int:
    if args.expr is not None:
        n = compile_expr(args.expr, args.tech, args.fanin_cap, args.name)
    else:
        n = compile_table(parse_truth_table(_read(args.table)), args.tech, args.fanin_cap, args.name)
    _write(args.output, emit_netlist(n))
    print(_stats_line(n), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.what == "adder":
        n = gen_ripple_adder(args.bits)
    elif args.what == "mux":
        n = gen_mux(args.size)
    else:
        _write(args.output, repro.fig8_stimulus(args.bits).to_csv())
        return EXIT_OK
    if args.tech == "cmos":
        n = decompose_fanin(n, args.fanin_cap).with_technology("CMOS")
    _write(args.output, emit_netlist(n))
    print(_stats_line(n), file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_sim(args) -> int:
    n = parse_netlist(_read(args.netlist))
    stim = Stimulus.from_csv(_read(args.stim))
    cp = critical_path(n)
    t_end = args.t_end * US if args.t_end is not None else stim.last_time + cp.delay + 1 * US
    try:
        wave = simulate(n, stim, t_end)
    except ArgumentError as e:
        raise ParseError(f"stimulus does not fit the netlist: {e}") from None
    _write(args.output, wave.to_csv())
    print(f"critical path {cp.delay / US:.4f} us through {len(cp.path)} gates; "
          f"last output change at {wave.last_change(n.outputs) / US:.4f} us", file=sys.stderr)
    return EXIT_OK


def cmd_mc(args) -> int:
    k = args.n if args.k is None else args.k
    high = args.n if args.high is None else args.high
    if high > args.n:
        raise UsageError(f"--high {high} exceeds --n {args.n}")
    spec = analysis.PerturbationSpec(args.tol, k, args.trials, args.seed, args.mode)
    c = DividerConfig(args.n, m=args.m)
    levels = [1] * high + [0] * (args.n - high)
    res = analysis.perturb_sensitivity(c, levels, spec)
    if args.output:
        _write(args.output, res.to_csv())
    worst = analysis.analytic_worst_case(c, levels, args.tol)
    print(f"nominal V0 = {res.nominal:.6f} V")
    print(f"max |dV0| = {res.max_pct_change:.4f}%  mean |dV0| = {res.mean_pct_change:.4f}%  "
          f"analytic worst case = {worst:.4f}%  ({args.trials} trials, seed {args.seed}, {args.mode})")
    return EXIT_OK


def cmd_compare(args) -> int:
    a = parse_netlist(_read(args.a))
    b = parse_netlist(_read(args.b))
    rep = analysis.compare_report(a, b, activity=args.activity)
    _write(args.output, rep.to_csv() if args.format == "csv" else rep.to_text())
    return EXIT_OK


def cmd_power(args) -> int:
    n = parse_netlist(_read(args.netlist))
    p = analysis.power_estimate(n, activity=args.activity, samples=args.samples, seed=args.seed)
    print(f"{n.name} [{n.technology}]: {p:.6g} W at input activity {args.activity}")
    return EXIT_OK


def cmd_repro(args) -> int:
    names = list(repro.REPRO) if args.name == "all" else [args.name]
    ok = True
    for name in names:
        res = repro.REPRO[name]()
        if args.out_dir:
            Path(args.out_dir).mkdir(parents=True, exist_ok=True)
            _write(Path(args.out_dir) / f"{name}.csv", res.to_csv())
        print(res.summary())
        ok &= res.passed
    return EXIT_OK if ok else EXIT_CHECK


# ------------------------------------------------------------------ parser ---

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rtlkit", description="Resistive threshold logic design kit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gate", help="design one threshold cell")
    g.add_argument("--fn", required=True, type=str.lower, choices=["nand", "nor", "and", "or", "not"])
    g.add_argument("--n", required=True, type=_positive_int)
    g.add_argument("--m", type=_ratio, help="reference ratio R0/R, e.g. 0.125 or 1/8")
    g.add_argument("--profile", help="device profile file")
    g.add_argument("--device", choices=["inverter", "opamp"])
    g.add_argument("--threshold", type=float)
    g.add_argument("--delta", type=_ratio, help="opamp reference offset in volts")
    g.set_defaults(func=cmd_gate)

    c = sub.add_parser("compile", help="minimize a function and emit a netlist")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--expr")
    src.add_argument("--table", help="truth-table file")
    c.add_argument("--tech", type=str.lower, choices=["rtl", "cmos"], default="rtl")
    c.add_argument("--fanin-cap", type=_positive_int, default=5)
    c.add_argument("--name", default="f")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    gen = sub.add_parser("gen", help="generate reference circuits")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    for what, size_flag in (("adder", "--bits"), ("mux", "--size")):
        q = gsub.add_parser(what)
        q.add_argument(size_flag, type=_positive_int, default=16)
        q.add_argument("--tech", type=str.lower, choices=["rtl", "cmos"], default="rtl")
        q.add_argument("--fanin-cap", type=_positive_int, default=5)
        q.add_argument("-o", "--output")
    q = gsub.add_parser("fig8-stim", help="pulse stimulus for the ripple adder")
    q.add_argument("--bits", type=_positive_int, default=16)
    q.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    s = sub.add_parser("sim", help="event-driven simulation")
    s.add_argument("--netlist", required=True)
    s.add_argument("--stim", required=True, help="CSV time_us,net,level")
    s.add_argument("--t-end", type=float, help="end time in us (default: settles)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sim)

    mc = sub.add_parser("mc", help="resistor tolerance Monte Carlo")
    mc.add_argument("--n", required=True, type=_positive_int)
    mc.add_argument("--tol", type=float, default=0.10)
    mc.add_argument("--trials", type=_positive_int, default=10_000)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--k", type=int, help="resistors perturbed per trial (default n)")
    mc.add_argument("--high", type=int, help="inputs held high (default n)")
    mc.add_argument("--m", type=_ratio, default=1.0)
    mc.add_argument("--mode", choices=list(analysis.MODES), default="common")
    mc.add_argument("-o", "--output", help="per-trial samples CSV")
    mc.set_defaults(func=cmd_mc)

    cmp_ = sub.add_parser("compare", help="compare two netlists")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--activity", type=float, default=1.0)
    cmp_.add_argument("--format", choices=["text", "csv"], default="text")
    cmp_.add_argument("-o", "--output")
    cmp_.set_defaults(func=cmd_compare)

    pw = sub.add_parser("power", help="static power estimate")
    pw.add_argument("--netlist", required=True)
    pw.add_argument("--activity", type=float, default=1.0)
    pw.add_argument("--samples", type=_positive_int, default=256)
    pw.add_argument("--seed", type=int, default=0)
    pw.set_defaults(func=cmd_power)

    r = sub.add_parser("repro", help="reproduce a reported table or figure")
    r.add_argument("name", choices=list(repro.REPRO) + ["all"])
    r.add_argument("--out-dir")
    r.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, CapacityError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, ArgumentError, DomainError) as e:
        parser.print_usage(sys.stderr)
        print(f"rtlkit: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
