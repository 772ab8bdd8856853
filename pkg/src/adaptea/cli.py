"""Command-line entry point: ``adaptea {run,sweep,table1,verify,plot}``.

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(keys spelled like the long flags); flags given on the command line win
over the file. Exit codes: 0 success, 1 usage error, 2 a verification
scenario flagged its bound.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments, io, plotting, verify
from .algorithms import VARIANTS

EXIT_OK, EXIT_USAGE, EXIT_FLAGGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="key=value file; flags override its entries")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adaptea", description="Self-adaptive (1,lambda) EA on OneMax.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single run, optional trace and rate-profile CSV")
    _add_common(p)
    p.add_argument("--algo", choices=VARIANTS)
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--F", type=float)
    p.add_argument("--tie", choices=("biased", "random", "prefer-low-rate"))
    p.add_argument("--rinit", help="'min', 'max' or a ladder exponent")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-generations", type=int)
    p.add_argument("--trace", help="write t,k,r rows here")
    p.add_argument("--profile", help="write variant,d,r rows here")

    p = sub.add_parser("sweep", help="lambda sweep over several variants")
    _add_common(p)
    p.add_argument("--spec", help="sweep file (alias of --config)")
    p.add_argument("--n", type=int)
    p.add_argument("--lambdas", help="comma-separated lambda values")
    p.add_argument("--variants", help="comma-separated variant labels")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-generations", type=int)
    p.add_argument("--fast", action="store_true", help="30 repetitions at n=10^4")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="long-format results CSV")
    p.add_argument("--summary", help="per-cell summary CSV")
    p.add_argument("--relative", help="ratio CSV against --baseline")
    p.add_argument("--baseline", help="variant label used by --relative")

    p = sub.add_parser("table1", help="tie rule x initial rate comparison")
    _add_common(p)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--fast", action="store_true", help="30 repetitions")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="2x2 table CSV")
    p.add_argument("--results", help="long-format results CSV")

    p = sub.add_parser("verify", help="check an estimate against its bound")
    _add_common(p)
    p.add_argument("scenario", choices=verify.SCENARIOS)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--gap", type=float)
    p.add_argument("--side", choices=("upper", "lower"))
    p.add_argument("--F", type=float)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--tie", choices=("biased", "random", "prefer-low-rate"))
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--states", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="results CSV (default: stdout)")

    p = sub.add_parser("plot", help="render a results CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--kind", required=True, choices=plotting.PLOT_KINDS)
    p.add_argument("--out", required=True)
    return parser


_CONFIG_KEYS = {"lambda": "lam", "max-generations": "max_generations"}


def _resolve(args, defaults: dict) -> dict:
    """Merge defaults < config file < explicit flags."""
    values = dict(defaults)
    path = getattr(args, "config", None) or getattr(args, "spec", None)
    if path:
        try:
            cfg = io.read_config(path)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        allowed = {k for k in vars(args) if k not in ("command", "config", "spec")}
        for key, value in cfg.items():
            key = _CONFIG_KEYS.get(key, key)
            if key not in allowed:
                raise UsageError(f"unknown key {key!r} in {path}")
            values[key] = value
    for key, value in vars(args).items():
        if key in ("command", "config", "spec"):
            continue
        if value is not None and value is not False:
            values[key] = value
    return values


def _as(conv, value, name):
    if value is None:
        return None
    try:
        return conv(value)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {name}: {value!r}") from None


def _truthy(value) -> bool:
    return value is True or str(value).lower() in ("1", "true", "yes")


def _cmd_run(args) -> int:
    v = _resolve(args, dict(algo="self-adaptive", tie="biased", rinit="min", seed=0))
    for key in ("n", "lam"):
        if v.get(key) is None:
            raise UsageError(f"--{'lambda' if key == 'lam' else key} is required")
    variant = experiments.VariantSpec(
        v["algo"], _as(float, v.get("F"), "--F"), v["tie"], str(v["rinit"])
    ) if v["algo"] == "self-adaptive" else experiments.VariantSpec(v["algo"])
    n, lam = _as(int, v["n"], "--n"), _as(int, v["lam"], "--lambda")
    cfg = variant.config(n, lam, _as(int, v["seed"], "--seed"),
                         _as(int, v.get("max_generations"), "--max-generations"))
    record = experiments.run_trace(cfg, v.get("trace"), v.get("profile"), variant.label)
    status = "found" if record.found else "capped"
    print(f"{variant.label} n={n} lambda={lam} seed={cfg.seed}: "
          f"{status} after {record.generations_run} generations ({record.evaluations} evaluations)")
    return EXIT_OK


def _progress(done, total):
    if sys.stderr.isatty():
        end = "\n" if done == total else ""
        print(f"\r{done}/{total} trials", end=end, file=sys.stderr, flush=True)


def _cmd_sweep(args) -> int:
    v = _resolve(args, {})
    if _truthy(v.get("fast")):
        v = _resolve(args, dict(reps=30, n=10_000))
    keys = ("n", "lambdas", "variants", "reps", "seed", "max_generations")
    cfg = {k: str(v[k]) for k in keys if v.get(k) is not None}
    spec = experiments.SweepSpec.from_config(cfg)
    if not (v.get("out") or v.get("summary") or v.get("relative")):
        raise UsageError("give at least one of --out, --summary, --relative")
    results, summaries = experiments.run_sweep(spec, _as(int, v.get("workers"), "--workers"), _progress)
    header = io.header_lines(spec.as_config(), spec.seed)
    if v.get("out"):
        experiments.write_results(v["out"], results, header)
    if v.get("summary"):
        experiments.write_summary(v["summary"], summaries, header)
    if v.get("relative"):
        baseline = v.get("baseline") or "static"
        rows = experiments.relative_rows(summaries, baseline)
        io.write_csv(v["relative"], experiments.RELATIVE_COLUMNS, rows,
                     header + [f"baseline: {baseline}"])
    for s in summaries:
        mark = "" if s.found == s.reps else f"  [{s.reps - s.found} capped]"
        print(f"{s.variant:48s} lambda={s.lam:<6d} mean={s.mean:.1f} std={s.std:.1f}{mark}")
    return EXIT_OK


def _cmd_table1(args) -> int:
    v = _resolve(args, dict(reps=100, seed=experiments.DEFAULT_SEED))
    if _truthy(v.get("fast")):
        v = _resolve(args, dict(reps=30, seed=experiments.DEFAULT_SEED))
    reps = _as(int, v["reps"], "--reps")
    seed = _as(int, v["seed"], "--seed")
    table = experiments.compare_table1(reps, seed, workers=_as(int, v.get("workers"), "--workers"),
                                       progress=_progress)
    spec = experiments.table1_spec(reps, seed)
    header = io.header_lines(spec.as_config(), seed)
    if v.get("out"):
        io.write_csv(v["out"], ["rinit", "biased", "random"], table.rows(), header)
    if v.get("results"):
        experiments.write_results(v["results"], table.results, header)
    print(f"{'':8s}{'biased':>10s}{'random':>10s}")
    for label, b, r in table.rows():
        print(f"{label:8s}{b:10.1f}{r:10.1f}")
    return EXIT_OK


_VERIFY_DEFAULTS = {
    "occupancy": dict(F=32.0, states=5, steps=10_000, trials=1_000, seed=0),
    "tail": dict(n=100, k=40, r=10.0, gap=15.0, side="upper"),
    "rate-increase": dict(n=10_000, k=200, r=32.0, F=32.0, lam=100, tie="biased", trials=100_000, seed=0),
    "drift": dict(n=10_000, k=3_500, r=32.0, F=32.0, lam=100, variant="self-adaptive",
                  trials=100_000, seed=0),
    "potential": dict(n=10_000, lam=200, k=50, r=32.0, F=32.0, trials=100_000, seed=0),
}


def _cmd_verify(args) -> int:
    scenario = args.scenario
    defaults = _VERIFY_DEFAULTS[scenario]
    v = _resolve(args, defaults)
    unused = [k for k in vars(args) if getattr(args, k) is not None
              and k not in defaults and k not in ("command", "config", "scenario", "out")]
    if unused:
        raise UsageError(f"options not used by {scenario!r}: {', '.join('--' + k for k in unused)}")
    kw = {k: _as(type(d), v[k], f"--{k}") for k, d in defaults.items()}
    fn = {
        "occupancy": verify.verify_occupancy,
        "tail": verify.verify_tail,
        "rate-increase": verify.verify_rate_increase,
        "drift": verify.verify_drift,
        "potential": verify.verify_potential,
    }[scenario]
    rows = fn(**kw)
    header = io.header_lines(dict(scenario=scenario, **kw), kw.get("seed"))
    text = io.render_csv(verify.VERIFY_COLUMNS, (r.row() for r in rows), header)
    if v.get("out"):
        with open(v["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if verify.any_flagged(rows):
        print(f"verify {scenario}: estimate outside bound", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_OK


def _cmd_plot(args) -> int:
    try:
        plotting.emit_plot(args.csv, args.kind, args.out)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "table1": _cmd_table1,
             "verify": _cmd_verify, "plot": _cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"adaptea {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
