"""Command-line front end; every subcommand writes CSV.

Exit status is 0 on success, 1 for usage errors and 2 for bad data.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from switchset import dynamics, inference, paradox, sampler
from switchset.model import Outcome, SetConfig, fmt12, make_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_table(path) -> paradox.StratifiedTable:
    """Read a ``subject,stratum,num_lo,num_hi,den`` CSV file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return paradox.read_table_csv(text)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _config(args) -> SetConfig:
    return make_config(args.na, args.nb, args.nc)


def _policy(args, config: SetConfig) -> sampler.SwitchPolicy:
    if args.policy == "scheme":
        return sampler.SwitchPolicy.scheme_driven(config, args.scheme, args.k, args.initial_s)
    if args.policy == "independent":
        return sampler.SwitchPolicy.independent(config, args.pi_a, args.initial_s)
    return sampler.SwitchPolicy.uniform(config, args.initial_s)


def _scheme(args) -> dynamics.SchemeSpec:
    return dynamics.SchemeSpec(args.scheme, args.k, args.mod)


def cmd_simulate(args) -> str:
    config = _config(args)
    series = sampler.evolve_and_sample(config, _policy(args, config), args.epochs, args.draws, args.seed)
    return sampler.write_series_csv(series)


def cmd_orbit(args) -> str:
    report = dynamics.orbit_report(_scheme(args), args.start)
    if args.summary:
        return _csv([
            ["start", "distinct_states", "path_length", "tail_length", "cycle_length", "max_value", "cycle"],
            [
                report.start,
                len(report.distinct_states),
                report.path_length,
                report.tail_length,
                len(report.cycle),
                report.max_value,
                " ".join(map(str, report.cycle)),
            ],
        ])
    rows = [["step", "state", "on_cycle"]]
    for i, s in enumerate(report.distinct_states):
        rows.append([i, s, int(i >= report.tail_length)])
    return _csv(rows)


def cmd_classify(args) -> str:
    scheme = _scheme(args)
    result = dynamics.classify_states(scheme)
    succ = scheme.successors()
    rows = [["state", "successor", "role", "cycle"]]
    for s in range(scheme.M):
        if s in result.fixed_points:
            role = "fixed"
        elif s in result.transients:
            role = "transient"
        else:
            role = "cycle"
        rows.append([s, succ[s], role, " ".join(map(str, result.cycle_of(s)))])
    return _csv(rows)


def cmd_stats(args) -> str:
    config = _config(args)
    report = inference.moment_report(config)
    header = "mean,mean_square,variance"
    row = report.as_csv_row()
    if args.discrete:
        header += ",discrete_variance"
        row += "," + fmt12(inference.discrete_variance_mean(config))
    return f"{header}\n{row}\n"


def cmd_decide(args) -> str:
    config = _config(args)
    policy = _policy(args, config)
    freq = inference.decision_frequency(
        config, policy, args.draws, args.epochs, args.replicates, args.seed
    )
    truth = inference.expected_mean(config)
    if truth > 0:
        error = fmt12(1 - freq)
    elif truth < 0:
        error = fmt12(freq)
    else:
        error = ""
    return _csv([["replicates", "frequency_a", "error_rate"], [args.replicates, fmt12(freq), error]])


def cmd_bayes(args) -> str:
    model = inference.ConfusionModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    observed = Outcome.from_label(args.observed)
    posterior = inference.posterior_source(model, observed)
    render = str if args.exact else fmt12
    rows = [["source", "posterior"]]
    rows += [[src, render(p)] for src, p in posterior.items()]
    return _csv(rows)


def cmd_simpson(args) -> str:
    report = paradox.detect_inversions(parse_table(args.table))
    return paradox.write_report_csv(report)


def _add_population(p):
    p.add_argument("--na", type=int, required=True, help="stable A elements")
    p.add_argument("--nb", type=int, required=True, help="stable B elements")
    p.add_argument("--nc", type=int, required=True, help="switching elements")


def _add_policy(p):
    p.add_argument("--policy", choices=("scheme", "independent", "uniform"), default="independent")
    p.add_argument("--scheme", choices=[k.value for k in dynamics.SchemeKind], default="collatz")
    p.add_argument("--k", type=int, default=3, help="scheme parameter (default: 3)")
    p.add_argument("--pi-a", type=float, default=0.5, help="P(switching element shows A)")
    p.add_argument("--initial-s", type=int, default=0, help="switching count in epoch 0")
    p.add_argument("--seed", type=int, required=True)


def _add_scheme(p):
    p.add_argument("--scheme", choices=[k.value for k in dynamics.SchemeKind], required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mod", type=int, required=True, help="modulus M")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="switchset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a survey series")
    _add_population(p)
    _add_policy(p)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--draws", type=int, default=100, help="draws per epoch")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("orbit", help="trajectory of one start state")
    _add_scheme(p)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--summary", action="store_true", help="one summary row instead of the path")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("classify", help="fixed points, cycles and transients of a scheme")
    _add_scheme(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("stats", help="moments of the short-term mean")
    _add_population(p)
    p.add_argument("--discrete", action="store_true", help="also print the discrete-model variance")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("decide", help="Monte Carlo run of the threshold decision")
    _add_population(p)
    _add_policy(p)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--draws", type=int, default=101, help="draws per epoch")
    p.add_argument("--replicates", type=int, default=1000)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("bayes", help="posterior over sources given an observation")
    p.add_argument("--model", required=True, help="JSON with 'priors' and 'likelihoods'")
    p.add_argument("--observed", required=True, choices=("A", "B"))
    p.add_argument("--exact", action="store_true", help="print exact fractions")
    p.set_defaults(func=cmd_bayes)

    p = sub.add_parser("simpson", help="enumerate aggregation reversals in a table")
    p.add_argument("--table", required=True, help="CSV subject,stratum,num_lo,num_hi,den")
    p.set_defaults(func=cmd_simpson)

    for p in sub.choices.values():
        p.add_argument("-o", "--output", help="write CSV here instead of stdout")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        text = args.func(args)
    except (ValueError, TypeError, OSError, dynamics.TruncatedTrajectory) as exc:
        print(f"switchset {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
