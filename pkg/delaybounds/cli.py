"""Command-line front end: verify, compare and search."""
import argparse
import json
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from delaybounds import configure_logging, logger
from delaybounds.config import OUTPUT_DIR, SEARCH_BUDGET, SEED_OVERRIDE, SWEEP_SIZE, TOL_SOUNDNESS
from delaybounds.errors import BudgetExhausted, ConfigParseError, DelayBoundsError, InvalidConfig
from delaybounds.function_spaces import VectorPolynomial, build_basis, exact_energy, make_space, moments
from delaybounds.single_interval import WeightBlockMatrix, bbi_bound
from delaybounds.two_interval import (
    WeightLadder,
    convexified_bound,
    counterexample_search,
    dbbi_bound,
    dsfmb_bound,
    omega_B,
    omega_F,
    omega_erc,
    omega_merc,
    omega_mlsr,
    omega_rcc,
    omega_serc,
    optimal_erc,
    optimal_fmb,
    optimal_merc,
    optimal_mlsr,
    optimal_rcc,
    optimal_serc,
    two_interval_moments,
)
from delaybounds.verification import SUITE_IDS, InstanceConfig, run_suite

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2
EXIT_EXHAUSTED = 3

SCENARIO_VERSION = 1
FORMATS = ("table", "records")
BOUND_COLUMNS = ("exact", "dbbi", "m-lsr", "ds-fmb", "serc", "erc", "merc", "rcc", "bbi")

# Pairs (larger, smaller) that every comparison row must satisfy
ORDERING = (
    ("exact", "dbbi"),
    ("dbbi", "m-lsr"),
    ("m-lsr", "ds-fmb"),
    ("ds-fmb", "m-lsr"),
    ("m-lsr", "serc"),
    ("serc", "erc"),
    ("erc", "serc"),
    ("serc", "merc"),
    ("merc", "rcc"),
    ("dbbi", "bbi"),
)

_TOLERANCE_KEYS = ("soundness", "equality", "psd", "identity", "span")
_INSTANCE_KEYS = {f.name for f in fields(InstanceConfig) if not f.name.startswith("tol_")} | {"tolerances"}
_SCENARIO_KEYS = {"version", "instance", "suites", "compare", "bounds", "format"}
_COMPARE_KEYS = {"f", "W", "order", "interval", "alphas"}


@dataclass(frozen=True, eq=False)
class CompareSpec:
    f: VectorPolynomial
    W: np.ndarray
    order: int
    lower: float
    upper: float
    alphas: tuple


@dataclass(frozen=True, eq=False)
class Scenario:
    config: InstanceConfig
    suites: tuple = SUITE_IDS
    compare: CompareSpec = None
    bounds: tuple = BOUND_COLUMNS
    format: str = "table"


def _reject_unknown(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigParseError(f"{section} must be an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigParseError(f"unknown field(s) in {section}: {', '.join(unknown)}")


def _parse_instance(data):
    _reject_unknown("instance", data, _INSTANCE_KEYS)
    data = dict(data)
    tolerances = data.pop("tolerances", {})
    _reject_unknown("instance.tolerances", tolerances, set(_TOLERANCE_KEYS))
    for key, value in tolerances.items():
        data[f"tol_{key}"] = float(value)
    if "search_orders" in data:
        data["search_orders"] = tuple(data["search_orders"])
    return InstanceConfig(**data)


def _parse_compare(data):
    _reject_unknown("compare", data, _COMPARE_KEYS)
    missing = sorted(_COMPARE_KEYS - set(data))
    if missing:
        raise ConfigParseError(f"compare section is missing {', '.join(missing)}")
    alphas = tuple(float(a) for a in data["alphas"])
    if not alphas:
        raise ConfigParseError("compare.alphas must list at least one split fraction")
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ConfigParseError(f"compare.alphas must lie in (0, 1), got {list(alphas)}")
    lower, upper = (float(x) for x in data["interval"])
    return CompareSpec(
        VectorPolynomial.from_rows(data["f"]),
        np.asarray(data["W"], dtype=float),
        int(data["order"]),
        lower,
        upper,
        alphas,
    )


def parse_scenario(data):
    _reject_unknown("scenario", data, _SCENARIO_KEYS)
    if "version" not in data:
        raise ConfigParseError("scenario has no version field")
    if data["version"] != SCENARIO_VERSION:
        raise ConfigParseError(f"unsupported scenario version {data['version']!r}")

    suites = tuple(data.get("suites", SUITE_IDS))
    unknown = sorted(set(suites) - set(SUITE_IDS))
    if unknown:
        raise ConfigParseError(f"unknown suite(s): {', '.join(unknown)}")
    bounds = tuple(data.get("bounds", BOUND_COLUMNS))
    unknown = sorted(set(bounds) - set(BOUND_COLUMNS))
    if unknown:
        raise ConfigParseError(f"unknown bound column(s): {', '.join(unknown)}")
    fmt = data.get("format", "table")
    if fmt not in FORMATS:
        raise ConfigParseError(f"format must be one of {FORMATS}, got {fmt!r}")

    try:
        config = _parse_instance(data.get("instance", {}))
        compare = _parse_compare(data["compare"]) if data.get("compare") is not None else None
    except (TypeError, ValueError, InvalidConfig) as e:
        raise ConfigParseError(f"malformed scenario: {e}") from e
    return Scenario(config, suites, compare, bounds, fmt)


def load_scenario(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigParseError(f"scenario file not found: {path}") from None
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigParseError(f"cannot read scenario {path}: {e}") from e
    return parse_scenario(data)


def resolve_seed(flag, scenario_seed):
    """--seed wins over DELAYBOUNDS_SEED, which wins over the scenario."""
    if flag is not None:
        return int(flag)
    if SEED_OVERRIDE is not None:
        try:
            return int(SEED_OVERRIDE)
        except ValueError:
            raise ConfigParseError(f"DELAYBOUNDS_SEED must be an integer, got {SEED_OVERRIDE!r}") from None
    return scenario_seed


def apply_overrides(config, args):
    changes = {"seed": resolve_seed(args.seed, config.seed)}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.budget is not None:
        changes["budget"] = args.budget
    if args.tol is not None:
        changes.update({f"tol_{key}": args.tol for key in _TOLERANCE_KEYS})
    return config.replace(**changes)


def dump_records(records):
    """One JSON object per line; floats keep their shortest round-trip repr."""
    return "".join(json.dumps(record) + "\n" for record in records)


def write_output(out_dir, name, text):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    target.write_text(text)
    return target


def format_report(report):
    status = "PASS" if report.passed else "FAIL"
    lines = [f"{report.suite:<26} {status:<5} trials={report.trials:<6} failures={len(report.failures):<5} "
             f"wall={report.wall_time:.3f}s"]
    for prop, margin in sorted(report.worst_margins.items()):
        lines.append(f"    {prop:<34} worst margin {margin:+.3e}")
    for kind in report.exhausted:
        lines.append(f"    {kind:<34} exhausted (no witness within budget)")
    for failure in report.failures[:10]:
        lines.append(f"    FAIL {failure.prop} trial {failure.trial} observed {failure.observed!r} "
                     f"expected {failure.expected!r}")
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    scenario = load_scenario(args.scenario)
    config = apply_overrides(scenario.config, args)
    fmt = args.format or scenario.format
    start_time = time.time()
    logger.info(f"Verifying {len(scenario.suites)} suites from {args.scenario}")

    all_passed = True
    for suite in scenario.suites:
        report = run_suite(suite, config)
        all_passed &= report.passed
        records = report.to_records()
        table = format_report(report)
        write_output(args.out, f"{suite}.jsonl", dump_records(records))
        write_output(args.out, f"{suite}.txt", table)
        sys.stdout.write(table if fmt == "table" else dump_records(records))

    elapsed = time.time() - start_time
    logger.info(f"Verification completed in {elapsed:.3f}s: {'all suites passed' if all_passed else 'failures found'}")
    return EXIT_OK if all_passed else EXIT_FAILED


def compare_row(spec, alpha):
    """Every bound at one split fraction, with pointwise-optimal free parameters."""
    space = make_space("continuous", spec.lower, spec.upper)
    h = space.length
    geometry, w = two_interval_moments(space, spec.lower + alpha * h, spec.order, spec.f)
    alpha = geometry.alpha
    ladder = WeightLadder(spec.W, spec.order)
    basis = build_basis(space, spec.order)

    row = {
        "alpha": alpha,
        "exact": exact_energy(space, spec.f, spec.W),
        "dbbi": dbbi_bound(w, omega_B(alpha, ladder), h),
        "m-lsr": convexified_bound(w, omega_mlsr(alpha, optimal_mlsr(w, alpha, ladder), ladder), h),
        "ds-fmb": dsfmb_bound(w, omega_F(geometry, optimal_fmb(w, geometry, ladder), ladder), h),
        "serc": convexified_bound(w, omega_serc(alpha, optimal_serc(w, alpha, ladder), ladder), h),
        "erc": convexified_bound(w, omega_erc(alpha, optimal_erc(w, alpha, ladder), ladder), h),
        "merc": convexified_bound(w, omega_merc(alpha, optimal_merc(w, alpha, ladder), ladder), h),
        "rcc": convexified_bound(w, omega_rcc(alpha, optimal_rcc(w, ladder), ladder), h),
        "bbi": bbi_bound(moments(space, basis, spec.f), WeightBlockMatrix.from_basis(basis, spec.W)),
    }
    row["ordered"] = all(
        row[big] - row[small] >= -TOL_SOUNDNESS * max(1.0, abs(row[big]), abs(row[small]))
        for big, small in ORDERING
    )
    return row


def format_compare(rows, columns):
    header = f"{'alpha':>8} " + " ".join(f"{c:>14}" for c in columns) + "  ordered"
    lines = [header]
    for row in rows:
        cells = " ".join(f"{row[c]:>14.10g}" for c in columns)
        lines.append(f"{row['alpha']:>8.4g} {cells}  {'yes' if row['ordered'] else 'NO'}")
    return "\n".join(lines) + "\n"


def cmd_compare(args):
    scenario = load_scenario(args.scenario)
    if scenario.compare is None:
        raise ConfigParseError(f"{args.scenario} has no compare section")
    fmt = args.format or scenario.format
    rows = [compare_row(scenario.compare, alpha) for alpha in scenario.compare.alphas]
    records = [{"record": "compare", **row} for row in rows]
    table = format_compare(rows, scenario.bounds)
    write_output(args.out, "compare.jsonl", dump_records(records))
    write_output(args.out, "compare.txt", table)
    sys.stdout.write(table if fmt == "table" else dump_records(records))

    unordered = [row["alpha"] for row in rows if not row["ordered"]]
    if unordered:
        logger.error(f"Bound ordering violated at α = {unordered}")
        return EXIT_FAILED
    return EXIT_OK


def cmd_search(args):
    seed = resolve_seed(args.seed, 0)
    budget = SEARCH_BUDGET if args.budget is None else args.budget
    if args.n < 1 or args.order < 0 or args.sweep_size < 1:
        raise ConfigParseError("search needs --n >= 1, --order >= 0 and --sweep-size >= 1")
    ladder = WeightLadder(np.eye(args.n), args.order)
    start_time = time.time()
    logger.info(f"Searching for a {args.kind} witness (seed {seed}, budget {budget}, n={args.n}, ν={args.order})")
    try:
        witness = counterexample_search(args.kind, seed, budget, ladder, args.sweep_size)
    except BudgetExhausted as e:
        logger.warning(f"{e}")
        record = {"record": "search", "kind": args.kind, "seed": seed, "found": False, "budget": budget}
        write_output(args.out, f"witness-{args.kind}.jsonl", dump_records([record]))
        return EXIT_EXHAUSTED

    elapsed = time.time() - start_time
    logger.info(f"{args.kind} witness found after {witness.trials} trials in {elapsed:.3f}s")
    record = {"record": "search", "seed": seed, "found": True, **witness.to_record()}
    text = dump_records([record])
    write_output(args.out, f"witness-{args.kind}.jsonl", text)
    if (args.format or "table") == "table":
        sys.stdout.write(
            f"{args.kind} witness at α = {witness.alpha!r}: y1ᵀDy1 = {witness.negative_value:.6e}, "
            f"y2ᵀDy2 = {witness.positive_value:.6e} over {witness.sweep_size} sampled parameters\n"
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="Override the scenario seed.")
    parser.add_argument("--budget", type=int, default=None, help="Counterexample search budget in trials.")
    parser.add_argument("--out", default=OUTPUT_DIR, help="Directory for report files.")
    parser.add_argument("--format", choices=FORMATS, default=None, help="Standard output format.")


def build_parser():
    parser = _Parser(prog="delaybounds", description="Verify lower bounds for weighted quadratic integrals.")
    parser.add_argument("--log-level", default=None, help="Logging level (default from DELAYBOUNDS_LOG_LEVEL).")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Run the property suites of a scenario.")
    verify.add_argument("scenario")
    _add_common(verify)
    verify.add_argument("--trials", type=int, default=None, help="Trials per suite.")
    verify.add_argument("--tol", type=float, default=None, help="Use one tolerance for every check.")
    verify.set_defaults(handler=cmd_verify)

    compare = sub.add_parser("compare", help="Tabulate every bound across split fractions.")
    compare.add_argument("scenario")
    compare.add_argument("--out", default=OUTPUT_DIR, help="Directory for report files.")
    compare.add_argument("--format", choices=FORMATS, default=None, help="Standard output format.")
    compare.set_defaults(handler=cmd_compare)

    search = sub.add_parser("search", help="Search for a counterexample to a reverse relation.")
    search.add_argument("kind", choices=("B", "D"), type=str.upper)
    _add_common(search)
    search.add_argument("--order", type=int, default=0, help="Basis order ν.")
    search.add_argument("--n", type=int, default=1, help="State dimension (W = I).")
    search.add_argument("--sweep-size", type=int, default=SWEEP_SIZE, help="Sampled parameters per trial.")
    search.set_defaults(handler=cmd_search)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except DelayBoundsError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"Cannot write reports: {e}")
        return EXIT_ERROR
