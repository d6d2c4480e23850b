"""covtest command line: run a test on a data file, simulate empirical
size/power, trace power curves, and verify the correction terms.

Exit codes: 0 success, 1 I/O or usage errors, 2 domain errors
(q_n = 1, invalid Sigma0, ...), 3 failed oracle checks.
"""
import argparse
import contextlib
import csv
import json
import logging
import math
import secrets
import sys

import numpy as np
from scipy import integrate

from . import __version__
from .exceptions import CovTestError, DomainError
from .mp_law import helper_integral_cos, mp_integral_g, mp_integral_numeric, ratio_to_d0
from .nullspec import NullSpec
from .rmt_clt import (RmtParams, mean_correction, mean_correction_numeric, var_correction,
                      var_correction_numeric)
from .scoretest import ESTIMATE, GREATER, TWO_SIDED, CorrectedRaoScore, RaoScore
from .simulation import (ALT1, FAMILIES, GAMMA, HYPOTHESES, SEED_BITS, ScenarioSpec,
                         SimulationReport, power_curve, run_monte_carlo)

log = logging.getLogger("covtest")

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_ORACLE = 0, 1, 2, 3
TEST_CSV_HEADER = ("test", "statistic", "reference", "df", "p_value", "alternative",
                   "rst_raw", "f_qn_g", "mu_g", "upsilon_g", "q_n", "beta_used")
VERIFY_HEADER = ("check", "closed_form", "oracle", "abs_diff", "tolerance", "status")
DEFAULT_VERIFY_Q = (0.1, 0.5, 0.9, 1.1, 2.0, 3.5)
FAMILY_BETA = {"gaussian": 0.0, GAMMA: 1.5}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_matrix(path):
    """Read a numeric CSV; a non-numeric first row is treated as a header."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.size == 0:
        raise ValueError(f"{path}: rows have inconsistent lengths")
    return data


def parse_null(text):
    if text in ("identity", "sphericity"):
        return NullSpec(text)
    if text.startswith("file:"):
        try:
            sigma0 = read_matrix(text[len("file:"):])
        except OSError as exc:
            raise OSError(f"cannot read sigma0: {exc}") from exc
        return NullSpec.general(sigma0)
    raise UsageError(f"--null must be identity, sphericity or file:<path>, got {text!r}")


def parse_beta(text):
    if text is None or text == ESTIMATE:
        return text
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--beta must be a number or {ESTIMATE!r}, got {text!r}") from None


def parse_grid(text):
    """'start:step:stop' (inclusive) or a comma separated list."""
    if ":" in text:
        start, step, stop = (float(t) for t in text.split(":"))
        if step <= 0:
            raise UsageError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(t) for t in text.split(",") if t.strip()]


def make_test(args, family=None):
    if args.test == "rst":
        return RaoScore()
    beta = args.beta
    if beta is None:
        beta = FAMILY_BETA.get(family, 0.0)
    return CorrectedRaoScore(beta=beta, kappa=args.kappa, alternative=args.alternative)


def resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(SEED_BITS)
        log.warning("no --seed given; using seed %d", seed)
        print(f"seed: {seed}", file=sys.stderr)
    return seed


def _open_out(path):
    return open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)


def cmd_test(args):
    null = parse_null(args.null)
    data = read_matrix(args.data)
    result = make_test(args).compute(data.T, null)
    with _open_out(args.out) as out:
        if args.output == "json":
            json.dump(result.to_dict(), out, indent=2)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(TEST_CSV_HEADER)
            d = result.detail
            writer.writerow([
                result.test, repr(result.statistic), result.reference,
                "" if result.df is None else result.df, repr(result.p_value), result.alternative,
                *([repr(v) for v in (d.rst_raw, d.f_qn_g, d.mu_g, d.upsilon_g, d.q_n,
                                      d.beta_used)] if d else [""] * 6),
            ])
    return EXIT_OK


def _scenario(args, v0=None):
    return ScenarioSpec(args.family, args.n, args.p, args.hypothesis,
                        args.v0 if v0 is None else v0, args.mu0)


def _emit_reports(reports, args):
    with _open_out(args.out) as out:
        if args.output == "json":
            for rep in reports:
                row = dict(zip(SimulationReport.CSV_HEADER, rep.csv_row(args.timing)))
                out.write(json.dumps(row) + "\n")
                out.flush()
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(SimulationReport.CSV_HEADER)
            for rep in reports:
                writer.writerow(rep.csv_row(args.timing))
                out.flush()


def cmd_simulate(args):
    spec = _scenario(args)
    null = parse_null(args.null)
    seed = resolve_seed(args.seed)
    report = run_monte_carlo(spec, make_test(args, spec.family), args.alpha, args.reps, seed,
                             null)
    _emit_reports([report], args)
    return EXIT_OK


def cmd_curve(args):
    null = parse_null(args.null)
    seed = resolve_seed(args.seed)
    grid = parse_grid(args.grid)
    spec = _scenario(args, v0=grid[0] if grid else 0.0)
    test = make_test(args, spec.family)

    def reports():
        # one v0 at a time so rows stream out as they finish
        for v0 in grid:
            yield power_curve(spec, test, [v0], args.alpha, args.reps, seed, null)[0]

    if not grid:
        raise UsageError("empty --grid")
    _emit_reports(reports(), args)
    return EXIT_OK


def verification_checks(qs, kappa, beta, tol):
    """Yield (name, closed_form, oracle, tolerance) tuples; exceptions are
    reported as failed checks by the caller."""
    g = lambda x: (x - 1.0) ** 2
    for q in qs:
        params = lambda: RmtParams(q, kappa, beta)
        yield (f"mp_integral_g[q={q:g}]", lambda: mp_integral_g(q),
               lambda: mp_integral_numeric(g, q, tol), 1e-7)
        yield (f"mp_normalization[q={q:g}]", lambda: 1.0,
               lambda: mp_integral_numeric(lambda x: np.ones_like(x), q, tol), 1e-8)
        yield (f"mean_correction[q={q:g},kappa={kappa},beta={beta:g}]",
               lambda: mean_correction(params()) if mp_integral_g(q) else None,
               lambda: mean_correction_numeric(params()), 1e-6)
        yield (f"var_correction[q={q:g},kappa={kappa},beta={beta:g}]",
               lambda: var_correction(params()) if mp_integral_g(q) else None,
               lambda: var_correction_numeric(params()), 1e-4)
        yield (f"helper_integral_cos[q={q:g}]", lambda: helper_integral_cos(ratio_to_d0(q)),
               lambda: _quad_cos(ratio_to_d0(q)), 1e-8)


def _quad_cos(d0):
    if abs(d0) <= 1:
        raise DomainError(f"|d0| = {abs(d0)} <= 1: pole on the integration path")
    value, _ = integrate.quad(lambda t: 1.0 / (math.cos(t) + d0), 0.0, 2.0 * math.pi,
                              epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


def cmd_verify(args):
    qs = args.q or DEFAULT_VERIFY_Q
    beta = 1.5 if args.beta is None else args.beta
    if beta == ESTIMATE:
        raise UsageError("verify needs a numeric --beta")
    rows, failed = [], 0
    for name, closed_fn, oracle_fn, tol in verification_checks(qs, args.kappa, beta, 1e-10):
        try:
            closed, oracle = float(closed_fn()), float(oracle_fn())
            diff = abs(closed - oracle)
            ok = diff < tol
            rows.append((name, repr(closed), repr(oracle), f"{diff:.3e}", f"{tol:g}",
                         "pass" if ok else "FAIL"))
        except CovTestError as exc:
            ok = False
            rows.append((name, "", "", "", f"{tol:g}", f"FAIL {type(exc).__name__}: {exc}"))
        failed += not ok
    with _open_out(args.out) as out:
        if args.output == "json":
            json.dump([dict(zip(VERIFY_HEADER, r)) for r in rows], out, indent=2)
            out.write("\n")
        else:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(VERIFY_HEADER)
            writer.writerows(rows)
    if failed:
        print(f"{failed} of {len(rows)} checks failed", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


def _add_common(p, output_default):
    p.add_argument("--output", choices=("csv", "json"), default=output_default)
    p.add_argument("--out", dest="out", metavar="PATH", help="write to PATH instead of stdout")


def _add_test_options(p):
    p.add_argument("--test", choices=("crst", "rst"), default="crst")
    p.add_argument("--null", default="identity", help="identity | sphericity | file:<path>")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=parse_beta, default=None,
                   help="fourth-moment parameter, or 'estimate' (default: 0, or the "
                        "family's true value in simulations)")
    p.add_argument("--kappa", type=int, choices=(1, 2), default=2)
    p.add_argument("--alternative", choices=(GREATER, TWO_SIDED), default=GREATER)


def _add_scenario_options(p, hypothesis_default):
    p.add_argument("--family", choices=FAMILIES, default="gaussian")
    p.add_argument("--hypothesis", choices=HYPOTHESES, default=hypothesis_default)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--v0", type=float, default=0.0)
    p.add_argument("--mu0", type=float, default=2.0)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-timing", dest="timing", action="store_false",
                   help="write elapsed_s as 0 so reruns are byte-identical")


def build_parser():
    parser = _Parser(prog="covtest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="test H0 on a data file (n rows x p columns)")
    _add_test_options(p)
    p.add_argument("--data", required=True, metavar="CSV")
    _add_common(p, "json")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="empirical size or power of one scenario")
    _add_test_options(p)
    _add_scenario_options(p, "null")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curve", help="empirical power over a grid of v0 values")
    _add_test_options(p)
    _add_scenario_options(p, ALT1)
    p.add_argument("--grid", default="0:0.02:0.10", help="start:step:stop or v1,v2,...")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="compare closed-form corrections with numeric oracles")
    p.add_argument("--q", type=float, action="append", help="ratio to check (repeatable)")
    p.add_argument("--kappa", type=int, choices=(1, 2), default=2)
    p.add_argument("--beta", type=parse_beta, default=None, help="default 1.5")
    _add_common(p, "csv")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"covtest: error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"covtest: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, CovTestError) as exc:
        print(f"covtest: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        print(f"covtest: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
