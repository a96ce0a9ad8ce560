"""
Mean tests on real composition data read from CSV.
"""

import numpy as np

from hdct.clr import clr_transform
from hdct.commands.cmdset import CmdSet
from hdct.commands.command import Command
from hdct.commands.utils import (
    format_outcomes,
    ingest_csv,
    read_vector,
    to_frame,
    write_csv,
)
from hdct.conf import settings
from hdct.errors import GroupError
from hdct.stattests import all_tests_one, all_tests_two


class TestingCmdSet(CmdSet):
    key = "Testing"

    def at_cmdset_creation(self):
        self.add(CmdTestOne())
        self.add(CmdTestTwo())


class _TestCommand(Command):
    help_category = "testing"

    def add_arguments(self, parser):
        parser.add_argument("--alpha", type=float, default=settings.DEFAULT_ALPHA, help="test level")
        parser.add_argument("--has-header", action="store_true", help="first line holds column names")
        parser.add_argument("--auto-close", action="store_true", help="close rows (counts or bases) to the simplex")
        parser.add_argument(
            "--pseudocount",
            type=float,
            default=settings.DEFAULT_PSEUDOCOUNT,
            help="replace zeros by this value, then close",
        )
        parser.add_argument("--unbiased-cov", action="store_true", help="divide covariances by n - 1 (N - 2)")
        parser.add_argument("--out", help="write the CSV report here instead of stdout")

    def report(self, outcomes, title, inputs, mu0=""):
        args = self.args
        self.msg(format_outcomes(outcomes, title))
        rows = [
            {
                "family": o.family.value,
                "statistic": o.statistic,
                "pvalue": o.pvalue,
                "threshold": o.threshold,
                "alpha": o.alpha,
                "reject": o.reject,
                "n": o.n_effective,
                "p": o.p,
                "input": inputs,
                "auto_close": args.auto_close,
                "pseudocount": args.pseudocount,
                "unbiased_cov": args.unbiased_cov,
                "mu0": mu0,
            }
            for o in outcomes
        ]
        text = write_csv(to_frame(rows), args.out)
        if args.out is None:
            self.stdout.write(text)

    def ingest(self, path, group_column=None):
        return ingest_csv(
            path,
            has_header=self.args.has_header,
            group_column=group_column,
            auto_close=self.args.auto_close,
            pseudocount=self.args.pseudocount,
        )


class CmdTestOne(_TestCommand):
    """
    One-sample mean test of H0: the log-basis mean equals mu0 (up to a
    constant), by default that all components share one mean.

    Usage:
      hdct test-one <file.csv> [--alpha A] [--mu0 mu0.csv] [--has-header]
                    [--auto-close] [--pseudocount EPS] [--unbiased-cov]
                    [--out report.csv]

    Rows of <file.csv> are compositions (or counts with --auto-close).
    mu0.csv holds a single row: the hypothesized log-basis mean, which is
    centered before use. Runs the sum, max and combo tests and prints
    statistic, p-value, threshold and decision for each, then the CSV
    report. The exit code is 0 whatever the decision.
    """

    key = "test-one"
    aliases = ["test1"]

    def add_arguments(self, parser):
        parser.add_argument("input", help="composition CSV")
        parser.add_argument("--mu0", help="CSV with one row: hypothesized log-basis mean")
        super().add_arguments(parser)

    def func(self):
        args = self.args
        x = self.ingest(args.input)
        mu0 = None
        if args.mu0:
            mu0 = read_vector(args.mu0)
            mu0 = mu0 - np.mean(mu0)
        outcomes = all_tests_one(clr_transform(x), mu0, args.alpha, unbiased=args.unbiased_cov)
        self.report(outcomes, "one-sample mean tests", args.input, args.mu0 or "")


class CmdTestTwo(_TestCommand):
    """
    Two-sample test of H0: both groups share one log-basis mean (up to a
    constant).

    Usage:
      hdct test-two <group1.csv> <group2.csv> [options]
      hdct test-two <file.csv> --group-column COL [options]

    Options as for test-one. With --group-column, COL is a column name
    (with --has-header) or a 0-based index whose values split the rows
    into exactly two groups, taken in order of first appearance.
    """

    key = "test-two"
    aliases = ["test2"]

    def add_arguments(self, parser):
        parser.add_argument("inputs", nargs="+", help="one file per group, or one file with --group-column")
        parser.add_argument("--group-column", help="column name or 0-based index holding group labels")
        super().add_arguments(parser)

    def func(self):
        args = self.args
        if args.group_column is not None:
            if len(args.inputs) != 1:
                raise GroupError("--group-column takes a single input file")
            x1, x2 = self.ingest(args.inputs[0], group_column=args.group_column)
        else:
            if len(args.inputs) != 2:
                raise GroupError("need two input files, or one with --group-column")
            x1, x2 = (self.ingest(path) for path in args.inputs)
        outcomes = all_tests_two(clr_transform(x1), clr_transform(x2), args.alpha, unbiased=args.unbiased_cov)
        self.report(outcomes, "two-sample mean tests", ";".join(args.inputs))
