import io
import json
import math
import os
import tempfile
from pathlib import Path
from unittest import TestCase

import pandas as pd

from hdct.cli import main
from hdct.commands.default_cmdsets import DefaultCmdSet
from hdct.commands.simulate import CmdSimulate, parse_m_grid
from hdct.commands.testing import CmdTestOne, CmdTestTwo
from hdct.commands.utils import frame_to_csv, ingest_csv, read_csv, to_frame
from hdct.core import CompositionMatrix
from hdct.errors import ConfigError, GroupError, NonPositiveEntry, ParseError
from hdct.sim import make_config, run_experiment

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
LOGLOG3 = -2 * math.log(3) + math.log(math.log(3))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def csv_part(text):
    """
    The CSV report printed after the summary table.
    """
    lines = text.splitlines()
    start = max(i for i, line in enumerate(lines) if line.startswith("=")) + 1
    return pd.read_csv(io.StringIO("\n".join(lines[start:])))


class CsvTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
        return path


class TestIngest(CsvTestCase):
    def test_exact_simplex_rows(self):
        path = self.write("x.csv", "0.5,0.25,0.25\n0.2,0.3,0.5\n0.1,0.1,0.8\n")
        x = ingest_csv(path)
        self.assertIsInstance(x, CompositionMatrix)
        self.assertEqual((x.n, x.p), (3, 3))
        self.assertEqual(x.pseudocount, 0.0)

    def test_counts_with_auto_close(self):
        path = self.write("x.csv", "20,10,10\n1,1,2\n")
        x = ingest_csv(path, auto_close=True)
        self.assertEqual(x.values[0].tolist(), [0.5, 0.25, 0.25])

    def test_zero_without_pseudocount(self):
        path = self.write("x.csv", "1,2,3\n4,0,6\n")
        with self.assertRaises(NonPositiveEntry) as ctx:
            ingest_csv(path, auto_close=True)
        self.assertEqual((ctx.exception.row, ctx.exception.col), (1, 1))

    def test_zero_with_pseudocount(self):
        path = self.write("x.csv", "1,2,3\n4,0,6\n")
        x = ingest_csv(path, pseudocount=0.5)
        self.assertEqual(x.pseudocount, 0.5)
        self.assertAlmostEqual(x.values[1, 1], 0.5 / 10.5)

    def test_bad_cell(self):
        path = self.write("x.csv", "a,b,c\n0.5,0.25,0.25\n0.5,oops,0.25\n")
        with self.assertRaises(ParseError) as ctx:
            read_csv(path, has_header=True)
        self.assertEqual((ctx.exception.row, ctx.exception.col), (1, 1))

    def test_short_row(self):
        path = self.write("x.csv", "0.5,0.25,0.25\n0.5,0.5\n")
        with self.assertRaises(ParseError) as ctx:
            read_csv(path)
        self.assertEqual((ctx.exception.row, ctx.exception.col), (1, 2))

    def test_long_row(self):
        path = self.write("x.csv", "0.5,0.25,0.25\n0.5,0.25,0.25\n0.5,0.25,0.2,0.05\n")
        with self.assertRaises(ParseError) as ctx:
            read_csv(path)
        self.assertEqual(ctx.exception.row, 2)

    def test_group_column(self):
        first, second = ingest_csv(FIXTURES / "f2b_grouped.csv", has_header=True, group_column="group", auto_close=True)
        self.assertEqual((first.n, second.n), (5, 5))
        by_index = ingest_csv(FIXTURES / "f2b_grouped.csv", has_header=True, group_column=0, auto_close=True)
        self.assertEqual(by_index[0].values.tolist(), first.values.tolist())

    def test_three_groups(self):
        path = self.write("x.csv", "a,0.5,0.5\nb,0.5,0.5\nc,0.5,0.5\n")
        with self.assertRaises(GroupError):
            ingest_csv(path, group_column=0)

    def test_unknown_group_column(self):
        with self.assertRaises(GroupError):
            ingest_csv(FIXTURES / "f2b_grouped.csv", has_header=True, group_column="batch")


class TestTestCommands(CsvTestCase):
    def test_one_sample_fixture(self):
        code, out, err = run("test-one", str(FIXTURES / "f1.csv"), "--auto-close")
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertEqual(report["family"].tolist(), ["sum", "max", "com"])
        self.assertAlmostEqual(report["statistic"][0] / (9 / math.sqrt(10.3)), 1.0, places=8)
        self.assertAlmostEqual(report["statistic"][1] / (12.5 + LOGLOG3), 1.0, places=8)
        self.assertEqual(report["n"][0], 5)
        self.assertTrue(report["auto_close"][0])

    def test_two_sample_fixture_files(self):
        code, out, err = run(
            "test-two", str(FIXTURES / "f1.csv"), str(FIXTURES / "f2b.csv"), "--auto-close"
        )
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertEqual(report["family"].tolist(), ["sum2", "max2", "com2"])
        cpn = 1 + 5 / (3 * math.sqrt(3))
        self.assertAlmostEqual(report["statistic"][0] / ((13 / 3) / math.sqrt((31 / 4) * cpn)), 1.0, places=8)
        self.assertAlmostEqual(report["statistic"][1] / (6.25 + LOGLOG3), 1.0, places=8)

    def test_two_sample_group_column(self):
        out_path = os.path.join(self.tmp.name, "report.csv")
        code, _, err = run(
            "test-two",
            str(FIXTURES / "f2b_grouped.csv"),
            "--group-column",
            "group",
            "--has-header",
            "--auto-close",
            "--out",
            out_path,
        )
        self.assertEqual(code, 0, err)
        report = pd.read_csv(out_path)
        self.assertAlmostEqual(report["statistic"][1] / (6.25 + LOGLOG3), 1.0, places=8)

    def test_identical_groups_do_not_reject(self):
        code, out, _ = run("test-two", str(FIXTURES / "f1.csv"), str(FIXTURES / "f2a.csv"), "--auto-close")
        self.assertEqual(code, 0)
        self.assertFalse(csv_part(out)["reject"].any())
        self.assertIn("fail to reject", out)

    def test_mu0(self):
        # log-basis mean equal to the sample mean: nothing left to detect
        mu0 = self.write("mu0.csv", f"{math.log(2)},0,{-math.log(2)}\n")
        code, out, err = run("test-one", str(FIXTURES / "f1.csv"), "--auto-close", "--mu0", mu0)
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertLess(report["statistic"][0], 0)
        self.assertEqual(report["mu0"][0], mu0)

    def test_missing_file(self):
        code, out, err = run("test-one", os.path.join(self.tmp.name, "nope.csv"))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertTrue(err.startswith("cli: "))

    def test_zero_entry_exit_code(self):
        path = self.write("x.csv", "0.5,0.5,0\n0.2,0.3,0.5\n")
        code, _, err = run("test-one", path)
        self.assertEqual(code, 2)
        self.assertIn("row 0, col 2", err)

    def test_group_column_needs_one_file(self):
        code, _, err = run("test-two", str(FIXTURES / "f1.csv"), str(FIXTURES / "f2b.csv"), "--group-column", "0")
        self.assertEqual(code, 2)
        self.assertIn("cli: ", err)

    def test_command_classes(self):
        self.assertEqual(CmdTestOne.key, "test-one")
        self.assertEqual(CmdTestTwo.key, "test-two")


class TestSimulateCommand(CsvTestCase):
    ARGS = ["simulate", "size", "--dist", "A1", "--cov", "B1", "--n", "20", "--p", "10", "--reps", "12", "--seed", "42"]

    def test_size_csv(self):
        code, out, err = run(*self.ARGS)
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertEqual(
            list(report.columns)[:10], ["statistic", "dist", "cov", "n", "p", "alpha", "reps", "rate", "se", "seed"]
        )
        self.assertEqual(report["statistic"].tolist(), ["sum", "max", "com"])
        self.assertTrue((report["seed"] == 42).all())

    def test_byte_identical_across_threads(self):
        outputs = []
        for threads in ("1", "2", "8"):
            path = os.path.join(self.tmp.name, f"out{threads}.csv")
            code, _, err = run(*self.ARGS, "--threads", threads, "--out", path)
            self.assertEqual(code, 0, err)
            outputs.append(Path(path).read_bytes())
        self.assertEqual(outputs[0], outputs[1])
        self.assertEqual(outputs[0], outputs[2])

    def test_report_round_trip(self):
        path = os.path.join(self.tmp.name, "out.csv")
        code, _, err = run(*self.ARGS, "--out", path)
        self.assertEqual(code, 0, err)
        config = make_config("size-one", "A1", "B1", 10, n=20, reps=12, master_seed=42, alpha=0.05, energy=0.5)
        expected = run_experiment(config).rows()
        written = pd.read_csv(path, float_precision="round_trip")
        self.assertEqual(len(written), len(expected))
        for i, row in enumerate(expected):
            for key, value in row.items():
                if isinstance(value, float):
                    self.assertEqual(float(written.at[i, key]), value, key)

    def test_written_floats_keep_full_precision(self):
        frame = to_frame([{"statistic": "sum", "rate": 0.07978559231302818, "se": 1 / 3}])
        text = frame_to_csv(frame)
        back = pd.read_csv(io.StringIO(text), float_precision="round_trip")
        self.assertEqual(back.at[0, "rate"], 0.07978559231302818)
        self.assertEqual(back.at[0, "se"], 1 / 3)

    def test_power_two_sample(self):
        code, out, err = run(
            "simulate", "power", "--n1", "10", "--n2", "10", "--p", "8", "--m", "1:3", "--reps", "5", "--seed", "7",
            "--combo-bound",
        )
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertEqual(len(report), 12)
        self.assertEqual(sorted(set(report["m"])), [1, 2, 3])
        self.assertIn("bound", set(report["statistic"]))
        self.assertEqual(report["n"][0], "10+10")

    def test_summary_quotes_published_sizes(self):
        base = ["simulate", "size", "--p", "200", "--reps", "2", "--seed", "1", "--threads", "1"]
        code, out, err = run(*base, "--n", "200")
        self.assertEqual(code, 0, err)
        self.assertIn("published 0.072", out)
        code, out, err = run(*base, "--n", "150")
        self.assertEqual(code, 0, err)
        self.assertNotIn("published", out)

    def test_null_check(self):
        code, out, err = run("simulate", "null-check", "--n", "20", "--p", "10", "--reps", "20", "--seed", "3")
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertIn("ks_distance", set(report["diagnostic"]))

    def test_config_file(self):
        config = self.write("exp.json", json.dumps({"dist": "A2", "n": 20, "p": 10, "reps": 6, "seed": 5}))
        code, out, err = run("simulate", "size", "--config", config, "--reps", "4")
        self.assertEqual(code, 0, err)
        report = csv_part(out)
        self.assertEqual(report["dist"][0], "A2")
        self.assertEqual(report["reps"][0], 4)

    def test_unknown_config_key(self):
        config = self.write("exp.json", json.dumps({"n": 20, "p": 10, "seed": 5, "colour": "red"}))
        code, _, err = run("simulate", "size", "--config", config)
        self.assertEqual(code, 4)
        self.assertIn("colour", err)

    def test_seed_required(self):
        code, _, err = run("simulate", "size", "--n", "20", "--p", "10")
        self.assertEqual(code, 4)
        self.assertIn("--seed", err)

    def test_n_and_groups_conflict(self):
        code, _, _ = run("simulate", "size", "--n", "20", "--n1", "10", "--n2", "10", "--p", "10", "--seed", "1")
        self.assertEqual(code, 4)

    def test_parse_m_grid(self):
        self.assertEqual(parse_m_grid("1:4"), (1, 2, 3, 4))
        self.assertEqual(parse_m_grid("2:10:4"), (2, 6, 10))
        self.assertEqual(parse_m_grid("1,5"), (1, 5))
        with self.assertRaises(ConfigError):
            parse_m_grid("5:1")

    def test_switch_is_required(self):
        cmd = CmdSimulate(stdout=io.StringIO(), stderr=io.StringIO())
        self.assertEqual(cmd.run(["--n", "20"]), 2)


class TestCli(TestCase):
    def test_cmdset(self):
        cmdset = DefaultCmdSet()
        self.assertEqual(len(cmdset), 4)
        self.assertEqual(cmdset.get("sim").key, "simulate")
        self.assertEqual(cmdset.get("test1").key, "test-one")
        self.assertIsNone(cmdset.get("look"))

    def test_version(self):
        code, out, _ = run("version")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("hdct "))

    def test_help(self):
        code, out, _ = run("--help")
        self.assertEqual(code, 0)
        for key in ("test-one", "test-two", "simulate", "version"):
            self.assertIn(key, out)

    def test_unknown_command(self):
        code, _, err = run("frobnicate")
        self.assertEqual(code, 2)
        self.assertIn("unknown command", err)
