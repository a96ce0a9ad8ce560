"""
Monte-Carlo experiments from the command line.
"""

import json

from hdct import data
from hdct.commands.cmdset import CmdSet
from hdct.commands.command import Command
from hdct.commands.utils import banner, rule, to_frame, write_csv
from hdct.conf import settings
from hdct.errors import ConfigError
from hdct.sim import Mode, make_config, run_experiment
from hdct.utils import logger

# keys accepted in a --config file, mapped to argparse destinations
CONFIG_KEYS = {
    "dist": "dist",
    "cov": "cov",
    "n": "n",
    "n1": "n1",
    "n2": "n2",
    "p": "p",
    "alpha": "alpha",
    "reps": "reps",
    "m": "m",
    "energy": "energy",
    "seed": "seed",
    "threads": "threads",
    "build_seed": "build_seed",
    "build-seed": "build_seed",
    "redraw_cov_per_rep": "redraw_cov_per_rep",
    "redraw-cov-per-rep": "redraw_cov_per_rep",
    "unbiased_cov": "unbiased_cov",
    "unbiased-cov": "unbiased_cov",
    "combo_bound": "combo_bound",
    "combo-bound": "combo_bound",
}

DEFAULTS = {
    "dist": "A1",
    "cov": "B1",
    "alpha": settings.DEFAULT_ALPHA,
    "reps": 1000,
    "m": "1:20",
    "energy": settings.DEFAULT_ENERGY,
    "redraw_cov_per_rep": False,
    "unbiased_cov": False,
    "combo_bound": False,
}


def parse_m_grid(text):
    """
    "1:20" (inclusive range), "1:20:2" (with step) or "1,2,5".
    """
    if isinstance(text, (list, tuple)):
        return tuple(int(m) for m in text)
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [int(part) for part in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step < 1 or stop < start:
                raise ValueError
            return tuple(range(start, stop + 1, step))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot read m grid {text!r}; use 1:20 or 1,2,5")


def load_config_file(path):
    with open(path, encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path} is not valid JSON ({err})")
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s) in {path}: {', '.join(unknown)}")
    for key in raw:
        if "-" in key:
            logger.log_dep("%s: config key %r is deprecated, use %r", path, key, CONFIG_KEYS[key])
    return {CONFIG_KEYS[key]: value for key, value in raw.items()}


class SimulateCmdSet(CmdSet):
    key = "Simulate"

    def at_cmdset_creation(self):
        self.add(CmdSimulate())


class CmdSimulate(Command):
    """
    Run a size, power or null-law experiment.

    Usage:
      hdct simulate size --p P (--n N | --n1 N1 --n2 N2) --seed S [options]
      hdct simulate power --p P (--n N | --n1 N1 --n2 N2) --seed S [--m 1:20] [options]
      hdct simulate null-check --p P (--n N | --n1 N1 --n2 N2) --seed S [options]

    Options:
      --dist A1|A2|A3         innovation law (default A1)
      --cov B1|B2|B3          covariance design (default B1)
      --alpha A --reps R      level and replication count (0.05, 1000)
      --energy E              signal energy m * delta^2 (default 0.5)
      --threads N|auto        workers; falls back to HDCT_THREADS
      --build-seed S          seed for the B2/B3 parameter draw (default --seed)
      --redraw-cov-per-rep    draw new B2/B3 parameters in every replication
      --unbiased-cov          covariance divisor n - 1 (N - 2)
      --combo-bound           add max(sum, max) power at alpha/2 rows
      --config FILE           JSON object keyed by the long flag names
      --out FILE              write the CSV report here instead of stdout

    --n runs the one-sample tests, --n1/--n2 the two-sample ones. Results
    depend only on the config and --seed, never on --threads.
    """

    key = "simulate"
    aliases = ["sim"]
    help_category = "simulation"
    switch_options = ("size", "power", "null-check")

    def add_arguments(self, parser):
        parser.add_argument("--dist")
        parser.add_argument("--cov")
        parser.add_argument("--n", type=int)
        parser.add_argument("--n1", type=int)
        parser.add_argument("--n2", type=int)
        parser.add_argument("--p", type=int)
        parser.add_argument("--alpha", type=float)
        parser.add_argument("--reps", type=int)
        parser.add_argument("--m")
        parser.add_argument("--energy", type=float)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--threads")
        parser.add_argument("--build-seed", dest="build_seed", type=int)
        parser.add_argument("--redraw-cov-per-rep", dest="redraw_cov_per_rep", action="store_true", default=None)
        parser.add_argument("--unbiased-cov", dest="unbiased_cov", action="store_true", default=None)
        parser.add_argument("--combo-bound", dest="combo_bound", action="store_true", default=None)
        parser.add_argument("--config")
        parser.add_argument("--out")

    def resolve(self):
        """
        Merge defaults, the --config file and explicit flags, in that order.
        """
        values = dict(DEFAULTS)
        if self.args.config:
            values.update(load_config_file(self.args.config))
        for dest in set(CONFIG_KEYS.values()):
            flag = getattr(self.args, dest, None)
            if flag is not None:
                values[dest] = flag
        return values

    def build_config(self, values):
        if values.get("seed") is None:
            raise ConfigError("--seed is required")
        if values.get("p") is None:
            raise ConfigError("--p is required")
        two_sample = values.get("n1") is not None or values.get("n2") is not None
        if two_sample and values.get("n") is not None:
            raise ConfigError("give either --n or --n1/--n2, not both")
        if not two_sample and values.get("n") is None:
            raise ConfigError("give --n (one sample) or --n1 and --n2 (two samples)")
        mode = {
            "size": Mode.SizeTwo if two_sample else Mode.SizeOne,
            "power": Mode.PowerTwo if two_sample else Mode.PowerOne,
            "null-check": Mode.NullDiagnostics,
        }[self.switch]
        kwargs = dict(
            alpha=float(values["alpha"]),
            reps=int(values["reps"]),
            master_seed=int(values["seed"]),
            energy=float(values["energy"]),
            threads=values.get("threads"),
            redraw_cov_per_rep=bool(values["redraw_cov_per_rep"]),
            unbiased_cov=bool(values["unbiased_cov"]),
        )
        if two_sample:
            if values.get("n1") is None or values.get("n2") is None:
                raise ConfigError("two-sample runs need both --n1 and --n2")
            kwargs.update(n1=int(values["n1"]), n2=int(values["n2"]))
        else:
            kwargs["n"] = int(values["n"])
        if mode.is_power:
            kwargs["m_grid"] = parse_m_grid(values["m"])
        return make_config(
            mode, values["dist"], values["cov"], int(values["p"]), build_seed=values.get("build_seed"), **kwargs
        )

    def summary(self, report):
        cfg = report.config
        published_design = cfg.alpha == 0.05 and (
            (cfg.n1, cfg.n2) == data.TWO_SAMPLE_N if cfg.two_sample else cfg.n == data.ONE_SAMPLE_N
        )
        lines = [banner(f"simulate {self.switch}")]
        lines.append(
            f" dist {cfg.dist.label}  cov {cfg.cov.label}  n {cfg.n_label}  p {cfg.p}"
            f"  alpha {cfg.alpha:g}  reps {cfg.reps}  seed {cfg.master_seed}"
        )
        lines.append(" " + "-" * 76)
        if cfg.mode.is_size:
            for name, rate in report.rates.items():
                ref = data.get_reference_size(name, cfg.dist.label, cfg.cov.label, cfg.p, cfg.two_sample)
                published = f"   published {ref:.3f}" if ref is not None and published_design else ""
                lines.append(f" {name:<6} size {rate:.3f} (se {report.se(rate):.3f}){published}")
        elif cfg.mode.is_power:
            lines.append(f" {'m':>4}" + "".join(f"{name:>10}" for name in data.STATISTICS))
            for m in cfg.m_grid:
                lines.append(f" {m:>4}" + "".join(f"{report.power[(name, m)]:>10.3f}" for name in data.STATISTICS))
        else:
            for name, value in report.diagnostics.items():
                lines.append(f" {name:<20}{value:>12.4f}")
        lines.append(rule())
        return "\n".join(lines)

    def func(self):
        values = self.resolve()
        try:
            config = self.build_config(values)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"bad config value ({err})")
        report = run_experiment(config)
        self.msg(self.summary(report))
        rows = report.rows(combo_bound=bool(values["combo_bound"]))
        text = write_csv(to_frame(rows), self.args.out)
        if self.args.out is None:
            self.stdout.write(text)
