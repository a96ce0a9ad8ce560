"""
Commands

Commands describe what a user can do from the command line. Each one is a
class with a `key`, optional `aliases`, a `help_category` and a docstring
that is shown verbatim as its help entry, so document consistently there.

"""

import argparse
import inspect
import sys

from hdct.errors import HdctError
from hdct.utils import logger


class Command:
    """
    Base command (you may see this if a child command had no help text defined)

    Each Command class implements the following methods, called in this
    order (only func() is actually required):

        - add_arguments(parser): Declare the command's flags.
        - parse(argv): Turn argv into `self.args` (and `self.switch`).
        - func(): Performs the actual work; returns nothing or an exit code.

    """

    key = ""
    aliases = []
    help_category = "general"
    # first positional, e.g. `simulate size`; empty means no switch
    switch_options = ()

    def __init__(self, stdout=None, stderr=None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.args = None
        self.switch = None

    def get_help(self):
        return inspect.cleandoc(self.__doc__ or Command.__doc__)

    def add_arguments(self, parser):
        pass

    def get_parser(self):
        parser = argparse.ArgumentParser(
            prog=f"hdct {self.key}",
            description=self.get_help(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        if self.switch_options:
            parser.add_argument("switch", choices=self.switch_options)
        self.add_arguments(parser)
        return parser

    def parse(self, argv):
        self.args = self.get_parser().parse_args(argv)
        self.switch = getattr(self.args, "switch", None)

    def func(self):
        raise NotImplementedError

    def msg(self, text=""):
        self.stdout.write(f"{text}\n")

    def error(self, text):
        self.stderr.write(f"{text}\n")

    def run(self, argv):
        """
        Parse, execute and translate failures into exit codes.

        Returns:
            int: 0 on success, the error's exit code otherwise.

        """
        try:
            self.parse(list(argv))
        except SystemExit as exit:
            return exit.code if isinstance(exit.code, int) else 2
        try:
            code = self.func()
        except HdctError as err:
            logger.log_err("%s failed: %s", self.key, err)
            self.error(str(err))
            return err.exit_code
        except OSError as err:
            logger.log_err("%s failed: %s", self.key, err)
            self.error(f"cli: {err}")
            return 2
        except Exception as err:
            logger.log_trace(f"{self.key}: unexpected error")
            self.error(f"cli: internal error: {err!r}")
            return 1
        return code or 0
