"""
Command sets

All commands must be grouped in a cmdset to be reachable from the
command line. `DefaultCmdSet` is the one `hdct.cli` looks commands up in.

To create new commands to populate the cmdset, see
`hdct/commands/command.py`.

"""

import platform

import numpy
import pandas
import scipy

from hdct import __version__
from hdct.commands.cmdset import CmdSet
from hdct.commands.command import Command
from hdct.commands.simulate import SimulateCmdSet
from hdct.commands.testing import TestingCmdSet


class CmdVersion(Command):
    """
    Show the hdct version and the versions of its numerical stack.

    Usage:
      hdct version
    """

    key = "version"
    aliases = ["--version"]

    def func(self):
        self.msg(f"hdct {__version__}")
        self.msg(
            f"python {platform.python_version()}, numpy {numpy.__version__}, "
            f"scipy {scipy.__version__}, pandas {pandas.__version__}"
        )


class DefaultCmdSet(CmdSet):
    """
    Every command available from the `hdct` executable.
    """

    key = "DefaultCmdSet"

    def at_cmdset_creation(self):
        """
        Populates the cmdset
        """
        self.add(TestingCmdSet())
        self.add(SimulateCmdSet())
        self.add(CmdVersion())
