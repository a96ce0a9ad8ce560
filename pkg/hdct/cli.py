"""
Entry point of the `hdct` executable.

    hdct [-v] <command> [args...]

Looks the command up in DefaultCmdSet by key or alias and returns its
exit code: 0 success, 2 input error, 3 numerical failure, 4 config error.

"""

import sys

from hdct.commands.default_cmdsets import DefaultCmdSet
from hdct.utils import logger


def usage(cmdset):
    lines = ["usage: hdct [-v] <command> [args...]", "", "commands:"]
    for cmd in cmdset:
        summary = cmd.get_help().splitlines()[0]
        lines.append(f"  {cmd.key:<10} {summary}")
    lines.append("")
    lines.append("Run `hdct <command> -h` for a command's help.")
    return "\n".join(lines)


def main(argv=None, stdout=None, stderr=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    level = None
    while argv and argv[0] in ("-v", "--verbose"):
        level = "INFO" if level is None else "DEBUG"
        argv.pop(0)
    logger.setup(level)

    cmdset = DefaultCmdSet()
    if not argv or argv[0] in ("-h", "--help", "help"):
        stdout.write(usage(cmdset) + "\n")
        return 0 if argv else 2
    cmd = cmdset.get(argv[0])
    if cmd is None:
        stderr.write(f"cli: unknown command {argv[0]!r}\n")
        stderr.write(usage(cmdset) + "\n")
        return 2
    return type(cmd)(stdout=stdout, stderr=stderr).run(argv[1:])


if __name__ == "__main__":
    sys.exit(main())
