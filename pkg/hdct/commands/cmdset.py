"""
Command sets

A cmdset groups commands so they can be looked up by key or alias. A
cmdset may also add another cmdset, which merges its commands in.

"""


class CmdSet:
    key = "Unnamed CmdSet"

    def __init__(self):
        self.commands = []
        self.at_cmdset_creation()

    def at_cmdset_creation(self):
        """
        Populates the cmdset
        """
        pass

    def add(self, cmd):
        if isinstance(cmd, CmdSet):
            for other in cmd.commands:
                self.add(other)
            return
        # a later command with the same key replaces the earlier one
        self.commands = [c for c in self.commands if c.key != cmd.key]
        self.commands.append(cmd)

    def get(self, key):
        key = key.lower()
        for cmd in self.commands:
            if key == cmd.key or key in cmd.aliases:
                return cmd
        return None

    def __iter__(self):
        return iter(self.commands)

    def __len__(self):
        return len(self.commands)
