"""
Random number streams.

Every dataset the simulator draws comes from its own Philox stream keyed
by (master seed, replication, group). A replication therefore sees the
same numbers no matter which worker runs it or in what order, which is
what makes experiment reports independent of the thread count.

"""

import numpy as np

# Group slots inside one replication.
GROUP_ONE = 0
GROUP_TWO = 1
COVARIANCE = 2


def stream(master_seed, *key):
    """
    Independent generator for the spawn key `key` under `master_seed`.

    Args:
        master_seed (int): 64-bit experiment seed.
        *key (int): Spawn key, e.g. (replication, group).

    Returns:
        numpy.random.Generator

    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def replication_stream(master_seed, replication, group=GROUP_ONE):
    return stream(master_seed, replication, group)


def stream_id(master_seed, *key):
    """
    Printable identity of a stream, for error provenance.
    """
    return f"{int(master_seed)}/" + "/".join(str(int(k)) for k in key)
