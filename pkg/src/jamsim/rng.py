"""Deterministic random streams.

Every stochastic quantity in the simulator is drawn from a counter-based
substream keyed by (master_seed, *path). Trials can therefore run in any
order, or in parallel, and still reproduce bit-identical draws.
"""

import numpy as np


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for one (master_seed, key path) combination.

    Philox is counter based; streams with distinct key paths never collide
    and creating one is cheap enough to do per trial.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed),
                                 spawn_key=tuple(int(k) for k in path))
    return np.random.Generator(np.random.Philox(seq))
