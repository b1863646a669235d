from enum import IntEnum

import numpy as np


class StreamPurpose(IntEnum):
    """Separates the stream families drawn from one top-level seed."""

    CALIBRATION_SEARCH = 0
    CALIBRATION_VALIDATION = 1
    M0_ESTIMATION = 2
    EXPERIMENT = 3


def derive_rng(seed: int, purpose: StreamPurpose, *keys: int) -> np.random.Generator:
    """
    Independent generator for replication ``keys`` of ``purpose``.

    The stream depends only on (seed, purpose, keys), never on the order in
    which replications are executed.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(int(purpose), *keys))
    return np.random.default_rng(sequence)
