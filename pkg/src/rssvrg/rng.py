"""Seeded random streams.

Every source of randomness in the library derives from a
``numpy.random.SeedSequence`` keyed by a tuple, so that distinct concerns
(instance data, component index draws, per-epoch perturbations) get
independent streams and identical keys reproduce identical draws bitwise.

Key layout used by the solvers and the experiment harness:

- ``(seed, 0)``            instance feature generation
- ``(seed, 1)``            component index stream of a solver run
- ``(seed, 2, s)``         perturbation batch of epoch s

Keeping the epoch batch on its own key (rather than one long stream) means
a batch of m samples is a prefix of the batch of m' > m samples for the
same epoch, which pairs sampling-size study arms sample-for-sample.
"""

import numpy as np

INSTANCE_STREAM = 0
INDEX_STREAM = 1
EPOCH_STREAM = 2


def stream(*key: int) -> np.random.Generator:
    """Generator for an integer tuple key. Same key, same draws."""
    return np.random.default_rng(np.random.SeedSequence(tuple(int(k) for k in key)))


def instance_stream(seed: int) -> np.random.Generator:
    return stream(seed, INSTANCE_STREAM)


def index_stream(seed: int) -> np.random.Generator:
    return stream(seed, INDEX_STREAM)


def epoch_stream(seed: int, epoch: int) -> np.random.Generator:
    return stream(seed, EPOCH_STREAM, epoch)
