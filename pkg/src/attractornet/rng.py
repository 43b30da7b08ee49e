"""Seeded random streams.

All randomness comes from numpy's PCG64 bit generator. Per-run seeds are
derived from a master seed with ``SeedSequence``::

    seed = SeedSequence(master_seed, spawn_key=(crc32(label), index))
               .generate_state(1, uint64)[0]

where ``label`` is a cell description such as ``"rastrigin|2|DE"``.
``crc32`` is used instead of ``hash`` because string hashing is salted
per interpreter process.
"""

from __future__ import annotations

import zlib

import numpy as np

GENERATOR_NAME = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master_seed: int, label: str, index: int) -> int:
    """64-bit run seed for run ``index`` of the cell named ``label``."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(zlib.crc32(label.encode()), index))
    return int(seq.generate_state(1, np.uint64)[0])
