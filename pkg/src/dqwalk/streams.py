"""Deterministic random streams for reproducible serial and parallel runs.

Every stochastic quantity in the package draws from a PCG64 generator
derived from a 64-bit master seed plus an integer key path, via numpy's
`SeedSequence` spawn-key mechanism.  The same (master seed, path) always
yields the same stream, regardless of process, worker count, or call
order, which is what makes Monte Carlo results invariant to how trials
are scheduled.

Key paths used by this package:

* ``(trial, COIN_STREAM)``  coin draws of one Monte Carlo trial
* ``(trial, INIT_STREAM)``  initial-state draw of one trial
* ``()``                    standalone draws (moment audits, ad hoc sampling)
"""

from __future__ import annotations

import numpy as np

COIN_STREAM = 0
INIT_STREAM = 1


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given master seed and key path."""
    master_seed = int(master_seed)
    if master_seed < 0:
        raise ValueError(f"master seed must be nonnegative, got {master_seed}")
    key = tuple(int(p) for p in path)
    if any(p < 0 for p in key):
        raise ValueError(f"stream path must be nonnegative integers, got {key}")
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))
