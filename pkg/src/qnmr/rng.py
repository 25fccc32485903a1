"""Deterministic random-number streams.

All stochastic code in the package draws from Philox, a counter-based
generator with stable cross-platform output.  Independent substreams are
derived from a 64-bit experiment seed plus a tuple of small integers (a
purpose tag and indices such as the time-point or trajectory number), so
results do not depend on execution order or worker scheduling.
"""

from __future__ import annotations

import numpy as np

# Purpose tags for substream derivation.  Values are arbitrary but frozen:
# changing them silently changes every sampled result.
MEASURE = 1
FAULTS = 2
READOUT = 3
CALIBRATION = 4
ORDERING = 5
LAYOUT = 6
PROTOCOL = 7


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return a generator for substream ``key`` of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
