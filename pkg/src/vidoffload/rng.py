"""Counter-based random streams keyed by (seed, trial, device, purpose).

Each key gets its own Philox stream, so a device's draws do not depend on how
many other devices or trials exist or in which order they are processed.
"""

import numpy as np

POSITION = 0
RANDOM_OFFLOAD = 1


def stream(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
