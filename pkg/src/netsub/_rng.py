"""Counter-based random number derivation.

All graph generation draws its randomness through a stateless 64-bit mixer
keyed on (seed, counter), so that any vertex pair can be evaluated
independently of evaluation order.  Replicated procedures (subsampling,
coverage trials) instead derive one numpy Generator per replicate index,
which keeps results identical under any degree of parallelism.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_64 = 1.0 / 2.0**64


def mix64(x) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to uint64 input."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def derive_key(seed: int, *salts: int) -> np.uint64:
    """Derive a stream key from a seed and a fixed salt path."""
    key = mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    for salt in salts:
        with np.errstate(over="ignore"):
            key = mix64(key ^ np.uint64(salt & 0xFFFFFFFFFFFFFFFF))
    return np.uint64(key)


def uniforms(key: np.uint64, counters) -> np.ndarray:
    """Uniform(0,1) variates for the given counters under a stream key."""
    with np.errstate(over="ignore"):
        c = np.asarray(counters, dtype=np.uint64) * _GOLDEN
        return mix64(key + c).astype(np.float64) * _INV_2_64


def spawn_generator(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for one replicate, addressed by (seed, key path)."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept either an integer seed or a ready Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return spawn_generator(int(rng))
