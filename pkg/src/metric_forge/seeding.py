"""Named-stream seed derivation.

All randomness in a run flows from one 64-bit master seed. Each logical
consumer derives its own stream by name, so adding a consumer never perturbs
the draws of existing ones.
"""

import hashlib
import struct

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, name: str) -> int:
    """Derive a 64-bit stream seed from a master seed and a stream name."""
    payload = struct.pack("<Q", master & _MASK64) + name.encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return struct.unpack("<Q", digest[:8])[0]


def stream(master: int, name: str) -> np.random.Generator:
    """A PCG64 generator for the named stream of the given master seed."""
    return np.random.default_rng(derive_seed(master, name))


def spawn_seeds(master: int, name: str, count: int) -> list[int]:
    """Independent per-trial seeds for `count` trials of one consumer."""
    return [derive_seed(master, f"{name}/{i}") for i in range(count)]
