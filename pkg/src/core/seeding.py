"""
Deterministic seed fan-out: one master seed reproduces an entire run.
"""

import hashlib

import numpy as np


def derive_seed(master: int, tag: str, *indices: int) -> int:
    """
    Derive a sub-seed from (master, purpose tag, indices) by stable hashing.

    The result does not depend on process, platform or worker count.
    """
    payload = ":".join([str(int(master)), tag, *(str(int(i)) for i in indices)])
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(master: int, tag: str, *indices: int) -> np.random.Generator:
    """Generator seeded with derive_seed(master, tag, *indices)"""
    return np.random.default_rng(derive_seed(master, tag, *indices))
