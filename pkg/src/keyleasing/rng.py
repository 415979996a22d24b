"""
Counter-based, seeded random streams

Every randomized operation takes an explicit :class:`numpy.random.Generator`. Streams
are Philox generators keyed by a hash of the master seed and a label path, so the
same seed always replays the same transcript no matter how trials are scheduled.
"""
import hashlib
from logging import getLogger
from typing import Union

import numpy as np

from .bits import Bits
from .exceptions import WidthMismatch

logger = getLogger(f"{__package__}.{__name__}")

RandomStream = np.random.Generator


def _digest(*labels: Union[int, str]) -> bytes:
    text = "|".join(str(label) for label in labels)
    return hashlib.sha256(text.encode("utf-8")).digest()


def stream(seed: int, *labels: Union[int, str]) -> RandomStream:
    """Independent stream for ``seed`` and a label path like ``("trial", 3)``"""
    key = int.from_bytes(_digest(seed, *labels)[:16], "big")
    return np.random.Generator(np.random.Philox(key=key))


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial seed = hash(master seed ∥ trial index)"""
    return int.from_bytes(_digest("trial", master_seed, trial_index)[:8], "big")


def substream(rng: RandomStream, label: str) -> RandomStream:
    """Derive a child stream; consumes 16 bytes of the parent"""
    seed = int.from_bytes(rng.bytes(16), "big")
    return stream(seed, label)


def random_bit(rng: RandomStream) -> int:
    return int(rng.integers(0, 2))


def random_bits(rng: RandomStream, width: int) -> Bits:
    if width == 0:
        return Bits.zeros(0)
    size = (width + 7) // 8
    return Bits.from_bytes(rng.bytes(size), width)


def fixed_weight(rng: RandomStream, width: int, weight: int) -> Bits:
    """Uniform bit string of ``width`` bits with exactly ``weight`` ones"""
    if not 0 <= weight <= width:
        raise WidthMismatch(f"Cannot place {weight} ones into {width} bits")
    chosen = rng.choice(width, size=weight, replace=False)
    value = 0
    for position in chosen:
        value |= 1 << (width - 1 - int(position))
    return Bits(value, width)
