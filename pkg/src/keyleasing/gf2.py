"""GF(2) linear algebra on int bitsets, used for exact Hadamard-basis sampling."""
from logging import getLogger
from typing import List, Optional

import numpy as np

from .exceptions import RankLimitExceeded
from .rng import RandomStream, random_bits

logger = getLogger(f"{__package__}.{__name__}")


def parity(value: int) -> int:
    return bin(value).count("1") & 1


def gf2_rank(rows: List[int]) -> int:
    """Compute rank over GF(2) via Gaussian elimination."""
    basis = XorBasis()
    for row in rows:
        basis.add(row)
    return basis.rank


class XorBasis:
    """
    Reduced row echelon basis of a GF(2) subspace

    Each row has a distinct pivot (its highest set bit) and no other row has that
    pivot bit set. The rank may be capped by ``limit``.
    """

    __slots__ = ("limit", "rows", "pivots")

    def __init__(self, limit: Optional[int] = None) -> None:
        self.limit = limit
        self.rows: List[int] = []
        self.pivots: List[int] = []

    def __repr__(self) -> str:
        return f"<XorBasis rank={self.rank} limit={self.limit}>"

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vector: int) -> int:
        for row, pivot in zip(self.rows, self.pivots):
            if (vector >> pivot) & 1:
                vector ^= row
        return vector

    def add(self, vector: int) -> bool:
        """
        Add a vector to the span

        Returns:
            True if the rank grew

        Raises:
            RankLimitExceeded: the rank would grow beyond ``limit``
        """
        if (reduced := self.reduce(vector)) == 0:
            return False
        if self.limit is not None and self.rank >= self.limit:
            raise RankLimitExceeded(
                f"Difference space rank exceeds the configured limit {self.limit}"
            )
        pivot = reduced.bit_length() - 1
        for k, row in enumerate(self.rows):
            if (row >> pivot) & 1:
                self.rows[k] = row ^ reduced
        self.rows.append(reduced)
        self.pivots.append(pivot)
        return True

    def contains(self, vector: int) -> bool:
        return self.reduce(vector) == 0

    def coordinates(self, vector: int) -> int:
        """
        Coefficients of a spanned vector as bitmask (bit k belongs to row k)

        Only valid for vectors inside the span; in reduced form the pivot bits of
        the vector directly tell which rows are needed.
        """
        mask = 0
        for k, pivot in enumerate(self.pivots):
            if (vector >> pivot) & 1:
                mask |= 1 << k
        return mask

    def sample_solution(self, parities: int, rng: RandomStream, width: int) -> int:
        """
        Uniform d of ``width`` bits with parity(d & row_k) equal to bit k of
        ``parities`` for every row
        """
        d = random_bits(rng, width).value
        for k, (row, pivot) in enumerate(zip(self.rows, self.pivots)):
            if parity(d & row) != (parities >> k) & 1:
                d ^= 1 << pivot
        return d


def walsh_hadamard(vector: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, out[c] = Σ_k vec[k]·(-1)^{k·c}"""
    result = np.array(vector, dtype=complex)
    size = result.shape[0]
    half = 1
    while half < size:
        blocks = result.reshape(size // (2 * half), 2, half)
        low = blocks[:, 0, :]
        high = blocks[:, 1, :]
        result = np.stack((low + high, low - high), axis=1).reshape(size)
        half *= 2
    return result
