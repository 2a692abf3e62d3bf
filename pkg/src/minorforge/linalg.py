"""Incremental Gaussian elimination over F_p on dense int64 rows."""

from __future__ import annotations

import numpy as np

from .kernels import modinv


class RowSpace:
    """Row space with online membership tests, all arithmetic mod p."""

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.pivots: dict[int, np.ndarray] = {}

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        v = vec % self.p
        for col in sorted(self.pivots):
            if v[col]:
                v = (v - v[col] * self.pivots[col]) % self.p
        return v

    def contains(self, vec: np.ndarray) -> bool:
        return not self.reduce(vec).any()

    def add(self, vec: np.ndarray) -> bool:
        """Insert the vector; returns True when it enlarged the space."""
        v = self.reduce(vec)
        nz = np.flatnonzero(v)
        if len(nz) == 0:
            return False
        col = int(nz[0])
        v = (v * modinv(int(v[col]), self.p)) % self.p
        self.pivots[col] = v
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)
