"""Seeded tensor generation for tests and fixtures.

All randomness comes from numpy's PCG64 generator with an explicit 64-bit
seed; nothing reads system entropy, so every tensor is reproducible from
(seed, dims, kind) alone.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Tensor3, scalar_mul, tprod, transpose
from .errors import DimensionError

KINDS = ("dense", "t_symmetric", "rank_deficient", "f_diagonal")


def gen(seed: int, m: int, n: int, p: int, kind: str = "dense") -> Tensor3:
    """Deterministic random tensor of the requested kind.

    dense: entries uniform in [-1, 1].
    t_symmetric: (g + g^T) / 2 of a dense draw (square slices only);
        exactly t-symmetric by construction.
    rank_deficient: product of dense m x ceil(n/2) x p and ceil(n/2) x n x p
        draws, so every Fourier block has rank at most ceil(n/2).
    f_diagonal: slices diagonal with uniform entries.
    """
    if min(m, n, p) < 1:
        raise DimensionError(f"dimensions must be positive, got {(m, n, p)}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "dense":
        return Tensor3(rng.uniform(-1.0, 1.0, size=(p, m, n)))
    if kind == "t_symmetric":
        if m != n:
            raise DimensionError("t_symmetric tensors need square slices")
        g = Tensor3(rng.uniform(-1.0, 1.0, size=(p, m, n)))
        return scalar_mul(0.5, g + transpose(g))
    if kind == "rank_deficient":
        h = math.ceil(n / 2)
        left = Tensor3(rng.uniform(-1.0, 1.0, size=(p, m, h)))
        right = Tensor3(rng.uniform(-1.0, 1.0, size=(p, h, n)))
        return tprod(left, right)
    if kind == "f_diagonal":
        data = np.zeros((p, m, n))
        d = min(m, n)
        diag = rng.uniform(-1.0, 1.0, size=(p, d))
        for k in range(p):
            np.fill_diagonal(data[k], diag[k])
        return Tensor3(data)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
