"""Dense third-order tensors and the exact t-product algebra.

A tensor of size m x n x p is stored slice-major: a contiguous float64
array of shape (p, m, n) whose entry [k, i, j] is the (i, j) element of
frontal slice k (all 0-based in code; documentation counts slices 1..p).
With this layout ``unfold``/``fold`` are plain reshapes.

The t-product itself is ``fold(bcirc(a) @ unfold(b))``; a mathematically
equivalent Fourier-domain path lives in :mod:`tprod.fourier` and both are
exposed here for cross-checking.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NotBlockCirculant

# Direct block-circulant multiply below this size, Fourier path above it.
DIRECT_PATH_LIMIT = 64

# Structural tolerance for bcirc_inv: 1e-10 * max|entry|.
CIRC_RTOL = 1e-10


class Tensor3:
    """Immutable dense real m x n x p tensor.

    Parameters
    ----------
    data : array_like
        Shape (p, m, n): the p frontal slices in order.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, order="C")
        if arr.ndim != 3:
            raise DimensionError(
                f"expected a (p, m, n) slice stack, got {arr.ndim} axes"
            )
        if min(arr.shape) < 1:
            raise DimensionError(f"dimensions must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("tensor entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def from_slices(cls, slices) -> "Tensor3":
        """Build a tensor from an iterable of equally sized frontal slices."""
        return cls(np.stack([np.asarray(s, dtype=np.float64) for s in slices]))

    @classmethod
    def zeros(cls, m: int, n: int, p: int) -> "Tensor3":
        return cls(np.zeros((p, m, n)))

    @classmethod
    def identity(cls, n: int, p: int) -> "Tensor3":
        """The multiplicative identity: slice 1 is I_n, later slices are 0."""
        data = np.zeros((p, n, n))
        data[0] = np.eye(n)
        return cls(data)

    @property
    def dims(self) -> tuple[int, int, int]:
        """(m, n, p): slice height, slice width, number of slices."""
        p, m, n = self._data.shape
        return m, n, p

    @property
    def array(self) -> np.ndarray:
        """Read-only (p, m, n) view of the slice stack."""
        return self._data

    def slice(self, k: int) -> np.ndarray:
        """Frontal slice k (0-based)."""
        return self._data[k]

    @property
    def max_abs(self) -> float:
        return float(np.abs(self._data).max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    __hash__ = None

    def allclose(self, other: "Tensor3", atol: float = 1e-12) -> bool:
        return self._data.shape == other._data.shape and bool(
            np.abs(self._data - other._data).max() <= atol
        )

    def __add__(self, other: "Tensor3") -> "Tensor3":
        if not isinstance(other, Tensor3):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        if not isinstance(other, Tensor3):
            return NotImplemented
        if self.dims != other.dims:
            raise DimensionError(f"dims {self.dims} != {other.dims}")
        return Tensor3(self._data - other._data)

    @property
    def T(self) -> "Tensor3":
        return transpose(self)

    def __repr__(self) -> str:
        m, n, p = self.dims
        return f"Tensor3({m}x{n}x{p})"


class BlockCirculant:
    """An mp x np matrix viewed as a p x p grid of m x n blocks.

    The constructor only checks shape divisibility; the circulant structure
    itself is validated by :func:`bcirc_inv`.
    """

    __slots__ = ("_matrix", "_m", "_n", "_p")

    def __init__(self, matrix, p: int):
        mat = np.array(matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise DimensionError("block circulant data must be a matrix")
        if p < 1 or mat.shape[0] % p or mat.shape[1] % p:
            raise DimensionError(
                f"matrix shape {mat.shape} is not divisible into {p}x{p} blocks"
            )
        mat.setflags(write=False)
        self._matrix = mat
        self._p = p
        self._m = mat.shape[0] // p
        self._n = mat.shape[1] // p

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def block_dims(self) -> tuple[int, int, int]:
        return self._m, self._n, self._p

    def block(self, r: int, c: int) -> np.ndarray:
        m, n = self._m, self._n
        return self._matrix[r * m:(r + 1) * m, c * n:(c + 1) * n]

    def circulant_deviation(self) -> float:
        """Max deviation of any block from its cyclic predecessor."""
        dev = 0.0
        for c in range(1, self._p):
            for r in range(self._p):
                ref = self.block((r - c) % self._p, 0)
                dev = max(dev, float(np.abs(self.block(r, c) - ref).max()))
        return dev

    def __repr__(self) -> str:
        m, n, p = self.block_dims
        return f"BlockCirculant({m * p}x{n * p}, p={p})"


def unfold(t: Tensor3) -> np.ndarray:
    """Stack the frontal slices vertically into an (mp, n) matrix."""
    m, n, p = t.dims
    return t.array.reshape(m * p, n).copy()


def fold(matrix, p: int) -> Tensor3:
    """Inverse of :func:`unfold`; rows must divide evenly into p slices."""
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise DimensionError("fold expects a matrix")
    if p < 1 or mat.shape[0] % p:
        raise DimensionError(
            f"{mat.shape[0]} rows are not divisible into {p} slices"
        )
    return Tensor3(mat.reshape(p, mat.shape[0] // p, mat.shape[1]))


def bcirc(t: Tensor3) -> BlockCirculant:
    """Embed a tensor into its block-circulant matrix.

    Block (r, c) of the result is frontal slice ((r - c) mod p); the first
    block column reads slice 1..p top to bottom and each later column is the
    cyclic downshift of the previous one.
    """
    m, n, p = t.dims
    mat = np.zeros((m * p, n * p))
    for c in range(p):
        for r in range(p):
            mat[r * m:(r + 1) * m, c * n:(c + 1) * n] = t.slice((r - c) % p)
    return BlockCirculant(mat, p)


def bcirc_inv(b: BlockCirculant) -> Tensor3:
    """Recover the tensor whose block-circulant embedding is ``b``.

    Raises NotBlockCirculant when the blocks deviate from circulant
    structure beyond 1e-10 * max|entry|.
    """
    dev = b.circulant_deviation()
    tol = CIRC_RTOL * float(np.abs(b.matrix).max())
    if dev > tol:
        raise NotBlockCirculant(
            f"blocks deviate from circulant structure by {dev:.3e} "
            f"(tolerance {tol:.3e})"
        )
    m, n, p = b.block_dims
    return fold(b.matrix[:, :n], p)


def tprod(a: Tensor3, b: Tensor3, path: str = "auto") -> Tensor3:
    """t-product of an m x n x p tensor with an n x l x p tensor.

    ``path`` selects the computation: "direct" is the exact block-circulant
    multiply, "fourier" the transform-domain product, "auto" picks direct at
    desk scale and fourier above it.
    """
    ma, na, pa = a.dims
    mb, nb, pb = b.dims
    if na != mb or pa != pb:
        raise DimensionError(
            f"cannot t-multiply {ma}x{na}x{pa} by {mb}x{nb}x{pb}"
        )
    if path == "auto":
        path = "direct" if pa * min(ma, na, nb) <= DIRECT_PATH_LIMIT else "fourier"
    if path == "direct":
        return fold(bcirc(a).matrix @ unfold(b), pa)
    if path == "fourier":
        from . import fourier

        return fourier.tprod_fourier(a, b)
    raise ValueError(f"unknown tprod path {path!r}")


def transpose(t: Tensor3) -> Tensor3:
    """Tensor transpose: transpose each slice, reverse slices 2..p.

    Satisfies bcirc(transpose(t)) == bcirc(t).T exactly.
    """
    m, n, p = t.dims
    out = np.empty((p, n, m))
    out[0] = t.slice(0).T
    for k in range(1, p):
        out[k] = t.slice(p - k).T
    return Tensor3(out)


def add(a: Tensor3, b: Tensor3) -> Tensor3:
    if a.dims != b.dims:
        raise DimensionError(f"dims {a.dims} != {b.dims}")
    return Tensor3(a.array + b.array)


def scalar_mul(alpha: float, t: Tensor3) -> Tensor3:
    return Tensor3(float(alpha) * t.array)


def power(t: Tensor3, k: int) -> Tensor3:
    """k-th t-product power of a square-slice tensor; t^0 is the identity."""
    m, n, p = t.dims
    if m != n:
        raise DimensionError(f"power requires square slices, got {m}x{n}")
    if k < 0:
        raise ValueError("power exponent must be nonnegative")
    result = Tensor3.identity(n, p)
    for _ in range(k):
        result = tprod(result, t)
    return result
