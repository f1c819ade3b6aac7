"""Per-block matrix decompositions and matrix generalized inverses.

These are thin, contract-checked wrappers over LAPACK (via numpy/scipy)
plus the pieces LAPACK does not provide: deterministic phase conventions,
real-first Schur ordering, a diagonalizable-regime Jordan form, the rank
normal form, and Drazin/group inverses.  Everything here is deterministic
for fixed input, which the mirrored conjugate lift upstream relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceError,
    DefectiveBlock,
    DimensionError,
    GroupInverseNotExist,
    SwapFailure,
)

TAU_DEC = 1e-11      # decomposition reconstruction/orthogonality allowance
TAU_PEN = 1e-10      # Penrose equation allowance
TAU_JORD = 1e-8      # Jordan reconstruction allowance (times cond(P))
EIG_CLUSTER_GAP = 1e-8   # relative gap under which eigenvalues cluster
DEFECT_RANK_TOL = 1e-6   # eigenvector-basis rank cutoff inside a cluster


def default_rank_rtol(a: np.ndarray) -> float:
    """Standard numerical-rank relative tolerance: max(m, n) * eps."""
    return max(a.shape) * np.finfo(np.float64).eps


def numerical_rank(a: np.ndarray, rtol: float | None = None) -> int:
    """Number of singular values above rtol * sigma_max."""
    a = np.asarray(a)
    if a.size == 0:
        return 0
    sigma = np.linalg.svd(a, compute_uv=False)
    if sigma[0] == 0.0:
        return 0
    if rtol is None:
        rtol = default_rank_rtol(a)
    return int(np.count_nonzero(sigma > rtol * sigma[0]))


def _fix_phases(u: np.ndarray, v: np.ndarray | None):
    """Deterministic phase convention for singular-vector pairs.

    The largest-magnitude entry of each left singular vector is made real
    positive; the matching right singular vector absorbs the same factor so
    the product is unchanged.  Surplus columns (null-space completions) are
    normalized independently.
    """
    u = u.copy()
    v = None if v is None else v.copy()
    paired = u.shape[1] if v is None else min(u.shape[1], v.shape[1])
    for j in range(u.shape[1]):
        col = u[:, j]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if pivot == 0:
            continue
        phase = pivot / abs(pivot)
        u[:, j] = col * np.conj(phase)
        if v is not None and j < paired:
            v[:, j] = v[:, j] * np.conj(phase)
    if v is not None:
        for j in range(paired, v.shape[1]):
            col = v[:, j]
            idx = int(np.argmax(np.abs(col)))
            pivot = col[idx]
            if pivot != 0:
                v[:, j] = col * np.conj(pivot / abs(pivot))
    return u, v


@dataclass(frozen=True)
class MatrixSvd:
    """Full SVD a = u @ sigma_matrix @ v.conj().T with sigma nonincreasing."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape[0], self.v.shape[0]

    def sigma_matrix(self) -> np.ndarray:
        m, n = self.shape
        out = np.zeros((m, n))
        np.fill_diagonal(out, self.sigma)
        return out

    def reconstruct(self) -> np.ndarray:
        return self.u @ self.sigma_matrix().astype(self.u.dtype) @ self.v.conj().T


def svd(a: np.ndarray) -> MatrixSvd:
    """Singular value decomposition with a deterministic phase convention.

    Returns full orthogonal/unitary factors.  Real input yields real
    factors.  The zero matrix gets identity factors by convention.
    """
    a = np.asarray(a)
    m, n = a.shape
    if not np.isfinite(a).all():
        raise ValueError("svd requires finite entries")
    if np.abs(a).max() == 0.0:
        eye = np.eye(m) if np.isrealobj(a) else np.eye(m, dtype=complex)
        eyen = np.eye(n) if np.isrealobj(a) else np.eye(n, dtype=complex)
        return MatrixSvd(eye, np.zeros(min(m, n)), eyen)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    u, v = _fix_phases(u, vh.conj().T)
    return MatrixSvd(u, s, v)


@dataclass(frozen=True)
class MatrixSchur:
    """Schur form a = u @ t @ u.conj().T.

    ``partition`` lists the diagonal block sizes (1 or 2) for the real
    quasi-triangular variant and is None for the complex variant.
    """

    u: np.ndarray
    t: np.ndarray
    partition: tuple[int, ...] | None = None

    def reconstruct(self) -> np.ndarray:
        return self.u @ self.t @ self.u.conj().T


def schur_complex(a: np.ndarray) -> MatrixSchur:
    """Complex Schur decomposition: unitary u, upper triangular t."""
    a = np.asarray(a, dtype=complex)
    _require_square(a, "schur_complex")
    try:
        t, u = scipy.linalg.schur(a, output="complex")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Schur iteration failed: {exc}") from exc
    return MatrixSchur(u, t, None)


def schur_real_ordered(a: np.ndarray) -> MatrixSchur:
    """Real Schur form with all 1x1 diagonal blocks before the 2x2 blocks.

    The reordering is done by orthogonal block swaps inside LAPACK; an
    ill-conditioned exchange raises SwapFailure.
    """
    a = np.asarray(a, dtype=np.float64)
    _require_square(a, "schur_real_ordered")
    try:
        t, u, sdim = scipy.linalg.schur(
            a, output="real", sort=lambda x, y: y == 0
        )
    except np.linalg.LinAlgError as exc:
        message = str(exc)
        if "reorder" in message.lower() or "sort" in message.lower():
            raise SwapFailure(f"Schur block exchange failed: {message}") from exc
        raise ConvergenceError(f"Schur iteration failed: {message}") from exc
    partition = _scan_quasi_partition(t)
    sizes = list(partition)
    if sorted(sizes) != sizes:
        raise SwapFailure(
            "reordered Schur form does not have all 1x1 blocks first"
        )
    return MatrixSchur(u, t, tuple(sizes))


def _scan_quasi_partition(t: np.ndarray) -> tuple[int, ...]:
    """Diagonal block sizes of a LAPACK quasi-triangular matrix.

    LAPACK stores exact zeros below the quasi-triangular band, so the scan
    tests subdiagonal entries against zero.
    """
    n = t.shape[0]
    sizes = []
    i = 0
    while i < n:
        if i + 1 < n and t[i + 1, i] != 0.0:
            sizes.append(2)
            i += 2
        else:
            sizes.append(1)
            i += 1
    return tuple(sizes)


@dataclass(frozen=True)
class MatrixJordan:
    """Similarity a = p @ j @ inv(p) with j in (real) Jordan form.

    Only the diagonalizable regime is supported: j is diagonal over the
    complex field, or block diagonal with 1x1 blocks (real eigenvalues,
    first) and 2x2 rotation-scaling blocks [[a, b], [-b, a]] (conjugate
    pairs a +- ib, b > 0) over the real field.
    """

    p: np.ndarray
    j: np.ndarray
    partition: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        return self.p @ self.j @ np.linalg.inv(self.p)


def _eig_sorted(a: np.ndarray):
    """Eigendecomposition sorted by (real, imag); defective input rejected.

    Eigenvalues are grouped into clusters at relative gap EIG_CLUSTER_GAP;
    each cluster must carry a full-rank eigenvector basis, otherwise the
    Jordan structure is not reliably computable and DefectiveBlock is
    raised.
    """
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    # lexicographic (real, imag) order, quantized at the cluster gap so that
    # rounding fuzz cannot reorder effectively equal parts
    grid = EIG_CLUSTER_GAP * max(1.0, float(np.abs(w).max()))
    order = np.lexsort(
        (w.imag, w.real, np.round(w.imag / grid), np.round(w.real / grid))
    )
    w = w[order]
    v = v[:, order]
    scale = max(1.0, float(np.abs(w).max()))
    start = 0
    for i in range(1, len(w) + 1):
        boundary = i == len(w) or abs(w[i] - w[i - 1]) > EIG_CLUSTER_GAP * scale
        if not boundary:
            continue
        size = i - start
        if size > 1:
            sub = v[:, start:i]
            sigma = np.linalg.svd(sub, compute_uv=False)
            if sigma[-1] <= DEFECT_RANK_TOL * sigma[0]:
                raise DefectiveBlock(
                    f"eigenvalue cluster around {w[start]:.6g} of size "
                    f"{size} has a rank-deficient eigenvector basis"
                )
        start = i
    return w, v


def _normalize_columns(v: np.ndarray) -> np.ndarray:
    """Unit columns with the largest-magnitude entry real positive."""
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        norm = np.linalg.norm(col)
        if norm > 0:
            col = col / norm
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if pivot != 0:
            col = col * np.conj(pivot / abs(pivot))
        v[:, j] = col
    return v


def jordan_complex(a: np.ndarray) -> MatrixJordan:
    """Complex Jordan form in the diagonalizable regime: j = diag(eigs)."""
    a = np.asarray(a, dtype=complex)
    _require_square(a, "jordan_complex")
    w, v = _eig_sorted(a)
    v = _normalize_columns(v)
    return MatrixJordan(v, np.diag(w), (1,) * a.shape[0])


def jordan_real(a: np.ndarray) -> MatrixJordan:
    """Real Jordan form in the diagonalizable regime.

    Real eigenvalues come first as 1x1 blocks (ascending); conjugate pairs
    a +- ib (b > 0) follow as 2x2 blocks [[a, b], [-b, a]], sorted by
    (a, b).  For eigenvalue a + ib with eigenvector x + iy the columns
    (x, y) span a real invariant plane, which is what the 2x2 block acts on.
    """
    if np.iscomplexobj(a):
        raise ValueError("jordan_real requires a real matrix")
    a = np.asarray(a, dtype=np.float64)
    _require_square(a, "jordan_real")
    w, v = _eig_sorted(a)
    # _eig_sorted is ascending in (real, imag), so the filtered index lists
    # inherit the ordering the real Jordan form needs
    real_idx = [i for i in range(len(w)) if w[i].imag == 0.0]
    pair_idx = [i for i in range(len(w)) if w[i].imag > 0.0]

    n = a.shape[0]
    p = np.zeros((n, n))
    j = np.zeros((n, n))
    col = 0
    partition = []
    for i in real_idx:
        vec = _normalize_columns(v[:, i:i + 1].real)
        p[:, col] = vec[:, 0]
        j[col, col] = w[i].real
        partition.append(1)
        col += 1
    for i in pair_idx:
        vec = _normalize_columns(v[:, i:i + 1])[:, 0]
        alpha, beta = w[i].real, w[i].imag
        p[:, col] = vec.real
        p[:, col + 1] = vec.imag
        j[col:col + 2, col:col + 2] = [[alpha, beta], [-beta, alpha]]
        partition.append(2)
        col += 2
    if col != n:
        raise DefectiveBlock(
            "complex eigenvalues of a real matrix did not come in pairs"
        )
    return MatrixJordan(p, j, tuple(partition))


@dataclass(frozen=True)
class RankNormalForm:
    """Invertible u, v with inv(u) @ a @ inv(v) = [[I_r, 0], [0, 0]]."""

    u: np.ndarray
    v: np.ndarray
    r: int

    def canonical(self) -> np.ndarray:
        n_rows = self.u.shape[0]
        n_cols = self.v.shape[0]
        e = np.zeros((n_rows, n_cols))
        e[:self.r, :self.r] = np.eye(self.r)
        return e


def rank_normal_form(a: np.ndarray, rtol: float | None = None) -> RankNormalForm:
    """Rank normal form built from the SVD.

    u absorbs the r leading singular values (padded with ones so it stays
    invertible); v is the conjugate-transposed right factor.
    """
    a = np.asarray(a)
    dec = svd(a)
    if rtol is None:
        rtol = default_rank_rtol(a)
    smax = dec.sigma[0] if dec.sigma.size else 0.0
    r = int(np.count_nonzero(dec.sigma > rtol * smax)) if smax > 0 else 0
    scale = np.ones(a.shape[0])
    scale[:r] = dec.sigma[:r]
    u = dec.u @ np.diag(scale).astype(dec.u.dtype)
    v = dec.v.conj().T
    return RankNormalForm(u, v, r)


def mp_inverse(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse via the SVD with an explicit rank cutoff."""
    a = np.asarray(a)
    dec = svd(a)
    if rtol is None:
        rtol = default_rank_rtol(a)
    smax = dec.sigma[0] if dec.sigma.size else 0.0
    inv = np.where(dec.sigma > rtol * smax, 1.0, 0.0)
    inv = np.divide(inv, dec.sigma, out=np.zeros_like(dec.sigma), where=inv > 0)
    m, n = dec.shape
    sig_pinv = np.zeros((n, m))
    np.fill_diagonal(sig_pinv, inv)
    return dec.v @ sig_pinv.astype(dec.v.dtype) @ dec.u.conj().T


def matrix_index(a: np.ndarray, rtol: float | None = None) -> int:
    """Least k with rank(a^(k+1)) == rank(a^k); at most n."""
    a = np.asarray(a)
    _require_square(a, "matrix_index")
    n = a.shape[0]
    prev_rank = n  # rank of a^0
    power = np.eye(n, dtype=a.dtype)
    for k in range(n + 1):
        power = power @ a
        rank = numerical_rank(power, rtol)
        if rank == prev_rank:
            return k
        prev_rank = rank
    return n


def drazin_inverse(
    a: np.ndarray, rtol: float | None = None
) -> tuple[np.ndarray, int]:
    """Drazin inverse a^D and the index i(a).

    Uses a^D = a^k @ pinv(a^(2k+1)) @ a^k with k the computed index, which
    reduces to the ordinary inverse at k = 0 and is robust at desk scale.
    """
    a = np.asarray(a)
    _require_square(a, "drazin_inverse")
    k = matrix_index(a, rtol)
    if k == 0:
        return mp_inverse(a, rtol), 0
    ak = np.linalg.matrix_power(a, k)
    middle = mp_inverse(np.linalg.matrix_power(a, 2 * k + 1), rtol)
    return ak @ middle @ ak, k


def group_inverse(a: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Group inverse; exists iff rank(a^2) == rank(a).

    The failure payload reports how close the rank decision was.
    """
    a = np.asarray(a)
    _require_square(a, "group_inverse")
    rank = numerical_rank(a, rtol)
    rank_sq = numerical_rank(a @ a, rtol)
    if rank_sq != rank:
        margin = _rank_margin(a, rtol)
        raise GroupInverseNotExist(
            f"rank(A^2) = {rank_sq} < rank(A) = {rank}; group inverse does "
            f"not exist (rank-decision margin {margin:.3e})",
            rank=rank,
            rank_sq=rank_sq,
            margin=margin,
        )
    ad, index = drazin_inverse(a, rtol)
    if index > 1:
        raise GroupInverseNotExist(
            f"computed Drazin index {index} exceeds 1",
            rank=rank,
            rank_sq=rank_sq,
            margin=_rank_margin(a, rtol),
        )
    return ad


def _rank_margin(a: np.ndarray, rtol: float | None) -> float:
    """Smallest relative gap between a singular value of a or a^2 and the
    rank cutoff; small margins mean the existence decision is fragile."""
    if rtol is None:
        rtol = default_rank_rtol(a)
    margin = np.inf
    for mat in (a, a @ a):
        sigma = np.linalg.svd(mat, compute_uv=False)
        if sigma.size == 0 or sigma[0] == 0.0:
            continue
        cutoff = rtol * sigma[0]
        gaps = np.abs(sigma - cutoff) / cutoff
        margin = min(margin, float(gaps.min()))
    return margin


def _require_square(a: np.ndarray, name: str) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} requires a square matrix, got {a.shape}")
