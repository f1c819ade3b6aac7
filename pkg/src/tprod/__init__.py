"""Real third-order tensor algebra under the t-product.

Tensors multiply through their block-circulant embedding (equivalently,
blockwise in the Fourier domain).  The Fourier blocks of a real tensor
satisfy conjugate-pairing relations; every factorization and generalized
inverse here enforces those relations by construction, so all results are
real tensors with machine-checkable residual reports.
"""

from .core import (
    BlockCirculant,
    Tensor3,
    add,
    bcirc,
    bcirc_inv,
    fold,
    power,
    scalar_mul,
    tprod,
    transpose,
    unfold,
)
from .errors import (
    BlockOpError,
    ConvergenceError,
    DefectiveBlock,
    DimensionError,
    GroupInverseNotExist,
    IoError,
    MathError,
    NotBlockCirculant,
    PairingViolation,
    ParseError,
    PartitionViolation,
    RealnessViolation,
    Singular,
    SwapFailure,
    TprodError,
)
from .factorizations import (
    IdempotentFactorization,
    TJordanResult,
    TSchurResult,
    TSvdResult,
    idempotent_factorization,
    is_f_diagonal,
    is_f_quasi_triangular,
    is_f_upper_block_bidiagonal,
    is_orthogonal,
    is_t_symmetric,
    t_jordan,
    t_jordan_naive,
    t_schur,
    t_svd,
    t_svd_naive_real_blocks,
)
from .fourier import (
    BlockMap,
    FourierBlocks,
    FourierContext,
    check_pairing,
    from_fourier,
    get_context,
    lift,
    lift_multi,
    to_fourier,
)
from .generate import gen
from .ginverses import (
    DrazinResult,
    UnitRegularWitness,
    t_drazin,
    t_group,
    t_index,
    t_inverse,
    t_pinv,
    t_pinv_blocks,
    t_pinv_svd,
    unit_regular_witness,
)
from .io import read_tensor, write_tensor
from .report import Check, ResidualReport

__version__ = "0.1.0"

__all__ = [
    "BlockCirculant",
    "BlockMap",
    "BlockOpError",
    "Check",
    "ConvergenceError",
    "DefectiveBlock",
    "DimensionError",
    "DrazinResult",
    "FourierBlocks",
    "FourierContext",
    "GroupInverseNotExist",
    "IdempotentFactorization",
    "IoError",
    "MathError",
    "NotBlockCirculant",
    "PairingViolation",
    "ParseError",
    "PartitionViolation",
    "RealnessViolation",
    "ResidualReport",
    "Singular",
    "SwapFailure",
    "TJordanResult",
    "TSchurResult",
    "TSvdResult",
    "Tensor3",
    "TprodError",
    "UnitRegularWitness",
    "add",
    "bcirc",
    "bcirc_inv",
    "check_pairing",
    "fold",
    "from_fourier",
    "gen",
    "get_context",
    "idempotent_factorization",
    "is_f_diagonal",
    "is_f_quasi_triangular",
    "is_f_upper_block_bidiagonal",
    "is_orthogonal",
    "is_t_symmetric",
    "lift",
    "lift_multi",
    "power",
    "read_tensor",
    "scalar_mul",
    "t_drazin",
    "t_group",
    "t_index",
    "t_inverse",
    "t_jordan",
    "t_jordan_naive",
    "t_pinv",
    "t_pinv_blocks",
    "t_pinv_svd",
    "t_schur",
    "t_svd",
    "t_svd_naive_real_blocks",
    "to_fourier",
    "tprod",
    "transpose",
    "unfold",
    "unit_regular_witness",
    "write_tensor",
]
