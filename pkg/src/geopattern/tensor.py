"""Dense n-mode tensor algebra (NumPy baseline).

Tensors are C-contiguous float64 ``numpy.ndarray`` values: the flat buffer is
row-major with the last mode fastest, so unfold column order is deterministic
across runs. Mode indices are 0-based. All functions are pure; inputs are
never mutated.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = [
    "as_tensor",
    "mode_product",
    "multi_mode_product",
    "frobenius_norm",
    "unfold",
    "fold",
    "reconstruct",
]


def as_tensor(data, shape: Sequence[int] | None = None) -> np.ndarray:
    """Coerce to a float64 C-order tensor, validating mode sizes.

    ``data`` may be nested sequences, an ndarray, or a flat buffer combined
    with an explicit ``shape`` (row-major, last mode fastest).
    """
    arr = np.asarray(data, dtype=np.float64)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if any(s < 1 for s in shape):
            raise ValueError(f"mode sizes must be >= 1, got {shape}")
        if arr.size != int(np.prod(shape)):
            raise ValueError(
                f"data length {arr.size} does not match shape {shape}"
            )
        arr = arr.reshape(shape)
    if arr.ndim < 1:
        arr = arr.reshape(1)
    if any(s < 1 for s in arr.shape):
        raise ValueError(f"mode sizes must be >= 1, got {arr.shape}")
    return np.ascontiguousarray(arr)


def _check_mode(X: np.ndarray, mode: int) -> None:
    if not 0 <= mode < X.ndim:
        raise ValueError(f"mode {mode} out of range for order-{X.ndim} tensor")


def mode_product(X: np.ndarray, A: np.ndarray, mode: int) -> np.ndarray:
    """Multiply tensor ``X`` along ``mode`` by matrix ``A``.

    ``A`` has shape (output size, input size): entry (j, i) weights input
    index i of the contracted mode, so the result replaces mode size I_k
    by A.shape[0].
    """
    _check_mode(X, mode)
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("matrix operand must be 2-dimensional")
    if A.shape[1] != X.shape[mode]:
        raise ValueError(
            f"matrix has {A.shape[1]} columns, mode {mode} has size "
            f"{X.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(A, X, axes=(1, mode)), 0, mode)


def multi_mode_product(
    X: np.ndarray,
    matrices: Sequence[np.ndarray],
    skip: int | None = None,
    transpose: bool = False,
) -> np.ndarray:
    """Chain mode products over all modes, optionally skipping one.

    With ``transpose`` the matrices are applied transposed, which contracts
    each mode down to the matrix column count.
    """
    out = X
    for k, A in enumerate(matrices):
        if k == skip:
            continue
        out = mode_product(out, A.T if transpose else A, k)
    return out


def frobenius_norm(X: np.ndarray) -> float:
    """Euclidean norm of the flattened tensor."""
    return float(np.linalg.norm(np.asarray(X, dtype=np.float64).ravel()))


def unfold(X: np.ndarray, mode: int) -> np.ndarray:
    """Mode-k matricization: fibers of ``mode`` become rows.

    Columns are ordered by the remaining modes in their original order,
    last mode fastest (row-major). ``fold`` inverts this exactly.
    """
    _check_mode(X, mode)
    return np.moveaxis(X, mode, 0).reshape(X.shape[mode], -1)


def fold(M: np.ndarray, mode: int, shape: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold` for the given full tensor ``shape``."""
    shape = tuple(int(s) for s in shape)
    if not 0 <= mode < len(shape):
        raise ValueError(f"mode {mode} out of range for shape {shape}")
    M = np.asarray(M, dtype=np.float64)
    rest = [s for i, s in enumerate(shape) if i != mode]
    if M.shape != (shape[mode], int(np.prod(rest))):
        raise ValueError(
            f"matrix shape {M.shape} inconsistent with tensor shape "
            f"{shape} at mode {mode}"
        )
    return np.ascontiguousarray(
        np.moveaxis(M.reshape([shape[mode]] + rest), 0, mode)
    )


def reconstruct(core: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Expand a core tensor through its factor matrices.

    ``factors[k]`` has shape (I_k, J_k) and must match the core mode size
    J_k; the result has shape (I_1, ..., I_n).
    """
    if len(factors) != core.ndim:
        raise ValueError(
            f"expected {core.ndim} factor matrices, got {len(factors)}"
        )
    for k, F in enumerate(factors):
        if F.ndim != 2 or F.shape[1] != core.shape[k]:
            raise ValueError(
                f"factor {k} shape {np.shape(F)} does not match core mode "
                f"size {core.shape[k]}"
            )
    out = core
    for k, F in enumerate(factors):
        out = mode_product(out, np.asarray(F, dtype=np.float64), k)
    return out
