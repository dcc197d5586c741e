"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
joint index of a bipartite ``d x d`` system is ``(i, j) -> i*d + j``.
"""

from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10


class HermitianEigenResult(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns are orthonormal eigenvectors


class SvdResult(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray  # descending, nonnegative
    v: np.ndarray  # m = u @ diag(s) @ v^dagger


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex128 array."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_b(rho, d: int) -> np.ndarray:
    """Trace out the second factor of a ``d^2 x d^2`` operator.

    ``(rho_A)_{ik} = sum_j rho_{(i,j),(k,j)}``.
    """
    rho = as_matrix(rho)
    if rho.shape != (d * d, d * d):
        raise ValueError(f"expected a {d * d}x{d * d} operator, got {rho.shape}")
    return np.einsum("ijkj->ik", rho.reshape(d, d, d, d))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m)), initial=0.0) <= tol


def hermitian_eig(m) -> HermitianEigenResult:
    m = as_matrix(m)
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian within tolerance")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("eigendecomposition did not converge") from exc
    return HermitianEigenResult(w, v)


def svd(m) -> SvdResult:
    m = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("SVD did not converge") from exc
    return SvdResult(u, s, dagger(vh))


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Sample a ``d x d`` unitary from the Haar measure.

    QR of a standard complex Ginibre matrix, with the columns of Q rephased so
    that R has a positive real diagonal.  ``seed`` is anything accepted by
    :func:`numpy.random.default_rng`; passing a ``Generator`` advances it.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_unitaries(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` independent Haar unitaries, shape ``(n, d, d)``."""
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def matrix_to_dict(m) -> dict:
    m = as_matrix(m)
    flat = m.ravel(order="C")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros(rows * cols)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError("entry count does not match rows*cols")
    return as_matrix((re + 1j * im).reshape(rows, cols))


def dumps_matrix(m) -> str:
    return json.dumps(matrix_to_dict(m))


def loads_matrix(text: str) -> np.ndarray:
    return matrix_from_dict(json.loads(text))
