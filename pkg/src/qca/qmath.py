"""Small dense linear algebra for qubit work.

Complex 2x2 / 4x4 matrices are plain ``numpy`` arrays.  Qubit ordering in
two-qubit spaces is system-first: index ``2*i + k`` pairs system index ``i``
with environment index ``k``.

The real 3x3 kernels (``symmetric_eigen3`` and ``svd3``) are written out by
hand rather than delegated to LAPACK so that they can be checked against
``numpy.linalg`` as an independent oracle.
"""

from __future__ import annotations

import math

import numpy as np

from qca.constants import ALGEBRAIC_TOL, PSD_TOL, RECONSTRUCTION_TOL
from qca.errors import ContractError, ShapeError

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def _require_shape(a, shape, name="matrix", dtype=complex) -> np.ndarray:
    arr = np.asarray(a, dtype=dtype)
    if arr.shape != shape:
        raise ShapeError(f"{name} must have shape {shape}, got {arr.shape}")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices, ``out[2i+k, 2j+l] = a[i,j] * b[k,l]``."""
    a = _require_shape(a, (2, 2), "a")
    b = _require_shape(b, (2, 2), "b")
    return np.einsum("ij,kl->ikjl", a, b).reshape(4, 4)


def partial_trace_env(r) -> np.ndarray:
    """Trace out the second (environment) qubit of a 4x4 operator."""
    r = _require_shape(r, (4, 4), "two-qubit operator")
    return np.einsum("ikjk->ij", r.reshape(2, 2, 2, 2))


def is_hermitian(a, tol: float = ALGEBRAIC_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_unitary(u, tol: float = ALGEBRAIC_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        return False
    return bool(np.max(np.abs(u @ dagger(u) - np.eye(n))) <= tol)


def is_density_matrix(rho, tol: float = ALGEBRAIC_TOL, psd_tol: float = PSD_TOL) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if not is_hermitian(rho, tol) or abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh((rho + dagger(rho)) / 2).min() >= -psd_tol)


def bloch_to_density(r, physical: bool = False) -> np.ndarray:
    """Return ``(1 + r . sigma) / 2``.

    With ``physical=True`` the vector must lie in the closed unit ball.
    """
    r = _require_shape(r, (3,), "Bloch vector", dtype=float)
    if physical and np.linalg.norm(r) > 1 + RECONSTRUCTION_TOL:
        raise ContractError(f"Bloch vector norm {np.linalg.norm(r):.3g} exceeds 1")
    return (IDENTITY2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z) / 2


def density_to_bloch(rho) -> np.ndarray:
    """Return the Bloch vector ``r_i = Tr(rho sigma_i)`` of a unit-trace Hermitian 2x2 matrix."""
    rho = _require_shape(rho, (2, 2), "density matrix")
    if not is_hermitian(rho, RECONSTRUCTION_TOL):
        raise ContractError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > RECONSTRUCTION_TOL:
        raise ContractError(f"density matrix trace {np.trace(rho).real:.6g} != 1")
    return np.array(
        [
            2 * rho[0, 1].real,
            -2 * rho[0, 1].imag,
            (rho[0, 0] - rho[1, 1]).real,
        ]
    )


def _unit_orthogonal(v: np.ndarray) -> np.ndarray:
    # cross with the axis least aligned with v
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    w = np.cross(v, axis)
    return w / np.linalg.norm(w)


def _isolated_eigvec(a: np.ndarray, lam: float, scale: float) -> np.ndarray | None:
    b = a - lam * np.eye(3)
    crosses = [np.cross(b[0], b[1]), np.cross(b[0], b[2]), np.cross(b[1], b[2])]
    norms = [np.linalg.norm(c) for c in crosses]
    k = int(np.argmax(norms))
    if norms[k] <= 1e-10 * scale * scale:
        return None
    return crosses[k] / norms[k]


def symmetric_eigen3(m) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 matrix, sorted descending.

    Uses the trigonometric solution of the characteristic cubic.  The cubic
    solution alone only resolves a nearly degenerate pair to about
    ``sqrt(eps)``, so the most isolated root is then deflated: its eigenvector
    comes from a cross product of rows of ``m - lambda*I`` and the remaining
    pair is read off the 2x2 block on the orthogonal complement.
    """
    a = _require_shape(m, (3, 3), "symmetric matrix", dtype=float)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > ALGEBRAIC_TOL * scale:
        raise ContractError("symmetric_eigen3 requires a symmetric matrix")
    # work on a unit-scaled copy so tiny or subnormal inputs stay well conditioned
    norm = float(np.max(np.abs(a)))
    if norm == 0.0:
        return np.zeros(3)
    a = (a + a.T) / (2 * norm)
    a[np.abs(a) < 1e-300] = 0.0
    return norm * _symmetric_eigen3_unit(a)


def _symmetric_eigen3_unit(a: np.ndarray) -> np.ndarray:
    scale = 1.0
    q = np.trace(a) / 3
    off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    p2 = float(np.sum((np.diag(a) - q) ** 2) + 2 * off)
    if p2 <= (1e-15 * scale) ** 2:
        return np.array([q, q, q])
    p = math.sqrt(p2 / 6)
    r = np.linalg.det((a - q * np.eye(3)) / p) / 2
    phi = math.acos(min(1.0, max(-1.0, r))) / 3
    l1 = q + 2 * p * math.cos(phi)
    l3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    l2 = 3 * q - l1 - l3

    lam = l1 if (l1 - l2) >= (l2 - l3) else l3
    v = _isolated_eigvec(a, lam, scale)
    if v is None:
        return np.sort([l1, l2, l3])[::-1]
    e1 = _unit_orthogonal(v)
    e2 = np.cross(v, e1)
    b11, b22, b12 = e1 @ a @ e1, e2 @ a @ e2, e1 @ a @ e2
    mid = (b11 + b22) / 2
    rad = math.hypot((b11 - b22) / 2, b12)
    return np.sort([float(v @ a @ v), mid + rad, mid - rad])[::-1]


def _complete_basis(cols: list[np.ndarray]) -> list[np.ndarray]:
    """Extend 0-2 orthonormal 3-vectors to an orthonormal basis."""
    if not cols:
        return [np.eye(3)[i] for i in range(3)]
    if len(cols) == 1:
        w = _unit_orthogonal(cols[0])
        return [cols[0], w, np.cross(cols[0], w)]
    if len(cols) == 2:
        return [cols[0], cols[1], np.cross(cols[0], cols[1])]
    return cols


def svd3(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``m = U @ D @ V`` of a real 3x3 matrix.

    ``V`` is the right factor as it multiplies, i.e. already transposed.
    ``D`` is diagonal, nonnegative and sorted descending.  Computed with
    one-sided (Hestenes) Jacobi rotations on the columns of ``m``; columns
    belonging to zero singular values are completed by cross products.
    """
    a = _require_shape(m, (3, 3), "matrix", dtype=float).copy()
    norm = float(np.max(np.abs(a)))
    if norm > 0.0:
        a /= norm
        a[np.abs(a) < 1e-300] = 0.0
    w = np.eye(3)
    eps = np.finfo(float).eps
    for _ in range(60):
        rotated = False
        for i, j in ((0, 1), (0, 2), (1, 2)):
            alpha = float(a[:, i] @ a[:, i])
            beta = float(a[:, j] @ a[:, j])
            gamma = float(a[:, i] @ a[:, j])
            if abs(gamma) <= eps * math.sqrt(alpha * beta) or gamma == 0.0:
                continue
            rotated = True
            zeta = (beta - alpha) / (2 * gamma)
            t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
            c = 1 / math.sqrt(1 + t * t)
            s = c * t
            ai, aj = a[:, i].copy(), a[:, j].copy()
            a[:, i], a[:, j] = c * ai - s * aj, s * ai + c * aj
            wi, wj = w[:, i].copy(), w[:, j].copy()
            w[:, i], w[:, j] = c * wi - s * wj, s * wi + c * wj
        if not rotated:
            break

    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, a, w = sigma[order], a[:, order], w[:, order]
    cutoff = 1e-14
    cols = []
    for k in range(3):
        if sigma[k] <= cutoff:
            sigma[k] = 0.0
            continue
        cols.append(a[:, k] / sigma[k])
    u = np.column_stack(_complete_basis(cols))
    return u, np.diag(sigma * norm), w.T
