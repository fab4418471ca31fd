"""Dense complex linear algebra for small quantum states and operators.

Everything works on plain numpy arrays (complex128), plus the
``DensityOperator`` wrapper that tags a matrix with its subsystem
dimensions so partial traces know what to keep. Matrices are tiny
(dimension <= 16 in routine use, <= 256 hard cap), so the code favors
clarity; the batched helpers the optimizers need live elsewhere.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

DEFAULT_MAX_DIM = 256


def max_dim() -> int:
    """Dimension cap for composite systems; override with DYNCAP_MAX_DIM."""
    raw = os.environ.get("DYNCAP_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"DYNCAP_MAX_DIM must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"DYNCAP_MAX_DIM must be positive, got {value}")
    return value


def as_square_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def hermiticity_defect(m: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Largest entrywise deviation |M - M^dag| and where it occurs."""
    dev = np.abs(m - dagger(m))
    idx = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[idx]), (int(idx[0]), int(idx[1]))


def _require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    defect, (i, j) = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(
            f"matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {defect:.3e} > {tol:.0e}"
        )
    return 0.5 * (m + dagger(m))


def hermitian_eigenvalues(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending.

    Rejects matrices whose Hermiticity defect exceeds ``HERMITIAN_TOL``,
    naming the violating entry.
    """
    sym = _require_hermitian(as_square_matrix(m))
    return np.linalg.eigvalsh(sym)


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    sym = _require_hermitian(as_square_matrix(m))
    return np.linalg.eigh(sym)


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the configured dimension cap enforced."""
    am = as_square_matrix(a)
    bm = as_square_matrix(b)
    cap = max_dim()
    if am.shape[0] * bm.shape[0] > cap:
        raise ValidationError(
            f"tensor product dimension {am.shape[0] * bm.shape[0]} exceeds cap {cap}"
        )
    return np.kron(am, bm)


def matrix_from_pairs(rows) -> np.ndarray:
    """Decode a matrix given as nested [re, im] pairs (may be rectangular)."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValidationError("matrix must be rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_pairs(m: np.ndarray) -> list:
    arr = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


class DensityOperator:
    """A density matrix labeled with its subsystem dimensions.

    Construction validates Hermiticity, unit trace, and positive
    semidefiniteness (all within fixed tolerances); the stored matrix is
    frozen afterwards, so instances are safe to share across threads.
    """

    __slots__ = ("matrix", "dims")

    def __init__(self, matrix, dims: Sequence[int] | None = None):
        mat = as_square_matrix(matrix)
        n = mat.shape[0]
        if dims is None:
            dims = (n,)
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise ValidationError(f"subsystem dimensions must be positive, got {dims}")
        if int(np.prod(dims)) != n:
            raise ValidationError(f"subsystem dims {dims} do not multiply to matrix dim {n}")
        mat = _require_hermitian(mat)
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace must be 1 within {TRACE_TOL:.0e}, got {tr!r}")
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < EIGENVALUE_FLOOR:
            raise ValidationError(
                f"matrix is not positive semidefinite: smallest eigenvalue {lo:.3e}"
            )
        mat.setflags(write=False)
        self.matrix = mat
        self.dims = dims

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, dims={self.dims})"


def tensor_density(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    return DensityOperator(tensor(a.matrix, b.matrix), a.dims + b.dims)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every subsystem not listed in ``keep`` (original order kept)."""
    keep_list = sorted({int(k) for k in keep})
    n = len(rho.dims)
    if not keep_list:
        raise ValidationError("keep set must not be empty")
    if keep_list[0] < 0 or keep_list[-1] >= n:
        raise ValidationError(f"keep indices {keep_list} out of range for {n} subsystems")
    if len(keep_list) == n:
        return rho
    dims = rho.dims
    tensor_form = rho.matrix.reshape(dims + dims)
    row = [chr(ord("a") + i) for i in range(n)]
    col = [chr(ord("a") + n + i) for i in range(n)]
    for i in range(n):
        if i not in keep_list:
            col[i] = row[i]
    out = "".join(row[i] for i in keep_list) + "".join(col[i] for i in keep_list)
    reduced = np.einsum("".join(row + col) + "->" + out, tensor_form)
    kept_dims = tuple(dims[i] for i in keep_list)
    d = int(np.prod(kept_dims))
    return DensityOperator(reduced.reshape(d, d), kept_dims)


def max_entangled(D: int) -> DensityOperator:
    """Rank-1 projector onto (1/sqrt(D)) sum_i |ii>, on a D x D bipartite space."""
    D = int(D)
    if D < 1:
        raise ValidationError(f"local dimension must be >= 1, got {D}")
    vec = np.zeros(D * D, dtype=complex)
    for i in range(D):
        vec[i * D + i] = 1.0
    vec /= np.sqrt(D)
    return DensityOperator(np.outer(vec, vec.conj()), (D, D))


def purification_vector(rho: DensityOperator) -> np.ndarray:
    """State vector of a purification of rho, reference system first."""
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    d = rho.dim
    psi = np.zeros((d, d), dtype=complex)
    for i in range(d):
        if w[i] > 0.0:
            psi[i, :] = np.sqrt(w[i]) * v[:, i]
    return psi.reshape(d * d)


def purify(rho: DensityOperator) -> DensityOperator:
    """Pure state on reference x system whose system marginal is rho."""
    psi = purification_vector(rho)
    return DensityOperator(np.outer(psi, psi.conj()), (rho.dim, rho.dim))
