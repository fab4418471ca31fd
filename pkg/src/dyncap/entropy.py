"""Entropic functionals in bits (all logarithms base two).

The base-two conversion happens in exactly one place (``_LN2``); every
other module gets its bits from here.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantViolation, ValidationError
from .qmat import EIGENVALUE_FLOOR, DensityOperator, partial_trace

Bits = float

_LN2 = float(np.log(2.0))


def spectrum_entropy(eigenvalues, floor: float = EIGENVALUE_FLOOR):
    """Entropy in bits of one or many eigenvalue vectors (reduced over the last axis).

    Eigenvalues in [floor, 0) are rounding noise and count as exact zeros;
    anything below ``floor`` is a genuine invariant violation.
    """
    w = np.asarray(eigenvalues, dtype=float)
    lo = float(w.min(initial=0.0))
    if lo < floor:
        raise InvariantViolation(f"eigenvalue {lo:.3e} below floor {floor:.0e}")
    w = np.clip(w, 0.0, None)
    logs = np.log(np.where(w > 0.0, w, 1.0))
    h = -(w * logs).sum(axis=-1) / _LN2 + 0.0  # the +0.0 kills -0.0
    if np.ndim(h) == 0:
        return float(h)
    return h


def matrix_entropy(mat: np.ndarray) -> Bits:
    """Entropy of a Hermitian matrix given directly as an array (fast path)."""
    sym = 0.5 * (mat + np.conj(mat).T)
    return spectrum_entropy(np.linalg.eigvalsh(sym))


def vn_entropy(rho: DensityOperator) -> Bits:
    """-Tr(rho log2 rho)."""
    return spectrum_entropy(rho.eigenvalues())


def binary_entropy(q: float) -> Bits:
    """-q log2 q - (1-q) log2 (1-q), with H2(0) = H2(1) = 0."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"binary entropy argument must lie in [0, 1], got {q}")
    return spectrum_entropy(np.array([q, 1.0 - q]))


def _marginal_entropy(rho: DensityOperator, keep) -> Bits:
    return vn_entropy(partial_trace(rho, keep))


def mutual_information(rho: DensityOperator) -> Bits:
    """I(A;B) = H(A) + H(B) - H(AB) for a state labeled with two subsystems."""
    if len(rho.dims) != 2:
        raise ValidationError(f"mutual information needs exactly 2 subsystems, got {rho.dims}")
    return _marginal_entropy(rho, [0]) + _marginal_entropy(rho, [1]) - vn_entropy(rho)


def coherent_information(rho: DensityOperator) -> Bits:
    """I(A>B) = H(B) - H(AB); may be negative."""
    if len(rho.dims) != 2:
        raise ValidationError(f"coherent information needs exactly 2 subsystems, got {rho.dims}")
    return _marginal_entropy(rho, [1]) - vn_entropy(rho)


def conditional_mutual_information(rho: DensityOperator) -> Bits:
    """I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC) on a three-subsystem state.

    Non-negative up to rounding (strong subadditivity); reported as
    computed, never clamped, so eigensolver regressions stay visible.
    """
    if len(rho.dims) != 3:
        raise ValidationError(
            f"conditional mutual information needs exactly 3 subsystems, got {rho.dims}"
        )
    h_ac = _marginal_entropy(rho, [0, 2])
    h_bc = _marginal_entropy(rho, [1, 2])
    h_c = _marginal_entropy(rho, [2])
    return h_ac + h_bc - h_c - vn_entropy(rho)
