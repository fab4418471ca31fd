"""One-shot entropic bounds of a classical-quantum ensemble through a channel.

An ensemble stores reduced channel-input states (mixed allowed); the pure
conditional states the bounds are defined over are recovered by
purification. The three bounds come out of the reduced decomposition

    I(AX;B)  = sum_x p_x H(rho_x) + H(N(rho_bar)) - sum_x p_x H(N^c(rho_x))
    I(A>BX)  = sum_x p_x [H(N(rho_x)) - H(N^c(rho_x))]
    I(X;B)   = H(N(rho_bar)) - sum_x p_x H(N(rho_x))

with rho_bar the average input; an explicit classical-quantum state over
index (x) reference (x) output (x) environment is also constructed here as
the independent cross-check path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .channel import KrausChannel, apply_matrix, complementary_output, isometric_extension
from .entropy import Bits, matrix_entropy, vn_entropy
from .errors import ValidationError
from .qmat import DensityOperator, matrix_from_pairs, matrix_to_pairs, partial_trace, purification_vector

PROBABILITY_TOL = 1e-10


class EntropicTriple(NamedTuple):
    """Right-hand sides of the three rate bounds, in bits."""

    cq_bound: Bits
    qe_bound: Bits
    cqe_bound: Bits

    @property
    def holevo(self) -> Bits:
        """I(X;B), recovered as cqe_bound - qe_bound."""
        return self.cqe_bound - self.qe_bound


class CqEnsemble:
    """A finite classical mixture {p_x, rho_x} of channel-input states."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[tuple[float, DensityOperator]]):
        items = [(float(p), rho) for p, rho in entries]
        if not items:
            raise ValidationError("ensemble needs at least one entry")
        if any(p < 0.0 for p, _ in items):
            raise ValidationError("ensemble probabilities must be non-negative")
        total = sum(p for p, _ in items)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValidationError(f"ensemble probabilities must sum to 1, got {total!r}")
        dim = items[0][1].dim
        for _, rho in items:
            if rho.dim != dim:
                raise ValidationError("all ensemble states must share the input dimension")
        self.entries = tuple(items)

    @property
    def input_dim(self) -> int:
        return self.entries[0][1].dim

    @property
    def size(self) -> int:
        return len(self.entries)

    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    def states(self) -> list[np.ndarray]:
        return [rho.matrix for _, rho in self.entries]

    def average_input(self) -> np.ndarray:
        out = np.zeros((self.input_dim, self.input_dim), dtype=complex)
        for p, rho in self.entries:
            out += p * rho.matrix
        return out

    def __repr__(self) -> str:
        return f"CqEnsemble(size={self.size}, input_dim={self.input_dim})"


def _triple_raw(ch: KrausChannel, probs, rhos) -> EntropicTriple:
    """Reduced-path bounds from raw probabilities and matrices."""
    h_in = 0.0
    h_out = 0.0
    h_env = 0.0
    rho_bar = np.zeros((ch.in_dim, ch.in_dim), dtype=complex)
    for p, rho in zip(probs, rhos):
        rho_bar += p * rho
        if p == 0.0:
            continue
        h_in += p * matrix_entropy(rho)
        h_out += p * matrix_entropy(apply_matrix(ch, rho))
        h_env += p * matrix_entropy(complementary_output(ch, rho))
    h_bar = matrix_entropy(apply_matrix(ch, rho_bar))
    cq = h_in + h_bar - h_env
    qe = h_out - h_env
    holevo = h_bar - h_out
    return EntropicTriple(float(cq), float(qe), float(holevo + qe))


def entropic_triple(ens: CqEnsemble, ch: KrausChannel) -> EntropicTriple:
    """The three bound values for one ensemble and channel."""
    if ens.input_dim != ch.in_dim:
        raise ValidationError(
            f"ensemble input dim {ens.input_dim} does not match channel in_dim {ch.in_dim}"
        )
    return _triple_raw(ch, ens.probabilities(), ens.states())


def explicit_cq_state(ens: CqEnsemble, ch: KrausChannel) -> DensityOperator:
    """The classical-quantum state on index (x) reference (x) output (x) environment.

    Each input is purified against a reference of the channel input
    dimension, then pushed through the canonical dilation; subsystem order
    is (X, A, B, E).
    """
    if ens.input_dim != ch.in_dim:
        raise ValidationError(
            f"ensemble input dim {ens.input_dim} does not match channel in_dim {ch.in_dim}"
        )
    ext = isometric_extension(ch)
    d = ch.in_dim
    be = ch.out_dim * ext.env_dim
    block = d * be
    n = ens.size
    full = np.zeros((n * block, n * block), dtype=complex)
    for x, (p, rho) in enumerate(ens.entries):
        psi = purification_vector(rho).reshape(d, d)
        out_vec = (psi @ ext.isometry.T).reshape(block)
        sigma = np.outer(out_vec, out_vec.conj())
        full[x * block : (x + 1) * block, x * block : (x + 1) * block] = p * sigma
    return DensityOperator(full, (n, d, ch.out_dim, ext.env_dim))


def _entropies_explicit(state: DensityOperator) -> dict:
    def h(keep):
        return vn_entropy(partial_trace(state, keep))

    return {
        "X": h([0]),
        "B": h([2]),
        "AX": h([0, 1]),
        "XB": h([0, 2]),
        "XE": h([0, 3]),
        "AXB": h([0, 1, 2]),
        "AXE": h([0, 1, 3]),
    }


def entropic_triple_explicit(ens: CqEnsemble, ch: KrausChannel) -> EntropicTriple:
    """Cross-check path: the same bounds read off the explicit state."""
    ent = _entropies_explicit(explicit_cq_state(ens, ch))
    cq = ent["AX"] + ent["B"] - ent["AXB"]
    qe = ent["XB"] - ent["AXB"]
    holevo = ent["X"] + ent["B"] - ent["XB"]
    return EntropicTriple(cq, qe, holevo + qe)


@dataclass(frozen=True)
class IdentityResiduals:
    """Residuals of the two linear identities the bounds must satisfy."""

    chain_rule: float
    coherent_split: float

    @property
    def worst(self) -> float:
        return max(self.chain_rule, self.coherent_split)


def verify_identities(ens: CqEnsemble, ch: KrausChannel) -> IdentityResiduals:
    """Check I(AX;B) = I(X;B) + I(A;B|X) and
    I(A>BX) = (1/2) I(A;B|X) - (1/2) I(A;E|X) on the explicit state."""
    ent = _entropies_explicit(explicit_cq_state(ens, ch))
    i_axb = ent["AX"] + ent["B"] - ent["AXB"]
    i_xb = ent["X"] + ent["B"] - ent["XB"]
    i_ab_given_x = ent["AX"] + ent["XB"] - ent["X"] - ent["AXB"]
    i_ae_given_x = ent["AX"] + ent["XE"] - ent["X"] - ent["AXE"]
    coherent = ent["XB"] - ent["AXB"]
    chain = abs(i_axb - i_xb - i_ab_given_x)
    split = abs(coherent - 0.5 * i_ab_given_x + 0.5 * i_ae_given_x)
    return IdentityResiduals(chain, split)


def cef_point(ens: CqEnsemble, ch: KrausChannel):
    """Corner rate triple (I(X;B), I(A;B|X)/2, -I(A;E|X)/2) for this ensemble."""
    from .region import RateTriple

    triple = entropic_triple(ens, ch)
    c = triple.holevo
    q = 0.5 * (triple.cq_bound - c)
    e = triple.qe_bound - q
    return RateTriple(c, q, e)


def diagonal_pair_ensemble(nu: float, dim: int = 2) -> CqEnsemble:
    """Equal mixture of diag(nu, 1-nu) and its bit-flipped partner."""
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValidationError(f"mixing parameter must lie in [0, 1], got {nu}")
    if dim != 2:
        raise ValidationError("diagonal pair ensembles are defined for qubit inputs")
    a = DensityOperator(np.diag([nu, 1.0 - nu]).astype(complex))
    b = DensityOperator(np.diag([1.0 - nu, nu]).astype(complex))
    return CqEnsemble([(0.5, a), (0.5, b)])


def product_ensemble(a: CqEnsemble, b: CqEnsemble) -> CqEnsemble:
    """All pairwise tensor products {p_x q_y, rho_x (x) sigma_y}."""
    entries = []
    for p, rho in a.entries:
        for q, sigma in b.entries:
            mat = np.kron(rho.matrix, sigma.matrix)
            entries.append((p * q, DensityOperator(mat, (rho.dim * sigma.dim,))))
    return CqEnsemble(entries)


def ensemble_from_json(payload: dict) -> CqEnsemble:
    """Build an ensemble from {"entries":[{"p":..., "rho":[[...]]}, ...]}."""
    try:
        raw = payload["entries"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"ensemble JSON must have an 'entries' list: {exc}") from exc
    entries = []
    for item in raw:
        try:
            p = float(item["p"])
            rho = matrix_from_pairs(item["rho"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"ensemble entry must have 'p' and 'rho': {exc}") from exc
        entries.append((p, DensityOperator(rho)))
    return CqEnsemble(entries)


def ensemble_to_json(ens: CqEnsemble) -> dict:
    return {
        "entries": [
            {"p": p, "rho": matrix_to_pairs(rho.matrix)} for p, rho in ens.entries
        ]
    }
