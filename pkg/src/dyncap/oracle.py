"""Brute-force grid verification, independent of the optimizer's search logic.

Every oracle is a pure grid scan: enumerate ensembles whose states come
from a fixed Bloch (or two-qubit product/Schmidt) grid and whose
probabilities come from a simplex grid, evaluate the weighted objective on
each, and keep the best. No refinement, no seeding, no shared search code
with the optimizer; only the state/channel/entropy primitives are reused.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import KrausChannel, dephasing, erasure, tensor_channel
from .cqstate import (
    CqEnsemble,
    diagonal_pair_ensemble,
    ensemble_to_json,
    entropic_triple,
    product_ensemble,
)
from .entropy import spectrum_entropy
from .errors import ValidationError
from .qmat import DensityOperator
from .region import dephasing_bounds

GRID_TOLERANCE = 5e-3


@dataclass(frozen=True)
class OracleGrid:
    """Resolution of the single-copy ensemble grid."""

    n_polar: int = 13        # polar angles over [0, pi], step pi/12 by default
    n_azimuthal: int = 24    # azimuthal angles over [0, 2pi), step pi/12
    radii: tuple = (0.0, 0.5, 1.0)
    prob_steps: int = 8      # probability grid step 1/8
    max_states: int = 2

    def validate(self):
        if self.n_polar < 2 or self.n_azimuthal < 2 or self.prob_steps < 2:
            raise ValidationError(
                "oracle grid needs at least 2 points per axis "
                f"(polar={self.n_polar}, azimuthal={self.n_azimuthal}, prob={self.prob_steps})"
            )
        if not self.radii:
            raise ValidationError("oracle grid needs at least one Bloch radius")

    def describe(self) -> str:
        return (
            f"bloch grid: polar={self.n_polar}, azimuthal={self.n_azimuthal}, "
            f"radii={list(self.radii)}, prob step=1/{self.prob_steps}, "
            f"states per ensemble<={self.max_states}"
        )


@dataclass(frozen=True)
class TwoCopyGrid:
    """Resolution of the two-copy ensemble grid (product plus Schmidt states)."""

    n_polar: int = 5
    n_azimuthal: int = 4
    radii: tuple = (0.0, 1.0)
    n_schmidt: int = 5
    n_local: int = 3
    prob_steps: int = 8
    max_states: int = 2
    max_evaluations: int = 10_000_000

    def validate(self):
        if self.n_polar < 2 or self.n_azimuthal < 2 or self.prob_steps < 2:
            raise ValidationError("two-copy grid needs at least 2 points per axis")
        if self.max_states > 3:
            raise ValidationError("two-copy ensembles are capped at 3 states")

    def describe(self) -> str:
        return (
            f"product bloch grid: polar={self.n_polar}, azimuthal={self.n_azimuthal}, "
            f"radii={list(self.radii)}; schmidt angles={self.n_schmidt}, "
            f"local rotations={self.n_local}; prob step=1/{self.prob_steps}, "
            f"states per ensemble<={self.max_states}"
        )


@dataclass(frozen=True)
class OracleReport:
    best_value: float
    best_ensemble: CqEnsemble
    grid_spec: str
    comparison_target: float | None = None
    gap: float | None = None
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "target": self.comparison_target,
            "gap": self.gap,
            "grid": self.grid_spec,
            "ensemble": ensemble_to_json(self.best_ensemble),
            "details": self.details,
        }


def _bloch_vectors(n_polar: int, n_azimuthal: int, radii) -> np.ndarray:
    """Deduplicated Bloch-ball grid points, poles included once per radius."""
    points = []
    seen = set()

    def push(x, y, z):
        key = (round(x, 12), round(y, 12), round(z, 12))
        if key not in seen:
            seen.add(key)
            points.append((x, y, z))

    for r in radii:
        if r == 0.0:
            push(0.0, 0.0, 0.0)
            continue
        for theta in np.linspace(0.0, math.pi, n_polar):
            if theta in (0.0, math.pi):
                push(0.0, 0.0, r * math.cos(theta))
                continue
            for k in range(n_azimuthal):
                phi = 2.0 * math.pi * k / n_azimuthal
                push(
                    r * math.sin(theta) * math.cos(phi),
                    r * math.sin(theta) * math.sin(phi),
                    r * math.cos(theta),
                )
    return np.array(points)


def _states_from_blochs(vectors: np.ndarray) -> np.ndarray:
    n = vectors.shape[0]
    out = np.zeros((n, 2, 2), dtype=complex)
    x, y, z = vectors[:, 0], vectors[:, 1], vectors[:, 2]
    out[:, 0, 0] = 0.5 * (1.0 + z)
    out[:, 1, 1] = 0.5 * (1.0 - z)
    out[:, 0, 1] = 0.5 * (x - 1j * y)
    out[:, 1, 0] = 0.5 * (x + 1j * y)
    return out


def _batched_channel_outputs(ch: KrausChannel, states: np.ndarray):
    stack = ch._stack
    outs = np.einsum("kij,njl,kml->nim", stack, states, stack.conj())
    envs = np.einsum("aij,njl,bil->nab", stack, states, stack.conj())
    return outs, envs


def _batched_entropy(mats: np.ndarray) -> np.ndarray:
    sym = 0.5 * (mats + np.conj(np.swapaxes(mats, -1, -2)))
    return spectrum_entropy(np.linalg.eigvalsh(sym), floor=-1e-8)


def _positive_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _positive_compositions(total - first, parts - 1):
            yield (first,) + rest


def _scan_ensembles(states, outs_entropy_fn, g, weight_mu, prob_steps, max_states):
    """Exhaustive scan; returns (best value, (probs, state indices), count).

    ``outs_entropy_fn(probs, idx_chunk)`` must return the entropy of the
    probability-weighted output mixture for each index row. Ties keep the
    first hit in lexicographic grid order, so results are reproducible.
    """
    n = states.shape[0]
    best_value = -math.inf
    best = None
    evaluated = 0
    for k in range(1, max_states + 1):
        prob_vectors = [
            np.array(c, dtype=float) / prob_steps
            for c in _positive_compositions(prob_steps, k)
        ]
        chunk_size = max(1, 200_000 // max(1, k))
        combos = itertools.combinations(range(n), k)
        while True:
            chunk = list(itertools.islice(combos, chunk_size))
            if not chunk:
                break
            idx = np.array(chunk)
            for probs in prob_vectors:
                h_mix = outs_entropy_fn(probs, idx)
                values = (1.0 + weight_mu) * h_mix + g[idx] @ probs
                evaluated += len(chunk)
                local = int(np.argmax(values))
                if values[local] > best_value:
                    best_value = float(values[local])
                    best = (probs.copy(), idx[local].copy())
    return best_value, best, evaluated


def _grid_oracle(ch: KrausChannel, lam: float, mu: float, states: np.ndarray,
                 prob_steps: int, max_states: int):
    outs, envs = _batched_channel_outputs(ch, states)
    h_in = _batched_entropy(states)
    h_out = _batched_entropy(outs)
    h_env = _batched_entropy(envs)
    # objective = (1+mu) H(N(rho_bar)) + sum_x p_x g_x with
    # g = H(rho) + lam H(N(rho)) - (1+lam+mu) H(N^c(rho))
    g = h_in + lam * h_out - (1.0 + lam + mu) * h_env

    def mixture_entropy(probs, idx):
        mixed = np.einsum("t,ctij->cij", probs, outs[idx])
        return _batched_entropy(mixed)

    best_value, best, evaluated = _scan_ensembles(
        states, mixture_entropy, g, mu, prob_steps, max_states
    )
    probs, idx = best
    ensemble = CqEnsemble(
        [(float(p), DensityOperator(states[i])) for p, i in zip(probs, idx)]
    )
    return best_value, ensemble, evaluated


def _as_weight_pair(w) -> tuple[float, float]:
    lam, mu = (w.lam, w.mu) if hasattr(w, "lam") else (float(w[0]), float(w[1]))
    if lam < 0.0 or mu < 0.0:
        raise ValidationError(f"weights must be non-negative, got {(lam, mu)}")
    return lam, mu


def oracle_dcap(
    ch: KrausChannel,
    w,
    grid: OracleGrid | None = None,
    target: float | None = None,
) -> OracleReport:
    """Exhaustive single-copy grid scan of the weighted objective."""
    lam, mu = _as_weight_pair(w)
    grid = grid or OracleGrid()
    grid.validate()
    if ch.in_dim != 2:
        raise ValidationError("the grid oracle handles qubit-input channels only")
    if grid.max_states > 4:
        raise ValidationError("single-copy oracle ensembles are capped at 4 states")
    states = _states_from_blochs(_bloch_vectors(grid.n_polar, grid.n_azimuthal, grid.radii))
    best_value, ensemble, evaluated = _grid_oracle(
        ch, lam, mu, states, grid.prob_steps, grid.max_states
    )
    gap = None if target is None else target - best_value
    return OracleReport(
        best_value=best_value,
        best_ensemble=ensemble,
        grid_spec=grid.describe(),
        comparison_target=target,
        gap=gap,
        details={"states_in_grid": int(states.shape[0]), "evaluations": evaluated},
    )


def _weighted_triple(triple, lam, mu):
    return triple.cq_bound + lam * triple.qe_bound + mu * triple.cqe_bound


def _dephasing_target(p: float, lam: float, mu: float, points: int = 8193):
    nus = np.linspace(0.0, 0.5, points)
    best_nu, best = 0.0, -math.inf
    for nu in nus:
        value = _weighted_triple(dephasing_bounds(float(nu), p), lam, mu)
        if value > best:
            best_nu, best = float(nu), value
    return best, best_nu


def _erasure_target(eps: float, lam: float, mu: float):
    coefficient = (1.0 - eps) + lam * (1.0 - 2.0 * eps) - mu * eps
    if coefficient >= 0.0:
        return 2.0 * (1.0 - eps) + lam * (1.0 - 2.0 * eps) + mu * (1.0 - 2.0 * eps), 0.5
    return (1.0 + mu) * (1.0 - eps), 0.0


def _closed_form_target(ch: KrausChannel, lam: float, mu: float):
    """(value, argmax parameter) of the closed form for a labeled channel family."""
    label = ch.label or ""
    if label.startswith("dephasing:p="):
        return _dephasing_target(float(label.split("=", 1)[1]), lam, mu)
    if label.startswith("erasure:eps="):
        return _erasure_target(float(label.split("=", 1)[1]), lam, mu)
    return None, None


def oracle_dephasing_diagonal_sufficiency(
    p: float, w, grid: OracleGrid | None = None, nu_points: int = 513
) -> OracleReport:
    """Full grid best against the diagonal two-state family best.

    The restricted family is the half/half mixture of diag(nu, 1-nu) and
    its bit-flip; the full grid must not beat it by more than the grid
    tolerance.
    """
    lam, mu = _as_weight_pair(w)
    ch = dephasing(p)
    full = oracle_dcap(ch, w, grid)
    restricted_best = -math.inf
    restricted_nu = 0.0
    for nu in np.linspace(0.0, 0.5, nu_points):
        ens = diagonal_pair_ensemble(float(nu))
        value = _weighted_triple(entropic_triple(ens, ch), lam, mu)
        if value > restricted_best:
            restricted_best, restricted_nu = value, float(nu)
    return OracleReport(
        best_value=full.best_value,
        best_ensemble=full.best_ensemble,
        grid_spec=full.grid_spec + f"; restricted family nu points={nu_points}",
        comparison_target=restricted_best,
        gap=restricted_best - full.best_value,
        details={
            "restricted_nu": restricted_nu,
            "full_grid_states": full.details["states_in_grid"],
        },
    )


def _two_copy_pool(grid: TwoCopyGrid) -> np.ndarray:
    """Product Bloch pairs plus locally rotated Schmidt-form pure states."""
    singles = _states_from_blochs(
        _bloch_vectors(grid.n_polar, grid.n_azimuthal, grid.radii)
    )
    pool = []
    seen = set()

    def push(mat):
        key = np.round(mat, 10).tobytes()
        if key not in seen:
            seen.add(key)
            pool.append(mat)

    for a in singles:
        for b in singles:
            push(np.kron(a, b))
    for theta in np.linspace(0.0, math.pi / 4.0, grid.n_schmidt):
        vec = np.zeros(4, dtype=complex)
        vec[0] = math.cos(theta)
        vec[3] = math.sin(theta)
        for alpha in np.linspace(0.0, math.pi / 2.0, grid.n_local):
            for beta in np.linspace(0.0, math.pi / 2.0, grid.n_local):
                ua = np.array(
                    [
                        [math.cos(alpha / 2.0), -math.sin(alpha / 2.0)],
                        [math.sin(alpha / 2.0), math.cos(alpha / 2.0)],
                    ],
                    dtype=complex,
                )
                ub = np.array(
                    [
                        [math.cos(beta / 2.0), -math.sin(beta / 2.0)],
                        [math.sin(beta / 2.0), math.cos(beta / 2.0)],
                    ],
                    dtype=complex,
                )
                u = np.kron(ua, ub)
                rotated = u @ vec
                push(np.outer(rotated, rotated.conj()))
    return np.array(pool)


def _estimate_scan_size(pool: int, prob_steps: int, max_states: int) -> int:
    total = 0
    for k in range(1, max_states + 1):
        total += math.comb(pool, k) * math.comb(prob_steps - 1, k - 1)
    return total


def oracle_additivity(
    ch: KrausChannel,
    w,
    grid: TwoCopyGrid | None = None,
    single_copy_value: float | None = None,
) -> OracleReport:
    """Two-copy grid probe against twice the single-copy value.

    One-sided: the family is nowhere near exhaustive over two-qubit
    ensembles, so a small gap means no counterexample found, not a proof.
    """
    lam, mu = _as_weight_pair(w)
    grid = grid or TwoCopyGrid()
    grid.validate()
    if ch.in_dim != 2:
        raise ValidationError("two-copy oracle needs a qubit-input channel")
    pool = _two_copy_pool(grid)
    estimate = _estimate_scan_size(pool.shape[0], grid.prob_steps, grid.max_states)
    if estimate > grid.max_evaluations:
        raise ValidationError(
            f"two-copy scan would take ~{estimate} evaluations "
            f"(cap {grid.max_evaluations}); shrink the grid or max_states"
        )
    doubled = tensor_channel(ch, ch)
    best_value, ensemble, evaluated = _grid_oracle(
        doubled, lam, mu, pool, grid.prob_steps, grid.max_states
    )

    argmax_param = None
    if single_copy_value is None:
        single_copy_value, argmax_param = _closed_form_target(ch, lam, mu)
        if single_copy_value is None:
            raise ValidationError(
                "no closed form for this channel; pass single_copy_value explicitly"
            )
    target = 2.0 * single_copy_value

    details = {
        "single_copy_value": single_copy_value,
        "pool_size": int(pool.shape[0]),
        "evaluations": evaluated,
        "caveat": "one-sided probe: family not exhaustive, no counterexample found",
    }
    if argmax_param is not None:
        single_ens = diagonal_pair_ensemble(argmax_param)
        product = product_ensemble(single_ens, single_ens)
        details["product_lower_bound"] = _weighted_triple(
            entropic_triple(product, doubled), lam, mu
        )
    return OracleReport(
        best_value=best_value,
        best_ensemble=ensemble,
        grid_spec=grid.describe(),
        comparison_target=target,
        gap=target - best_value,
        details=details,
    )


def oracle_holevo_erasure(eps: float, grid: OracleGrid | None = None) -> OracleReport:
    """Grid scan of I(X;B) for the erasure channel, single and two-copy.

    Single-copy pure ensembles must come within the grid tolerance of
    1 - eps; the two-copy product family must likewise track 2(1 - eps).
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"erasure parameter must lie in [0, 1], got {eps}")
    grid = grid or OracleGrid(radii=(1.0,))
    grid.validate()
    ch = erasure(eps)
    states = _states_from_blochs(_bloch_vectors(grid.n_polar, grid.n_azimuthal, (1.0,)))
    outs, _ = _batched_channel_outputs(ch, states)
    h_out = _batched_entropy(outs)
    # holevo objective = H(N(rho_bar)) - sum_x p_x H(N(psi_x)): reuse the scan
    # machinery with mu = 0 and g = -H(N(psi)).
    g = -h_out

    def mixture_entropy(probs, idx):
        mixed = np.einsum("t,ctij->cij", probs, outs[idx])
        return _batched_entropy(mixed)

    best_value, best, evaluated = _scan_ensembles(
        states, mixture_entropy, g, 0.0, grid.prob_steps, min(grid.max_states, 4)
    )
    probs, idx = best
    ensemble = CqEnsemble(
        [(float(p), DensityOperator(states[i])) for p, i in zip(probs, idx)]
    )

    # two-copy probe over the product family: pair the grid-best ensemble
    # with itself and with a few canonical basis ensembles
    doubled = tensor_channel(ch, ch)
    basis_pair = CqEnsemble(
        [
            (0.5, DensityOperator(np.diag([1.0, 0.0]).astype(complex))),
            (0.5, DensityOperator(np.diag([0.0, 1.0]).astype(complex))),
        ]
    )
    plus = 0.5 * np.ones((2, 2), dtype=complex)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
    conjugate_pair = CqEnsemble(
        [(0.5, DensityOperator(plus)), (0.5, DensityOperator(minus))]
    )
    candidates = [ensemble, basis_pair, conjugate_pair]
    two_copy_best = -math.inf
    for a in candidates:
        for b in candidates:
            prod = product_ensemble(a, b)
            two_copy_best = max(two_copy_best, entropic_triple(prod, doubled).holevo)

    target = 1.0 - eps
    return OracleReport(
        best_value=best_value,
        best_ensemble=ensemble,
        grid_spec=grid.describe(),
        comparison_target=target,
        gap=target - best_value,
        details={
            "evaluations": evaluated,
            "two_copy_best": two_copy_best,
            "two_copy_target": 2.0 * (1.0 - eps),
        },
    )
