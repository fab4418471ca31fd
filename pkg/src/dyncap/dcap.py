"""Weighted trade-off capacity of a channel by ensemble optimization.

The objective for weights (lam, mu) is

    cq_bound + lam * qe_bound + mu * cqe_bound

maximized over classical-quantum input ensembles. The optimizer is a
deterministic coarse seed catalog followed by derivative-free pattern
search (compass moves with a shrinking step); every reported value is a
lower bound certified by the returned ensemble. Closed forms for the two
supported channel families live here too, as do the three single-purpose
capacity maximizations (entanglement-assisted, coherent information,
one-shot Holevo).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .channel import KrausChannel, apply_matrix, complementary_output, tensor_channel
from .cqstate import CqEnsemble, _triple_raw, entropic_triple, product_ensemble
from .entropy import Bits, matrix_entropy
from .errors import ValidationError
from .qmat import DensityOperator
from .region import _grid_then_refine, dephasing_bounds

DEFAULT_SEED = 1234


@dataclass(frozen=True)
class TradeoffWeights:
    """Non-negative weights (lam, mu) on the qe and cqe bounds."""

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam >= 0.0 and self.mu >= 0.0):
            raise ValidationError(f"weights must be non-negative, got {(self.lam, self.mu)}")
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise ValidationError("weights must be finite")


def _as_weights(w) -> TradeoffWeights:
    if isinstance(w, TradeoffWeights):
        return w
    return TradeoffWeights(*w)


@dataclass(frozen=True)
class OptimizerBudget:
    max_evals: int = 20000
    top_seeds: int = 4
    step_init: float = 0.25
    step_min: float = 1e-6
    max_states: int | None = None
    restarts: int = 0
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class OptimizationResult:
    value: Bits
    argmax_ensemble: CqEnsemble
    evaluations: int
    converged: bool
    max_states: int
    seed: int


def objective(ens: CqEnsemble, ch: KrausChannel, w) -> Bits:
    """cq + lam*qe + mu*cqe for one ensemble."""
    w = _as_weights(w)
    t = entropic_triple(ens, ch)
    return t.cq_bound + w.lam * t.qe_bound + w.mu * t.cqe_bound


# ---------------------------------------------------------------------------
# ensemble parameterizations (raw vectors in the unit box)


def _bloch_state(x: float, y: float, z: float) -> np.ndarray:
    n = math.sqrt(x * x + y * y + z * z)
    if n > 1.0:
        x, y, z = x / n, y / n, z / n
    return 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]], dtype=complex)


def _probs_from_raw(raw: np.ndarray) -> np.ndarray:
    total = float(raw.sum())
    if total < 1e-12:
        return np.full(raw.size, 1.0 / raw.size)
    return raw / total


_PURE_SIX = (
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
    (1.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0),
)


class _BlochFamily:
    """k qubit states as Bloch vectors, plus mixing probabilities."""

    def __init__(self, k: int):
        self.k = k
        self.n_prob = k if k > 1 else 0
        self.n_params = self.n_prob + 3 * k

    def decode(self, raw: np.ndarray):
        probs = (
            _probs_from_raw(raw[: self.n_prob]) if self.n_prob else np.array([1.0])
        )
        rhos = []
        for i in range(self.k):
            x, y, z = 2.0 * raw[self.n_prob + 3 * i : self.n_prob + 3 * i + 3] - 1.0
            rhos.append(_bloch_state(float(x), float(y), float(z)))
        return probs, rhos

    def _raw_from_blochs(self, blochs) -> np.ndarray:
        raw = [0.5] * self.n_prob
        for b in blochs:
            raw.extend((c + 1.0) / 2.0 for c in b)
        return np.array(raw)

    def seeds(self) -> list[np.ndarray]:
        k = self.k
        if k == 1:
            singles = [(0.0, 0.0, 0.0), (0.0, 0.0, 0.5)] + list(_PURE_SIX)
            return [self._raw_from_blochs([b]) for b in singles]
        out = []
        if k == 2:
            for nu in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
                z = 1.0 - 2.0 * nu
                out.append(self._raw_from_blochs([(0.0, 0.0, z), (0.0, 0.0, -z)]))
            out.append(self._raw_from_blochs([(1.0, 0.0, 0.0), (-1.0, 0.0, 0.0)]))
            out.append(self._raw_from_blochs([(0.0, 1.0, 0.0), (0.0, -1.0, 0.0)]))
            return out
        out.append(self._raw_from_blochs(_PURE_SIX[:k]))
        if k == 4:
            s = math.sqrt(2.0)
            tetra = [
                (0.0, 0.0, 1.0),
                (2.0 * s / 3.0, 0.0, -1.0 / 3.0),
                (-s / 3.0, math.sqrt(2.0 / 3.0), -1.0 / 3.0),
                (-s / 3.0, -math.sqrt(2.0 / 3.0), -1.0 / 3.0),
            ]
            out.append(self._raw_from_blochs(tetra))
        out.append(self._raw_from_blochs([(0.0, 0.0, 0.0)] * k))
        return out


_GIVENS_PAIRS = {d: [(i, j) for i in range(d) for j in range(i + 1, d)] for d in (2, 3, 4)}


def _givens(d: int, i: int, j: int, theta: float, phi: float) -> np.ndarray:
    g = np.eye(d, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    g[i, i] = c
    g[j, j] = c
    g[i, j] = -s * np.exp(1j * phi)
    g[j, i] = s * np.exp(-1j * phi)
    return g


class _SpectralFamily:
    """k states of dimension d via eigenvalue simplex plus a rotation frame."""

    def __init__(self, d: int, k: int):
        self.d = d
        self.k = k
        self.pairs = _GIVENS_PAIRS[d]
        self.per_state = d + 2 * len(self.pairs)
        self.n_prob = k if k > 1 else 0
        self.n_params = self.n_prob + k * self.per_state

    def _frame(self, angle_raw: np.ndarray) -> np.ndarray:
        u = np.eye(self.d, dtype=complex)
        for idx, (i, j) in enumerate(self.pairs):
            theta = math.pi * float(angle_raw[2 * idx])
            phi = 2.0 * math.pi * float(angle_raw[2 * idx + 1])
            if theta != 0.0:
                u = u @ _givens(self.d, i, j, theta, phi)
        return u

    def decode(self, raw: np.ndarray):
        probs = (
            _probs_from_raw(raw[: self.n_prob]) if self.n_prob else np.array([1.0])
        )
        rhos = []
        for i in range(self.k):
            chunk = raw[self.n_prob + i * self.per_state : self.n_prob + (i + 1) * self.per_state]
            eigs = _probs_from_raw(np.clip(chunk[: self.d], 0.0, 1.0))
            u = self._frame(chunk[self.d :])
            rho = (u * eigs) @ u.conj().T
            rhos.append(0.5 * (rho + rho.conj().T))
        return probs, rhos

    def _state_raw(self, eig_raw, rotations=()) -> np.ndarray:
        chunk = np.zeros(self.per_state)
        chunk[: self.d] = eig_raw
        for pair, theta_raw in rotations:
            idx = self.pairs.index(pair)
            chunk[self.d + 2 * idx] = theta_raw
        return chunk

    def seeds(self) -> list[np.ndarray]:
        d, k = self.d, self.k
        mixed = self._state_raw([0.5] * d)
        ground = self._state_raw([1.0] + [0.0] * (d - 1))
        flipped = self._state_raw([1.0] + [0.0] * (d - 1), [((0, d - 1), 0.5)])
        entangled = self._state_raw([1.0] + [0.0] * (d - 1), [((0, d - 1), 0.25)])
        prob_part = [0.5] * self.n_prob

        def pack(states):
            return np.concatenate([prob_part] + states)

        if k == 1:
            return [pack([s]) for s in (mixed, ground, entangled)]
        if k == 2:
            return [pack([ground, flipped]), pack([mixed, mixed]), pack([entangled, flipped])]
        basis = [ground]
        for j in range(1, min(k, d)):
            basis.append(self._state_raw([1.0] + [0.0] * (d - 1), [((0, j), 0.5)]))
        while len(basis) < k:
            basis.append(mixed)
        return [pack(basis), pack([mixed] * k)]


class _PureFamily:
    """k pure states of dimension d in hyperspherical coordinates."""

    def __init__(self, d: int, k: int):
        self.d = d
        self.k = k
        self.per_state = 2 * (d - 1)
        self.n_prob = k if k > 1 else 0
        self.n_params = self.n_prob + k * self.per_state

    def _vector(self, chunk: np.ndarray) -> np.ndarray:
        d = self.d
        thetas = 0.5 * math.pi * chunk[: d - 1]
        phis = 2.0 * math.pi * chunk[d - 1 :]
        v = np.zeros(d, dtype=complex)
        s = 1.0
        for j in range(d - 1):
            v[j] = s * math.cos(thetas[j])
            s *= math.sin(thetas[j])
        v[d - 1] = s
        for j in range(1, d):
            v[j] *= np.exp(1j * phis[j - 1])
        return v

    def decode(self, raw: np.ndarray):
        probs = (
            _probs_from_raw(raw[: self.n_prob]) if self.n_prob else np.array([1.0])
        )
        rhos = []
        for i in range(self.k):
            chunk = raw[self.n_prob + i * self.per_state : self.n_prob + (i + 1) * self.per_state]
            v = self._vector(chunk)
            rhos.append(np.outer(v, v.conj()))
        return probs, rhos

    def _basis_raw(self, m: int) -> np.ndarray:
        chunk = np.zeros(self.per_state)
        chunk[:m] = 1.0  # theta = pi/2 up the chain selects basis vector m
        return chunk

    def seeds(self) -> list[np.ndarray]:
        d, k = self.d, self.k
        prob_part = [0.5] * self.n_prob

        def pack(states):
            return np.concatenate([prob_part] + states)

        basis = [self._basis_raw(min(m, d - 1)) for m in range(k)]
        out = [pack(basis)]
        if d == 2 and k >= 2:
            plus = np.zeros(self.per_state)
            plus[0] = 0.5
            minus = plus.copy()
            minus[1] = 0.5
            extra = [plus, minus] + basis[2:]
            out.append(pack(extra[:k]))
        return out


# ---------------------------------------------------------------------------
# pattern search


def _pattern_search(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    max_evals: int,
    step_init: float = 0.25,
    step_min: float = 1e-6,
):
    """Compass search in the unit box, first-improvement moves, halving step."""
    x = np.clip(np.asarray(x0, dtype=float), 0.0, 1.0)
    fx = f(x)
    evals = 1
    step = step_init
    while step >= step_min and evals < max_evals:
        improved = False
        for i in range(x.size):
            for sign in (1.0, -1.0):
                if evals >= max_evals:
                    break
                xi = min(1.0, max(0.0, float(x[i]) + sign * step))
                if xi == x[i]:
                    continue
                y = x.copy()
                y[i] = xi
                fy = f(y)
                evals += 1
                if fy > fx:
                    x, fx = y, fy
                    improved = True
        if not improved:
            step *= 0.5
    return x, fx, evals, step < step_min


def _families_for_dim(d: int, max_states: int):
    if d == 2:
        return [_BlochFamily(k) for k in (1, 2, 3, 4) if k <= max_states]
    if d in (3, 4):
        return [_SpectralFamily(d, k) for k in (1, 2, 4, 6) if k <= max_states]
    raise ValidationError(f"optimization supports input dimension <= 4, got {d}")


def _default_max_states(d: int) -> int:
    return 4 if d == 2 else 6


def dcap_optimize(
    ch: KrausChannel,
    w,
    budget: OptimizerBudget | None = None,
    extra_candidates: Sequence[CqEnsemble] = (),
) -> OptimizationResult:
    """Maximize the weighted objective over the ensemble search family.

    Deterministic for a fixed budget and seed; the result is never below
    the best catalog seed, and the reported value is re-evaluated from the
    returned ensemble.
    """
    w = _as_weights(w)
    budget = budget or OptimizerBudget()
    if budget.max_evals <= 0:
        raise ValidationError("optimizer budget must allow at least one evaluation")
    max_states = budget.max_states or _default_max_states(ch.in_dim)
    families = _families_for_dim(ch.in_dim, max_states)
    lam, mu = w.lam, w.mu

    def make_objective(family):
        def f(raw):
            probs, rhos = family.decode(raw)
            t = _triple_raw(ch, probs, rhos)
            return t.cq_bound + lam * t.qe_bound + mu * t.cqe_bound

        return f

    rng = np.random.default_rng(budget.seed) if budget.restarts else None
    evaluations = 0
    seeded = []
    for family in families:
        f = make_objective(family)
        starts = family.seeds()
        if rng is not None:
            starts = starts + [rng.uniform(size=family.n_params) for _ in range(budget.restarts)]
        for raw in starts:
            raw = np.clip(np.asarray(raw, dtype=float), 0.0, 1.0)
            value = f(raw)
            evaluations += 1
            seeded.append((value, family, f, raw))

    order = sorted(range(len(seeded)), key=lambda i: -seeded[i][0])
    chosen = order[: max(1, budget.top_seeds)]
    per_seed = max(1, budget.max_evals // len(chosen))

    best_value, best_family, _, best_raw = seeded[order[0]]
    converged = True
    for i in chosen:
        _, family, f, raw = seeded[i]
        x, fx, used, done = _pattern_search(
            f, raw, per_seed, budget.step_init, budget.step_min
        )
        evaluations += used
        converged = converged and done
        if fx > best_value:
            best_value, best_family, best_raw = fx, family, x

    probs, rhos = best_family.decode(best_raw)
    best_ens = CqEnsemble(
        [(float(p), DensityOperator(r)) for p, r in zip(probs, rhos)]
    )
    for cand in extra_candidates:
        cand_value = objective(cand, ch, w)
        evaluations += 1
        if cand_value > best_value:
            best_value, best_ens = cand_value, cand

    final = objective(best_ens, ch, w)
    return OptimizationResult(
        value=final,
        argmax_ensemble=best_ens,
        evaluations=evaluations,
        converged=converged,
        max_states=max_states,
        seed=budget.seed,
    )


# ---------------------------------------------------------------------------
# closed forms


def erasure_optimal_mixing(eps: float, w) -> float:
    """Optimal curve parameter p for the erasure trade-off at these weights."""
    w = _as_weights(w)
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"erasure parameter must lie in [0, 1], got {eps}")
    coefficient = (1.0 - eps) + w.lam * (1.0 - 2.0 * eps) - w.mu * eps
    return 0.5 if coefficient >= 0.0 else 0.0


def dcap_closed_form_erasure(eps: float, w) -> Bits:
    """Exact trade-off value for the erasure channel.

    The objective is affine in H2(p); when its coefficient
    (1-eps) + lam*(1-2eps) - mu*eps is non-negative p = 1/2 is optimal,
    otherwise H2(p) = 0 and the value degenerates to (1+mu)(1-eps).
    """
    w = _as_weights(w)
    eps = float(eps)
    p = erasure_optimal_mixing(eps, w)
    if p == 0.0:
        return (1.0 + w.mu) * (1.0 - eps)
    return (
        2.0 * (1.0 - eps)
        + w.lam * (1.0 - 2.0 * eps)
        + w.mu * (1.0 - 2.0 * eps)
    )


def dephasing_tradeoff_maximum(p: float, w, grid: int = 4097) -> tuple[Bits, float]:
    """(value, argmax nu) of the weighted dephasing bounds over nu in [0, 1/2]."""
    w = _as_weights(w)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing parameter must lie in [0, 1], got {p}")

    def f(nu):
        b = dephasing_bounds(nu, p)
        return b.cq_bound + w.lam * b.qe_bound + w.mu * b.cqe_bound

    nu, value = _grid_then_refine(f, grid)
    return value, nu


def dcap_closed_form_dephasing(p: float, w, grid: int = 4097) -> Bits:
    """Trade-off value for the dephasing channel by exact one-dimensional search."""
    return dephasing_tradeoff_maximum(p, w, grid)[0]


# ---------------------------------------------------------------------------
# special-case capacities


def _single_state_max(ch: KrausChannel, score, budget: OptimizerBudget | None) -> Bits:
    budget = budget or OptimizerBudget(max_evals=6000, top_seeds=3)
    if budget.max_evals <= 0:
        raise ValidationError("optimizer budget must allow at least one evaluation")
    family = _families_for_dim(ch.in_dim, 1)[0]

    def f(raw):
        _, rhos = family.decode(raw)
        return score(rhos[0])

    best_raw, best = None, -math.inf
    for raw in family.seeds():
        value = f(raw)
        if value > best:
            best_raw, best = raw, value
    x, fx, _, _ = _pattern_search(f, best_raw, budget.max_evals, budget.step_init, budget.step_min)
    return max(best, fx)


def ea_capacity(ch: KrausChannel, budget: OptimizerBudget | None = None) -> Bits:
    """Entanglement-assisted capacity: max over inputs of H(rho) + H(N(rho)) - H(N^c(rho))."""

    def score(rho):
        return (
            matrix_entropy(rho)
            + matrix_entropy(apply_matrix(ch, rho))
            - matrix_entropy(complementary_output(ch, rho))
        )

    return _single_state_max(ch, score, budget)


def coherent_information_capacity(ch: KrausChannel, budget: OptimizerBudget | None = None) -> Bits:
    """Channel coherent information: max over inputs of H(N(rho)) - H(N^c(rho))."""

    def score(rho):
        return matrix_entropy(apply_matrix(ch, rho)) - matrix_entropy(
            complementary_output(ch, rho)
        )

    return _single_state_max(ch, score, budget)


def holevo_one_shot(ch: KrausChannel, budget: OptimizerBudget | None = None) -> Bits:
    """One-shot Holevo information: max over pure-state ensembles of I(X;B)."""
    budget = budget or OptimizerBudget(max_evals=8000, top_seeds=3)
    if budget.max_evals <= 0:
        raise ValidationError("optimizer budget must allow at least one evaluation")
    if ch.in_dim > 4:
        raise ValidationError(f"holevo search supports input dimension <= 4, got {ch.in_dim}")
    max_states = min(budget.max_states or 4, 4)
    best = -math.inf
    for k in range(1, max_states + 1):
        family = _PureFamily(ch.in_dim, k)

        def f(raw, family=family):
            probs, rhos = family.decode(raw)
            rho_bar = sum(p * r for p, r in zip(probs, rhos))
            h_bar = matrix_entropy(apply_matrix(ch, rho_bar))
            h_avg = sum(
                p * matrix_entropy(apply_matrix(ch, r)) for p, r in zip(probs, rhos) if p > 0.0
            )
            return h_bar - h_avg

        for raw in family.seeds():
            _, fx, _, _ = _pattern_search(
                f, raw, budget.max_evals // max(1, max_states), budget.step_init, budget.step_min
            )
            best = max(best, fx)
    return best


class AdditivityGap(NamedTuple):
    two_copy_value: Bits
    single_doubled: Bits

    @property
    def gap(self) -> Bits:
        return self.two_copy_value - self.single_doubled


def additivity_gap(
    ch: KrausChannel,
    w,
    budget: OptimizerBudget | None = None,
    two_copy_budget: OptimizerBudget | None = None,
) -> AdditivityGap:
    """Two-copy optimized value against twice the single-copy value.

    The product of the single-copy argmax with itself is injected into the
    two-copy search, so the two-copy value can never fall below the doubled
    single-copy value by more than search tolerance.
    """
    w = _as_weights(w)
    if ch.in_dim != 2:
        raise ValidationError("two-copy probes are implemented for qubit-input channels")
    single = dcap_optimize(ch, w, budget)
    doubled = tensor_channel(ch, ch)
    product = product_ensemble(single.argmax_ensemble, single.argmax_ensemble)
    two_budget = two_copy_budget or OptimizerBudget(max_evals=6000, top_seeds=2, max_states=6)
    two = dcap_optimize(doubled, w, two_budget, extra_candidates=(product,))
    return AdditivityGap(two.value, 2.0 * single.value)
