"""Quantum channels as Kraus operator collections.

Provides the qubit dephasing channel, the qubit-to-qutrit erasure channel,
generic channels loaded from JSON, isometric extensions, complementary
channels, and tensor products. Channels are immutable after construction.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .qmat import (
    DensityOperator,
    dagger,
    matrix_from_pairs,
    matrix_to_pairs,
    max_dim,
)

COMPLETENESS_TOL = 1e-10


class KrausChannel:
    """A CPTP map given by Kraus operators A_k (each out_dim x in_dim).

    Completeness sum_k A_k^dag A_k = I is validated entrywise to 1e-10.
    ``label`` is a human-readable spec string carried along for reports.
    """

    __slots__ = ("in_dim", "out_dim", "kraus", "label", "_stack")

    def __init__(self, kraus: Sequence[np.ndarray], label: str | None = None):
        ops = [np.array(k, dtype=complex) for k in kraus]  # copies; frozen below
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        out_dim, in_dim = ops[0].shape
        for k in ops:
            if k.ndim != 2 or k.shape != (out_dim, in_dim):
                raise ValidationError(f"Kraus operators must share shape {(out_dim, in_dim)}")
        total = sum(dagger(k) @ k for k in ops)
        defect = float(np.abs(total - np.eye(in_dim)).max())
        if defect > COMPLETENESS_TOL:
            raise ValidationError(
                f"Kraus completeness violated: max |sum A^dag A - I| = {defect:.3e}"
            )
        for k in ops:
            k.setflags(write=False)
        stack = np.stack(ops)
        stack.setflags(write=False)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.kraus = tuple(ops)
        self.label = label
        self._stack = stack

    @property
    def env_dim(self) -> int:
        return len(self.kraus)

    def __repr__(self) -> str:
        tag = self.label or "kraus"
        return f"KrausChannel({tag}, in={self.in_dim}, out={self.out_dim}, k={self.env_dim})"


class IsometricExtension:
    """Isometry V: input -> output (x) environment with V^dag V = I."""

    __slots__ = ("in_dim", "out_dim", "env_dim", "isometry")

    def __init__(self, in_dim: int, out_dim: int, env_dim: int, isometry: np.ndarray):
        v = np.asarray(isometry, dtype=complex)
        if v.shape != (out_dim * env_dim, in_dim):
            raise ValidationError(f"isometry shape {v.shape} != {(out_dim * env_dim, in_dim)}")
        defect = float(np.abs(dagger(v) @ v - np.eye(in_dim)).max())
        if defect > COMPLETENESS_TOL:
            raise ValidationError(f"V^dag V deviates from identity by {defect:.3e}")
        v.setflags(write=False)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.env_dim = env_dim
        self.isometry = v


def apply_matrix(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """sum_k A_k rho A_k^dag on a raw matrix (no wrapping, no validation)."""
    return np.einsum("kij,jl,kml->im", ch._stack, rho, ch._stack.conj())


def complementary_output(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Environment marginal N^c(rho)[k,l] = Tr(A_k rho A_l^dag) on a raw matrix."""
    return np.einsum("aij,jl,bil->ab", ch._stack, rho, ch._stack.conj())


def apply(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    """Send a density operator through the channel."""
    if rho.dim != ch.in_dim:
        raise ValidationError(f"input dim {rho.dim} does not match channel in_dim {ch.in_dim}")
    return DensityOperator(apply_matrix(ch, rho.matrix), (ch.out_dim,))


def identity_channel(d: int = 2) -> KrausChannel:
    return KrausChannel([np.eye(d, dtype=complex)], label=f"identity:d={d}")


def dephasing(p: float) -> KrausChannel:
    """Qubit channel mixing the input with its diagonal part with probability p.

    Kraus pair {sqrt(1-p/2) I, sqrt(p/2) Z}: reproduces the convex-combination
    action exactly while keeping the environment two-dimensional.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing parameter must lie in [0, 1], got {p}")
    eye = np.eye(2, dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    return KrausChannel(
        [np.sqrt(1.0 - p / 2.0) * eye, np.sqrt(p / 2.0) * z],
        label=f"dephasing:p={p:g}",
    )


def erasure(eps: float) -> KrausChannel:
    """Qubit-to-qutrit channel delivering the input with probability 1-eps,
    an orthogonal flag state |e> (basis index 2) otherwise.

    Kraus order {sqrt(eps)|e><0|, sqrt(eps)|e><1|, sqrt(1-eps) embed} is
    chosen so the canonical dilation's environment marginal is literally the
    erasure channel with parameter 1-eps (same flag index).
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValidationError(f"erasure parameter must lie in [0, 1], got {eps}")
    embed = np.zeros((3, 2), dtype=complex)
    embed[0, 0] = 1.0
    embed[1, 1] = 1.0
    flag0 = np.zeros((3, 2), dtype=complex)
    flag0[2, 0] = 1.0
    flag1 = np.zeros((3, 2), dtype=complex)
    flag1[2, 1] = 1.0
    return KrausChannel(
        [np.sqrt(eps) * flag0, np.sqrt(eps) * flag1, np.sqrt(1.0 - eps) * embed],
        label=f"erasure:eps={eps:g}",
    )


def isometric_extension(ch: KrausChannel) -> IsometricExtension:
    """Canonical dilation V = sum_k A_k (x) |k>_E (environment basis = Kraus index)."""
    env = ch.env_dim
    v = np.zeros((ch.out_dim * env, ch.in_dim), dtype=complex)
    for k, a in enumerate(ch.kraus):
        for b in range(ch.out_dim):
            v[b * env + k, :] += a[b, :]
    return IsometricExtension(ch.in_dim, ch.out_dim, env, v)


def complementary(ch: KrausChannel) -> KrausChannel:
    """Channel to the environment of the canonical dilation.

    Kraus operators C_b[k, i] = A_k[b, i], one per output basis vector, so
    that sum_b C_b rho C_b^dag has entries Tr(A_k rho A_l^dag).
    """
    ops = []
    for b in range(ch.out_dim):
        c = np.zeros((ch.env_dim, ch.in_dim), dtype=complex)
        for k, a in enumerate(ch.kraus):
            c[k, :] = a[b, :]
        ops.append(c)
    tag = f"complement({ch.label})" if ch.label else None
    return KrausChannel(ops, label=tag)


def tensor_channel(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Parallel use of two channels; Kraus set {A_i (x) B_j}."""
    cap = max_dim()
    if a.in_dim * b.in_dim > cap or a.out_dim * b.out_dim > cap:
        raise ValidationError(
            f"tensor channel dimensions exceed cap {cap}: "
            f"in {a.in_dim * b.in_dim}, out {a.out_dim * b.out_dim}"
        )
    ops = [np.kron(ka, kb) for ka in a.kraus for kb in b.kraus]
    tag = None
    if a.label and b.label:
        tag = f"{a.label} (x) {b.label}"
    return KrausChannel(ops, label=tag)


def kraus_channel_from_json(payload: dict, label: str | None = None) -> KrausChannel:
    """Build a channel from {"in_dim":..., "out_dim":..., "kraus":[matrix,...]}
    where each matrix is rows of [re, im] pairs."""
    try:
        in_dim = int(payload["in_dim"])
        out_dim = int(payload["out_dim"])
        raw_ops = payload["kraus"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"kraus JSON must have in_dim, out_dim, kraus: {exc}") from exc
    ops = [matrix_from_pairs(rows) for rows in raw_ops]
    for k in ops:
        if k.shape != (out_dim, in_dim):
            raise ValidationError(
                f"kraus JSON declares shape {(out_dim, in_dim)} but found {k.shape}"
            )
    return KrausChannel(ops, label=label)


def kraus_channel_to_json(ch: KrausChannel) -> dict:
    return {
        "in_dim": ch.in_dim,
        "out_dim": ch.out_dim,
        "kraus": [matrix_to_pairs(k) for k in ch.kraus],
    }


def parse_channel_spec(spec: str) -> KrausChannel:
    """Parse ``dephasing:p=0.2``, ``erasure:eps=0.25``, or ``kraus:@file.json``."""
    if ":" not in spec:
        raise ValidationError(f"channel spec {spec!r} must look like name:key=value or kraus:@file")
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name == "kraus":
        if not rest.startswith("@"):
            raise ValidationError("kraus channel spec must reference a file: kraus:@file.json")
        path = rest[1:]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except FileNotFoundError as exc:
            raise ValidationError(f"kraus file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"kraus file {path} is not valid JSON: {exc}") from exc
        return kraus_channel_from_json(payload, label=spec)
    params = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValidationError(f"malformed channel option {item!r} (expected key=value)")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise ValidationError(f"channel option {item!r} is not numeric") from exc
    if name == "dephasing":
        if set(params) != {"p"}:
            raise ValidationError("dephasing channel takes exactly one option: p")
        return dephasing(params["p"])
    if name == "erasure":
        if set(params) != {"eps"}:
            raise ValidationError("erasure channel takes exactly one option: eps")
        return erasure(params["eps"])
    raise ValidationError(f"unknown channel family {name!r} (use dephasing, erasure, or kraus)")
