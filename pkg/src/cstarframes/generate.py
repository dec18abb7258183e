"""Seeded generators for algebra elements, frames and perturbations.

Every generator is deterministic in its seed (see
:func:`cstarframes.sampling.derive_rng`) and re-validates its output against
the predicate it promises.
"""

from __future__ import annotations

import math

import numpy as np

from . import sampling
from .algebra import AlgebraDescriptor, AlgebraElement, is_central, is_unitary
from .errors import HypothesisUnreachable, UnsatisfiableRequest
from .frames import (
    FrameMap,
    MeasureSpace,
    canonical_dual,
    frame_operator,
    order_bounds,
    synthesis_operator,
)
from .module import AdjointableOperator, ModuleElement, module_norm, op_norm

RETRY_BUDGET = 100
PERTURBATION_MODES = ("bessel-difference", "dual-based", "synthesis-norm")


def gen_element(descriptor: AlgebraDescriptor, seed: int, *keys) -> AlgebraElement:
    rng = sampling.derive_rng(seed, *keys)
    return AlgebraElement(descriptor, [sampling.complex_normal(rng, (n, n)) for n in descriptor.block_sizes])


def gen_module_element(descriptor: AlgebraDescriptor, d: int, seed: int, *keys) -> ModuleElement:
    rng = sampling.derive_rng(seed, *keys)
    return ModuleElement(descriptor, d, [sampling.complex_normal(rng, (n, d * n)) for n in descriptor.block_sizes])


def gen_operator(descriptor: AlgebraDescriptor, d_in: int, d_out: int, seed: int, *keys) -> AdjointableOperator:
    rng = sampling.derive_rng(seed, *keys)
    return AdjointableOperator(
        descriptor, d_in, d_out, [sampling.complex_normal(rng, (d_in * n, d_out * n)) for n in descriptor.block_sizes]
    )


def gen_central(descriptor: AlgebraDescriptor, seed: int, low: float = 0.5, high: float = 2.0) -> AlgebraElement:
    """Invertible central element with a distinct random scalar per block."""
    rng = sampling.derive_rng(seed, 0xC)
    k = descriptor.num_blocks
    for _ in range(RETRY_BUDGET):
        mods = rng.uniform(low, high, k)
        phases = rng.uniform(0, 2 * np.pi, k)
        values = mods * np.exp(1j * phases)
        if k == 1 or np.min(np.abs(values[:, None] - values[None, :]) + np.eye(k)) > 1e-3:
            break
    a = descriptor.blockwise_scalar(list(values))
    assert is_central(a)
    return a


def gen_unitary(descriptor: AlgebraDescriptor, seed: int) -> AlgebraElement:
    """Haar-distributed unitary via QR with the phase of ``diag(R)`` removed."""
    rng = sampling.derive_rng(seed, 0xD)
    blocks = []
    for n in descriptor.block_sizes:
        q, r = np.linalg.qr(sampling.complex_normal(rng, (n, n)))
        diag = np.diag(r)
        blocks.append(q * (diag / np.abs(diag))[None, :])
    u = AlgebraElement(descriptor, blocks)
    assert is_unitary(u, 1e-10)
    return u


def gen_space(m: int, seed: int, *keys, low: float = 0.25, high: float = 2.0) -> MeasureSpace:
    rng = sampling.derive_rng(seed, 0x5, *keys)
    return MeasureSpace(rng.uniform(low, high, m))


def gen_map(space: MeasureSpace, descriptor: AlgebraDescriptor, d: int, seed: int, *keys) -> FrameMap:
    """A random map ``Omega -> A^d`` (always Bessel, generally a frame iff ``m >= d``)."""
    rng = sampling.derive_rng(seed, 0x6, *keys)
    blocks = [sampling.complex_normal(rng, (space.m, n, d * n)) for n in descriptor.block_sizes]
    return FrameMap(space, descriptor, d, blocks)


def _power(op_blocks, t):
    """``S^t`` for positive definite Hermitian blocks."""
    out = []
    for s in op_blocks:
        w, v = np.linalg.eigh((s + s.conj().T) / 2)
        out.append((v * w**t) @ v.conj().T)
    return out


def gen_frame(
    descriptor: AlgebraDescriptor,
    d: int,
    m: int,
    seed: int,
    condition_target: float = 4.0,
    space: MeasureSpace | None = None,
    scale: float | None = None,
) -> FrameMap:
    """Random frame with ``upper / lower <= condition_target``.

    A random map ``F`` with frame operator ``S`` is replaced by
    ``S^{-t/2} F`` whose frame operator is ``S^{1-t}``; ``t`` is chosen so
    the condition number drops to the target (``t = 1`` gives a Parseval
    frame).  The result is rescaled so its upper bound is ``scale`` (random
    in ``[0.5, 2]`` when omitted).
    """
    if condition_target < 1:
        raise ValueError("condition_target must be at least 1")
    if m < d:
        raise UnsatisfiableRequest(f"{m} atoms cannot span a rank-{d} module")
    space = gen_space(m, seed) if space is None else space
    if space.m != m:
        raise ValueError("space has the wrong number of atoms")
    rng = sampling.derive_rng(seed, 0x7)
    if scale is None:
        scale = float(rng.uniform(0.5, 2.0))
    for attempt in range(RETRY_BUDGET):
        F = gen_map(space, descriptor, d, seed, attempt)
        S = frame_operator(F)
        eig = np.concatenate([np.linalg.eigvalsh(b) for b in S.blocks])
        lo, hi = float(eig.min()), float(eig.max())
        if lo <= 1e-6 * hi:
            continue
        cond = hi / lo
        t = 0.0 if cond <= condition_target else 1.0 - math.log(condition_target) / math.log(cond)
        if t > 0:
            P = AdjointableOperator(descriptor, d, d, _power(S.blocks, -t / 2))
            F = F.map_vectors(P)
        b = order_bounds(F)
        F = math.sqrt(scale / b.upper) * F
        b = order_bounds(F)
        if b.lower > 0 and b.upper / b.lower <= condition_target * (1 + 1e-9):
            return F
    raise UnsatisfiableRequest(f"no frame with condition {condition_target} after {RETRY_BUDGET} attempts")


def gen_riesz_frame(descriptor, d, seed, condition_target=4.0, space=None, scale=None) -> FrameMap:
    """Riesz-type frame: ``m = d`` atoms with invertible synthesis."""
    return gen_frame(descriptor, d, d, seed, condition_target, space, scale)


def _normalized_map(space, descriptor, d, seed, key):
    D = gen_map(space, descriptor, d, seed, key)
    n = op_norm(synthesis_operator(D))
    return D * (1.0 / n)


def gen_perturbation(F: FrameMap, epsilon: float, mode: str, seed: int) -> FrameMap:
    """Perturb ``F`` by a random map of size ``epsilon``.

    * ``bessel-difference``: ``G = F + D`` with ``||T_D||^2 = N = epsilon^2``
      (requires ``N < A``).
    * ``dual-based``: ``K = F + E`` with ``beta = sum mu ||E|| ||G|| = epsilon``
      against the canonical dual ``G`` (requires ``epsilon < 1``).
    * ``synthesis-norm``: ``G = F + D`` with ``||T_D|| = epsilon``, so the
      strong condition holds with ``alpha = beta = 0``, ``gamma = epsilon``
      (requires ``epsilon < sqrt(A)``).
    """
    if mode not in PERTURBATION_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {PERTURBATION_MODES}")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return F
    A = order_bounds(F).lower
    D = _normalized_map(F.space, F.descriptor, F.d, seed, 0x8)
    if mode == "bessel-difference":
        if not epsilon**2 < A:
            raise HypothesisUnreachable(f"N = {epsilon**2} must be below A = {A}")
        G = F + epsilon * D
        if not order_bounds(G - F).upper < A:
            raise HypothesisUnreachable("perturbation too large after rounding")
        return G
    if mode == "dual-based":
        if not epsilon < 1:
            raise HypothesisUnreachable("beta must be below 1")
        dual = canonical_dual(F)
        w = np.asarray(F.space.weights)
        dn = np.array([module_norm(v) for v in D.vectors])
        gn = np.array([module_norm(v) for v in dual.vectors])
        beta0 = float(np.sum(w * dn * gn))
        return F + (epsilon / beta0) * D
    if not epsilon < math.sqrt(A):
        raise HypothesisUnreachable(f"gamma = {epsilon} must be below sqrt(A) = {math.sqrt(A)}")
    return F + epsilon * D
