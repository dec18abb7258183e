"""Seeded randomness and batched evaluation helpers.

Batches carry a leading sample axis: a batch of ``N`` module elements of
rank ``d`` is a list (one entry per algebra block) of arrays of shape
``(N, n_k, d n_k)``; a batch of ``L^2`` functions on ``m`` atoms has shape
``(N, m, n_k, n_k)`` per block.
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, *keys)``.

    Philox is counter based, so per-trial streams ``derive_rng(seed, t)`` are
    independent of evaluation order.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]])
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def spectral_norms(arr: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a stack ``(..., p, q)``."""
    if arr.shape[-1] == 0 or arr.shape[-2] == 0:
        return np.zeros(arr.shape[:-2])
    return np.linalg.norm(arr, ord=2, axis=(-2, -1))


def alg_norms(blocks) -> np.ndarray:
    """C*-norms of a batch of algebra elements given per block as ``(N, n, n)``."""
    return np.max(np.stack([spectral_norms(b) for b in blocks]), axis=0)


def inner_batch(xs, ys):
    """Batched ``<f, g>`` for module batches."""
    return [x @ np.conj(np.swapaxes(y, -1, -2)) for x, y in zip(xs, ys)]


def module_norms(xs) -> np.ndarray:
    """``||f|| = max_k sigma_max(X^k)`` for each sample."""
    return alg_norms(xs)


def l2_gram(psis, weights):
    """``sum_i mu_i psi_i psi_i^*`` per block for a batch of L^2 functions."""
    w = np.asarray(weights, dtype=float)
    return [np.einsum("i,sixy,sizy->sxz", w, p, np.conj(p)) for p in psis]


def l2_norms(psis, weights) -> np.ndarray:
    return np.sqrt(alg_norms(l2_gram(psis, weights)))


def random_module_batch(rng, descriptor, d, count, unit=True):
    xs = [complex_normal(rng, (count, n, d * n)) for n in descriptor.block_sizes]
    if unit:
        norms = module_norms(xs)
        norms[norms == 0] = 1.0
        xs = [x / norms[:, None, None] for x in xs]
    return xs


def random_l2_batch(rng, descriptor, weights, count, unit=True):
    m = len(weights)
    psis = [complex_normal(rng, (count, m, n, n)) for n in descriptor.block_sizes]
    if unit:
        norms = l2_norms(psis, weights)
        norms[norms == 0] = 1.0
        psis = [p / norms[:, None, None, None] for p in psis]
    return psis


def synthesis_batch(frame_blocks, weights, psis):
    """``T_F psi = sum_i mu_i psi_i F_i`` for each sample."""
    w = np.asarray(weights, dtype=float)
    return [np.einsum("i,sixy,iyz->sxz", w, p, fb) for p, fb in zip(psis, frame_blocks)]


def apply_batch(op_blocks, xs):
    return [x @ m for x, m in zip(xs, op_blocks)]


def single_block_rows(descriptor, d, k, rows):
    """Batch whose samples are zero except for block ``k``.

    ``rows`` has shape ``(N, r, d n_k)`` with ``r <= n_k``; the rows fill the
    top of the block.
    """
    rows = np.asarray(rows, dtype=complex)
    count = rows.shape[0]
    xs = [np.zeros((count, n, d * n), dtype=complex) for n in descriptor.block_sizes]
    xs[k][:, : rows.shape[1], :] = rows
    return xs


def concat_batches(*batches):
    batches = [b for b in batches if b is not None and b[0].shape[0] > 0]
    return [np.concatenate(parts, axis=0) for parts in zip(*batches)]
