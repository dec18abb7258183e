"""Finite-dimensional C*-algebras ``A = M_{n_1}(C) + ... + M_{n_K}(C)``.

Elements are stored block by block as complex ``numpy`` arrays.  Values are
immutable: every operation returns a new element and the underlying arrays
are flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Sequence

import numpy as np

from .errors import DescriptorMismatch, SingularElement
from .tolerances import ALG_TOL, RANK_TOL


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Block structure ``(n_1, ..., n_K)`` of the algebra."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def dim(self) -> int:
        """Complex dimension ``sum n_k^2``."""
        return sum(n * n for n in self.block_sizes)

    def one(self) -> AlgebraElement:
        return AlgebraElement(self, [np.eye(n) for n in self.block_sizes])

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, [np.zeros((n, n)) for n in self.block_sizes])

    def scalar(self, c) -> AlgebraElement:
        return AlgebraElement(self, [c * np.eye(n) for n in self.block_sizes])

    def blockwise_scalar(self, values: Sequence) -> AlgebraElement:
        """Central element ``lambda_1 I + ... + lambda_K I``."""
        if len(values) != self.num_blocks:
            raise ValueError("one scalar per block is required")
        return AlgebraElement(
            self, [v * np.eye(n) for v, n in zip(values, self.block_sizes)]
        )

    def matrix_units(self):
        """Yield the matrix units ``E_ij`` of every block (a linear basis)."""
        for k, n in enumerate(self.block_sizes):
            for i in range(n):
                for j in range(n):
                    blocks = [np.zeros((m, m)) for m in self.block_sizes]
                    blocks[k][i, j] = 1.0
                    yield AlgebraElement(self, blocks)

    def check_same(self, other: AlgebraDescriptor):
        if self != other:
            raise DescriptorMismatch(f"{self.block_sizes} != {other.block_sizes}")


class AlgebraElement:
    """An element of the block algebra described by ``descriptor``."""

    __slots__ = ("descriptor", "blocks")

    def __init__(self, descriptor: AlgebraDescriptor, blocks):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != descriptor.num_blocks:
            raise DescriptorMismatch(
                f"expected {descriptor.num_blocks} blocks, got {len(blocks)}"
            )
        for b, n in zip(blocks, descriptor.block_sizes):
            if b.shape != (n, n):
                raise DescriptorMismatch(f"block of shape {b.shape}, expected {(n, n)}")
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    def __repr__(self):
        return f"AlgebraElement({self.descriptor.block_sizes}, {[b.tolist() for b in self.blocks]})"

    def _binary(self, other, op):
        self.descriptor.check_same(other.descriptor)
        return AlgebraElement(
            self.descriptor, [op(a, b) for a, b in zip(self.blocks, other.blocks)]
        )

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._binary(other, np.add)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self._binary(other, np.subtract)

    def __neg__(self):
        return AlgebraElement(self.descriptor, [-b for b in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self._binary(other, np.matmul)
        if isinstance(other, Number):
            return AlgebraElement(self.descriptor, [other * b for b in self.blocks])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(self.descriptor, [other * b for b in self.blocks])
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return AlgebraElement(self.descriptor, [b / other for b in self.blocks])
        return NotImplemented

    @property
    def H(self) -> AlgebraElement:
        """The involution ``a*``."""
        return adjoint(self)

    def allclose(self, other: AlgebraElement, tol: float = ALG_TOL) -> bool:
        """Entrywise closeness, relative to the larger norm."""
        self.descriptor.check_same(other.descriptor)
        scale = 1.0 + max(alg_norm(self), alg_norm(other))
        return all(
            np.max(np.abs(a - b), initial=0.0) <= tol * scale
            for a, b in zip(self.blocks, other.blocks)
        )


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.descriptor, [b.conj().T for b in a.blocks])


def abs_squared(a: AlgebraElement) -> AlgebraElement:
    """``|a|^2 = a* a``."""
    return adjoint(a) * a


def alg_norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) for b in a.blocks)


def hermitian_part(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.descriptor, [(b + b.conj().T) / 2 for b in a.blocks])


def is_hermitian(a: AlgebraElement, tol: float = ALG_TOL) -> bool:
    scale = tol * (1.0 + alg_norm(a))
    return all(np.max(np.abs(b - b.conj().T), initial=0.0) <= scale for b in a.blocks)


def is_positive(a: AlgebraElement, tol: float = ALG_TOL) -> bool:
    """Decide ``a >= 0`` in the C*-order.

    ``a`` must be Hermitian within ``tol * (1 + ||a||)`` entrywise and every
    block eigenvalue must be at least ``-tol * (1 + ||a||)``.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if not is_hermitian(a, tol):
        return False
    floor = -tol * (1.0 + alg_norm(a))
    return all(
        np.linalg.eigvalsh(b).min() >= floor for b in hermitian_part(a).blocks
    )


def order_leq(a: AlgebraElement, b: AlgebraElement, tol: float = ALG_TOL) -> bool:
    """``a <= b`` iff ``b - a`` is positive."""
    return is_positive(b - a, tol)


def min_singular(a: AlgebraElement) -> float:
    return min(float(np.linalg.svd(b, compute_uv=False)[-1]) for b in a.blocks)


def invert(a: AlgebraElement, tol: float = RANK_TOL) -> AlgebraElement:
    """Blockwise inverse.

    Raises :class:`SingularElement` when some block has smallest singular
    value at most ``tol * ||a||``.
    """
    norm = alg_norm(a)
    for k, b in enumerate(a.blocks):
        smin = np.linalg.svd(b, compute_uv=False)[-1]
        if norm == 0 or smin <= tol * norm:
            raise SingularElement(
                f"block {k} has smallest singular value {smin:.3e} (norm {norm:.3e})"
            )
    return AlgebraElement(a.descriptor, [np.linalg.inv(b) for b in a.blocks])


def inverse_norm(a: AlgebraElement) -> float:
    """``||a^{-1}||``, i.e. the reciprocal of the smallest singular value."""
    return alg_norm(invert(a))


def is_central(a: AlgebraElement, tol: float = ALG_TOL) -> bool:
    """True iff ``a`` commutes with every matrix unit (blockwise scalar)."""
    scale = tol * (1.0 + alg_norm(a))
    for e in a.descriptor.matrix_units():
        comm = a * e - e * a
        if any(np.max(np.abs(c), initial=0.0) > scale for c in comm.blocks):
            return False
    return True


def is_unitary(a: AlgebraElement, tol: float = ALG_TOL) -> bool:
    one = a.descriptor.one()
    return (adjoint(a) * a).allclose(one, tol) and (a * adjoint(a)).allclose(one, tol)


def commutes(a: AlgebraElement, b: AlgebraElement, tol: float = ALG_TOL) -> bool:
    return (a * b).allclose(b * a, tol)
