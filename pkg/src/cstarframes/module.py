"""The standard left Hilbert module ``A^d`` and its adjointable operators.

Storage convention
------------------
For block ``k`` of size ``n = n_k`` a module element ``f = (f_1, ..., f_d)``
is kept as the ``n x (d n)`` matrix ``[f_1^k | f_2^k | ... | f_d^k]``.
Then

* left multiplication by ``a`` is ``a^k @ X``,
* ``<f, g>^k = X Y^*``,
* an operator with entry matrix ``M_ij`` acts by ``(Tf)_j = sum_i f_i M_ij``,
  i.e. ``X @ M^k`` where ``M^k`` is the ``(d_in n) x (d_out n)`` block matrix.

Right multiplication keeps every operator A-linear.  The flattened model
stacks the rows of every ``X`` into one complex vector; the operator becomes
``blockdiag_k(I_{n_k} kron (M^k)^T)``.  Flattening is used for rank and
spectral decisions only.  The module norm ``||<f, f>||^{1/2}`` is
``max_k sigma_max(X^k)``, which is not the Euclidean norm of the flattened
vector.
"""

from __future__ import annotations

from numbers import Number
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import AlgebraDescriptor, AlgebraElement, alg_norm
from .errors import DimensionMismatch, SingularOperator
from .tolerances import RANK_TOL


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


class ModuleElement:
    """An element of ``A^d``."""

    __slots__ = ("descriptor", "d", "blocks")

    def __init__(self, descriptor: AlgebraDescriptor, d: int, blocks):
        d = int(d)
        if d < 1:
            raise DimensionMismatch("module rank must be positive")
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != descriptor.num_blocks:
            raise DimensionMismatch("one matrix per algebra block is required")
        for b, n in zip(blocks, descriptor.block_sizes):
            if b.shape != (n, d * n):
                raise DimensionMismatch(f"block shape {b.shape}, expected {(n, d * n)}")
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleElement is immutable")

    @classmethod
    def from_coords(cls, coords: Sequence[AlgebraElement]) -> ModuleElement:
        if not coords:
            raise DimensionMismatch("need at least one coordinate")
        desc = coords[0].descriptor
        for c in coords:
            desc.check_same(c.descriptor)
        blocks = [np.hstack([c.blocks[k] for c in coords]) for k in range(desc.num_blocks)]
        return cls(desc, len(coords), blocks)

    @classmethod
    def zero(cls, descriptor: AlgebraDescriptor, d: int) -> ModuleElement:
        return cls(descriptor, d, [np.zeros((n, d * n)) for n in descriptor.block_sizes])

    @classmethod
    def basis(cls, descriptor: AlgebraDescriptor, d: int, j: int) -> ModuleElement:
        """``e_j``: the unit in coordinate ``j`` and zero elsewhere."""
        coords = [descriptor.zero()] * d
        coords[j] = descriptor.one()
        return cls.from_coords(coords)

    @property
    def coords(self) -> list[AlgebraElement]:
        out = []
        for i in range(self.d):
            out.append(
                AlgebraElement(
                    self.descriptor,
                    [b[:, i * n:(i + 1) * n] for b, n in zip(self.blocks, self.descriptor.block_sizes)],
                )
            )
        return out

    def _check(self, other: ModuleElement):
        self.descriptor.check_same(other.descriptor)
        if self.d != other.d:
            raise DimensionMismatch(f"module ranks {self.d} and {other.d} differ")

    def __add__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        self._check(other)
        return ModuleElement(self.descriptor, self.d, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        self._check(other)
        return ModuleElement(self.descriptor, self.d, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ModuleElement(self.descriptor, self.d, [-b for b in self.blocks])

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            self.descriptor.check_same(other.descriptor)
            return ModuleElement(
                self.descriptor, self.d, [a @ x for a, x in zip(other.blocks, self.blocks)]
            )
        if isinstance(other, Number):
            return ModuleElement(self.descriptor, self.d, [other * x for x in self.blocks])
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Number):
            return ModuleElement(self.descriptor, self.d, [other * x for x in self.blocks])
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return ModuleElement(self.descriptor, self.d, [x / other for x in self.blocks])
        return NotImplemented

    def __repr__(self):
        return f"ModuleElement(d={self.d}, blocks={self.descriptor.block_sizes})"


def inner(f: ModuleElement, g: ModuleElement) -> AlgebraElement:
    """``<f, g> = sum_i f_i g_i^*``."""
    f._check(g)
    return AlgebraElement(f.descriptor, [x @ y.conj().T for x, y in zip(f.blocks, g.blocks)])


def module_norm(f: ModuleElement) -> float:
    return float(np.sqrt(alg_norm(inner(f, f))))


class AdjointableOperator:
    """An A-linear map ``A^{d_in} -> A^{d_out}`` given by a matrix over A."""

    __slots__ = ("descriptor", "d_in", "d_out", "blocks")

    def __init__(self, descriptor: AlgebraDescriptor, d_in: int, d_out: int, blocks):
        d_in, d_out = int(d_in), int(d_out)
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != descriptor.num_blocks:
            raise DimensionMismatch("one matrix per algebra block is required")
        for b, n in zip(blocks, descriptor.block_sizes):
            if b.shape != (d_in * n, d_out * n):
                raise DimensionMismatch(
                    f"operator block {b.shape}, expected {(d_in * n, d_out * n)}"
                )
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "d_in", d_in)
        object.__setattr__(self, "d_out", d_out)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AdjointableOperator is immutable")

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[AlgebraElement]]) -> AdjointableOperator:
        """Build from the ``d_in x d_out`` matrix of algebra elements."""
        d_in, d_out = len(entries), len(entries[0])
        desc = entries[0][0].descriptor
        blocks = []
        for k in range(desc.num_blocks):
            blocks.append(np.block([[entries[i][j].blocks[k] for j in range(d_out)] for i in range(d_in)]))
        return cls(desc, d_in, d_out, blocks)

    @classmethod
    def identity(cls, descriptor: AlgebraDescriptor, d: int) -> AdjointableOperator:
        return cls(descriptor, d, d, [np.eye(d * n) for n in descriptor.block_sizes])

    @classmethod
    def zero(cls, descriptor: AlgebraDescriptor, d_in: int, d_out: int) -> AdjointableOperator:
        return cls(
            descriptor, d_in, d_out, [np.zeros((d_in * n, d_out * n)) for n in descriptor.block_sizes]
        )

    @classmethod
    def diagonal(cls, a: AlgebraElement, d: int) -> AdjointableOperator:
        """``f -> (f_1 a, ..., f_d a)``; equals left multiplication when ``a`` is central."""
        return cls(a.descriptor, d, d, [np.kron(np.eye(d), b) for b in a.blocks])

    @property
    def entries(self) -> list[list[AlgebraElement]]:
        sizes = self.descriptor.block_sizes
        return [
            [
                AlgebraElement(
                    self.descriptor,
                    [b[i * n:(i + 1) * n, j * n:(j + 1) * n] for b, n in zip(self.blocks, sizes)],
                )
                for j in range(self.d_out)
            ]
            for i in range(self.d_in)
        ]

    @property
    def H(self) -> AdjointableOperator:
        return adjoint_op(self)

    def __call__(self, f: ModuleElement) -> ModuleElement:
        return apply(self, f)

    def _same_shape(self, other):
        self.descriptor.check_same(other.descriptor)
        if (self.d_in, self.d_out) != (other.d_in, other.d_out):
            raise DimensionMismatch("operator shapes differ")

    def __add__(self, other):
        if not isinstance(other, AdjointableOperator):
            return NotImplemented
        self._same_shape(other)
        return AdjointableOperator(
            self.descriptor, self.d_in, self.d_out, [a + b for a, b in zip(self.blocks, other.blocks)]
        )

    def __sub__(self, other):
        if not isinstance(other, AdjointableOperator):
            return NotImplemented
        self._same_shape(other)
        return AdjointableOperator(
            self.descriptor, self.d_in, self.d_out, [a - b for a, b in zip(self.blocks, other.blocks)]
        )

    def __neg__(self):
        return AdjointableOperator(self.descriptor, self.d_in, self.d_out, [-b for b in self.blocks])

    def __mul__(self, other):
        if isinstance(other, Number):
            return AdjointableOperator(
                self.descriptor, self.d_in, self.d_out, [other * b for b in self.blocks]
            )
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        """``(S @ T)(f) = S(T(f))``."""
        if not isinstance(other, AdjointableOperator):
            return NotImplemented
        self.descriptor.check_same(other.descriptor)
        if other.d_out != self.d_in:
            raise DimensionMismatch(f"cannot compose {self.d_in}-input after {other.d_out}-output")
        return AdjointableOperator(
            self.descriptor, other.d_in, self.d_out, [t @ s for s, t in zip(self.blocks, other.blocks)]
        )

    def allclose(self, other: AdjointableOperator, tol: float) -> bool:
        """``||self - other|| <= tol * (1 + max norm)``."""
        diff = op_norm(self - other)
        return diff <= tol * (1.0 + max(op_norm(self), op_norm(other)))

    def __repr__(self):
        return f"AdjointableOperator(d_in={self.d_in}, d_out={self.d_out}, blocks={self.descriptor.block_sizes})"


def apply(T: AdjointableOperator, f: ModuleElement) -> ModuleElement:
    T.descriptor.check_same(f.descriptor)
    if T.d_in != f.d:
        raise DimensionMismatch(f"operator expects rank {T.d_in}, element has rank {f.d}")
    return ModuleElement(f.descriptor, T.d_out, [x @ m for x, m in zip(f.blocks, T.blocks)])


def adjoint_op(T: AdjointableOperator) -> AdjointableOperator:
    """The adjoint: entry ``(j, i)`` of ``T*`` is ``M_ij^*``."""
    return AdjointableOperator(T.descriptor, T.d_out, T.d_in, [m.conj().T for m in T.blocks])


def flatten_vec(f: ModuleElement) -> np.ndarray:
    return np.concatenate([x.reshape(-1) for x in f.blocks])


def unflatten_vec(v, descriptor: AlgebraDescriptor, d: int) -> ModuleElement:
    v = np.asarray(v, dtype=complex)
    blocks, pos = [], 0
    for n in descriptor.block_sizes:
        size = n * d * n
        blocks.append(v[pos:pos + size].reshape(n, d * n))
        pos += size
    if pos != v.size:
        raise DimensionMismatch(f"vector of length {v.size}, expected {pos}")
    return ModuleElement(descriptor, d, blocks)


def flatten_op(T: AdjointableOperator) -> np.ndarray:
    """Matrix ``F`` with ``flatten_vec(T f) = F @ flatten_vec(f)``."""
    return scipy.linalg.block_diag(
        *[np.kron(np.eye(n), m.T) for n, m in zip(T.descriptor.block_sizes, T.blocks)]
    )


def _singular_values(m):
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def op_norm(T: AdjointableOperator) -> float:
    """Operator norm, i.e. the largest singular value of the flattened matrix."""
    return max((float(_singular_values(m).max(initial=0.0)) for m in T.blocks), default=0.0)


def min_singular(T: AdjointableOperator) -> float:
    """Largest ``m`` with ``||T f|| >= m ||f||`` for every ``f``.

    This is the smallest singular value on the input side; it is zero as
    soon as some block has more input than output dimensions.
    """
    best = np.inf
    for n, m in zip(T.descriptor.block_sizes, T.blocks):
        rows, cols = m.shape
        if rows > cols:
            return 0.0
        best = min(best, float(_singular_values(m)[rows - 1]))
    return best


def is_bounded_below(T: AdjointableOperator, tol: float = RANK_TOL) -> tuple[bool, float]:
    """``(verdict, m)`` with ``m = min_singular(T)`` and verdict ``m > tol ||T||``."""
    m = min_singular(T)
    return bool(m > tol * op_norm(T)), m


def is_surjective(T: AdjointableOperator, tol: float = RANK_TOL) -> bool:
    """Full row rank of every block of the (transposed) flattened matrix.

    Decided from numerical rank directly rather than from ``T*`` so that the
    equivalence with ``is_bounded_below(T*)`` is a genuine cross-check.
    """
    norm = op_norm(T)
    if norm == 0.0:
        return False
    for n, m in zip(T.descriptor.block_sizes, T.blocks):
        if np.linalg.matrix_rank(m, tol=tol * norm) != m.shape[1]:
            return False
    return True


def is_injective(T: AdjointableOperator, tol: float = RANK_TOL) -> bool:
    return is_bounded_below(T, tol)[0]


def invert_op(T: AdjointableOperator, tol: float = RANK_TOL) -> AdjointableOperator:
    if T.d_in != T.d_out:
        raise SingularOperator(f"non-square operator {T.d_in} -> {T.d_out}")
    ok, m = is_bounded_below(T, tol)
    if not ok:
        raise SingularOperator(f"smallest singular value {m:.3e} below tolerance")
    return AdjointableOperator(T.descriptor, T.d_in, T.d_out, [np.linalg.inv(b) for b in T.blocks])


def norming_vector(T: AdjointableOperator, which: str = "max") -> ModuleElement:
    """A unit-norm ``f`` with ``||T f|| = ||T||`` (``which='max'``) or
    ``||T f|| = min_singular(T)`` (``which='min'``).

    The witness is rank one and supported in a single block.
    """
    desc, d = T.descriptor, T.d_in
    best_k, best_val, best_vec = None, None, None
    for k, m in enumerate(T.blocks):
        # rows of X are acted on from the right: singular vectors of m^H
        u, s, _ = np.linalg.svd(m, full_matrices=True)
        rows, cols = m.shape
        if which == "max":
            val, vec = (s[0], u[:, 0]) if s.size else (0.0, u[:, 0])
            better = best_val is None or val > best_val
        elif which == "min":
            if rows > cols:
                val, vec = 0.0, u[:, -1]
            else:
                val, vec = s[rows - 1], u[:, rows - 1]
            better = best_val is None or val < best_val
        else:
            raise ValueError("which must be 'max' or 'min'")
        if better:
            best_k, best_val, best_vec = k, val, vec
    blocks = [np.zeros((n, d * n), dtype=complex) for n in desc.block_sizes]
    # row vector x with ||x m|| extremal is the conjugate of a left singular vector
    blocks[best_k][0, :] = best_vec.conj()
    return ModuleElement(desc, d, blocks)


def kernel_projector(T: AdjointableOperator, tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto ``ker T`` in the flattened model."""
    flat = flatten_op(T)
    norm = op_norm(T)
    basis = scipy.linalg.null_space(flat, rcond=tol if norm > 0 else 0.0)
    if norm == 0.0:
        return np.eye(flat.shape[1], dtype=complex)
    return basis @ basis.conj().T


def range_projector(T: AdjointableOperator, tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto the range of ``T`` in the flattened model."""
    flat = flatten_op(T)
    if op_norm(T) == 0.0:
        return np.zeros((flat.shape[0], flat.shape[0]), dtype=complex)
    basis = scipy.linalg.orth(flat, rcond=tol)
    return basis @ basis.conj().T
