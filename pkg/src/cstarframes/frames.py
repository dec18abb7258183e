"""Continuous frames over finite weighted measure spaces.

Integrals over ``(Omega, mu)`` are finite weighted sums.  The space
``L^2(Omega, A)`` is identified with ``A^m`` through the unitary
``phi -> (sqrt(mu_i) phi_i)_i``; in these *weighted coordinates* the
synthesis operator of ``F`` is the ``m x d`` matrix with rows
``sqrt(mu_i) F(omega_i)``, and the analysis operator is its adjoint.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from numbers import Number
from typing import Sequence

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement
from .errors import (
    DimensionMismatch,
    NotAFrame,
    SpaceMismatch,
    TooManyAtoms,
)
from .module import (
    AdjointableOperator,
    ModuleElement,
    flatten_vec,
    invert_op,
    is_injective,
    is_surjective,
    min_singular,
    op_norm,
)
from . import sampling
from .tolerances import ALG_TOL, RANK_TOL, VERDICT_TOL


@dataclass(frozen=True)
class MeasureSpace:
    """Finitely many atoms with positive weights."""

    weights: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise ValueError("a measure space needs at least one atom")
        if any(not x > 0 for x in w):
            raise ValueError("atom weights must be positive")
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(w):
                raise ValueError("one label per atom is required")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def uniform(cls, m: int, weight: float = 1.0) -> MeasureSpace:
        return cls((weight,) * m)

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.weights))

    def check_same(self, other: MeasureSpace):
        if self.weights != other.weights:
            raise SpaceMismatch("frames live on different measure spaces")


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


class L2Element:
    """A function ``phi: Omega -> A``; ``values[k]`` has shape ``(m, n_k, n_k)``."""

    __slots__ = ("space", "descriptor", "values")

    def __init__(self, space: MeasureSpace, descriptor: AlgebraDescriptor, values):
        values = tuple(_frozen(v) for v in values)
        for v, n in zip(values, descriptor.block_sizes):
            if v.shape != (space.m, n, n):
                raise DimensionMismatch(f"L2 block shape {v.shape}, expected {(space.m, n, n)}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("L2Element is immutable")

    @classmethod
    def from_values(cls, space: MeasureSpace, values: Sequence[AlgebraElement]) -> L2Element:
        desc = values[0].descriptor
        if len(values) != space.m:
            raise DimensionMismatch("one value per atom is required")
        blocks = [np.stack([v.blocks[k] for v in values]) for k in range(desc.num_blocks)]
        return cls(space, desc, blocks)

    @classmethod
    def zero(cls, space: MeasureSpace, descriptor: AlgebraDescriptor) -> L2Element:
        return cls(space, descriptor, [np.zeros((space.m, n, n)) for n in descriptor.block_sizes])

    @classmethod
    def indicator(cls, space, descriptor, i, value=None) -> L2Element:
        value = descriptor.one() if value is None else value
        vals = [descriptor.zero()] * space.m
        vals[i] = value
        return cls.from_values(space, vals)

    def __getitem__(self, i) -> AlgebraElement:
        return AlgebraElement(self.descriptor, [v[i] for v in self.values])

    def __add__(self, other):
        self.space.check_same(other.space)
        return L2Element(self.space, self.descriptor, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        self.space.check_same(other.space)
        return L2Element(self.space, self.descriptor, [a - b for a, b in zip(self.values, other.values)])

    def __mul__(self, other):
        if isinstance(other, Number):
            return L2Element(self.space, self.descriptor, [other * v for v in self.values])
        return NotImplemented

    __rmul__ = __mul__

    def to_module(self) -> ModuleElement:
        """Weighted coordinates ``(sqrt(mu_i) phi_i)_i`` as an element of ``A^m``."""
        s = self.space.sqrt_weights
        blocks = [np.hstack(list(s[:, None, None] * v)) for v in self.values]
        return ModuleElement(self.descriptor, self.space.m, blocks)

    @classmethod
    def from_module(cls, space: MeasureSpace, g: ModuleElement) -> L2Element:
        if g.d != space.m:
            raise DimensionMismatch("module rank must equal the number of atoms")
        s = space.sqrt_weights
        vals = []
        for x, n in zip(g.blocks, g.descriptor.block_sizes):
            v = x.reshape(n, space.m, n).transpose(1, 0, 2)
            vals.append(v / s[:, None, None])
        return cls(space, g.descriptor, vals)


def l2_inner(phi: L2Element, psi: L2Element) -> AlgebraElement:
    """``<phi, psi> = sum_i mu_i phi_i psi_i^*``."""
    phi.space.check_same(psi.space)
    phi.descriptor.check_same(psi.descriptor)
    w = np.asarray(phi.space.weights)
    return AlgebraElement(
        phi.descriptor,
        [np.einsum("i,ixy,izy->xz", w, a, np.conj(b)) for a, b in zip(phi.values, psi.values)],
    )


def l2_norm(phi: L2Element) -> float:
    from .algebra import alg_norm

    return float(np.sqrt(alg_norm(l2_inner(phi, phi))))


class FrameMap:
    """A family ``F: Omega -> A^d``.

    ``blocks[k]`` has shape ``(m, n_k, d n_k)``: slice ``i`` is the block-``k``
    matrix of ``F(omega_i)``.  Nothing about frame bounds is assumed.
    """

    __slots__ = ("space", "descriptor", "d", "blocks")

    def __init__(self, space: MeasureSpace, descriptor: AlgebraDescriptor, d: int, blocks):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != descriptor.num_blocks:
            raise DimensionMismatch("one array per algebra block is required")
        for b, n in zip(blocks, descriptor.block_sizes):
            if b.shape != (space.m, n, d * n):
                raise DimensionMismatch(f"frame block shape {b.shape}, expected {(space.m, n, d * n)}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("FrameMap is immutable")

    @classmethod
    def from_vectors(cls, space: MeasureSpace, vectors: Sequence[ModuleElement]) -> FrameMap:
        if len(vectors) != space.m:
            raise DimensionMismatch(f"{len(vectors)} vectors for {space.m} atoms")
        v0 = vectors[0]
        for v in vectors:
            v0.descriptor.check_same(v.descriptor)
            if v.d != v0.d:
                raise DimensionMismatch("all vectors must have the same rank")
        blocks = [np.stack([v.blocks[k] for v in vectors]) for k in range(v0.descriptor.num_blocks)]
        return cls(space, v0.descriptor, v0.d, blocks)

    @classmethod
    def from_synthesis(cls, space: MeasureSpace, T: AdjointableOperator) -> FrameMap:
        """Inverse of :func:`synthesis_operator`."""
        if T.d_in != space.m:
            raise DimensionMismatch("synthesis operator must have one input per atom")
        s = space.sqrt_weights
        blocks = [
            m.reshape(space.m, n, T.d_out * n) / s[:, None, None]
            for m, n in zip(T.blocks, T.descriptor.block_sizes)
        ]
        return cls(space, T.descriptor, T.d_out, blocks)

    @classmethod
    def standard_basis(cls, descriptor: AlgebraDescriptor, d: int, space: MeasureSpace | None = None) -> FrameMap:
        space = MeasureSpace.uniform(d) if space is None else space
        if space.m != d:
            raise DimensionMismatch("the standard basis needs exactly d atoms")
        return cls.from_vectors(space, [ModuleElement.basis(descriptor, d, j) for j in range(d)])

    @classmethod
    def zero(cls, space, descriptor, d) -> FrameMap:
        return cls(space, descriptor, d, [np.zeros((space.m, n, d * n)) for n in descriptor.block_sizes])

    @property
    def m(self) -> int:
        return self.space.m

    @property
    def vectors(self) -> list[ModuleElement]:
        return [ModuleElement(self.descriptor, self.d, [b[i] for b in self.blocks]) for i in range(self.m)]

    def __getitem__(self, i) -> ModuleElement:
        return ModuleElement(self.descriptor, self.d, [b[i] for b in self.blocks])

    def _check(self, other: FrameMap):
        self.space.check_same(other.space)
        self.descriptor.check_same(other.descriptor)
        if self.d != other.d:
            raise DimensionMismatch("frames act on modules of different rank")

    def __add__(self, other):
        if not isinstance(other, FrameMap):
            return NotImplemented
        self._check(other)
        return FrameMap(self.space, self.descriptor, self.d, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if not isinstance(other, FrameMap):
            return NotImplemented
        self._check(other)
        return FrameMap(self.space, self.descriptor, self.d, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return FrameMap(self.space, self.descriptor, self.d, [-b for b in self.blocks])

    def __rmul__(self, other):
        if isinstance(other, AlgebraElement):
            return scale_frame(other, self)
        if isinstance(other, Number):
            return FrameMap(self.space, self.descriptor, self.d, [other * b for b in self.blocks])
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Number):
            return FrameMap(self.space, self.descriptor, self.d, [other * b for b in self.blocks])
        return NotImplemented

    def map_vectors(self, T: AdjointableOperator) -> FrameMap:
        """``omega -> T(F(omega))``."""
        self.descriptor.check_same(T.descriptor)
        if T.d_in != self.d:
            raise DimensionMismatch("operator rank does not match the frame")
        return FrameMap(self.space, self.descriptor, T.d_out, [b @ m for b, m in zip(self.blocks, T.blocks)])

    def allclose(self, other: FrameMap, tol: float = ALG_TOL) -> bool:
        self._check(other)
        scale = 1.0 + max(np.max(np.abs(b)) for b in self.blocks + other.blocks)
        return all(np.max(np.abs(a - b)) <= tol * scale for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"FrameMap(m={self.m}, d={self.d}, blocks={self.descriptor.block_sizes})"


@dataclass(frozen=True)
class FrameBounds:
    """A pair of frame-type constants.

    ``semantics`` is ``"order"`` (``A<f,f> <= <Sf,f> <= B<f,f>`` in the
    C*-order) or ``"norm"`` (the same sandwich after taking norms).
    """

    lower: float
    upper: float
    semantics: str

    def __post_init__(self):
        if self.semantics not in ("order", "norm"):
            raise ValueError("semantics must be 'order' or 'norm'")
        if np.isfinite(self.lower) and np.isfinite(self.upper) and self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def as_dict(self):
        return {"lower": float(self.lower), "upper": float(self.upper), "semantics": self.semantics}


def _check_compatible(F: FrameMap, f: ModuleElement):
    F.descriptor.check_same(f.descriptor)
    if F.d != f.d:
        raise DimensionMismatch(f"frame acts on rank {F.d}, element has rank {f.d}")


def synthesis_apply(F: FrameMap, phi: L2Element) -> ModuleElement:
    """``T_F phi = sum_i mu_i phi(omega_i) F(omega_i)``."""
    F.space.check_same(phi.space)
    F.descriptor.check_same(phi.descriptor)
    w = np.asarray(F.space.weights)
    blocks = [np.einsum("i,ixy,iyz->xz", w, p, b) for p, b in zip(phi.values, F.blocks)]
    return ModuleElement(F.descriptor, F.d, blocks)


def analysis_apply(F: FrameMap, f: ModuleElement) -> L2Element:
    """``(T_F^* f)(omega) = <f, F(omega)>``."""
    _check_compatible(F, f)
    vals = [np.einsum("xz,iyz->ixy", x, np.conj(b)) for x, b in zip(f.blocks, F.blocks)]
    return L2Element(F.space, F.descriptor, vals)


def synthesis_operator(F: FrameMap) -> AdjointableOperator:
    """``T_F`` in weighted coordinates, as an operator ``A^m -> A^d``."""
    s = F.space.sqrt_weights
    blocks = [
        (s[:, None, None] * b).reshape(F.m * n, F.d * n)
        for b, n in zip(F.blocks, F.descriptor.block_sizes)
    ]
    return AdjointableOperator(F.descriptor, F.m, F.d, blocks)


def analysis_operator(F: FrameMap) -> AdjointableOperator:
    return synthesis_operator(F).H


def frame_operator(F: FrameMap) -> AdjointableOperator:
    """``S_F = T_F T_F^*``."""
    T = synthesis_operator(F)
    return T @ T.H


def order_bounds(F: FrameMap) -> FrameBounds:
    """Optimal constants with ``A I <= S_F <= B I`` (extreme eigenvalues)."""
    lo, hi = np.inf, 0.0
    for m in frame_operator(F).blocks:
        ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
        lo, hi = min(lo, ev[0]), max(hi, ev[-1])
    lo = max(float(lo), 0.0)
    hi = max(float(hi), lo)
    return FrameBounds(lo, hi, "order")


def is_frame(F: FrameMap, tol: float = RANK_TOL) -> bool:
    """Positive lower order bound, decided relative to the upper bound."""
    b = order_bounds(F)
    return b.upper > 0 and b.lower > tol * b.upper


def bessel_bound(F: FrameMap) -> float:
    return order_bounds(F).upper


@dataclass
class NormCheckReport:
    """Outcome of sampling ``A ||<f,f>|| <= ||<S f, f>|| <= B ||<f,f>||``."""

    lower: float
    upper: float
    samples: int
    seed: int
    min_ratio: float
    max_ratio: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self):
        return {
            "lower": float(self.lower),
            "upper": float(self.upper),
            "samples": self.samples,
            "seed": self.seed,
            "min_ratio": float(self.min_ratio),
            "max_ratio": float(self.max_ratio),
            "violations": self.violations,
        }


def structured_module_samples(descriptor, d, op_blocks=None):
    """Coordinate directions plus rank-one eigen-directions of Hermitian
    operator blocks (if given), each of unit module norm."""
    parts = []
    for j in range(d):
        e = ModuleElement.basis(descriptor, d, j)
        parts.append([b[None] for b in e.blocks])
    if op_blocks is not None:
        for k, m in enumerate(op_blocks):
            _, vecs = np.linalg.eigh((m + m.conj().T) / 2)
            rows = vecs.T.conj()[:, None, :]
            parts.append(sampling.single_block_rows(descriptor, d, k, rows))
    return sampling.concat_batches(*parts)


def sandwich_ratios(op_blocks, xs):
    """``||<S f, f>|| / ||<f, f>||`` for a module batch."""
    num = sampling.alg_norms(sampling.inner_batch(sampling.apply_batch(op_blocks, xs), xs))
    den = sampling.alg_norms(sampling.inner_batch(xs, xs))
    return num / den


def norm_bounds_check(
    F: FrameMap, A: float, B: float, trials: int = 1000, seed: int = 0, tol: float = VERDICT_TOL
) -> NormCheckReport:
    """Search for violations of the norm sandwich with constants ``A, B``.

    Samples ``trials`` random unit vectors plus coordinate directions and
    the eigen-directions of ``S_F``; the latter attain the extreme ratios, so
    bounds outside the order bounds are always caught.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    S = frame_operator(F)
    rng = sampling.derive_rng(seed)
    xs = sampling.concat_batches(
        structured_module_samples(F.descriptor, F.d, S.blocks),
        sampling.random_module_batch(rng, F.descriptor, F.d, trials),
    )
    ratios = sandwich_ratios(S.blocks, xs)
    slack = tol * max(1.0, abs(B))
    bad = np.nonzero((ratios < A - slack) | (ratios > B + slack))[0]
    violations = []
    for idx in bad[:5]:
        f = ModuleElement(F.descriptor, F.d, [x[idx] for x in xs])
        violations.append(
            {
                "ratio": float(ratios[idx]),
                "side": "lower" if ratios[idx] < A - slack else "upper",
                "witness": [[float(z.real), float(z.imag)] for z in flatten_vec(f)],
            }
        )
    if len(bad) > 5:
        violations.append({"truncated": int(len(bad) - 5)})
    return NormCheckReport(
        lower=A,
        upper=B,
        samples=int(ratios.size),
        seed=seed,
        min_ratio=float(ratios.min()),
        max_ratio=float(ratios.max()),
        violations=violations,
    )


def norm_bounds_estimate(F: FrameMap, trials: int = 1000, seed: int = 0) -> FrameBounds:
    """Empirically tightest norm-sandwich constants (norm semantics).

    Eigen-direction samples attain the extreme eigenvalues of ``S_F``, and
    no ``f`` can leave ``[lambda_min, lambda_max]``, so over block matrix
    algebras the estimate coincides with :func:`order_bounds`.
    """
    rep = norm_bounds_check(F, 0.0, math.inf, trials, seed)
    return FrameBounds(max(rep.min_ratio, 0.0), rep.max_ratio, "norm")


def canonical_dual(F: FrameMap, tol: float = RANK_TOL) -> FrameMap:
    """``omega -> S_F^{-1} F(omega)``."""
    if not is_frame(F, tol):
        raise NotAFrame("the canonical dual needs a positive lower frame bound")
    return F.map_vectors(invert_op(frame_operator(F), tol))


def dual_defect(F: FrameMap, G: FrameMap) -> float:
    """``||T_F T_G^* - I||``."""
    F._check(G)
    R = synthesis_operator(F) @ analysis_operator(G)
    return op_norm(R - AdjointableOperator.identity(F.descriptor, F.d))


def is_dual_pair(F: FrameMap, G: FrameMap, tol: float = RANK_TOL) -> bool:
    """``f = sum mu <f, G(omega)> F(omega)`` for all ``f``."""
    return dual_defect(F, G) <= tol


def is_riesz_type(F: FrameMap, tol: float = RANK_TOL) -> bool:
    """A frame whose analysis operator is onto."""
    if not is_frame(F, tol):
        raise NotAFrame("Riesz-type is only defined for frames")
    return is_surjective(analysis_operator(F), tol)


def riesz_type_or_false(F: FrameMap, tol: float = RANK_TOL) -> bool:
    """Like :func:`is_riesz_type` but returns False for non-frames."""
    return is_frame(F, tol) and is_surjective(analysis_operator(F), tol)


def is_mu_complete(F: FrameMap, tol: float = RANK_TOL) -> bool:
    """``<f, F(omega)> = 0`` for every atom only when ``f = 0``."""
    return is_injective(analysis_operator(F), tol)


def scale_frame(a: AlgebraElement, F: FrameMap) -> FrameMap:
    """``omega -> a F(omega)``."""
    F.descriptor.check_same(a.descriptor)
    return FrameMap(F.space, F.descriptor, F.d, [ab @ b for ab, b in zip(a.blocks, F.blocks)])


def restricted_synthesis(F: FrameMap, subset: Sequence[int]) -> AdjointableOperator:
    """Synthesis operator of ``F`` restricted to functions supported on ``subset``."""
    T = synthesis_operator(F)
    blocks = []
    for m, n in zip(T.blocks, F.descriptor.block_sizes):
        rows = np.concatenate([np.arange(i * n, (i + 1) * n) for i in subset])
        blocks.append(m[rows])
    return AdjointableOperator(F.descriptor, len(subset), F.d, blocks)


@dataclass
class RieszBasisReport:
    mu_complete: bool
    lower: float
    upper: float
    subsets_checked: int
    min_lower: float
    max_upper: float
    sampled_min_ratio: float
    sampled_max_ratio: float
    passed: bool
    riesz_type: bool
    agrees: bool

    def as_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in self.__dict__.items()}


def riesz_basis_check(
    F: FrameMap,
    A: float | None = None,
    B: float | None = None,
    tol: float = RANK_TOL,
    subsets: Sequence[Sequence[int]] | None = None,
    trials: int = 200,
    seed: int = 0,
    max_atoms: int = 20,
) -> RieszBasisReport:
    """Check the continuous Riesz basis conditions directly.

    For each nonempty subset ``Omega_1`` the best constants of
    ``A ||phi 1_{Omega_1}|| <= ||T_F(phi 1_{Omega_1})|| <= B ||phi 1_{Omega_1}||``
    are the extreme singular values of the restricted synthesis operator.
    All subsets are enumerated when ``m <= max_atoms``.  Random ``phi`` on
    random subsets are evaluated as an independent check.  With ``A`` and
    ``B`` omitted the optimal constants are used and the verdict asks for a
    positive lower constant.
    """
    m = F.m
    if subsets is None:
        if m > max_atoms:
            raise TooManyAtoms(f"{m} atoms; pass an explicit list of subsets")
        subsets = [c for r in range(1, m + 1) for c in itertools.combinations(range(m), r)]
    mu_complete = is_mu_complete(F, tol)
    lows, highs = [], []
    for sub in subsets:
        R = restricted_synthesis(F, sub)
        lows.append(min_singular(R))
        highs.append(op_norm(R))
    min_lower, max_upper = float(min(lows)), float(max(highs))

    rng = sampling.derive_rng(seed)
    sub_idx = rng.integers(0, len(subsets), size=trials)
    psis = sampling.random_l2_batch(rng, F.descriptor, F.space.weights, trials, unit=False)
    mask = np.zeros((trials, m))
    for t, j in enumerate(sub_idx):
        mask[t, list(subsets[j])] = 1.0
    psis = [p * mask[:, :, None, None] for p in psis]
    num = sampling.module_norms(sampling.synthesis_batch(F.blocks, F.space.weights, psis))
    den = sampling.l2_norms(psis, F.space.weights)
    ratios = num / den
    smin, smax = float(ratios.min()), float(ratios.max())

    scale = max(1.0, max_upper)
    if A is None or B is None:
        lo_ok = min_lower > tol * scale
        A_used, B_used = min_lower, max_upper
        hi_ok = True
    else:
        lo_ok = min_lower >= A - VERDICT_TOL * scale and A > 0
        hi_ok = max_upper <= B + VERDICT_TOL * scale
        A_used, B_used = A, B
    # sampled ratios can only land inside the exact extreme values
    consistent = smin >= min_lower - VERDICT_TOL * scale and smax <= max_upper + VERDICT_TOL * scale
    passed = bool(mu_complete and lo_ok and hi_ok and consistent)
    rt = riesz_type_or_false(F, tol)
    return RieszBasisReport(
        mu_complete=mu_complete,
        lower=float(A_used),
        upper=float(B_used),
        subsets_checked=len(subsets),
        min_lower=min_lower,
        max_upper=max_upper,
        sampled_min_ratio=smin,
        sampled_max_ratio=smax,
        passed=passed,
        riesz_type=rt,
        agrees=passed == rt,
    )
