"""Small named examples with known answers."""

from __future__ import annotations

import math

import numpy as np

from .algebra import AlgebraDescriptor
from .frames import FrameMap, MeasureSpace
from .module import ModuleElement

SCALARS = AlgebraDescriptor((1,))


def _c2(*vectors) -> FrameMap:
    space = MeasureSpace.uniform(len(vectors))
    return FrameMap.from_vectors(
        space, [ModuleElement(SCALARS, 2, [np.array([v], dtype=complex)]) for v in vectors]
    )


def standard_basis_c2() -> FrameMap:
    """``{(1,0), (0,1)}`` in ``C^2`` with unit weights: bounds ``(1, 1)``."""
    return _c2((1, 0), (0, 1))


def three_vector_c2() -> FrameMap:
    """``{(1,0), (0,1), (1/sqrt2, 1/sqrt2)}`` in ``C^2``: ``S = [[1.5, .5], [.5, 1.5]]``, bounds ``(1, 2)``."""
    r = 1 / math.sqrt(2)
    return _c2((1, 0), (0, 1), (r, r))


def pert_d_fixture():
    """``(F, G, K)`` with ``F = G`` the standard basis of ``C^2`` and
    ``K(omega) = F(omega) + (0.1, 0)``: ``alpha = 0.02``, ``beta = 0.2``."""
    F = standard_basis_c2()
    K = _c2((1.1, 0), (0.1, 1))
    return F, F, K


FIXTURES = {
    "standard-basis-c2": lambda: (standard_basis_c2(), None, None),
    "three-vector-c2": lambda: (three_vector_c2(), None, None),
    "pert-d": pert_d_fixture,
}
