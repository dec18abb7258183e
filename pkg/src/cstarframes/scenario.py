"""JSON persistence for scenarios.

Complex numbers are stored as ``[re, im]`` pairs.  ``json`` writes floats
with their shortest round-tripping ``repr``, so save -> load -> save is
byte-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement
from .errors import DescriptorMismatch, DimensionMismatch, SpaceMismatch
from .frames import FrameMap, MeasureSpace
from .module import AdjointableOperator, ModuleElement
from .perturbation import PerturbationConstants

SCHEMA = "cstarframes.scenario/1"


class ScenarioFormatError(ValueError):
    """Malformed scenario JSON."""


def _c2j(z) -> list:
    return [float(z.real), float(z.imag)]


def _mat2j(m) -> list:
    return [[_c2j(z) for z in row] for row in np.asarray(m)]


def _j2mat(data, shape=None) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ScenarioFormatError("matrix entries must be [re, im] pairs")
    out = np.empty(arr.shape[:-1], dtype=complex)
    out.real, out.imag = arr[..., 0], arr[..., 1]  # keeps signed zeros
    if shape is not None and out.shape != shape:
        raise ScenarioFormatError(f"matrix of shape {out.shape}, expected {shape}")
    return out


def descriptor_to_json(desc: AlgebraDescriptor) -> list:
    return list(desc.block_sizes)


def descriptor_from_json(data) -> AlgebraDescriptor:
    if not isinstance(data, list) or not all(isinstance(n, int) for n in data):
        raise ScenarioFormatError("descriptor must be a list of block sizes")
    return AlgebraDescriptor(tuple(data))


def element_to_json(a: AlgebraElement) -> dict:
    return {"blocks": [_mat2j(b) for b in a.blocks]}


def element_from_json(data, desc: AlgebraDescriptor) -> AlgebraElement:
    blocks = data["blocks"]
    if len(blocks) != desc.num_blocks:
        raise DescriptorMismatch("wrong number of blocks")
    return AlgebraElement(desc, [_j2mat(b, (n, n)) for b, n in zip(blocks, desc.block_sizes)])


def module_to_json(f: ModuleElement) -> dict:
    return {"d": f.d, "coords": [element_to_json(c) for c in f.coords]}


def module_from_json(data, desc: AlgebraDescriptor) -> ModuleElement:
    coords = [element_from_json(c, desc) for c in data["coords"]]
    if len(coords) != data["d"]:
        raise DimensionMismatch("coordinate count does not match d")
    return ModuleElement.from_coords(coords)


def operator_to_json(T: AdjointableOperator) -> dict:
    return {
        "d_in": T.d_in,
        "d_out": T.d_out,
        "entries": [[element_to_json(e) for e in row] for row in T.entries],
    }


def operator_from_json(data, desc: AlgebraDescriptor) -> AdjointableOperator:
    entries = [[element_from_json(e, desc) for e in row] for row in data["entries"]]
    T = AdjointableOperator.from_entries(entries)
    if (T.d_in, T.d_out) != (data["d_in"], data["d_out"]):
        raise DimensionMismatch("operator shape does not match d_in/d_out")
    return T


def space_to_json(space: MeasureSpace) -> dict:
    out = {"weights": [float(w) for w in space.weights]}
    if space.labels is not None:
        out["labels"] = list(space.labels)
    return out


def space_from_json(data) -> MeasureSpace:
    labels = data.get("labels")
    return MeasureSpace(np.asarray(data["weights"], dtype=float), None if labels is None else tuple(labels))


def frame_to_json(F: FrameMap) -> dict:
    return {"d": F.d, "vectors": [module_to_json(v) for v in F.vectors]}


def frame_from_json(data, desc: AlgebraDescriptor, space: MeasureSpace) -> FrameMap:
    vectors = [module_from_json(v, desc) for v in data["vectors"]]
    if len(vectors) != space.m:
        raise SpaceMismatch("one vector per atom is required")
    if any(v.d != data["d"] for v in vectors):
        raise DimensionMismatch("vector rank does not match d")
    return FrameMap.from_vectors(space, vectors)


@dataclass
class Scenario:
    """Inputs of one theorem check."""

    descriptor: AlgebraDescriptor
    space: MeasureSpace
    F: FrameMap
    G: FrameMap | None = None
    K: FrameMap | None = None
    a1: AlgebraElement | None = None
    a2: AlgebraElement | None = None
    constants: PerturbationConstants = field(default_factory=PerturbationConstants)
    seed: int = 0
    theorem: str | None = None

    def __post_init__(self):
        for name in ("F", "G", "K"):
            X = getattr(self, name)
            if X is None:
                continue
            self.space.check_same(X.space)
            self.descriptor.check_same(X.descriptor)
            if X.d != self.F.d:
                raise DimensionMismatch(f"{name} has rank {X.d}, F has rank {self.F.d}")
        for name in ("a1", "a2"):
            a = getattr(self, name)
            if a is not None:
                self.descriptor.check_same(a.descriptor)

    def to_json(self) -> dict:
        c = self.constants
        out = {
            "schema": SCHEMA,
            "descriptor": descriptor_to_json(self.descriptor),
            "space": space_to_json(self.space),
            "F": frame_to_json(self.F),
            "constants": {"alpha": c.alpha, "beta": c.beta, "gamma": c.gamma, "lambda": c.lam, "N": c.N},
            "seed": int(self.seed),
            "theorem": self.theorem,
        }
        for name in ("G", "K"):
            X = getattr(self, name)
            if X is not None:
                out[name] = frame_to_json(X)
        for name in ("a1", "a2"):
            a = getattr(self, name)
            if a is not None:
                out[name] = element_to_json(a)
        return out

    @classmethod
    def from_json(cls, data: dict) -> Scenario:
        try:
            if not isinstance(data, dict):
                raise ScenarioFormatError("scenario must be a JSON object")
            desc = descriptor_from_json(data["descriptor"])
            space = space_from_json(data["space"])
            frames = {
                name: frame_from_json(data[name], desc, space) if data.get(name) is not None else None
                for name in ("F", "G", "K")
            }
            if frames["F"] is None:
                raise ScenarioFormatError("scenario needs a frame F")
            elems = {
                name: element_from_json(data[name], desc) if data.get(name) is not None else None
                for name in ("a1", "a2")
            }
            c = data.get("constants") or {}
            consts = PerturbationConstants(
                alpha=float(c.get("alpha", 0.0)),
                beta=float(c.get("beta", 0.0)),
                gamma=float(c.get("gamma", 0.0)),
                lam=None if c.get("lambda") is None else float(c["lambda"]),
                N=None if c.get("N") is None else float(c["N"]),
            )
            return cls(desc, space, constants=consts, seed=int(data.get("seed", 0)), theorem=data.get("theorem"), **frames, **elems)
        except (KeyError, TypeError, IndexError) as exc:
            raise ScenarioFormatError(f"malformed scenario: {exc!r}") from None

    def dumps(self) -> str:
        return dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> Scenario:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"invalid JSON: {exc}") from None
        return cls.from_json(data)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> Scenario:
        return cls.loads(Path(path).read_text())


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
