import json

import numpy as np
import pytest

from cstarframes.algebra import AlgebraDescriptor
from cstarframes.campaign import make_scenario
from cstarframes.errors import CStarFramesError
from cstarframes.fixtures import pert_d_fixture
from cstarframes.generate import gen_central, gen_frame
from cstarframes.perturbation import THEOREM_IDS, PerturbationConstants
from cstarframes.scenario import (
    Scenario,
    ScenarioFormatError,
    element_from_json,
    element_to_json,
    frame_from_json,
    frame_to_json,
)

B23 = AlgebraDescriptor((2, 3))


@pytest.mark.parametrize("theorem", THEOREM_IDS)
def test_round_trip_byte_stable(theorem, tmp_path):
    sc = make_scenario(theorem, 7)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    sc.save(p1)
    Scenario.load(p1).save(p2)
    assert p1.read_bytes() == p2.read_bytes()
    back = Scenario.load(p1)
    assert back.F.allclose(sc.F, 0) and back.theorem == theorem and back.seed == sc.seed


def test_round_trip_exact_values():
    F = gen_frame(B23, 2, 3, 1)
    a = gen_central(B23, 2)
    sc = Scenario(B23, F.space, F, G=-F, a1=a, constants=PerturbationConstants(0.1, 0.2, 0.3, lam=0.4, N=0.5))
    back = Scenario.loads(sc.dumps())
    assert all(np.array_equal(x, y) for x, y in zip(back.F.blocks, F.blocks))
    assert back.a1.allclose(a, 0) and back.a2 is None
    assert back.constants == sc.constants
    assert element_from_json(element_to_json(a), B23).allclose(a, 0)
    assert frame_from_json(frame_to_json(F), B23, F.space).allclose(F, 0)


def test_signed_zero_survives():
    F, G, K = pert_d_fixture()
    sc = Scenario(F.descriptor, F.space, -F, K=K)
    assert Scenario.loads(sc.dumps()).dumps() == sc.dumps()


@pytest.mark.parametrize(
    "text",
    ["{not json", "[]", "{}", '{"descriptor": [1], "space": {"weights": [1]}}', '{"descriptor": "x", "space": {}, "F": {}}'],
)
def test_malformed(text):
    with pytest.raises((ScenarioFormatError, CStarFramesError, ValueError)):
        Scenario.loads(text)


def test_shape_mismatch_rejected():
    sc = make_scenario("sum3", 1)
    data = json.loads(sc.dumps())
    data["space"]["weights"] = data["space"]["weights"] + [1.0]
    with pytest.raises((ScenarioFormatError, CStarFramesError, ValueError)):
        Scenario.from_json(data)


def test_constructor_mismatch_errors():
    F = gen_frame(B23, 2, 3, 1)
    with pytest.raises(CStarFramesError):
        Scenario(B23, F.space, F, G=gen_frame(B23, 2, 4, 1))
    with pytest.raises(CStarFramesError):
        Scenario(B23, F.space, F, G=gen_frame(B23, 1, 3, 1, space=F.space))
    with pytest.raises(CStarFramesError):
        Scenario(B23, F.space, F, a1=AlgebraDescriptor((2,)).one())
