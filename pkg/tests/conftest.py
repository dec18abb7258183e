import numpy as np
import pytest

from cstarframes.algebra import AlgebraDescriptor, AlgebraElement
from cstarframes.module import AdjointableOperator, ModuleElement

DESCRIPTORS = [AlgebraDescriptor((1,)), AlgebraDescriptor((2,)), AlgebraDescriptor((2, 3))]

#: acceptance criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def cnormal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_element(rng, desc):
    return AlgebraElement(desc, [cnormal(rng, (n, n)) for n in desc.block_sizes])


def rand_module(rng, desc, d):
    return ModuleElement(desc, d, [cnormal(rng, (n, d * n)) for n in desc.block_sizes])


def rand_operator(rng, desc, d_in, d_out):
    return AdjointableOperator(desc, d_in, d_out, [cnormal(rng, (d_in * n, d_out * n)) for n in desc.block_sizes])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=DESCRIPTORS, ids=lambda d: "x".join(map(str, d.block_sizes)))
def desc(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
