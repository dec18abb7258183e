import math

import numpy as np
import pytest

from cstarframes import perturbation as P
from cstarframes.algebra import AlgebraDescriptor, AlgebraElement, alg_norm, invert
from cstarframes.errors import ConclusionFailed, HypothesisViolated, SmallnessViolated
from cstarframes.fixtures import pert_d_fixture, standard_basis_c2, three_vector_c2
from cstarframes.frames import (
    FrameMap,
    canonical_dual,
    frame_operator,
    order_bounds,
    synthesis_operator,
)
from cstarframes.generate import gen_central, gen_frame, gen_map, gen_perturbation
from cstarframes.module import AdjointableOperator, ModuleElement, flatten_vec, module_norm, op_norm

from conftest import DESCRIPTORS, rand_module

C = AlgebraDescriptor((1,))
B23 = AlgebraDescriptor((2, 3))
ONE = C.one()


def shifted(F, atom, delta):
    """``F`` with ``delta`` (a ModuleElement) added at one atom."""
    vecs = list(F.vectors)
    vecs[atom] = vecs[atom] + delta
    return FrameMap.from_vectors(F.space, vecs)


# --- sum3 / sum4 ---------------------------------------------------------


def test_predict_sum_bounds_examples():
    b = P.predict_sum_bounds(1, 1, 0.01, ONE, ONE)
    assert (b.lower, b.upper) == pytest.approx((0.81, 1.21))
    assert b.semantics == "norm"
    a1 = gen_central(B23, 3)
    b = P.predict_sum_bounds(2.0, 3.0, 0.0, a1, gen_central(B23, 4))
    assert b.lower == pytest.approx(2.0 / alg_norm(invert(a1)) ** 2)
    assert b.upper == pytest.approx(3.0 * alg_norm(a1) ** 2)
    b = P.predict_sum_bounds(4, 4, 1, 2 * ONE, ONE)
    assert (b.lower, b.upper) == pytest.approx((9, 25))


def test_predict_sum_bounds_guards():
    with pytest.raises(HypothesisViolated, match="central"):
        P.predict_sum_bounds(1, 1, 0.1, AlgebraElement(AlgebraDescriptor((2,)), [np.diag([1, 2])]), AlgebraDescriptor((2,)).one())
    with pytest.raises(HypothesisViolated, match="invertible"):
        P.predict_sum_bounds(1, 1, 0.1, C.zero(), ONE)
    with pytest.raises(HypothesisViolated, match="N"):
        P.predict_sum_bounds(1, 1, 1.0, ONE, ONE)


def test_sum_root_positive_iff_precondition(rng):
    for _ in range(200):
        A, B = sorted(rng.uniform(0.1, 3, 2))
        N = rng.uniform(0, 3)
        a1, a2 = gen_central(B23, int(rng.integers(1 << 30))), gen_central(B23, int(rng.integers(1 << 30)))
        lo, _ = P.sum_bound_roots(A, B, N, a1, a2)
        pre = N * alg_norm(a2) ** 2 < A / alg_norm(invert(a1)) ** 2
        assert (lo > 0) == pre


def test_verify_sum_theorem_examples():
    F = standard_basis_c2()
    r = P.verify_sum_theorem(F, 0 * F, ONE, ONE)
    assert r.verdict == "verified"
    r = P.verify_sum_theorem(F, 0.1 * F, ONE, -ONE)
    assert r.verdict == "verified"
    assert r.measured["H"]["lower"] == pytest.approx(0.81) and r.measured["H"]["upper"] == pytest.approx(0.81)
    assert (r.predicted["lower"], r.predicted["upper"]) == pytest.approx((0.81, 1.21))
    r = P.verify_sum_theorem(F, F, ONE, ONE)
    assert r.verdict == "hypothesis-violated"
    with pytest.raises(HypothesisViolated):
        r.raise_for_verdict()


def test_verify_sum_theorem_noncentral_rejected():
    desc = AlgebraDescriptor((2,))
    F = gen_frame(desc, 1, 2, 1)
    a = AlgebraElement(desc, [np.diag([1.0, 2.0])])
    r = P.verify_sum_theorem(F, 0 * F, a, desc.one())
    assert r.verdict == "hypothesis-violated" and "a1 central" in r.hypothesis["failed"]


def test_verify_bessel_difference_examples():
    F = standard_basis_c2()
    assert P.verify_bessel_difference(F, F).verdict == "verified"
    r = P.verify_bessel_difference(F, 0.9 * F)
    assert r.theorem == "pert-FG-B" and r.verdict == "verified"
    assert r.measured["N"] == pytest.approx(0.01, abs=1e-12)
    assert r.measured["G"]["lower"] == pytest.approx(0.81, abs=1e-9)
    assert r.measured["G"]["upper"] == pytest.approx(0.81, abs=1e-9)
    big = F + 3 * gen_map(F.space, C, 2, 0)
    assert P.verify_bessel_difference(F, big).verdict == "hypothesis-violated"
    a1, a2 = gen_central(B23, 1), gen_central(B23, 2)
    F = gen_frame(B23, 2, 3, 5)
    G = a1 * F + a2 * (0.05 * gen_map(F.space, B23, 2, 5))
    r = P.verify_bessel_difference(F, G, a1, a2)
    assert r.theorem == "sum4" and r.verdict == "verified"


# --- pert1 -----------------------------------------------------------------


def test_pw_conclusion_bounds_examples(rng):
    b = P.pw_conclusion_bounds(1.3, 2.7, 0, 0, 0, ONE, ONE)
    assert (b.lower, b.upper) == (1.3, 2.7)
    b = P.pw_conclusion_bounds(1, 1, 0, 0, 0.2, ONE, ONE)
    assert (b.lower, b.upper) == pytest.approx((0.64, 1.44))
    for _ in range(100):
        A, B = sorted(rng.uniform(0.1, 4, 2))
        al, be, ga = rng.uniform(0, 0.3, 3)
        a1, a2 = gen_central(B23, int(rng.integers(1 << 30))), gen_central(B23, int(rng.integers(1 << 30)))
        try:
            b = P.pw_conclusion_bounds(A, B, al, be, ga, a1, a2)
        except SmallnessViolated:
            continue
        assert 0 <= b.lower <= b.upper


def test_pw_conclusion_bounds_guard():
    with pytest.raises(SmallnessViolated):
        P.pw_conclusion_bounds(1, 1, 0, 1.0, 0, ONE, ONE)
    with pytest.raises(SmallnessViolated):
        P.pw_conclusion_bounds(1, 1, 0, 0, 1.5, ONE, ONE)


def test_pw_hypothesis_examples():
    F = standard_basis_c2()
    exact = P.pw_hypothesis_check(F, F, ONE, ONE, 0, 0, 0)
    assert exact["restricted_ok"] and exact["unrestricted_violations"] == 0
    G = shifted(F, 0, ModuleElement(C, 2, [np.array([[0.05, 0.0]])]))
    rep = P.pw_hypothesis_check(F, G, ONE, ONE, 0, 0, 0.2)
    assert rep["restricted_ok"]
    assert rep["certificate"]["applies"] and rep["certificate"]["gamma_min"] == pytest.approx(0.05)
    low = P.pw_hypothesis_check(F, G, ONE, ONE, 0, 0, 0.04)
    assert not low["restricted_ok"] and low["witness"]["lhs"] > low["witness"]["rhs"]
    # the gamma term does not scale with f: large-norm samples break it
    assert rep["unrestricted_violations"] > 0
    with pytest.raises(SmallnessViolated):
        P.pw_hypothesis_check(F, G, ONE, ONE, 0, 1.0, 0)


def test_build_K_examples(rng):
    F = gen_frame(B23, 2, 3, 1)
    a1, a2 = gen_central(B23, 1), gen_central(B23, 2)
    G = invert(a2) * (a1 * F)
    kc = P.build_K(F, G, a1, a2)
    assert kc.K.allclose(AdjointableOperator.identity(B23, 2), 1e-9)
    Fs = standard_basis_c2()
    G = shifted(Fs, 1, ModuleElement(C, 2, [np.array([[0.05, 0.0]])]))
    gamma = op_norm(synthesis_operator(G - Fs))
    kc = P.build_K(Fs, G, ONE, ONE, 0, 0, gamma)
    assert kc.within_bounds
    S_inv_T = op_norm(synthesis_operator(canonical_dual(Fs)))
    assert op_norm(kc.K - AdjointableOperator.identity(C, 2)) <= 0.05 * S_inv_T + 1e-12
    A = order_bounds(F).lower
    kc = P.build_K(F, F, B23.one(), B23.one())
    for _ in range(100):
        f = rand_module(rng, B23, 2)
        from cstarframes.frames import l2_norm

        assert l2_norm(kc.psi(f)) <= module_norm(f) / math.sqrt(A) + 1e-9


def test_verify_pw_theorem_examples():
    F = gen_frame(B23, 2, 3, 7)
    one = B23.one()
    r = P.verify_pw_theorem(F, F, one, one)
    assert r.verdict == "verified"
    b = order_bounds(F)
    assert (r.predicted["lower"], r.predicted["upper"]) == (b.lower, b.upper)
    G = gen_perturbation(F, 0.3 * math.sqrt(b.lower), "synthesis-norm", 1)
    gamma = op_norm(synthesis_operator(F - G))
    r = P.verify_pw_theorem(F, G, one, one, 0, 0, gamma)
    assert r.verdict == "verified"
    assert r.hypothesis["checks"]["weak perturbation inequality (||f|| <= 1)"]["certificate"]["applies"]
    # a broken G (not a frame) fails the hypothesis check first
    r = P.verify_pw_theorem(F, 0 * F, one, one, 0, 0, 0.3 * math.sqrt(b.lower))
    assert r.verdict == "hypothesis-violated"
    assert r.hypothesis["witness"] is not None
    r = P.verify_pw_theorem(F, F, one, one, 0, 2.0, 0)
    assert r.verdict == "hypothesis-violated" and "smallness < 1" in r.hypothesis["failed"]


def test_verify_pw_theorem_central_elements():
    F = gen_frame(B23, 2, 3, 8)
    a1, a2 = gen_central(B23, 5), gen_central(B23, 6)
    G = invert(a2) * (a1 * F)
    r = P.verify_pw_theorem(F, G, a1, a2)
    assert r.verdict == "verified"


# --- pert2 -----------------------------------------------------------------


def test_riesz_preservation_examples():
    F = gen_frame(B23, 2, 2, 3)
    one = B23.one()
    r = P.verify_riesz_preservation(F, F, one, one)
    assert r.verdict == "verified"
    M = r.measured["M"]
    assert r.predicted["lower"] == pytest.approx(M)
    assert r.predicted["upper"] == pytest.approx(math.sqrt(order_bounds(F).upper))
    eps = 0.2 * min(M, math.sqrt(order_bounds(F).lower))
    G = gen_perturbation(F, eps, "synthesis-norm", 4)
    r = P.verify_riesz_preservation(F, G, one, one, 0, 0, eps * (1 + 1e-12))
    assert r.verdict == "verified" and r.measured["T_G_min"] > 0
    # non-Riesz F is refused
    r = P.verify_riesz_preservation(three_vector_c2(), three_vector_c2(), ONE, ONE)
    assert r.verdict == "hypothesis-violated"
    # gamma below the true perturbation size: sampler finds a witness
    r = P.verify_riesz_preservation(F, G, one, one, 0, 0, eps / 2)
    assert r.verdict == "hypothesis-violated" and r.hypothesis["witness"] is not None


# --- kernel corollary -------------------------------------------------------


def test_kernel_corollary_examples():
    F = gen_frame(B23, 2, 2, 1)
    r = P.verify_kernel_corollary(F, 0.9 * F, 0.1 + 1e-12, 0)
    assert r.verdict == "verified" and r.measured["F_riesz"] and r.measured["G_riesz"]
    T = three_vector_c2()
    r = P.verify_kernel_corollary(T, 0.95 * T, 0.05 + 1e-12, 0)
    assert r.verdict == "verified"
    assert not r.measured["F_riesz"] and not r.measured["G_riesz"] and r.measured["kernel_dim"] == 1
    # a perturbation that moves the kernel violates the hypothesis
    G = shifted(T, 2, ModuleElement(C, 2, [np.array([[0.3, -0.2]])]))
    r = P.verify_kernel_corollary(T, G, 0.1, 0.1)
    assert r.verdict == "hypothesis-violated"
    r = P.verify_kernel_corollary(T, T, 1.0, 0)
    assert r.verdict == "hypothesis-violated"


# --- pert-d ------------------------------------------------------------------


def test_dual_perturbation_fixture():
    F, G, K = pert_d_fixture()
    alpha, beta = P.dual_perturbation_constants(F, G, K)
    assert alpha == pytest.approx(0.02, abs=1e-12) and beta == pytest.approx(0.2, abs=1e-12)
    r = P.verify_dual_perturbation(F, G, K)
    assert r.verdict == "verified"
    assert r.predicted["lower"] == pytest.approx(0.64)
    assert r.predicted["upper"] == pytest.approx((math.sqrt(0.02) + 1) ** 2)
    assert r.measured["L_norm"] <= 1.2 + 1e-9 and r.measured["L_inverse_norm"] <= 1.25 + 1e-7


def test_dual_perturbation_examples():
    F = gen_frame(B23, 2, 3, 2)
    G = canonical_dual(F)
    r = P.verify_dual_perturbation(F, G, F)
    assert r.verdict == "verified" and r.measured["alpha"] == 0 and r.measured["beta"] == 0
    assert r.measured["L_norm"] == pytest.approx(1.0)
    K = F + 10 * gen_map(F.space, B23, 2, 3)
    r = P.verify_dual_perturbation(F, G, K)
    assert r.verdict == "hypothesis-violated" and "beta < 1" in r.hypothesis["failed"]
    r = P.verify_dual_perturbation(F, 2 * G, F)
    assert r.verdict == "hypothesis-violated" and "G dual of F" in r.hypothesis["failed"]


def test_L_minus_identity_bound():
    for seed in range(30):
        F = gen_frame(DESCRIPTORS[seed % 3], 2, 3, seed)
        K = gen_perturbation(F, 0.6, "dual-based", seed)
        r = P.verify_dual_perturbation(F, canonical_dual(F), K)
        assert r.verdict == "verified"
        assert r.conclusion["||I - L||"]["value"] <= r.measured["beta"] + 1e-9


# --- R_{F,G} -----------------------------------------------------------------


def test_build_R_examples(rng):
    for seed in range(20):
        F = gen_frame(DESCRIPTORS[seed % 3], 2, 3, seed)
        assert op_norm(P.build_R(F, F) - frame_operator(F)) <= 1e-10
        assert op_norm(P.build_R(F, 0 * F)) == 0
        D = canonical_dual(F)
        ident = AdjointableOperator.identity(F.descriptor, 2)
        assert op_norm(P.build_R(D, F) - ident) <= 1e-9
        G = gen_map(F.space, F.descriptor, 2, seed)
        R = P.build_R(F, G)
        f = rand_module(rng, F.descriptor, 2)
        assert np.allclose(flatten_vec(R(f)), flatten_vec(P.R_pointwise(F, G, f)))


def test_check_R_surjective_examples():
    F = gen_frame(B23, 2, 3, 1)
    r = P.check_R_surjective(F, F)
    assert r.verdict == "verified" and r.measured["R_surjective"] and r.measured["G_frame"]
    r = P.check_R_surjective(F, 0 * F)
    assert r.verdict == "verified" and not r.measured["R_surjective"]
    Fr = gen_frame(B23, 2, 2, 2)
    r = P.check_R_surjective(Fr, gen_frame(B23, 2, 2, 3, space=Fr.space))
    assert r.verdict == "verified" and r.measured["R_surjective"]


def test_check_R_invertible_examples():
    F = gen_frame(B23, 2, 2, 4)
    r = P.check_R_invertible(F, F)
    assert r.verdict == "verified" and r.measured["R_invertible"] and r.measured["G_riesz"]
    # G with a redundant vector: on the same two atoms G(1) repeats G(0)
    vecs = F.vectors
    G = FrameMap.from_vectors(F.space, [vecs[0], vecs[0]])
    r = P.check_R_invertible(F, G)
    assert r.verdict == "verified" and not r.measured["R_invertible"] and not r.measured["G_riesz"]
    r = P.check_R_invertible(three_vector_c2(), three_vector_c2())
    assert r.verdict == "hypothesis-violated"
    with pytest.raises(HypothesisViolated):
        r.raise_for_verdict()


def test_verify_RS_examples():
    F = gen_frame(B23, 2, 3, 5)
    r = P.verify_RS_theorem(F, F)
    assert r.verdict == "verified" and r.measured["lambda"] == pytest.approx(0, abs=1e-12)
    assert r.measured["R_adjoint_min_singular"] >= order_bounds(F).lower - 1e-9
    Fs = standard_basis_c2()
    r = P.verify_RS_theorem(Fs, canonical_dual(Fs) * 1.3)
    assert r.verdict == "verified" and r.measured["lambda"] == pytest.approx(0.3)
    r = P.verify_RS_theorem(Fs, 2.5 * Fs)
    assert r.verdict == "hypothesis-violated"
    r = P.verify_RS_theorem(Fs, 1.3 * Fs, lam=0.1)
    assert r.verdict == "hypothesis-violated" and r.hypothesis["witness"]["ratio"] == pytest.approx(0.3)


# --- report plumbing ----------------------------------------------------------


def test_report_soundness_and_json():
    F = standard_basis_c2()
    r = P.verify_bessel_difference(F, 0.9 * F)
    d = r.as_dict()
    for key in ("theorem", "hypothesis", "predicted", "measured", "verdict", "seed", "trials"):
        assert key in d
    assert d["hypothesis"]["verdict"] == "satisfied"
    r.raise_for_verdict()
    bad = P.TheoremReport("sum3", {"verdict": "satisfied", "failed": []}, conclusion={"x": {"ok": False}}, verdict="falsified")
    assert bad.severity == "theorem-falsification" and bad.as_dict()["severity"] == "theorem-falsification"
    with pytest.raises(ConclusionFailed):
        bad.raise_for_verdict()


def test_constants_validation():
    with pytest.raises(ValueError):
        P.PerturbationConstants(alpha=-1)
    assert P.PerturbationConstants(0.1, 0.2, 0.3).as_dict()["beta"] == 0.2


def test_checker_detects_wrong_formula(monkeypatch):
    """A checker fed an over-optimistic prediction reports a falsification."""
    F = gen_frame(B23, 2, 3, 11)
    G = 0.05 * gen_map(F.space, B23, 2, 11)
    real = P.predict_sum_bounds

    def too_tight(A, B, N, a1, a2):
        b = real(A, B, N, a1, a2)
        return type(b)(b.lower, b.lower * 1.0001, "norm")

    monkeypatch.setattr(P, "predict_sum_bounds", too_tight)
    r = P.verify_sum_theorem(F, G, B23.one(), B23.one())
    assert r.verdict == "falsified" and r.severity == "theorem-falsification"
