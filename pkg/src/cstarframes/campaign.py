"""Falsification campaigns over the registered perturbation results.

For each theorem id the registry holds a scenario generator, which builds a
hypothesis-satisfying :class:`Scenario` from a per-trial seed, and a checker
shared with ``cli verify``.  Trial seeds are derived from the campaign seed
and the trial index, so results do not depend on execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import perturbation as P
from . import sampling
from .algebra import AlgebraDescriptor, alg_norm, invert
from .errors import CStarFramesError, UnknownTheorem
from .frames import (
    FrameMap,
    analysis_operator,
    canonical_dual,
    frame_operator,
    order_bounds,
    synthesis_operator,
)
from .generate import gen_central, gen_frame, gen_map, gen_operator, gen_perturbation
from .module import AdjointableOperator, invert_op, min_singular, op_norm
from .scenario import Scenario

DESCRIPTORS = (AlgebraDescriptor((1,)), AlgebraDescriptor((2,)), AlgebraDescriptor((2, 3)))
DEFAULT_CHECK_TRIALS = 64


def trial_seed(seed: int, t: int) -> int:
    """63-bit seed for trial ``t`` of a campaign seeded with ``seed``."""
    state = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(t)]).generate_state(1, np.uint64)[0]
    return int(state) >> 1


def _setting(seed, riesz=False):
    """Descriptor, rank and atom count for a scenario."""
    rng = sampling.derive_rng(seed, 0x11)
    desc = DESCRIPTORS[int(rng.integers(len(DESCRIPTORS)))]
    d = int(rng.integers(1, 3))
    m = d if riesz else d + int(rng.integers(0, 3))
    return desc, d, m, rng


def _rescale_to_bound(X: FrameMap, target_upper: float) -> FrameMap:
    """Scale ``X`` so its Bessel bound is ``target_upper``."""
    N = order_bounds(X).upper
    return X * math.sqrt(target_upper / N)


def _norm_inv(a):
    return alg_norm(invert(a))


def _with_synthesis_norm(X: FrameMap, target: float) -> FrameMap:
    return X * (target / op_norm(synthesis_operator(X)))


# ---------------------------------------------------------------------------
# scenario generators


def scenario_sum3(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    a1, a2 = gen_central(desc, seed), gen_central(desc, seed + 1)
    A = order_bounds(F).lower
    rho = float(rng.uniform(0.0, 0.95))
    N = rho * A / _norm_inv(a1) ** 2 / alg_norm(a2) ** 2
    G = gen_map(F.space, desc, d, seed, 1)
    G = _rescale_to_bound(G, N) if N > 0 else 0 * G
    return Scenario(desc, F.space, F, G=G, a1=a1, a2=a2, seed=seed, theorem="sum3")


def scenario_sum4(seed):
    sc = scenario_sum3(seed)
    # G = a1 F + a2 D with D Bessel (bound N) and the same smallness
    G = sc.a1 * sc.F + sc.a2 * sc.G
    return Scenario(sc.descriptor, sc.space, sc.F, G=G, a1=sc.a1, a2=sc.a2, seed=seed, theorem="sum4")


def scenario_pert_fg_b(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    A = order_bounds(F).lower
    eps = math.sqrt(float(rng.uniform(0.0, 0.95)) * A)
    G = gen_perturbation(F, eps, "bessel-difference", seed)
    return Scenario(desc, F.space, F, G=G, seed=seed, theorem="pert-FG-B")


def _pw_family(seed, F, a1, a2, rng, smallness):
    """Perturb ``F`` in one of three families.

    * alpha-type: ``a2 G = (1 - s) a1 F - D`` so ``a1F - a2G = s a1 F + D``
    * beta-type:  ``a1 F = (1 + s) a2 G + D`` so ``a1F - a2G = s a2 G + D``
    * gamma-only: ``a2 G = a1 F - D``
    with ``||T_D|| = gamma``.  Constants are halved until ``smallness`` < 1.
    """
    family = ("alpha", "beta", "gamma")[int(rng.integers(3))]
    s = float(rng.uniform(0.0, 0.6)) if family != "gamma" else 0.0
    g = float(rng.uniform(0.0, 0.8))
    if rng.uniform() < 0.15:
        g = 0.0
    A = order_bounds(F).lower
    gamma = g * math.sqrt(A) / _norm_inv(a1)
    alpha = s if family == "alpha" else 0.0
    beta = s if family == "beta" else 0.0
    for _ in range(60):
        if smallness(alpha, beta, gamma) < 0.95:
            break
        alpha, beta, gamma = alpha / 2, beta / 2, gamma / 2
    a2inv = invert(a2)
    D = gen_map(F.space, F.descriptor, F.d, seed, 2)
    D = _with_synthesis_norm(D, gamma) if gamma > 0 else 0 * D
    if family == "beta":
        G = (1.0 / (1.0 + beta)) * (a2inv * (a1 * F - D))
    else:
        G = a2inv * ((1.0 - alpha) * (a1 * F) - D)
    return G, family, alpha, beta, gamma


def scenario_pert1(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    a1, a2 = gen_central(desc, seed), gen_central(desc, seed + 1)
    A = order_bounds(F).lower
    G, family, alpha, beta, gamma = _pw_family(
        seed, F, a1, a2, rng, lambda al, be, ga: P.pw_smallness(A, al, be, ga, a1)
    )
    consts = P.PerturbationConstants(alpha, beta, gamma)
    return Scenario(desc, F.space, F, G=G, a1=a1, a2=a2, constants=consts, seed=seed, theorem="pert1")


def scenario_pert2(seed):
    desc, d, m, rng = _setting(seed, riesz=True)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 4)))
    a1, a2 = gen_central(desc, seed, 0.7, 1.4), gen_central(desc, seed + 1, 0.7, 1.4)
    b = order_bounds(F)
    M = min_singular(synthesis_operator(F))
    G, family, alpha, beta, gamma = _pw_family(
        seed, F, a1, a2, rng, lambda al, be, ga: P.riesz_smallness(b.lower, M, al, be, ga, a1, a2)
    )
    consts = P.PerturbationConstants(alpha, beta, gamma)
    return Scenario(desc, F.space, F, G=G, a1=a1, a2=a2, constants=consts, seed=seed, theorem="pert2")


def scenario_kernel(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    kind = int(rng.integers(3))
    alpha = beta = 0.0
    if kind == 0:  # G = c F
        c = float(rng.uniform(0.1, 1.0))
        G, alpha = c * F, 1.0 - c
    elif kind == 1:  # G(omega) = F(omega) P with ||I - P|| < 1
        alpha = float(rng.uniform(0.05, 0.7))
        E = gen_operator(desc, d, d, seed, 3)
        E = E * (alpha / op_norm(E))
        G = F.map_vectors(AdjointableOperator.identity(desc, d) + E)
    else:  # F = (1 + s) G
        beta = float(rng.uniform(0.05, 0.7))
        G = (1.0 / (1.0 + beta)) * F
    consts = P.PerturbationConstants(alpha * (1 + 1e-12), beta * (1 + 1e-12), 0.0)
    return Scenario(desc, F.space, F, G=G, constants=consts, seed=seed, theorem="kernel")


def alternate_dual(F: FrameMap, Y: AdjointableOperator) -> FrameMap:
    """Dual ``G`` of ``F`` with ``T_G = S^{-1} T_F + Y (I - T_F^* S^{-1} T_F)``."""
    T = synthesis_operator(F)
    Sinv = invert_op(frame_operator(F))
    ident = AdjointableOperator.identity(F.descriptor, F.m)
    proj = ident - analysis_operator(F) @ Sinv @ T
    return FrameMap.from_synthesis(F.space, Sinv @ T + Y @ proj)


def scenario_pert_d(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 4)))
    G = canonical_dual(F)
    if m > d and rng.uniform() < 0.5:
        Y = gen_operator(desc, m, d, seed, 4)
        Y = Y * (float(rng.uniform(0.05, 0.5)) / op_norm(Y))
        G = alternate_dual(F, Y)
    eps = float(rng.uniform(0.0, 0.9))
    E = gen_map(F.space, desc, d, seed, 5)
    beta0 = P.dual_perturbation_constants(F, G, F + E)[1]
    K = F + (eps / beta0) * E
    return Scenario(desc, F.space, F, G=G, K=K, seed=seed, theorem="pert-d")


def _degenerate(F: FrameMap, seed) -> FrameMap:
    """``F`` followed by a rank-deficient projection: Bessel but not a frame."""
    desc, d = F.descriptor, F.d
    blocks = []
    for n in desc.block_sizes:
        p = np.eye(d * n, dtype=complex)
        p[0, 0] = 0.0
        blocks.append(p)
    return F.map_vectors(AdjointableOperator(desc, d, d, blocks))


def scenario_r_surjective(seed):
    desc, d, m, rng = _setting(seed, riesz=bool(sampling.derive_rng(seed, 0x12).integers(2)))
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    kind = int(rng.integers(4))
    if kind == 0:
        G = gen_map(F.space, desc, d, seed, 6)
    elif kind == 1:
        G = _degenerate(gen_map(F.space, desc, d, seed, 6), seed)
    elif kind == 2:
        G = F
    else:
        G = 0 * F
    return Scenario(desc, F.space, F, G=G, seed=seed, theorem="R-surjective")


def scenario_r_invertible(seed):
    desc, d, m, rng = _setting(seed, riesz=True)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 6)))
    G = gen_map(F.space, desc, d, seed, 7)
    if rng.uniform() < 0.5:
        G = _degenerate(G, seed)
    return Scenario(desc, F.space, F, G=G, seed=seed, theorem="R-invertible")


def scenario_r_s(seed):
    desc, d, m, rng = _setting(seed)
    F = gen_frame(desc, d, m, seed, condition_target=float(rng.uniform(1, 4)))
    b = order_bounds(F)
    # ||R - S|| = ||T_D T_F^*|| <= ||T_D|| sqrt(B) < A
    eps = float(rng.uniform(0.0, 0.95)) * b.lower / math.sqrt(b.upper)
    G = gen_perturbation(F, eps, "synthesis-norm", seed) if eps < math.sqrt(b.lower) else F
    return Scenario(desc, F.space, F, G=G, seed=seed, theorem="R-S")


# ---------------------------------------------------------------------------
# checkers


def check_scenario(theorem: str, sc: Scenario, trials: int = DEFAULT_CHECK_TRIALS, tol: float | None = None):
    """Run the checker for ``theorem`` on ``sc`` and return a TheoremReport."""
    if theorem not in REGISTRY:
        raise UnknownTheorem(f"unknown theorem {theorem!r}; expected one of {', '.join(REGISTRY)}")
    one = sc.descriptor.one()
    a1 = sc.a1 if sc.a1 is not None else one
    a2 = sc.a2 if sc.a2 is not None else one
    c = sc.constants
    seed = sc.seed

    def need(name):
        X = getattr(sc, name)
        if X is None:
            raise ValueError(f"theorem {theorem} needs frame {name} in the scenario")
        return X

    F = sc.F
    rtol = {} if tol is None else {"tol": tol}
    if theorem == "sum3":
        return P.verify_sum_theorem(F, need("G"), a1, a2, trials, seed)
    if theorem == "sum4":
        return P.verify_bessel_difference(F, need("G"), a1, a2 if sc.a2 is not None else -one, trials, seed)
    if theorem == "pert-FG-B":
        return P.verify_bessel_difference(F, need("G"), trials=trials, seed=seed)
    if theorem == "pert1":
        return P.verify_pw_theorem(F, need("G"), a1, a2, c.alpha, c.beta, c.gamma, trials, seed)
    if theorem == "pert2":
        return P.verify_riesz_preservation(F, need("G"), a1, a2, c.alpha, c.beta, c.gamma, trials, seed)
    if theorem == "kernel":
        return P.verify_kernel_corollary(F, need("G"), c.alpha, c.beta, trials, seed)
    if theorem == "pert-d":
        return P.verify_dual_perturbation(F, need("G"), need("K"), trials, seed)
    if theorem == "R-surjective":
        return P.check_R_surjective(F, need("G"), seed=seed, **rtol)
    if theorem == "R-invertible":
        return P.check_R_invertible(F, need("G"), seed=seed, **rtol)
    return P.verify_RS_theorem(F, need("G"), c.lam, seed=seed, **rtol)


REGISTRY: dict[str, Callable[[int], Scenario]] = {
    "sum3": scenario_sum3,
    "sum4": scenario_sum4,
    "pert-FG-B": scenario_pert_fg_b,
    "pert1": scenario_pert1,
    "pert2": scenario_pert2,
    "kernel": scenario_kernel,
    "pert-d": scenario_pert_d,
    "R-surjective": scenario_r_surjective,
    "R-invertible": scenario_r_invertible,
    "R-S": scenario_r_s,
}
assert tuple(REGISTRY) == P.THEOREM_IDS


def make_scenario(theorem: str, seed: int) -> Scenario:
    if theorem not in REGISTRY:
        raise UnknownTheorem(f"unknown theorem {theorem!r}; expected one of {', '.join(REGISTRY)}")
    return REGISTRY[theorem](seed)


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignReport:
    theorem: str
    seed: int
    trials: int
    verified: int = 0
    hypothesis_violated: int = 0
    falsified: int = 0
    errors: int = 0
    tightness: dict = field(default_factory=dict)
    falsified_seeds: list = field(default_factory=list)
    error_messages: list = field(default_factory=list)
    reproducers: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.falsified == 0 and self.errors == 0

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "seed": self.seed,
            "trials": self.trials,
            "counts": {
                "verified": self.verified,
                "hypothesis-violated": self.hypothesis_violated,
                "falsified": self.falsified,
                "errors": self.errors,
            },
            "tightness": self.tightness,
            "falsified_seeds": self.falsified_seeds,
            "error_messages": self.error_messages,
        }


def _run_trial(theorem, seed, check_trials):
    try:
        sc = make_scenario(theorem, seed)
        report = check_scenario(theorem, sc, check_trials)
        return sc, report, None
    except CStarFramesError as exc:
        return None, None, f"{type(exc).__name__}: {exc}"


def falsify(theorem_id: str, trials: int, seed: int = 0, budget: int | None = None,
            check_trials: int = DEFAULT_CHECK_TRIALS, workers: int = 1) -> CampaignReport:
    """Generate ``trials`` scenarios for ``theorem_id`` and aggregate verdicts.

    ``budget`` caps the number of scenarios attempted (default ``trials``);
    trials beyond it are not run.  ``workers > 1`` fans trials out to a
    thread pool; results are aggregated in trial order either way.
    """
    if theorem_id not in REGISTRY:
        raise UnknownTheorem(f"unknown theorem {theorem_id!r}; expected one of {', '.join(REGISTRY)}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    n = trials if budget is None else min(trials, budget)
    seeds = [trial_seed(seed, t) for t in range(n)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda s: _run_trial(theorem_id, s, check_trials), seeds))
    else:
        results = [_run_trial(theorem_id, s, check_trials) for s in seeds]

    out = CampaignReport(theorem=theorem_id, seed=seed, trials=n)
    ratios: dict[str, list[float]] = {}
    for s, (sc, report, err) in zip(seeds, results):
        if err is not None:
            out.errors += 1
            out.error_messages.append({"seed": s, "error": err})
            continue
        if report.verdict == "verified":
            out.verified += 1
            for k, v in report.tightness.items():
                ratios.setdefault(k, []).append(float(v))
        elif report.verdict == "hypothesis-violated":
            out.hypothesis_violated += 1
        else:
            out.falsified += 1
            out.falsified_seeds.append(s)
            out.reproducers.append({"scenario": sc.to_json(), "report": report.as_dict()})
    out.tightness = {
        k: {"min": min(v), "max": max(v), "mean": float(np.mean(v)), "count": len(v)} for k, v in sorted(ratios.items())
    }
    return out
