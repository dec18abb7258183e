"""Constructive checks of frame perturbation results.

Each ``verify_*`` / ``check_*`` function takes concrete frames, evaluates
the hypotheses (exactly where possible, otherwise by seeded falsification
sampling), computes the predicted constants, and compares them with the
measured ones.  The outcome is a :class:`TheoremReport` whose verdict is

* ``"verified"``: hypotheses hold and every conclusion check passed,
* ``"hypothesis-violated"``: some hypothesis failed, no claim is made,
* ``"falsified"``: hypotheses held but a conclusion check failed.

Bessel constants feeding the formulas are order bounds (extreme eigenvalues
of frame operators).  In this finite setting they coincide with the optimal
norm-sandwich constants, so measured order bounds are compared directly
against predicted norm-semantics constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .algebra import AlgebraElement, alg_norm, invert, is_central
from .errors import (
    ConclusionFailed,
    HypothesisViolated,
    NotInvertible,
    SingularElement,
    SmallnessViolated,
)
from .frames import (
    FrameBounds,
    FrameMap,
    L2Element,
    analysis_apply,
    analysis_operator,
    canonical_dual,
    frame_operator,
    dual_defect,
    is_frame,
    norm_bounds_check,
    order_bounds,
    riesz_type_or_false,
    synthesis_operator,
)
from .module import (
    AdjointableOperator,
    ModuleElement,
    invert_op,
    is_bounded_below,
    is_surjective,
    kernel_projector,
    min_singular,
    module_norm,
    norming_vector,
    op_norm,
    range_projector,
)
from .tolerances import ALG_TOL, RANK_TOL, VERDICT_TOL

THEOREM_IDS = (
    "sum3",
    "sum4",
    "pert-FG-B",
    "pert1",
    "pert2",
    "kernel",
    "pert-d",
    "R-surjective",
    "R-invertible",
    "R-S",
)


@dataclass(frozen=True)
class PerturbationConstants:
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    lam: float | None = None
    N: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.lam is not None and self.lam < 0:
            raise ValueError("lambda must be nonnegative")

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "lambda": self.lam, "N": self.N}


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


@dataclass
class TheoremReport:
    theorem: str
    hypothesis: dict
    predicted: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    conclusion: dict = field(default_factory=dict)
    verdict: str = "hypothesis-violated"
    seed: int = 0
    trials: int = 0
    tightness: dict = field(default_factory=dict)

    @property
    def severity(self) -> str | None:
        return "theorem-falsification" if self.verdict == "falsified" else None

    @property
    def failed_checks(self) -> list[str]:
        return [k for k, v in self.conclusion.items() if not v["ok"]]

    def as_dict(self) -> dict:
        out = {
            "theorem": self.theorem,
            "hypothesis": _num(self.hypothesis),
            "predicted": _num(self.predicted),
            "measured": _num(self.measured),
            "conclusion": _num(self.conclusion),
            "tightness": _num(self.tightness),
            "verdict": self.verdict,
            "seed": int(self.seed),
            "trials": int(self.trials),
        }
        if self.severity:
            out["severity"] = self.severity
        return out

    def raise_for_verdict(self):
        """Raise unless the verdict is ``"verified"``."""
        if self.verdict == "hypothesis-violated":
            failed = self.hypothesis.get("failed", [])
            raise HypothesisViolated(", ".join(failed) or "hypothesis", self.hypothesis.get("witness"))
        if self.verdict == "falsified":
            raise ConclusionFailed(f"{self.theorem}: failed checks {self.failed_checks}", self)


class _Hyp:
    """Collects named hypothesis conditions."""

    def __init__(self):
        self.checks = {}
        self.failed = []
        self.witness = None

    def require(self, name, ok, **info):
        self.checks[name] = {"ok": bool(ok), **info}
        if not ok:
            self.failed.append(name)
        return bool(ok)

    @property
    def ok(self):
        return not self.failed

    def as_dict(self):
        out = {"verdict": "satisfied" if self.ok else "violated", "checks": self.checks, "failed": list(self.failed)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class _Concl:
    def __init__(self):
        self.checks = {}

    def leq(self, name, value, bound, tol=VERDICT_TOL):
        self.checks[name] = {"ok": bool(value <= bound + tol), "value": value, "bound": bound, "relation": "<="}

    def geq(self, name, value, bound, tol=VERDICT_TOL):
        self.checks[name] = {"ok": bool(value >= bound - tol), "value": value, "bound": bound, "relation": ">="}

    def true(self, name, ok, **info):
        self.checks[name] = {"ok": bool(ok), **info}

    @property
    def ok(self):
        return all(c["ok"] for c in self.checks.values())


def _finish(theorem, hyp: _Hyp, concl: _Concl | None, seed, trials, **parts) -> TheoremReport:
    if not hyp.ok:
        verdict = "hypothesis-violated"
    elif concl is not None and concl.ok:
        verdict = "verified"
    else:
        verdict = "falsified"
    return TheoremReport(
        theorem=theorem,
        hypothesis=hyp.as_dict(),
        conclusion={} if concl is None else concl.checks,
        verdict=verdict,
        seed=seed,
        trials=trials,
        **parts,
    )


def _element_facts(hyp: _Hyp, name: str, a: AlgebraElement):
    """Require ``a`` central and invertible; return ``(||a||, ||a^{-1}||)``."""
    hyp.require(f"{name} central", is_central(a))
    try:
        inv = alg_norm(invert(a))
    except SingularElement as exc:
        hyp.require(f"{name} invertible", False, detail=str(exc))
        return alg_norm(a), math.inf
    hyp.require(f"{name} invertible", True)
    return alg_norm(a), inv


def _witness(f: ModuleElement | L2Element):
    g = f.to_module() if isinstance(f, L2Element) else f
    from .module import flatten_vec

    return [[float(z.real), float(z.imag)] for z in flatten_vec(g)]


# ---------------------------------------------------------------------------
# frame + Bessel sums


def sum_bound_roots(A, B, N, a1, a2):
    """Signed roots ``(||a1^{-1}||^{-1} sqrt(A) - ||a2|| sqrt(N), ||a1|| sqrt(B) + ||a2|| sqrt(N))``."""
    inv1 = alg_norm(invert(a1))
    n2 = alg_norm(a2)
    lo = math.sqrt(A) / inv1 - n2 * math.sqrt(N)
    hi = alg_norm(a1) * math.sqrt(B) + n2 * math.sqrt(N)
    return lo, hi


def predict_sum_bounds(A, B, N, a1, a2) -> FrameBounds:
    """Norm-semantics bounds of ``a1 F + a2 G`` for a frame ``F`` (bounds
    ``A, B``) and a Bessel map ``G`` (bound ``N``)."""
    if not (is_central(a1) and is_central(a2)):
        raise HypothesisViolated("a1, a2 central")
    try:
        inv1 = alg_norm(invert(a1))
        invert(a2)
    except SingularElement as exc:
        raise HypothesisViolated("a1, a2 invertible", str(exc)) from None
    n2 = alg_norm(a2)
    if not N * n2**2 < A / inv1**2:
        raise HypothesisViolated("N ||a2||^2 < A ||a1^-1||^-2", f"{N * n2**2} >= {A / inv1**2}")
    lo, hi = sum_bound_roots(A, B, N, a1, a2)
    # equal in exact arithmetic for tight F and scalar a1; keep rounding from inverting them
    return FrameBounds(lo**2, max(lo**2, hi**2), "norm")


def _bounds_checks(concl: _Concl, prefix, measured: FrameBounds, predicted: FrameBounds):
    concl.geq(f"{prefix} lower >= predicted lower", measured.lower, predicted.lower)
    concl.leq(f"{prefix} upper <= predicted upper", measured.upper, predicted.upper)


def _tightness(measured: FrameBounds, predicted: FrameBounds):
    out = {}
    if predicted.lower > 0:
        out["lower"] = measured.lower / predicted.lower
    if predicted.upper > 0:
        out["upper"] = measured.upper / predicted.upper
    return out


def verify_sum_theorem(F, G, a1, a2, trials=256, seed=0) -> TheoremReport:
    """``a1 F + a2 G`` is a frame when ``N ||a2||^2 < A ||a1^{-1}||^{-2}``."""
    hyp = _Hyp()
    fb = order_bounds(F)
    N = order_bounds(G).upper
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    n1, inv1 = _element_facts(hyp, "a1", a1)
    n2, inv2 = _element_facts(hyp, "a2", a2)
    if hyp.ok:
        hyp.require("N ||a2||^2 < A ||a1^-1||^-2", N * n2**2 < fb.lower / inv1**2, lhs=N * n2**2, rhs=fb.lower / inv1**2)
    measured = {"A": fb.lower, "B": fb.upper, "N": N}
    if not hyp.ok:
        return _finish("sum3", hyp, None, seed, trials, measured=measured)
    pred = predict_sum_bounds(fb.lower, fb.upper, N, a1, a2)
    H = a1 * F + a2 * G
    hb = order_bounds(H)
    nc = norm_bounds_check(H, pred.lower, pred.upper, trials, seed)
    concl = _Concl()
    concl.true("H frame", is_frame(H), lower=hb.lower)
    _bounds_checks(concl, "H", hb, pred)
    concl.true("norm sandwich sampled", nc.ok, min_ratio=nc.min_ratio, max_ratio=nc.max_ratio)
    measured.update(H=hb.as_dict(), norm_ratios=[nc.min_ratio, nc.max_ratio])
    return _finish("sum3", hyp, concl, seed, trials, predicted=pred.as_dict(), measured=measured, tightness=_tightness(hb, pred))


def verify_bessel_difference(F, G, a1=None, a2=None, trials=256, seed=0) -> TheoremReport:
    """``G`` is a frame when ``a2^{-1} G - a2^{-1} a1 F`` is Bessel with a small bound.

    With ``a1`` and ``a2`` omitted this is the special case ``a1 = -a2 = 1``:
    ``F - G`` Bessel with bound ``N < A``.
    """
    desc = F.descriptor
    theorem = "pert-FG-B" if a1 is None and a2 is None else "sum4"
    a1 = desc.one() if a1 is None else a1
    a2 = -desc.one() if a2 is None else a2
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    n1, inv1 = _element_facts(hyp, "a1", a1)
    n2, inv2 = _element_facts(hyp, "a2", a2)
    measured = {"A": fb.lower, "B": fb.upper}
    if not hyp.ok:
        return _finish(theorem, hyp, None, seed, trials, measured=measured)
    a2inv = invert(a2)
    D = a2inv * G - (a2inv * a1) * F
    N = order_bounds(D).upper
    measured["N"] = N
    hyp.require("N ||a2||^2 < A ||a1^-1||^-2", N * n2**2 < fb.lower / inv1**2, lhs=N * n2**2, rhs=fb.lower / inv1**2)
    if not hyp.ok:
        return _finish(theorem, hyp, None, seed, trials, measured=measured)
    pred = predict_sum_bounds(fb.lower, fb.upper, N, a1, a2)
    gb = order_bounds(G)
    nc = norm_bounds_check(G, pred.lower, pred.upper, trials, seed)
    concl = _Concl()
    concl.true("G frame", is_frame(G), lower=gb.lower)
    _bounds_checks(concl, "G", gb, pred)
    concl.true("norm sandwich sampled", nc.ok, min_ratio=nc.min_ratio, max_ratio=nc.max_ratio)
    measured["G"] = gb.as_dict()
    return _finish(theorem, hyp, concl, seed, trials, predicted=pred.as_dict(), measured=measured, tightness=_tightness(gb, pred))


# ---------------------------------------------------------------------------
# the general perturbation condition (weak form)


def pw_smallness(A, alpha, beta, gamma, a1) -> float:
    """``max{beta, beta ||a1^{-1}|| ||a1||, ||a1^{-1}|| (alpha ||a1|| + gamma / sqrt(A))}``."""
    n1, inv1 = alg_norm(a1), alg_norm(invert(a1))
    return max(beta, beta * inv1 * n1, inv1 * (alpha * n1 + gamma / math.sqrt(A)))


def _pw_lambdas(A, alpha, beta, gamma, a1):
    n1, inv1 = alg_norm(a1), alg_norm(invert(a1))
    return inv1 * (alpha * n1 + gamma / math.sqrt(A)), beta * inv1 * n1


def pw_conclusion_bounds(A, B, alpha, beta, gamma, a1, a2) -> FrameBounds:
    """Frame bounds of ``G`` guaranteed by the weak perturbation condition.

    With ``l1 = ||a1^{-1}||(alpha ||a1|| + gamma/sqrt(A))`` and
    ``l2 = beta ||a1^{-1}|| ||a1||``:

    * lower ``A ||a1^{-1} a2||^{-2} ((1 - l1) / (1 + l2))^2``
    * upper ``(||a2^{-1}|| ((1 + alpha) sqrt(B) ||a1|| + gamma) / (1 - beta))^2``

    The ratio ``||a1^{-1} a2||`` enters squared because it bounds
    ``||<f, f>||`` before squaring, and ``||a2^{-1}||`` multiplies the
    ``gamma`` term too; with ``a1 = a2 = 1`` both forms reduce to the
    classical constants.
    """
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if v < 0:
            raise SmallnessViolated(f"{name} >= 0", v)
    small = pw_smallness(A, alpha, beta, gamma, a1)
    if not small < 1:
        raise SmallnessViolated("smallness < 1", small)
    l1, l2 = _pw_lambdas(A, alpha, beta, gamma, a1)
    ratio = alg_norm(invert(a1) * a2)
    inv2 = alg_norm(invert(a2))
    lower = A / ratio**2 * ((1 - l1) / (1 + l2)) ** 2
    # factored through B so that the zero-constant limit returns B exactly
    upper = B * (inv2 * ((1 + alpha) * alg_norm(a1) + gamma / math.sqrt(B)) / (1 - beta)) ** 2
    return FrameBounds(lower, max(lower, upper), "norm")


def _weak_pairing_norms(X: FrameMap, psis, xs):
    """``|| sum mu psi <X(omega), f> ||`` for paired batches."""
    tx = sampling.synthesis_batch(X.blocks, X.space.weights, psis)
    return sampling.alg_norms(sampling.inner_batch(tx, xs))


def _l2_from_module_batch(space, g: ModuleElement):
    el = L2Element.from_module(space, g)
    return [v[None] for v in el.values]


def pw_hypothesis_check(F, G, a1, a2, alpha, beta, gamma, trials=256, seed=0) -> dict:
    """Falsification search for the weak perturbation condition

    ``||sum mu psi <a1 F - a2 G, f>|| <= alpha ||sum mu psi <a1 F, f>||
    + beta ||sum mu psi <a2 G, f>|| + gamma ||psi||``.

    Samples are split into the unit ball ``||f|| <= 1`` (random unit and
    sub-unit ``f``, plus singular-direction witnesses) and a large-``||f||``
    regime.  The ``gamma`` term does not scale with ``f``, so only the unit
    ball verdict (``restricted_ok``) is used downstream; large-norm
    violations are counted separately.  The operator-norm certificate
    ``alpha = beta = 0, gamma >= ||T_{a1 F - a2 G}||`` settles the unit-ball
    case exactly.
    """
    if min(alpha, beta, gamma) < 0:
        raise SmallnessViolated("alpha, beta, gamma >= 0")
    A = order_bounds(F).lower
    small = pw_smallness(A, alpha, beta, gamma, a1)
    if not small < 1:
        raise SmallnessViolated("smallness < 1", small)
    P, Q = a1 * F, a2 * G
    Delta = P - Q
    T_delta = synthesis_operator(Delta)
    cert_gamma = op_norm(T_delta)
    desc, d, space = F.descriptor, F.d, F.space
    rng = sampling.derive_rng(seed)

    psis = sampling.random_l2_batch(rng, desc, space.weights, trials)
    xs = sampling.random_module_batch(rng, desc, d, trials)
    shrink = rng.uniform(0.0, 1.0, trials)
    xs_small = [x * shrink[:, None, None] for x in xs]
    # witness: psi attains ||T_Delta||, f = T_Delta psi / ||T_Delta psi||
    wpsi = norming_vector(T_delta, "max")
    wf = T_delta(wpsi)
    nf = module_norm(wf)
    wf = wf / nf if nf > 0 else ModuleElement.basis(desc, d, 0)
    unit_psis = sampling.concat_batches(psis, psis, _l2_from_module_batch(space, wpsi))
    unit_xs = sampling.concat_batches(xs, xs_small, [b[None] for b in wf.blocks])

    scales = 10.0 ** rng.integers(1, 4, trials)
    big_xs = [x * scales[:, None, None] for x in xs]

    def evaluate(ps, fs):
        lhs = _weak_pairing_norms(Delta, ps, fs)
        rhs = (
            alpha * _weak_pairing_norms(P, ps, fs)
            + beta * _weak_pairing_norms(Q, ps, fs)
            + gamma * sampling.l2_norms(ps, space.weights)
        )
        return lhs, rhs

    lhs, rhs = evaluate(unit_psis, unit_xs)
    bad = np.nonzero(lhs > rhs + VERDICT_TOL * (1.0 + rhs))[0]
    blhs, brhs = evaluate(psis, big_xs)
    big_bad = int(np.count_nonzero(blhs > brhs + VERDICT_TOL * (1.0 + brhs)))
    witness = None
    if bad.size:
        i = int(bad[np.argmax(lhs[bad] - rhs[bad])])
        witness = {"lhs": float(lhs[i]), "rhs": float(rhs[i]), "sample": i}
    return {
        "smallness": small,
        "restricted_ok": not bad.size,
        "restricted_violations": int(bad.size),
        "unrestricted_violations": big_bad,
        "samples": int(lhs.size + blhs.size),
        "worst_excess": float(np.max(lhs - rhs)),
        "witness": witness,
        "certificate": {
            "gamma_min": cert_gamma,
            "applies": bool(alpha == 0 and beta == 0 and gamma >= cert_gamma * (1 - 1e-12)),
            "restricted": True,
        },
    }


def psi_f(F: FrameMap, f: ModuleElement) -> L2Element:
    """``omega -> <f, S_F^{-1} F(omega)>``."""
    return analysis_apply(canonical_dual(F), f)


@dataclass
class KConstruction:
    """The operator ``K = T_{a1^{-1} a2 G} T_F^* S_F^{-1}`` and its norm data."""

    K: AdjointableOperator
    K_inv: AdjointableOperator
    norm: float
    inverse_norm: float
    predicted_norm: float
    predicted_inverse_norm: float
    F: FrameMap

    @property
    def within_bounds(self) -> bool:
        return (
            self.norm <= self.predicted_norm + VERDICT_TOL
            and self.inverse_norm <= self.predicted_inverse_norm + VERDICT_TOL
        )

    def psi(self, f: ModuleElement) -> L2Element:
        return psi_f(self.F, f)


def build_K(F, G, a1, a2, alpha=0.0, beta=0.0, gamma=0.0, tol=RANK_TOL) -> KConstruction:
    A = order_bounds(F).lower
    l1, l2 = _pw_lambdas(A, alpha, beta, gamma, a1)
    if not max(l1, l2) < 1:
        raise SmallnessViolated("smallness < 1", max(l1, l2))
    S = frame_operator(F)
    c = invert(a1) * a2
    K = synthesis_operator(c * G) @ analysis_operator(F) @ invert_op(S, tol)
    ok, _ = is_bounded_below(K, tol)
    if not ok:
        raise NotInvertible("K is not invertible")
    K_inv = invert_op(K, tol)
    return KConstruction(
        K=K,
        K_inv=K_inv,
        norm=op_norm(K),
        inverse_norm=op_norm(K_inv),
        predicted_norm=(1 + l1) / (1 - l2),
        predicted_inverse_norm=(1 + l2) / (1 - l1),
        F=F,
    )


def verify_pw_theorem(F, G, a1, a2, alpha=0.0, beta=0.0, gamma=0.0, trials=256, seed=0) -> TheoremReport:
    """``G`` is a frame under the weak perturbation condition."""
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    _element_facts(hyp, "a1", a1)
    _element_facts(hyp, "a2", a2)
    measured = {"A": fb.lower, "B": fb.upper}
    consts = {"alpha": alpha, "beta": beta, "gamma": gamma}
    if not hyp.ok:
        return _finish("pert1", hyp, None, seed, trials, measured=measured)
    small = pw_smallness(fb.lower, alpha, beta, gamma, a1)
    hyp.require("smallness < 1", small < 1, value=small)
    if not hyp.ok:
        return _finish("pert1", hyp, None, seed, trials, measured=measured, predicted=consts)
    hc = pw_hypothesis_check(F, G, a1, a2, alpha, beta, gamma, trials, seed)
    hyp.require(
        "weak perturbation inequality (||f|| <= 1)",
        hc["restricted_ok"],
        violations=hc["restricted_violations"],
        unrestricted_violations=hc["unrestricted_violations"],
        certificate=hc["certificate"],
    )
    hyp.witness = hc["witness"]
    if not hyp.ok:
        return _finish("pert1", hyp, None, seed, trials, measured=measured, predicted=consts)

    pred = pw_conclusion_bounds(fb.lower, fb.upper, alpha, beta, gamma, a1, a2)
    concl = _Concl()
    try:
        kc = build_K(F, G, a1, a2, alpha, beta, gamma)
    except NotInvertible as exc:
        concl.true("K invertible", False, detail=str(exc))
        return _finish("pert1", hyp, concl, seed, trials, measured=measured, predicted=pred.as_dict())
    concl.true("K invertible", True)
    concl.leq("||K||", kc.norm, kc.predicted_norm)
    concl.leq("||K^-1||", kc.inverse_norm, kc.predicted_inverse_norm)

    # ||psi_f|| <= ||f|| / sqrt(A) on sampled f
    rng = sampling.derive_rng(seed, 1)
    xs = sampling.random_module_batch(rng, F.descriptor, F.d, trials)
    dual = canonical_dual(F)
    psis = [np.einsum("sxz,iyz->sixy", x, np.conj(b)) for x, b in zip(xs, dual.blocks)]
    psi_norms = sampling.l2_norms(psis, F.space.weights)
    concl.leq("max ||psi_f|| / ||f||", float(psi_norms.max()), 1 / math.sqrt(fb.lower))

    gb = order_bounds(G)
    nc = norm_bounds_check(G, pred.lower, pred.upper, trials, seed)
    concl.true("G frame", is_frame(G), lower=gb.lower)
    _bounds_checks(concl, "G", gb, pred)
    concl.true("norm sandwich sampled", nc.ok, min_ratio=nc.min_ratio, max_ratio=nc.max_ratio)
    measured.update(G=gb.as_dict(), K_norm=kc.norm, K_inverse_norm=kc.inverse_norm, hypothesis_samples=hc["samples"])
    predicted = dict(pred.as_dict(), K_norm=kc.predicted_norm, K_inverse_norm=kc.predicted_inverse_norm, **consts)
    return _finish("pert1", hyp, concl, seed, trials, predicted=predicted, measured=measured, tightness=_tightness(gb, pred))


# ---------------------------------------------------------------------------
# strong (synthesis-norm) form, Riesz-type preservation and kernels


def _synthesis_norms(X: FrameMap, psis):
    return sampling.module_norms(sampling.synthesis_batch(X.blocks, X.space.weights, psis))


def synthesis_hypothesis_check(F, G, a1, a2, alpha, beta, gamma, trials=256, seed=0, extra_psis=()):
    """Falsification search for ``||T_{a1F-a2G} psi|| <= alpha ||T_{a1F} psi||
    + beta ||T_{a2G} psi|| + gamma ||psi||``.

    Structured samples: extreme singular directions of the three synthesis
    operators, atom indicators, and any ``extra_psis`` (single L2Elements).
    """
    P, Q = a1 * F, a2 * G
    Delta = P - Q
    space, desc = F.space, F.descriptor
    rng = sampling.derive_rng(seed)
    parts = [sampling.random_l2_batch(rng, desc, space.weights, trials)]
    for X in (Delta, P, Q):
        T = synthesis_operator(X)
        for which in ("max", "min"):
            parts.append(_l2_from_module_batch(space, norming_vector(T, which)))
    for i in range(space.m):
        parts.append([v[None] for v in L2Element.indicator(space, desc, i).values])
    for el in extra_psis:
        parts.append([v[None] for v in el.values])
    psis = sampling.concat_batches(*parts)
    norms = sampling.l2_norms(psis, space.weights)
    keep = norms > 0
    psis = [p[keep] for p in psis]
    lhs = _synthesis_norms(Delta, psis)
    rhs = alpha * _synthesis_norms(P, psis) + beta * _synthesis_norms(Q, psis) + gamma * norms[keep]
    bad = np.nonzero(lhs > rhs + VERDICT_TOL * (1.0 + rhs))[0]
    witness = None
    if bad.size:
        i = int(bad[np.argmax(lhs[bad] - rhs[bad])])
        witness = {"lhs": float(lhs[i]), "rhs": float(rhs[i]), "sample": i}
    cert = op_norm(synthesis_operator(Delta))
    return {
        "ok": not bad.size,
        "violations": int(bad.size),
        "samples": int(lhs.size),
        "witness": witness,
        "certificate": {"gamma_min": cert, "applies": bool(alpha == 0 and beta == 0 and gamma >= cert * (1 - 1e-12))},
    }


def riesz_smallness(A, M, alpha, beta, gamma, a1, a2) -> float:
    n1, inv1 = alg_norm(a1), alg_norm(invert(a1))
    n2, inv2 = alg_norm(a2), alg_norm(invert(a2))
    return max(
        beta * n2 * inv2,
        beta * n1 * inv1,
        alpha / inv1 + gamma / M,
        inv1 * (alpha * n1 + gamma / math.sqrt(A)),
    )


def riesz_sandwich(B, M, alpha, beta, gamma, a1, a2):
    """Predicted ``(lower, upper)`` for ``||T_G psi|| / ||psi||``."""
    n1, inv1 = alg_norm(a1), alg_norm(invert(a1))
    n2, inv2 = alg_norm(a2), alg_norm(invert(a2))
    lower = ((1 - alpha) * M / inv1 - gamma) / ((1 + beta) * n2)
    upper = inv2 * (n1 * (1 + alpha) * math.sqrt(B) + gamma) / (1 - beta * inv2 * n2)
    return lower, upper


def verify_riesz_preservation(F, G, a1, a2, alpha=0.0, beta=0.0, gamma=0.0, trials=256, seed=0) -> TheoremReport:
    """A Riesz-type ``F`` perturbed under the strong condition stays Riesz-type."""
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    measured = {"A": fb.lower, "B": fb.upper}
    if hyp.ok:
        hyp.require("F Riesz-type", riesz_type_or_false(F))
    _element_facts(hyp, "a1", a1)
    _element_facts(hyp, "a2", a2)
    if not hyp.ok:
        return _finish("pert2", hyp, None, seed, trials, measured=measured)
    M = min_singular(synthesis_operator(F))
    measured["M"] = M
    small = riesz_smallness(fb.lower, M, alpha, beta, gamma, a1, a2)
    hyp.require("smallness < 1", small < 1, value=small)
    if not hyp.ok:
        return _finish("pert2", hyp, None, seed, trials, measured=measured)
    hc = synthesis_hypothesis_check(F, G, a1, a2, alpha, beta, gamma, trials, seed)
    hyp.require("synthesis perturbation inequality", hc["ok"], violations=hc["violations"], certificate=hc["certificate"])
    hyp.witness = hc["witness"]
    if not hyp.ok:
        return _finish("pert2", hyp, None, seed, trials, measured=measured)
    lower, upper = riesz_sandwich(fb.upper, M, alpha, beta, gamma, a1, a2)
    TG = synthesis_operator(G)
    g_low, g_high = min_singular(TG), op_norm(TG)
    concl = _Concl()
    concl.true("G Riesz-type", riesz_type_or_false(G))
    concl.geq("min ||T_G psi|| / ||psi||", g_low, lower)
    concl.leq("||T_G||", g_high, upper)
    measured.update(T_G_min=g_low, T_G_max=g_high)
    tight = {"upper": g_high / upper}
    if lower > 0:
        tight["lower"] = g_low / lower
    return _finish(
        "pert2",
        hyp,
        concl,
        seed,
        trials,
        predicted={"lower": lower, "upper": upper, "alpha": alpha, "beta": beta, "gamma": gamma},
        measured=measured,
        tightness=tight,
    )


def kernel_basis(T: AdjointableOperator, tol=RANK_TOL) -> list[ModuleElement]:
    """Module elements spanning ``ker T`` in the flattened model."""
    import scipy.linalg

    from .module import flatten_op, unflatten_vec

    flat = flatten_op(T)
    basis = scipy.linalg.null_space(flat, rcond=tol)
    return [unflatten_vec(basis[:, j], T.descriptor, T.d_in) for j in range(basis.shape[1])]


def verify_kernel_corollary(F, G, alpha, beta, trials=256, seed=0, tol=VERDICT_TOL) -> TheoremReport:
    """``ker T_F = ker T_G`` under the strong condition with ``gamma = 0``,
    hence ``F`` Riesz-type iff ``G`` Riesz-type."""
    desc = F.descriptor
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    hyp.require("0 <= alpha < 1", 0 <= alpha < 1, value=alpha)
    hyp.require("0 <= beta < 1", 0 <= beta < 1, value=beta)
    measured = {"A": fb.lower, "B": fb.upper}
    if not hyp.ok:
        return _finish("kernel", hyp, None, seed, trials, measured=measured)
    TF, TG = synthesis_operator(F), synthesis_operator(G)
    extra = [L2Element.from_module(F.space, v) for v in kernel_basis(TF) + kernel_basis(TG)]
    hc = synthesis_hypothesis_check(F, G, desc.one(), desc.one(), alpha, beta, 0.0, trials, seed, extra)
    hyp.require("synthesis perturbation inequality (gamma = 0)", hc["ok"], violations=hc["violations"])
    hyp.witness = hc["witness"]
    if not hyp.ok:
        return _finish("kernel", hyp, None, seed, trials, measured=measured)
    kf, kg = kernel_projector(TF), kernel_projector(TG)
    rf, rg = range_projector(TF.H), range_projector(TG.H)
    kdiff = float(np.linalg.norm(kf - kg, 2))
    rdiff = float(np.linalg.norm(rf - rg, 2))
    rt_f, rt_g = riesz_type_or_false(F), riesz_type_or_false(G)
    concl = _Concl()
    concl.leq("||P_ker T_F - P_ker T_G||", kdiff, 0.0, tol)
    concl.leq("||P_ran T_F* - P_ran T_G*||", rdiff, 0.0, tol)
    concl.true("ker + range complementary", np.linalg.norm(kf + rg - np.eye(kf.shape[0]), 2) <= tol)
    concl.true("G frame", is_frame(G))
    concl.true("F Riesz-type iff G Riesz-type", rt_f == rt_g, F=rt_f, G=rt_g)
    measured.update(kernel_dim=int(round(np.trace(kf).real)), F_riesz=rt_f, G_riesz=rt_g)
    return _finish("kernel", hyp, concl, seed, trials, measured=measured, predicted={"alpha": alpha, "beta": beta})


# ---------------------------------------------------------------------------
# perturbations of a dual


def dual_perturbation_constants(F, G, K):
    """``alpha = sum mu ||F - K||^2`` and ``beta = sum mu ||F - K|| ||G||``."""
    w = np.asarray(F.space.weights)
    diff = (F - K).vectors
    dn = np.array([module_norm(v) for v in diff])
    gn = np.array([module_norm(v) for v in G.vectors])
    return float(np.sum(w * dn**2)), float(np.sum(w * dn * gn))


def build_R(F: FrameMap, G: FrameMap) -> AdjointableOperator:
    """``R_{F,G} f = sum mu <f, F(omega)> G(omega)``, i.e. ``T_G T_F^*``."""
    F._check(G)
    return synthesis_operator(G) @ analysis_operator(F)


def R_pointwise(F: FrameMap, G: FrameMap, f: ModuleElement) -> ModuleElement:
    """Direct weighted sum for ``R_{F,G} f``; independent of :func:`build_R`."""
    out = ModuleElement.zero(F.descriptor, F.d)
    coeffs = analysis_apply(F, f)
    for i, (w, g) in enumerate(zip(F.space.weights, G.vectors)):
        out = out + w * (coeffs[i] * g)
    return out


def verify_dual_perturbation(F, G, K, trials=256, seed=0) -> TheoremReport:
    """``K`` is a frame when it stays close to ``F`` measured against a dual ``G``."""
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F), lower=fb.lower)
    defect = dual_defect(F, G)
    hyp.require("G dual of F", defect <= RANK_TOL * (1 + op_norm(synthesis_operator(F))), defect=defect)
    alpha, beta = dual_perturbation_constants(F, G, K)
    gbounds = order_bounds(G)
    D = gbounds.upper
    hyp.require("beta < 1", beta < 1, value=beta)
    measured = {"A": fb.lower, "B": fb.upper, "C": gbounds.lower, "D": D, "alpha": alpha, "beta": beta}
    if not hyp.ok:
        return _finish("pert-d", hyp, None, seed, trials, measured=measured)
    ident = AdjointableOperator.identity(F.descriptor, F.d)
    L = build_R(G, K)
    concl = _Concl()
    l_norm = op_norm(L)
    concl.leq("||I - L||", op_norm(ident - L), beta, ALG_TOL)
    concl.leq("||L||", l_norm, 1 + beta, ALG_TOL)
    try:
        l_inv = op_norm(invert_op(L))
    except Exception as exc:  # SingularOperator
        concl.true("L invertible", False, detail=str(exc))
        return _finish("pert-d", hyp, concl, seed, trials, measured=measured)
    concl.leq("||L^-1||", l_inv, 1 / (1 - beta))
    tk = op_norm(synthesis_operator(K))
    concl.leq("||T_K||", tk, math.sqrt(alpha) + math.sqrt(fb.upper), ALG_TOL)
    k_lower, k_upper = (1 - beta) ** 2 / D, (math.sqrt(alpha) + math.sqrt(fb.upper)) ** 2
    pred = FrameBounds(k_lower, max(k_lower, k_upper), "norm")  # equal for tight F at beta = 0
    kb = order_bounds(K)
    nc = norm_bounds_check(K, pred.lower, pred.upper, trials, seed)
    concl.true("K frame", is_frame(K), lower=kb.lower)
    _bounds_checks(concl, "K", kb, pred)
    concl.true("norm sandwich sampled", nc.ok, min_ratio=nc.min_ratio, max_ratio=nc.max_ratio)
    measured.update(K=kb.as_dict(), L_norm=l_norm, L_inverse_norm=l_inv, T_K_norm=tk)
    predicted = dict(pred.as_dict(), L_norm=1 + beta, L_inverse_norm=1 / (1 - beta), T_K_norm=math.sqrt(alpha) + math.sqrt(fb.upper))
    return _finish("pert-d", hyp, concl, seed, trials, predicted=predicted, measured=measured, tightness=_tightness(kb, pred))


# ---------------------------------------------------------------------------
# the mixed operator R_{F,G}


def check_R_surjective(F, G, tol=RANK_TOL, seed=0) -> TheoremReport:
    """Surjective ``R_{F,G}`` forces ``G`` to be a frame; the converse holds
    for Riesz-type ``F``."""
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F, tol), lower=fb.lower)
    if not hyp.ok:
        return _finish("R-surjective", hyp, None, seed, 0)
    R = build_R(F, G)
    surj = is_surjective(R, tol)
    g_frame = is_frame(G, tol)
    f_riesz = riesz_type_or_false(F, tol)
    concl = _Concl()
    concl.true("R surjective => G frame", (not surj) or g_frame)
    concl.true("F Riesz-type and G frame => R surjective", not (f_riesz and g_frame) or surj)
    measured = {
        "R_surjective": surj,
        "R_adjoint_min_singular": min_singular(R.H),
        "G_frame": g_frame,
        "G_lower": order_bounds(G).lower,
        "F_riesz": f_riesz,
    }
    return _finish("R-surjective", hyp, concl, seed, 0, measured=measured)


def check_R_invertible(F, G, tol=RANK_TOL, seed=0) -> TheoremReport:
    """For Riesz-type ``F``: ``R_{F,G}`` invertible iff ``G`` Riesz-type."""
    hyp = _Hyp()
    hyp.require("F Riesz-type", riesz_type_or_false(F, tol))
    if not hyp.ok:
        return _finish("R-invertible", hyp, None, seed, 0)
    R = build_R(F, G)
    inv, m = is_bounded_below(R, tol)
    inv = inv and is_surjective(R, tol)
    g_riesz = riesz_type_or_false(G, tol)
    concl = _Concl()
    concl.true("R invertible iff G Riesz-type", inv == g_riesz, R_invertible=inv, G_riesz=g_riesz)
    return _finish("R-invertible", hyp, concl, seed, 0, measured={"R_invertible": inv, "R_min_singular": m, "G_riesz": g_riesz})


def verify_RS_theorem(F, G, lam=None, tol=RANK_TOL, seed=0) -> TheoremReport:
    """``||R_{F,G} - S_F|| <= lambda < A`` makes ``G`` a frame with
    ``||R^* f|| >= (A - lambda) ||f||``."""
    hyp = _Hyp()
    fb = order_bounds(F)
    hyp.require("F frame", is_frame(F, tol), lower=fb.lower)
    if not hyp.ok:
        return _finish("R-S", hyp, None, seed, 0)
    R = build_R(F, G)
    S = frame_operator(F)
    diff = R - S
    measured_lam = op_norm(diff)
    if lam is None:
        lam = measured_lam
    else:
        ok = hyp.require("||R f - S f|| <= lambda ||f||", measured_lam <= lam * (1 + ALG_TOL) + ALG_TOL, measured=measured_lam, value=lam)
        if not ok:
            hyp.witness = {"f": _witness(norming_vector(diff, "max")), "ratio": measured_lam}
    hyp.require("0 <= lambda < A", 0 <= lam < fb.lower, value=lam, A=fb.lower)
    measured = {"A": fb.lower, "B": fb.upper, "lambda": measured_lam}
    if not hyp.ok:
        return _finish("R-S", hyp, None, seed, 0, measured=measured)
    r_low = min_singular(R.H)
    concl = _Concl()
    concl.geq("min ||R^* f|| / ||f||", r_low, fb.lower - lam)
    concl.true("R surjective", is_surjective(R, tol))
    concl.true("G frame", is_frame(G, tol), lower=order_bounds(G).lower)
    rt_f, rt_g = riesz_type_or_false(F, tol), riesz_type_or_false(G, tol)
    concl.true("F Riesz-type iff G Riesz-type", rt_f == rt_g, F=rt_f, G=rt_g)
    measured.update(R_adjoint_min_singular=r_low, F_riesz=rt_f, G_riesz=rt_g)
    tight = {"lower": r_low / (fb.lower - lam)}
    return _finish("R-S", hyp, concl, seed, 0, predicted={"lower": fb.lower - lam, "lambda": lam}, measured=measured, tightness=tight)
