"""End-to-end acceptance suite over exact rationals, zero tolerance.

Nine independent criteria exercise the whole stack — approximation
condition, multi-route agreement, closed-form coefficients, Casorati
factorization, contiguity operators, evolution of the special solutions,
Lax-pair compatibility, base-point certification, and step bijectivity —
across all four surfaces and deterministic random parameter grids.  Every
comparison is exact equality of :class:`fractions.Fraction` values.

Draws that hit genuinely singular configurations (vanishing tau, singular
steps, poles at sample points) are redrawn deterministically; identity
failures are never retried.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from math import gcd, prod

from .qcore import Q
from .errors import (
    CertificationFailedError,
    DegenerateParametersError,
    DegenerateTauError,
    PoleAtEvaluationPointError,
    RatioSingularError,
    ShapeViolationError,
    StepSingularError,
)
from .series import (
    SURFACES,
    ParamSet,
    generating_series,
    p_list,
    pk_closed_form,
    random_paramset,
    series_dilate,
    series_mul,
    tshift,
    tshift_inverse,
    tsuda_series,
)
from .pade import build_PQ, build_PQ_single_det, pade_linear_solve, verify_pade
from .contiguity import (
    assemble_L2_L3,
    casorati,
    contig_apply,
    extract_factors,
    poly_branch,
    series_branch,
    special_fg,
)
from .painleve import (
    BasePoint,
    State,
    base_points,
    c0c1,
    certify_all,
    certify_base_point,
    compatibility_residual,
    eq1_residual,
    eq2_residual,
    lax_apply_poly,
    lax_apply_series,
    lax_operator,
    random_state,
    step_backward,
    step_forward,
)

__all__ = ["CriterionResult", "run_all", "CRITERIA"]

_SINGULAR_DRAW = (
    DegenerateParametersError,
    DegenerateTauError,
    RatioSingularError,
    StepSingularError,
    PoleAtEvaluationPointError,
)

_SIDX = {name: i + 1 for i, name in enumerate(SURFACES)}


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one acceptance criterion."""

    index: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _seed(*parts: int) -> int:
    acc = 0
    for p in parts:
        acc = (acc * 1000003 + p + 17) % (2**31 - 1)
    return acc + 11


def _rand_q(rng: random.Random) -> Q:
    while True:
        p = rng.randint(2, 97)
        r = rng.randint(2, 97)
        if gcd(p, r) == 1:
            return Q(p, r)


def _case(surface: str, m: int, n: int, seed: int) -> str:
    return f"{surface} m={m} n={n} seed={seed}"


def _draw_with(surface: str, m: int, n: int, base_seed: int, builder):
    """Redraw deterministically while `builder` hits singular configurations."""
    last: Exception | None = None
    for r in range(60):
        seed = base_seed + 7919 * r
        ps = random_paramset(surface, m, n, seed=seed)
        try:
            return seed, ps, builder(ps)
        except _SINGULAR_DRAW as exc:
            last = exc
    raise RuntimeError(
        f"no generic draw for {surface} m={m} n={n}: last failure {last!r}"
    )


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    """Approximation condition on the full degree grid, under one minute."""
    t0 = time.perf_counter()
    checked = 0
    for surface in SURFACES:
        for m in range(5):
            for n in range(5):
                for t in range(5):
                    seed, ps, report = _draw_with(
                        surface, m, n, _seed(1, _SIDX[surface], m, n, t),
                        verify_pade,
                    )
                    if not report.ok:
                        return CriterionResult(
                            1, "pade-condition", False,
                            f"residual window not zero at {_case(surface, m, n, seed)}",
                            time.perf_counter() - t0,
                        )
                    checked += 1
    elapsed = time.perf_counter() - t0
    if elapsed >= 60.0:
        return CriterionResult(
            1, "pade-condition", False,
            f"{checked} draws verified but runtime {elapsed:.1f}s exceeds 60s",
            elapsed,
        )
    return CriterionResult(
        1, "pade-condition", True, f"{checked} parameter draws verified", elapsed
    )


def _joint_coeffs(p1, q1) -> list[Q]:
    return [p1.coeff(i) for i in range(p1.degree + 1)] + [
        q1.coeff(i) for i in range(q1.degree + 1)
    ]


def _proportional(p1, q1, p2, q2) -> bool:
    top = max(p1.degree, p2.degree, q1.degree, q2.degree) + 1
    v1 = [p1.coeff(i) for i in range(top)] + [q1.coeff(i) for i in range(top)]
    v2 = [p2.coeff(i) for i in range(top)] + [q2.coeff(i) for i in range(top)]
    lam = None
    for a, b in zip(v1, v2):
        if b != 0:
            lam = a / b
            break
        if a != 0:
            return False
    if lam is None or lam == 0:
        return False
    return all(a == lam * b for a, b in zip(v1, v2))


def criterion_2() -> CriterionResult:
    """Three construction routes agree on the full degree grid."""
    t0 = time.perf_counter()
    checked = 0
    for surface in SURFACES:
        for m in range(5):
            for n in range(5):
                for t in range(5):
                    seed, ps, pair = _draw_with(
                        surface, m, n, _seed(2, _SIDX[surface], m, n, t),
                        build_PQ,
                    )
                    single = build_PQ_single_det(ps)
                    if single.P != pair.P or single.Q != pair.Q:
                        return CriterionResult(
                            2, "pade-route-agreement", False,
                            f"single-determinant route differs at {_case(surface, m, n, seed)}",
                            time.perf_counter() - t0,
                        )
                    p_ls, q_ls = pade_linear_solve(ps)
                    if not _proportional(pair.P, pair.Q, p_ls, q_ls):
                        return CriterionResult(
                            2, "pade-route-agreement", False,
                            f"null-space route not proportional at {_case(surface, m, n, seed)}",
                            time.perf_counter() - t0,
                        )
                    checked += 1
    return CriterionResult(
        2, "pade-route-agreement", True,
        f"{checked} draws agree across all three routes",
        time.perf_counter() - t0,
    )


def criterion_3(a21_paper_literal: bool = False) -> CriterionResult:
    """Closed-form series coefficients match the product expansion, k <= 12."""
    t0 = time.perf_counter()
    checked = 0
    literal_note = ""
    for surface in SURFACES:
        for t in range(5):
            seed, ps, ref = _draw_with(
                surface, 0, 0, _seed(3, _SIDX[surface], t),
                lambda p: p_list(p, 12),
            )
            use_literal = a21_paper_literal and surface == "a21"
            for k in range(13):
                val = pk_closed_form(ps, k, paper_literal=use_literal)
                if val != ref[k]:
                    return CriterionResult(
                        3, "coefficient-closed-forms", False,
                        f"closed form disagrees with the product expansion at "
                        f"{surface} seed={seed} k={k}"
                        + (" (printed a21 variant in force)" if use_literal else ""),
                        time.perf_counter() - t0,
                    )
            if surface in ("d5", "e6"):
                if tsuda_series(ps, 12) != generating_series(ps, 12):
                    return CriterionResult(
                        3, "coefficient-closed-forms", False,
                        f"exponential route differs from the product at {surface} seed={seed}",
                        time.perf_counter() - t0,
                    )
            if surface == "a21" and not a21_paper_literal:
                lit = pk_closed_form(ps, 1, paper_literal=True)
                if lit == ref[1]:
                    return CriterionResult(
                        3, "coefficient-closed-forms", False,
                        f"printed a21 variant unexpectedly matches at seed={seed} k=1",
                        time.perf_counter() - t0,
                    )
                literal_note = (
                    "; printed a21 head disagrees at k=1 as expected "
                    "(corrected power form in force)"
                )
            checked += 1
    return CriterionResult(
        3, "coefficient-closed-forms", True,
        f"{checked} draws verified through k=12" + literal_note,
        time.perf_counter() - t0,
    )


def criterion_4() -> CriterionResult:
    """Casorati determinants factor exactly and reproduce the tau-ratio (f, g)."""
    t0 = time.perf_counter()
    checked = 0
    for surface in SURFACES:
        for m in range(4):
            for n in range(4):
                for t in range(5):
                    def build(ps: ParamSet):
                        return extract_factors(ps), special_fg(ps)

                    try:
                        seed, ps, (fd, fg) = _draw_with(
                            surface, m, n, _seed(4, _SIDX[surface], m, n, t),
                            build,
                        )
                    except ShapeViolationError as exc:
                        return CriterionResult(
                            4, "casorati-factorization", False,
                            f"shape violation for {surface} m={m} n={n}: {exc}",
                            time.perf_counter() - t0,
                        )
                    if (fd.f, fd.g) != fg:
                        return CriterionResult(
                            4, "casorati-factorization", False,
                            f"(f, g) mismatch at {_case(surface, m, n, seed)}",
                            time.perf_counter() - t0,
                        )
                    checked += 1
    return CriterionResult(
        4, "casorati-factorization", True,
        f"{checked} draws factor exactly with matching (f, g)",
        time.perf_counter() - t0,
    )


def criterion_5() -> CriterionResult:
    """Contiguity operators annihilate both branches; constants behave."""
    t0 = time.perf_counter()
    lam, mu = Q(3, 2), Q(5, 7)
    checked = 0
    for surface in SURFACES:
        for m in range(3):
            for n in range(3):
                for t in range(2):
                    def build(ps: ParamSet):
                        cas = casorati(ps)
                        return cas, extract_factors(ps, cas)

                    seed, ps, (cas, fd) = _draw_with(
                        surface, m, n, _seed(5, _SIDX[surface], m, n, t), build
                    )
                    case = _case(surface, m, n, seed)
                    l2, l3 = assemble_L2_L3(ps, fd)
                    branches = (
                        poly_branch(ps.q, cas.P, cas.Pbar, cas.order),
                        series_branch(ps, cas.Qn, cas.Qnbar, cas.order),
                    )
                    for op, tag in ((l2, "up"), (l3, "down")):
                        for br, btag in zip(branches, ("poly", "series")):
                            res = contig_apply(op, br)
                            if any(c != 0 for c in res.coeffs):
                                return CriterionResult(
                                    5, "contiguity-operators", False,
                                    f"{tag} operator does not annihilate the "
                                    f"{btag} branch at {case}",
                                    time.perf_counter() - t0,
                                )
                    product = fd.c0 * fd.c0_bar / fd.c1**2
                    if product != c0c1(ps, fd.g):
                        return CriterionResult(
                            5, "contiguity-operators", False,
                            f"C0*C1 differs from its closed form at {case}",
                            time.perf_counter() - t0,
                        )
                    scaled = (
                        (cas.P.scale(lam), cas.Qn.scale(lam)),
                        (cas.Pbar.scale(mu), cas.Qnbar.scale(mu)),
                    )
                    fd2 = extract_factors(ps, order=cas.order, pairs=scaled)
                    const_ok = (
                        fd2.c0 == lam**2 * fd.c0
                        and fd2.c0_bar == mu**2 * fd.c0_bar
                        and fd2.c1 == lam * mu * fd.c1
                        and (fd.c2 is None or fd2.c2 == lam * mu * fd.c2)
                        and (
                            fd.d3_const is None
                            or fd2.d3_const == lam * mu * fd.d3_const
                        )
                    )
                    gauge_ok = (
                        fd2.f == fd.f
                        and fd2.g == fd.g
                        and fd2.f_bar == fd.f_bar
                        and fd2.c0 * fd2.c0_bar / fd2.c1**2 == product
                    )
                    if not (const_ok and gauge_ok):
                        return CriterionResult(
                            5, "contiguity-operators", False,
                            f"rescaling covariance broken at {case}",
                            time.perf_counter() - t0,
                        )
                    checked += 1
    return CriterionResult(
        5, "contiguity-operators", True,
        f"{checked} draws annihilate both branches with covariant constants",
        time.perf_counter() - t0,
    )


def criterion_6() -> CriterionResult:
    """Special solutions satisfy both evolution relations and the step map."""
    t0 = time.perf_counter()
    checked = 0
    for surface in SURFACES:
        for m in range(4):
            for n in range(4):
                for t in range(5):
                    def build(ps: ParamSet):
                        fg = special_fg(ps)
                        fg_up = special_fg(tshift(ps))
                        fg_dn = special_fg(tshift_inverse(ps))
                        step = step_forward(ps, State(*fg))
                        return fg, fg_up, fg_dn, step

                    seed, ps, (fg, fg_up, fg_dn, step) = _draw_with(
                        surface, m, n, _seed(6, _SIDX[surface], m, n, t), build
                    )
                    case = _case(surface, m, n, seed)
                    f, g = fg
                    if eq1_residual(ps, f, g, fg_dn[1]) != 0:
                        return CriterionResult(
                            6, "evolution-special-solutions", False,
                            f"down-relation fails at {case}",
                            time.perf_counter() - t0,
                        )
                    if eq2_residual(ps, f, g, fg_up[0]) != 0:
                        return CriterionResult(
                            6, "evolution-special-solutions", False,
                            f"up-relation fails at {case}",
                            time.perf_counter() - t0,
                        )
                    if (step.f, step.g) != fg_up:
                        return CriterionResult(
                            6, "evolution-special-solutions", False,
                            f"forward step misses the translated solution at {case}",
                            time.perf_counter() - t0,
                        )
                    checked += 1
    return CriterionResult(
        6, "evolution-special-solutions", True,
        f"{checked} draws satisfy both relations and the step map",
        time.perf_counter() - t0,
    )


def criterion_7() -> CriterionResult:
    """Lax pair closes exactly at sample points and annihilates both branches."""
    t0 = time.perf_counter()
    closed = 0
    for surface in SURFACES:
        done = 0
        trial = 0
        while done < 20:
            trial += 1
            if trial > 500:
                return CriterionResult(
                    7, "lax-compatibility", False,
                    f"could not find 20 nonsingular sample triples for {surface}",
                    time.perf_counter() - t0,
                )
            seed = _seed(7, _SIDX[surface], trial)
            try:
                ps = random_paramset(surface, 0, 0, seed=seed)
                st = random_state(seed + 13)
                x0 = _rand_q(random.Random(seed + 29))
                res = compatibility_residual(ps, st, x0)
            except _SINGULAR_DRAW:
                continue
            if res != (0, 0):
                return CriterionResult(
                    7, "lax-compatibility", False,
                    f"nonzero closure residual at {surface} seed={seed}",
                    time.perf_counter() - t0,
                )
            image = step_forward(ps, st)
            probes = (
                ("fbar", lambda d: {"fbar": image.f + d}),
                ("gbar", lambda d: {"gbar": image.g + d}),
                ("c0c1_value", lambda d: {"c0c1_value": c0c1(ps, st.g) + d}),
            )
            for label, mk in probes:
                fired = None
                for delta in (1, 2, 3):
                    try:
                        pres = compatibility_residual(ps, st, x0, **mk(Q(delta)))
                    except _SINGULAR_DRAW:
                        continue
                    fired = pres != (0, 0)
                    break
                if not fired:
                    return CriterionResult(
                        7, "lax-compatibility", False,
                        f"{label} perturbation left the residual zero at "
                        f"{surface} seed={seed}",
                        time.perf_counter() - t0,
                    )
            done += 1
            closed += 1
    annihilated = 0
    for surface in SURFACES:
        for m in range(3):
            for n in range(3):
                for t in range(2):
                    def build(ps: ParamSet):
                        cas = casorati(ps)
                        return cas, extract_factors(ps, cas)

                    seed, ps, (cas, fd) = _draw_with(
                        surface, m, n, _seed(77, _SIDX[surface], m, n, t), build
                    )
                    case = _case(surface, m, n, seed)
                    lax = lax_operator(ps, State(fd.f, fd.g))
                    if lax_apply_poly(lax, cas.P, ps.q).degree != -1:
                        return CriterionResult(
                            7, "lax-compatibility", False,
                            f"spectral operator does not kill the polynomial "
                            f"branch at {case}",
                            time.perf_counter() - t0,
                        )
                    y = series_mul(
                        generating_series(ps, cas.order),
                        cas.Qn.to_series(cas.order),
                    )
                    res = lax_apply_series(
                        lax,
                        series_dilate(y, 1 / ps.q),
                        y,
                        series_dilate(y, ps.q),
                    )
                    if any(c != 0 for c in res.coeffs):
                        return CriterionResult(
                            7, "lax-compatibility", False,
                            f"spectral operator does not kill the series branch "
                            f"at {case}",
                            time.perf_counter() - t0,
                        )
                    annihilated += 1
    return CriterionResult(
        7, "lax-compatibility", True,
        f"{closed} sample triples close with firing probes; "
        f"{annihilated} draws annihilated on both branches",
        time.perf_counter() - t0,
    )


def criterion_8() -> CriterionResult:
    """Exactly eight base points per surface, all certified; others fail."""
    t0 = time.perf_counter()
    for surface in SURFACES:
        seed, ps, _ = _draw_with(
            surface, 0, 0, _seed(8, _SIDX[surface]), lambda p: None
        )
        pts = base_points(ps)
        total = sum(bp.multiplicity for bp in pts)
        if total != 8:
            return CriterionResult(
                8, "base-point-certification", False,
                f"{surface}: multiplicities sum to {total}, not 8",
                time.perf_counter() - t0,
            )
        try:
            certify_all(ps)
        except CertificationFailedError as exc:
            return CriterionResult(
                8, "base-point-certification", False,
                f"{surface}: {exc}", time.perf_counter() - t0,
            )
        finite = {
            (bp.f, bp.g) for bp in pts if bp.f is not None and bp.g is not None
        }
        rejected = 0
        probe = 0
        while rejected < 5:
            probe += 1
            if probe > 100:
                return CriterionResult(
                    8, "base-point-certification", False,
                    f"{surface}: could not draw 5 off-base probe points",
                    time.perf_counter() - t0,
                )
            st = random_state(_seed(88, _SIDX[surface], probe))
            if (st.f, st.g) in finite:
                continue
            rep = certify_base_point(ps, BasePoint(st.f, st.g))
            if rep.certified:
                return CriterionResult(
                    8, "base-point-certification", False,
                    f"{surface}: generic point ({st.f}, {st.g}) certified",
                    time.perf_counter() - t0,
                )
            rejected += 1
    return CriterionResult(
        8, "base-point-certification", True,
        "all four surfaces: 8 base points certified, generic probes rejected",
        time.perf_counter() - t0,
    )


def criterion_9() -> CriterionResult:
    """Backward after forward is the identity; balance survives long orbits."""
    t0 = time.perf_counter()
    roundtrips = 0
    for surface in SURFACES:
        done = 0
        trial = 0
        while done < 20:
            trial += 1
            if trial > 500:
                return CriterionResult(
                    9, "step-bijectivity", False,
                    f"could not find 20 nonsingular states for {surface}",
                    time.perf_counter() - t0,
                )
            seed = _seed(9, _SIDX[surface], trial)
            try:
                ps = random_paramset(surface, 0, 0, seed=seed)
                st = random_state(seed + 13)
                forward = step_forward(ps, st)
                back = step_backward(tshift(ps), forward)
                redo = step_forward(tshift_inverse(ps), step_backward(ps, st))
            except StepSingularError:
                continue
            if back != st or redo != st:
                return CriterionResult(
                    9, "step-bijectivity", False,
                    f"round trip differs at {surface} seed={seed}",
                    time.perf_counter() - t0,
                )
            done += 1
            roundtrips += 1
    orbits = 0
    for t in range(3):
        base = _seed(99, t)
        for r in range(40):
            ps = random_paramset("e6", 0, 0, seed=base + 7919 * r)
            st = random_state(base + 613 * r + 7)
            cur_ps, cur_st = ps, st
            try:
                for _ in range(10):
                    cur_st = step_forward(cur_ps, cur_st)
                    cur_ps = tshift(cur_ps)
                    lhs = cur_ps.a0 * prod(cur_ps.a)
                    rhs = cur_ps.b0 * prod(cur_ps.b)
                    if lhs != rhs:
                        return CriterionResult(
                            9, "step-bijectivity", False,
                            f"balance constraint broken along orbit seed={base}",
                            time.perf_counter() - t0,
                        )
            except StepSingularError:
                continue
            orbits += 1
            break
        else:
            return CriterionResult(
                9, "step-bijectivity", False,
                f"no nonsingular 10-step orbit found for seed block {base}",
                time.perf_counter() - t0,
            )
    return CriterionResult(
        9, "step-bijectivity", True,
        f"{roundtrips} round trips exact; {orbits} ten-step orbits keep the balance",
        time.perf_counter() - t0,
    )


CRITERIA = (
    (1, "pade-condition", criterion_1),
    (2, "pade-route-agreement", criterion_2),
    (3, "coefficient-closed-forms", criterion_3),
    (4, "casorati-factorization", criterion_4),
    (5, "contiguity-operators", criterion_5),
    (6, "evolution-special-solutions", criterion_6),
    (7, "lax-compatibility", criterion_7),
    (8, "base-point-certification", criterion_8),
    (9, "step-bijectivity", criterion_9),
)


def run_all(a21_paper_literal: bool = False) -> tuple[CriterionResult, ...]:
    """Run the nine criteria in order; never raise, always report."""
    results = []
    for index, name, fn in CRITERIA:
        t0 = time.perf_counter()
        try:
            if index == 3:
                res = fn(a21_paper_literal=a21_paper_literal)
            else:
                res = fn()
        except Exception as exc:  # honest red instead of a crash
            res = CriterionResult(
                index, name, False, f"unexpected error: {exc!r}",
                time.perf_counter() - t0,
            )
        results.append(res)
    return tuple(results)
