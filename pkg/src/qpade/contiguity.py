"""Casorati determinants and contiguity operators of the approximation problem.

For a degree-``(m, n)`` problem with approximant pair ``(P, Q)`` the two
solution branches are ``y = (P, Y*Q)``; an overbar denotes the same data at
the translated parameters (``a1 -> q*a1``, ``b1 -> q*b1`` when present).
Three Casorati determinants control the contiguity structure
(``det[u, v] = u1*v2 - u2*v1`` on the two branches):

    D1 = det[y(x), y(q x)],  D2 = det[y(x), ybar(x)],  D3 = det[y(q x), ybar(x)].

With ``G = Y(qx)/Y(x)``, ``K = Ybar(x)/Y(x)`` (both rational with linear
factors ``1 - c x``) and ``H = lcm`` of their denominators, each determinant
factors exactly:

    D1 = c0 (1 - f x) x^(m+n+1) Y / H,
    D2 = c1           x^(m+n+1) Y / (1 - a1 x),
    D3 = (surface-dependent linear/quadratic factor) x^(m+n+1) Y / H.

The constants define the pair ``(f, g)`` — the dependent variables of the
associated q-difference Painlevé flow — and the two three-term contiguity
operators

    L2 = C0 (1 - f x) ybar      - A(x) y(qx)    + B(x) y,
    L3 = C1 (1 - fbar x/q) y    + A'(x) ybar    - B'(x) ybar(x/q),

with ``C0 = c0/c1`` and ``C1 = c0bar/c1`` (``c0bar`` is the ``D1`` constant
one translation up).  Both operators annihilate both solution branches.

The same ``(f, g)`` admit an independent construction as ratios of tau
values (Jacobi–Trudi determinants) at singly-shifted parameters; see
:func:`special_fg`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DegenerateTauError,
    InsufficientCoefficientsError,
    RatioSingularError,
    ShapeViolationError,
)
from .qcore import Q
from .series import (
    FactorSpec,
    ParamSet,
    Poly,
    TruncSeries,
    factor_spec,
    generating_series,
    lin,
    p_list,
    series_add,
    series_dilate,
    series_invert,
    series_mul,
    series_sub,
    tshift,
)
from .pade import build_PQ, tau_value

__all__ = [
    "GKHData",
    "gkh",
    "CasoratiSet",
    "default_casorati_order",
    "casorati",
    "casorati_bracket",
    "FactorData",
    "extract_factors",
    "special_fg",
    "l2_coeff_polys",
    "l3_coeff_polys",
    "ContigOperator",
    "assemble_L2_L3",
    "SolutionBranch",
    "poly_branch",
    "series_branch",
    "contig_apply",
]


# ---------------------------------------------------------------------------
# the rational multipliers G, K, H
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GKHData:
    """Linear-factor data of ``G = Y(qx)/Y(x)`` and ``K = Ybar(x)/Y(x)``.

    Each tuple lists the values ``c`` of factors ``(1 - c x)``;
    ``h`` is the least common denominator of G and K.
    """

    g_num: tuple[Q, ...]
    g_den: tuple[Q, ...]
    k_num: tuple[Q, ...]
    k_den: tuple[Q, ...]
    h: tuple[Q, ...]


def prod_lin(cs) -> Poly:
    """Product of linear factors ``(1 - c x)``."""
    out = Poly((Q(1),))
    for c in cs:
        out = out * lin(c)
    return out


def gkh(ps: ParamSet) -> GKHData:
    """G, K, H for any surface.

    The factor ``(a x; q)_inf`` contributes ``1/(1 - a x)`` to G, and the
    translation multiplies Y by ``(1 - b1 x)/(1 - a1 x)`` (no numerator on
    ``a21``, which has no ``b`` factors); hence uniformly
    ``G = prod(1 - b_i x)/prod(1 - a_i x)``, ``K`` uses only the first
    parameters, and ``H = prod(1 - a_i x)``.
    """
    return GKHData(
        g_num=ps.b,
        g_den=ps.a,
        k_num=ps.b[:1],
        k_den=ps.a[:1],
        h=ps.a,
    )


# ---------------------------------------------------------------------------
# Casorati determinants: direct and bracket routes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CasoratiSet:
    """The three determinants with the polynomial data that produced them."""

    ps: ParamSet
    order: int
    P: Poly
    Qn: Poly
    Pbar: Poly
    Qnbar: Poly
    d1: TruncSeries
    d2: TruncSeries
    d3: TruncSeries


def default_casorati_order(ps: ParamSet) -> int:
    m, n = ps.degrees
    return m + n + len(ps.a) + 5


def _resolve_pairs(ps: ParamSet, pairs):
    if pairs is None:
        base = build_PQ(ps)
        barp = build_PQ(tshift(ps))
        return (base.P, base.Q), (barp.P, barp.Q)
    (p0, q0), (p1, q1) = pairs
    return (p0, q0), (p1, q1)


def casorati(ps: ParamSet, order: int | None = None, *, pairs=None) -> CasoratiSet:
    """Direct route: determinants of the actual solution branches.

    ``pairs`` may inject replacement ``((P, Q), (Pbar, Qbar))`` polynomials
    (e.g. rescaled ones, for gauge-covariance checks); by default the exact
    approximant pairs at the base and translated parameters are used.
    """
    m, n = ps.degrees
    N = default_casorati_order(ps) if order is None else order
    (P, Qn), (Pb, Qb) = _resolve_pairs(ps, pairs)
    q = ps.q
    y_big = generating_series(ps, N)
    ybar_big = generating_series(tshift(ps), N)
    yq = series_mul(y_big, Qn.to_series(N))
    yq_dil = series_dilate(yq, q)
    ybq = series_mul(ybar_big, Qb.to_series(N))
    p_s = P.to_series(N)
    p_dil = P.dilate(q).to_series(N)
    pb_s = Pb.to_series(N)
    d1 = series_sub(series_mul(p_s, yq_dil), series_mul(yq, p_dil))
    d2 = series_sub(series_mul(p_s, ybq), series_mul(yq, pb_s))
    d3 = series_sub(series_mul(p_dil, ybq), series_mul(yq_dil, pb_s))
    return CasoratiSet(
        ps=ps, order=N, P=P, Qn=Qn, Pbar=Pb, Qnbar=Qb, d1=d1, d2=d2, d3=d3
    )


def casorati_bracket(
    ps: ParamSet, order: int | None = None, *, pairs=None
) -> CasoratiSet:
    """Bracket route: pull the generating function out of each determinant.

    Writes ``Y(qx) = Y G`` and ``Ybar = Y K`` and reduces each determinant
    to ``Y`` times an exact polynomial bracket:

        D1 = (Y/G_den) { G_num P(x) Q(qx) - G_den P(qx) Q(x) },
        D2 = (Y/K_den) { K_num P(x) Qbar(x) - K_den Pbar(x) Q(x) },
        D3 = (Y/H) { (H/K_den) K_num P(qx) Qbar - (H/G_den) G_num Pbar Q(qx) }.

    Must agree with :func:`casorati` coefficient by coefficient.
    """
    m, n = ps.degrees
    N = default_casorati_order(ps) if order is None else order
    (P, Qn), (Pb, Qb) = _resolve_pairs(ps, pairs)
    q = ps.q
    data = gkh(ps)
    g_num = prod_lin(data.g_num)
    g_den = prod_lin(data.g_den)
    k_num = prod_lin(data.k_num)
    k_den = prod_lin(data.k_den)
    h = prod_lin(data.h)
    # H = G_den and K_den = first factor of H, so the two cofactors are:
    h_over_kden = prod_lin(data.h[1:])
    h_over_gden = Poly((Q(1),))
    y_big = generating_series(ps, N)

    br1 = g_num * P * Qn.dilate(q) - g_den * P.dilate(q) * Qn
    d1 = series_mul(series_mul(y_big, series_invert(g_den.to_series(N))), br1.to_series(N))

    br2 = k_num * P * Qb - k_den * Pb * Qn
    d2 = series_mul(series_mul(y_big, series_invert(k_den.to_series(N))), br2.to_series(N))

    br3 = h_over_kden * k_num * P.dilate(q) * Qb - h_over_gden * g_num * Pb * Qn.dilate(q)
    d3 = series_mul(series_mul(y_big, series_invert(h.to_series(N))), br3.to_series(N))
    return CasoratiSet(
        ps=ps, order=N, P=P, Qn=Qn, Pbar=Pb, Qnbar=Qb, d1=d1, d2=d2, d3=d3
    )


# ---------------------------------------------------------------------------
# exact factor extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorData:
    """Constants and Painlevé variables read off the Casorati determinants.

    ``c0, f`` come from D1, ``c1`` from D2, and the D3 block yields ``g``
    (plus ``c2`` on the surfaces where D3 carries a single constant, or the
    quadratic's overall constant ``d3_const`` on ``e6``).  ``c0_bar`` and
    ``f_bar`` are the D1 data one translation up.
    """

    surface: str
    c0: Q
    f: Q
    c1: Q
    c2: Q | None
    d3_const: Q | None
    g: Q
    c0_bar: Q
    f_bar: Q


def _series_quotient(
    d: TruncSeries, extra: Poly, y_inv: TruncSeries, drop: int, what: str
) -> TruncSeries:
    s = series_mul(series_mul(d, extra.to_series(d.order)), y_inv)
    if s.order < drop:
        raise InsufficientCoefficientsError(
            f"{what}: order {s.order} cannot expose the factor x^{drop}"
        )
    for k in range(drop):
        if s.coeffs[k] != 0:
            raise ShapeViolationError(
                f"{what}: coefficient of x^{k} is {s.coeffs[k]}, "
                f"expected zero below x^{drop}"
            )
    return TruncSeries(s.coeffs[drop:])


def _poly_window(w: TruncSeries, max_deg: int, what: str) -> list[Q]:
    for k in range(max_deg + 1, w.order + 1):
        if w.coeffs[k] != 0:
            raise ShapeViolationError(
                f"{what}: unexpected x^{k} term {w.coeffs[k]} beyond degree {max_deg}"
            )
    if w.order < max_deg:
        raise InsufficientCoefficientsError(
            f"{what}: window of order {w.order} shorter than degree {max_deg}"
        )
    return [w.coeff(k) for k in range(max_deg + 1)]


def _d1_block(ps: ParamSet, p_poly: Poly, q_poly: Poly, order: int) -> tuple[Q, Q]:
    """(c0, f) from the first Casorati determinant at the given level."""
    m, n = ps.degrees
    q = ps.q
    y_big = generating_series(ps, order)
    yq = series_mul(y_big, q_poly.to_series(order))
    d1 = series_sub(
        series_mul(p_poly.to_series(order), series_dilate(yq, q)),
        series_mul(yq, p_poly.dilate(q).to_series(order)),
    )
    w = _series_quotient(
        d1, prod_lin(ps.a), series_invert(y_big), m + n + 1, "translated first bracket"
    )
    c0w = _poly_window(w, 1, "translated first bracket")
    if c0w[0] == 0:
        raise ShapeViolationError("first Casorati constant vanishes")
    return c0w[0], -c0w[1] / c0w[0]


def extract_factors(
    ps: ParamSet,
    cas: CasoratiSet | None = None,
    *,
    order: int | None = None,
    pairs=None,
) -> FactorData:
    """Verify the factored shapes of D1, D2, D3 and read off the constants.

    Every deviation from the predicted shape raises
    :class:`ShapeViolationError`; nothing is fitted, only divided exactly.
    """
    if cas is None:
        cas = casorati(ps, order=order, pairs=pairs)
    m, n = ps.degrees
    drop = m + n + 1
    y_big = generating_series(ps, cas.order)
    y_inv = series_invert(y_big)
    h_poly = prod_lin(ps.a)

    w1 = _series_quotient(cas.d1, h_poly, y_inv, drop, "first bracket")
    c0w = _poly_window(w1, 1, "first bracket")
    if c0w[0] == 0:
        raise ShapeViolationError("first Casorati constant vanishes")
    c0 = c0w[0]
    f = -c0w[1] / c0

    w2 = _series_quotient(cas.d2, lin(ps.a[0]), y_inv, drop, "second bracket")
    c1 = _poly_window(w2, 0, "second bracket")[0]
    if c1 == 0:
        raise ShapeViolationError("second Casorati constant vanishes")

    w3 = _series_quotient(cas.d3, h_poly, y_inv, drop, "third bracket")
    c2: Q | None = None
    d3_const: Q | None = None
    if ps.surface == "e6":
        r0, r1, r2 = _poly_window(w3, 2, "third bracket")
        if r0 == 0 or r2 == 0:
            raise ShapeViolationError("third bracket quadratic is degenerate")
        b1 = ps.b[0]
        g = b1 * r0 / r2
        if r1 != -r0 * (b1 + 1 / g):
            raise ShapeViolationError(
                "third bracket quadratic does not factor as (1-b1 x)(1-x/g)"
            )
        if r0 != c1 * ps.a[1] * ps.a[2] * ps.a0 * g / b1:
            raise ShapeViolationError(
                "third bracket constant does not match its predicted value"
            )
        d3_const = r0
    elif ps.surface in ("d5", "a4"):
        w3c = _poly_window(w3, 1, "third bracket")
        c2 = w3c[0]
        if c2 == 0:
            raise ShapeViolationError("third Casorati constant vanishes")
        if w3c[1] != -ps.b[0] * c2:
            raise ShapeViolationError(
                "third bracket linear factor is not (1 - b1 x)"
            )
        g = c1 / c2
    else:  # a21
        c2 = _poly_window(w3, 0, "third bracket")[0]
        if c2 == 0:
            raise ShapeViolationError("third Casorati constant vanishes")
        g = c1 / c2

    c0_bar, f_bar = _d1_block(tshift(ps), cas.Pbar, cas.Qnbar, cas.order)
    return FactorData(
        surface=ps.surface,
        c0=c0,
        f=f,
        c1=c1,
        c2=c2,
        d3_const=d3_const,
        g=g,
        c0_bar=c0_bar,
        f_bar=f_bar,
    )


# ---------------------------------------------------------------------------
# tau-ratio route to (f, g)
# ---------------------------------------------------------------------------


def _tau(fs: FactorSpec, mm: int, nn: int) -> Q:
    """Tau value ``s_((mm^nn))`` from the raw factor data."""
    return tau_value(p_list(fs, mm + nn), mm, nn)


def special_fg(ps: ParamSet) -> tuple[Q, Q]:
    """The pair ``(f, g)`` as ratios of tau values at shifted parameters.

    ``f`` solves, on every surface,

        (1 - f/a1)/(1 - f/a2)
            = Pf * [T_{a1}(tau_{m,n+1}) T_{a1}^{-1}(tau_{m+1,n})]
                 / [T_{a2}(tau_{m,n+1}) T_{a2}^{-1}(tau_{m+1,n})],
        Pf = a1 prod_i (1 - b_i/a1) / (a2 prod_i (1 - b_i/a2)),

    where ``T_c^{+-1}`` rescales the single parameter ``c`` by ``q^{+-1}``
    in the raw factor data (leaving any balance constraint behind) and an
    overbar marks tau values at the translated parameters.  ``g`` is given
    directly by a similar ratio on ``d5``/``a4``/``a21`` and solved from a
    cross-ratio on ``e6``.
    """
    m, n = ps.degrees
    q = ps.q
    fs = factor_spec(ps)
    fs_bar = factor_spec(tshift(ps))
    a1, a2 = ps.a[0], ps.a[1]

    t_a1_up = _tau(fs.scale_num(0, q), m, n + 1)
    t_a1_dn = _tau(fs.scale_num(0, 1 / q), m + 1, n)
    t_a2_up = _tau(fs.scale_num(1, q), m, n + 1)
    t_a2_dn = _tau(fs.scale_num(1, 1 / q), m + 1, n)
    if t_a2_up == 0 or t_a2_dn == 0:
        raise DegenerateTauError("vanishing tau value in the f denominator")
    pf_num = a1
    pf_den = a2
    for b in ps.b:
        pf_num *= 1 - b / a1
        pf_den *= 1 - b / a2
    if pf_den == 0:
        raise RatioSingularError("prefactor denominator vanishes")
    rhs = (pf_num / pf_den) * (t_a1_up * t_a1_dn) / (t_a2_up * t_a2_dn)
    solve_den = rhs / a2 - 1 / a1
    if solve_den == 0:
        raise RatioSingularError("f cross-ratio is singular")
    f = (rhs - 1) / solve_den

    if ps.surface == "e6":
        b2, b3 = ps.b[1], ps.b[2]
        pre_num = b2
        pre_den = b3
        for aa in (ps.a[1], ps.a[2]):
            pre_num *= 1 - aa / b2
            pre_den *= 1 - aa / b3
        if pre_den == 0:
            raise RatioSingularError("g prefactor denominator vanishes")
        tb2_dn = _tau(fs.scale_den(1, 1 / q), m, n + 1)
        tb2_up = _tau(fs_bar.scale_den(1, q), m + 1, n)
        tb3_dn = _tau(fs.scale_den(2, 1 / q), m, n + 1)
        tb3_up = _tau(fs_bar.scale_den(2, q), m + 1, n)
        if tb3_dn == 0 or tb3_up == 0:
            raise DegenerateTauError("vanishing tau value in the g denominator")
        ratio = (pre_num / pre_den) * (tb2_dn * tb2_up) / (tb3_dn * tb3_up)
        if ratio == 1:
            raise RatioSingularError("g cross-ratio is singular")
        g = (1 / b2 - ratio / b3) / (1 - ratio)
        return f, g

    tbar_a1_dn = _tau(fs_bar.scale_num(0, 1 / q), m + 1, n)
    tbar_a2_up = _tau(fs_bar.scale_num(1, q), m, n + 1)
    if tbar_a2_up == 0 or t_a2_dn == 0:
        raise DegenerateTauError("vanishing tau value in the g denominator")
    # prefactor -(a1 - b1)/(q^n (a2 - b2)), each missing b replaced by zero
    pre_num = -(a1 - ps.b[0]) if len(ps.b) >= 1 else -a1
    pre_den = (a2 - ps.b[1]) if len(ps.b) >= 2 else a2
    if pre_den == 0:
        raise RatioSingularError("g prefactor denominator vanishes")
    pre = pre_num / (q**n * pre_den)
    g = pre * (t_a1_up * tbar_a1_dn) / (tbar_a2_up * t_a2_dn)
    return f, g


# ---------------------------------------------------------------------------
# contiguity operators
# ---------------------------------------------------------------------------


def l2_coeff_polys(surface, q, a, b, a0, b0, g) -> tuple[Poly, Poly]:
    """Coefficients ``(A, B)`` of ``L2 = C0(1-fx) ybar - A y(qx) + B y``."""
    if surface == "e6":
        a1, a2, a3 = a
        b1 = b[0]
        return (
            lin(a2) * lin(a3),
            (lin(b1) * lin(1 / g)).scale(a2 * a3 * a0 * g / b1),
        )
    if surface in ("d5", "a4"):
        return lin(a[1]), lin(b[0]).scale(1 / Q(g))
    if surface == "a21":
        return lin(a[1]), Poly((1 / Q(g),))
    raise ValueError(f"unknown surface {surface!r}")


def l3_coeff_polys(surface, q, a, b, a0, b0, g) -> tuple[Poly, Poly]:
    """Coefficients ``(A', B')`` of ``L3 = C1(1-fbar x/q) y + A' ybar - B' ybar(x/q)``."""
    if surface == "e6":
        a1, a2, a3 = a
        b1, b2, b3 = b
        return (
            (lin(a1) * lin(1 / (q * g))).scale(a2 * a3 * a0 * g / b1),
            (lin(b2 / q) * lin(b3 / q)).scale(q * a0 * b0),
        )
    if surface == "d5":
        return lin(a[0]).scale(1 / Q(g)), lin(b[1] / q).scale(q * a0 * b0)
    if surface in ("a4", "a21"):
        return lin(a[0]).scale(1 / Q(g)), Poly((Q(q) * a0 * b0,))
    raise ValueError(f"unknown surface {surface!r}")


@dataclass(frozen=True)
class ContigOperator:
    """A linear q-difference operator as (shift key, polynomial) terms.

    Shift keys name the four sampled values of a solution branch:
    ``y`` = y(x), ``y_q`` = y(qx), ``ybar`` = ybar(x),
    ``ybar_invq`` = ybar(x/q).
    """

    terms: tuple[tuple[str, Poly], ...]


def assemble_L2_L3(ps: ParamSet, fd: FactorData) -> tuple[ContigOperator, ContigOperator]:
    """Build both contiguity operators from extracted factor data."""
    q = ps.q
    c_0 = fd.c0 / fd.c1
    c_1 = fd.c0_bar / fd.c1
    a_poly, b_poly = l2_coeff_polys(ps.surface, q, ps.a, ps.b, ps.a0, ps.b0, fd.g)
    l2 = ContigOperator(
        terms=(
            ("ybar", lin(fd.f).scale(c_0)),
            ("y_q", -a_poly),
            ("y", b_poly),
        )
    )
    ap_poly, bp_poly = l3_coeff_polys(ps.surface, q, ps.a, ps.b, ps.a0, ps.b0, fd.g)
    l3 = ContigOperator(
        terms=(
            ("y", lin(fd.f_bar / q).scale(c_1)),
            ("ybar", ap_poly),
            ("ybar_invq", -bp_poly),
        )
    )
    return l2, l3


@dataclass(frozen=True)
class SolutionBranch:
    """One solution branch sampled at the four shift points."""

    y: TruncSeries
    y_q: TruncSeries
    ybar: TruncSeries
    ybar_invq: TruncSeries


def poly_branch(q: Q, p_poly: Poly, p_bar: Poly, order: int) -> SolutionBranch:
    """The polynomial branch ``y = P`` (with ``ybar = Pbar``)."""
    q = Q(q)
    return SolutionBranch(
        y=p_poly.to_series(order),
        y_q=p_poly.dilate(q).to_series(order),
        ybar=p_bar.to_series(order),
        ybar_invq=p_bar.dilate(1 / q).to_series(order),
    )


def series_branch(ps: ParamSet, q_poly: Poly, q_bar: Poly, order: int) -> SolutionBranch:
    """The series branch ``y = Y*Q`` (with ``ybar = Ybar*Qbar``)."""
    q = ps.q
    y = series_mul(generating_series(ps, order), q_poly.to_series(order))
    ybar = series_mul(generating_series(tshift(ps), order), q_bar.to_series(order))
    return SolutionBranch(
        y=y,
        y_q=series_dilate(y, q),
        ybar=ybar,
        ybar_invq=series_dilate(ybar, 1 / q),
    )


def contig_apply(op: ContigOperator, branch: SolutionBranch) -> TruncSeries:
    """Apply the operator to a sampled branch; exact through the data order."""
    total: TruncSeries | None = None
    for key, poly in op.terms:
        s = getattr(branch, key)
        term = series_mul(poly.to_series(s.order), s)
        total = term if total is None else series_add(total, term)
    assert total is not None
    return total
