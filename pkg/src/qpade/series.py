"""Truncated power series, exact polynomials, and q-difference parameter sets.

This module provides the series side of the rational approximation engine:

* :class:`TruncSeries` — a power series known exactly through ``x**order``,
  with ring operations that truncate to the shorter operand.
* :class:`Poly` — an exact polynomial over ``fractions.Fraction``.
* :class:`ParamSet` — the parameter data of one q-difference problem on a
  surface of type ``e6``, ``d5``, ``a4`` or ``a21``.  The generating function
  attached to a parameter set is

      Y(x) = prod_i (a_i x; q)_inf / prod_i (b_i x; q)_inf

  with (numerator count, denominator count) equal to (3,3), (2,2), (2,1)
  and (2,0) respectively, and with the ``e6`` balance constraint
  ``a0*a1*a2*a3 = b0*b1*b2*b3`` where ``a0 = q**m`` and ``b0 = q**n``
  (or free values on a generic parameter set).
* Coefficient routes for Y: the Euler product expansion
  ``(ax;q)_inf = sum_n (-a)^n q^(n(n-1)/2)/(q;q)_n x^n`` and
  ``1/(bx;q)_inf = sum_n b^n/(q;q)_n x^n``, a trace-log exponential route
  for the balanced surfaces, and per-surface closed forms for the single
  coefficient ``p_k`` in terms of terminating basic hypergeometric sums.

Every scalar is a :class:`fractions.Fraction`; all identities checked
downstream hold exactly, with zero tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import (
    DegenerateParametersError,
    InsufficientCoefficientsError,
    NonUnitConstantTermError,
)
from .qcore import Q, QHGFSpec, lauricella_phiD, qhgf_terminating, qpoch

__all__ = [
    "SURFACES",
    "FACTOR_COUNTS",
    "TruncSeries",
    "series_add",
    "series_sub",
    "series_mul",
    "series_scale",
    "series_invert",
    "series_dilate",
    "series_const",
    "Poly",
    "lin",
    "ParamSet",
    "FactorSpec",
    "factor_spec",
    "tshift",
    "tshift_inverse",
    "paramset_to_text",
    "paramset_from_text",
    "random_paramset",
    "qpoch_inf_series",
    "qpoch_inf_inverse_series",
    "generating_series",
    "generating_series_factors",
    "p_list",
    "p1_formula",
    "default_order",
    "tsuda_series",
    "pk_closed_form",
]

#: The four supported surface labels, largest symmetry first.
SURFACES = ("e6", "d5", "a4", "a21")

#: surface -> (number of numerator factors a_i, denominator factors b_i).
FACTOR_COUNTS = {"e6": (3, 3), "d5": (2, 2), "a4": (2, 1), "a21": (2, 0)}


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncSeries:
    """A power series with exact coefficients known through ``x**order``.

    ``coeffs[k]`` is the coefficient of ``x**k``; the tuple always contains
    at least the constant term.  Binary operations truncate to the smaller
    order of the two operands.
    """

    coeffs: tuple[Q, ...]

    def __init__(self, coeffs: Iterable):
        cs = tuple(Q(c) for c in coeffs)
        if not cs:
            raise ValueError("a truncated series needs at least the x^0 coefficient")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Q:
        """Coefficient of ``x**k``; 0 for k < 0, error beyond the order."""
        if k < 0:
            return Q(0)
        if k > self.order:
            raise InsufficientCoefficientsError(
                f"coefficient {k} requested from a series of order {self.order}"
            )
        return self.coeffs[k]

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        return series_add(self, other)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return series_sub(self, other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        return series_mul(self, other)


def series_const(c: Q, order: int) -> TruncSeries:
    """The constant series ``c`` carried through ``x**order``."""
    if order < 0:
        raise ValueError("series order must be >= 0")
    return TruncSeries((Q(c),) + (Q(0),) * order)


def series_add(s: TruncSeries, t: TruncSeries) -> TruncSeries:
    n = min(s.order, t.order)
    return TruncSeries(tuple(s.coeffs[k] + t.coeffs[k] for k in range(n + 1)))


def series_sub(s: TruncSeries, t: TruncSeries) -> TruncSeries:
    n = min(s.order, t.order)
    return TruncSeries(tuple(s.coeffs[k] - t.coeffs[k] for k in range(n + 1)))


def series_mul(s: TruncSeries, t: TruncSeries) -> TruncSeries:
    n = min(s.order, t.order)
    out = [Q(0)] * (n + 1)
    for i, ci in enumerate(s.coeffs[: n + 1]):
        if ci == 0:
            continue
        for j in range(n + 1 - i):
            cj = t.coeffs[j]
            if cj != 0:
                out[i + j] += ci * cj
    return TruncSeries(out)


def series_scale(s: TruncSeries, c: Q) -> TruncSeries:
    c = Q(c)
    return TruncSeries(tuple(c * ck for ck in s.coeffs))


def series_invert(s: TruncSeries) -> TruncSeries:
    """Multiplicative inverse; requires a nonzero constant term."""
    if s.coeffs[0] == 0:
        raise NonUnitConstantTermError(
            "cannot invert a series whose constant term vanishes"
        )
    n = s.order
    inv0 = 1 / s.coeffs[0]
    out = [inv0] + [Q(0)] * n
    for k in range(1, n + 1):
        acc = Q(0)
        for j in range(1, k + 1):
            acc += s.coeffs[j] * out[k - j]
        out[k] = -inv0 * acc
    return TruncSeries(out)


def series_dilate(s: TruncSeries, c: Q) -> TruncSeries:
    """Substitute ``x -> c*x``: the coefficient of ``x**k`` gains ``c**k``."""
    c = Q(c)
    if c == 0:
        raise ValueError("dilation factor must be nonzero")
    out = []
    power = Q(1)
    for ck in s.coeffs:
        out.append(ck * power)
        power *= c
    return TruncSeries(out)


# ---------------------------------------------------------------------------
# exact polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact rational coefficients, low degree first.

    The coefficient tuple never carries trailing zeros; the zero polynomial
    is the empty tuple and has ``degree == -1``.
    """

    coeffs: tuple[Q, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = [Q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Q:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Q(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) + other.coeff(k) for k in range(n))

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(k) - other.coeff(k) for k in range(n))

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.coeffs or not other.coeffs:
            return Poly(())
        out = [Q(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ci in enumerate(self.coeffs):
            if ci == 0:
                continue
            for j, cj in enumerate(other.coeffs):
                if cj != 0:
                    out[i + j] += ci * cj
        return Poly(out)

    def scale(self, c: Q) -> "Poly":
        c = Q(c)
        return Poly(c * ck for ck in self.coeffs)

    def dilate(self, c: Q) -> "Poly":
        """Substitute ``x -> c*x``."""
        c = Q(c)
        if c == 0:
            raise ValueError("dilation factor must be nonzero")
        out = []
        power = Q(1)
        for ck in self.coeffs:
            out.append(ck * power)
            power *= c
        return Poly(out)

    def shift(self, k: int) -> "Poly":
        """Multiply by ``x**k`` (k >= 0)."""
        if k < 0:
            raise ValueError("shift exponent must be >= 0")
        if not self.coeffs:
            return self
        return Poly((Q(0),) * k + self.coeffs)

    def __call__(self, x: Q):
        if not self.coeffs:
            return Q(0)
        acc = self.coeffs[-1]
        for ck in reversed(self.coeffs[:-1]):
            acc = acc * x + ck
        return acc

    def to_series(self, order: int) -> TruncSeries:
        return TruncSeries(tuple(self.coeff(k) for k in range(order + 1)))


def lin(c: Q) -> Poly:
    """The linear factor ``1 - c*x``."""
    return Poly((Q(1), -Q(c)))


# ---------------------------------------------------------------------------
# parameter sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSet:
    """Parameters of one q-difference problem on a fixed surface.

    ``a`` and ``b`` are the numerator / denominator factor parameters of the
    generating function.  Either the integer pair ``(m, n)`` is present, in
    which case ``a0 = q**m`` and ``b0 = q**n`` and the pair doubles as the
    approximation degree, or the set is *generic* and carries free values
    ``a0_free`` / ``b0_free`` instead.

    Instances should normally be built through :meth:`make`, which solves
    the ``e6`` balance constraint for ``b3`` and runs a genericity guard,
    or through :func:`random_paramset`.
    """

    surface: str
    q: Q
    a: tuple[Q, ...]
    b: tuple[Q, ...]
    m: int | None = None
    n: int | None = None
    a0_free: Q | None = None
    b0_free: Q | None = None

    @property
    def a0(self) -> Q:
        if self.m is not None:
            return self.q**self.m
        if self.a0_free is None:
            raise DegenerateParametersError("parameter set has neither m nor a0")
        return self.a0_free

    @property
    def b0(self) -> Q:
        if self.n is not None:
            return self.q**self.n
        if self.b0_free is None:
            raise DegenerateParametersError("parameter set has neither n nor b0")
        return self.b0_free

    @property
    def degrees(self) -> tuple[int, int]:
        if self.m is None or self.n is None:
            raise DegenerateParametersError(
                "generic parameter set carries no approximation degrees"
            )
        return (self.m, self.n)

    @classmethod
    def make(
        cls,
        surface: str,
        q,
        a: Sequence,
        b: Sequence,
        m: int | None = None,
        n: int | None = None,
        a0=None,
        b0=None,
        depth: int | None = None,
    ) -> "ParamSet":
        """Validated constructor.

        For ``e6`` the ``b`` sequence may have length 2, in which case the
        final parameter is solved from the balance constraint
        ``a0*a1*a2*a3 = b0*b1*b2*b3``; a length-3 sequence must satisfy the
        constraint exactly.  Exactly one of ``(m, n)`` / ``(a0, b0)`` must be
        supplied.  ``depth`` bounds the q-power window of the genericity
        guard (default ``max(m+n, 0) + 12``).
        """
        if surface not in SURFACES:
            raise DegenerateParametersError(f"unknown surface {surface!r}")
        q = Q(q)
        a = tuple(Q(v) for v in a)
        b = tuple(Q(v) for v in b)
        na, nb = FACTOR_COUNTS[surface]
        if len(a) != na:
            raise DegenerateParametersError(
                f"surface {surface} needs {na} numerator parameters, got {len(a)}"
            )
        have_mn = m is not None or n is not None
        have_free = a0 is not None or b0 is not None
        if have_mn == have_free:
            raise DegenerateParametersError(
                "supply exactly one of (m, n) or (a0, b0)"
            )
        if have_mn:
            if m is None or n is None or m < 0 or n < 0:
                raise DegenerateParametersError("m and n must both be integers >= 0")
            a0v, b0v = q**m, q**n
            ps_kwargs = dict(m=int(m), n=int(n), a0_free=None, b0_free=None)
        else:
            a0v, b0v = Q(a0), Q(b0)
            ps_kwargs = dict(m=None, n=None, a0_free=a0v, b0_free=b0v)

        if surface == "e6":
            if len(b) == 2:
                if b[0] == 0 or b[1] == 0 or b0v == 0:
                    raise DegenerateParametersError("zero parameter in e6 constraint")
                b = b + (a0v * a[0] * a[1] * a[2] / (b0v * b[0] * b[1]),)
            elif len(b) == 3:
                lhs = a0v * a[0] * a[1] * a[2]
                rhs = b0v * b[0] * b[1] * b[2]
                if lhs != rhs:
                    raise DegenerateParametersError(
                        f"e6 balance constraint violated: {lhs} != {rhs}"
                    )
            else:
                raise DegenerateParametersError(
                    f"surface e6 needs 2 or 3 denominator parameters, got {len(b)}"
                )
        elif len(b) != nb:
            raise DegenerateParametersError(
                f"surface {surface} needs {nb} denominator parameters, got {len(b)}"
            )

        ps = cls(surface=surface, q=q, a=a, b=b, **ps_kwargs)
        genericity_guard(ps, depth=depth)
        return ps


def _default_depth(ps: ParamSet) -> int:
    base = 0
    if ps.m is not None and ps.n is not None:
        base = max(ps.m + ps.n, 0)
    return base + 12


def genericity_guard(ps: ParamSet, depth: int | None = None) -> None:
    """Reject parameter collisions that would break the exact constructions.

    Requires ``q`` outside ``{0, 1, -1}``, all parameters (and ``a0``,
    ``b0``) nonzero, and every ratio among ``{a_i, b_j}`` distinct from
    ``q**t`` for ``|t| <= depth``.
    """
    if depth is None:
        depth = _default_depth(ps)
    q = ps.q
    if q == 0 or q == 1 or q == -1:
        raise DegenerateParametersError(f"base q={q} must avoid {{0, 1, -1}}")
    named = [(f"a{i+1}", v) for i, v in enumerate(ps.a)]
    named += [(f"b{i+1}", v) for i, v in enumerate(ps.b)]
    for name, v in named:
        if v == 0:
            raise DegenerateParametersError(f"parameter {name} must be nonzero")
    if ps.a0 == 0 or ps.b0 == 0:
        raise DegenerateParametersError("a0 and b0 must be nonzero")
    qpowers = set()
    p = Q(1)
    for _ in range(depth + 1):
        qpowers.add(p)
        qpowers.add(1 / p)
        p *= q
    for i, (ni, vi) in enumerate(named):
        for nj, vj in named[i + 1 :]:
            if vi / vj in qpowers:
                raise DegenerateParametersError(
                    f"ratio {ni}/{nj} = {vi / vj} is a q-power within depth {depth}"
                )


def tshift(ps: ParamSet) -> ParamSet:
    """The lattice translation: ``a1 -> q*a1`` and, when present, ``b1 -> q*b1``.

    ``m``, ``n`` and the free ``a0``/``b0`` values are untouched, and the
    ``e6`` balance constraint is preserved (both sides gain one factor q).
    """
    a = (ps.q * ps.a[0],) + ps.a[1:]
    b = (ps.q * ps.b[0],) + ps.b[1:] if ps.b else ps.b
    return replace(ps, a=a, b=b)


def tshift_inverse(ps: ParamSet) -> ParamSet:
    a = (ps.a[0] / ps.q,) + ps.a[1:]
    b = (ps.b[0] / ps.q,) + ps.b[1:] if ps.b else ps.b
    return replace(ps, a=a, b=b)


@dataclass(frozen=True)
class FactorSpec:
    """Raw factor data of a generating function.

    Unlike :class:`ParamSet` this carries no surface bookkeeping and no
    constraint: it is the right vehicle for single-parameter shifts such as
    ``a1 -> q*a1`` alone, which deliberately leave the balanced families.
    """

    q: Q
    num: tuple[Q, ...]
    den: tuple[Q, ...]

    def scale_num(self, i: int, factor: Q) -> "FactorSpec":
        num = tuple(
            v * factor if k == i else v for k, v in enumerate(self.num)
        )
        return FactorSpec(self.q, num, self.den)

    def scale_den(self, i: int, factor: Q) -> "FactorSpec":
        den = tuple(
            v * factor if k == i else v for k, v in enumerate(self.den)
        )
        return FactorSpec(self.q, self.num, den)


def factor_spec(ps: ParamSet) -> FactorSpec:
    return FactorSpec(ps.q, ps.a, ps.b)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt(v: Q) -> str:
    v = Q(v)
    return f"{v.numerator}/{v.denominator}"


def paramset_to_text(ps: ParamSet) -> str:
    """Serialize to a ``key=value`` block; round-trips bit exactly."""
    lines = [f"surface={ps.surface}", f"q={_fmt(ps.q)}"]
    if ps.m is not None:
        lines.append(f"m={ps.m}")
        lines.append(f"n={ps.n}")
    else:
        lines.append(f"a0={_fmt(ps.a0_free)}")
        lines.append(f"b0={_fmt(ps.b0_free)}")
    for i, v in enumerate(ps.a):
        lines.append(f"a{i+1}={_fmt(v)}")
    for i, v in enumerate(ps.b):
        lines.append(f"b{i+1}={_fmt(v)}")
    return "\n".join(lines) + "\n"


def _parse_q(text: str) -> Q:
    if "/" in text:
        num, den = text.split("/", 1)
        return Q(int(num), int(den))
    return Q(int(text))


def paramset_from_text(text: str) -> ParamSet:
    """Parse the :func:`paramset_to_text` format and validate the result."""
    fields: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed parameter line: {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in fields:
            raise ValueError(f"duplicate parameter key: {key}")
        fields[key] = value.strip()
    try:
        surface = fields.pop("surface")
        q = _parse_q(fields.pop("q"))
    except KeyError as exc:
        raise ValueError(f"missing parameter key: {exc}") from exc
    m = n = None
    a0 = b0 = None
    if "m" in fields or "n" in fields:
        m = int(fields.pop("m"))
        n = int(fields.pop("n"))
    else:
        a0 = _parse_q(fields.pop("a0"))
        b0 = _parse_q(fields.pop("b0"))
    avals = []
    i = 1
    while f"a{i}" in fields:
        avals.append(_parse_q(fields.pop(f"a{i}")))
        i += 1
    bvals = []
    i = 1
    while f"b{i}" in fields:
        bvals.append(_parse_q(fields.pop(f"b{i}")))
        i += 1
    if fields:
        raise ValueError(f"unknown parameter keys: {sorted(fields)}")
    return ParamSet.make(surface, q, avals, bvals, m=m, n=n, a0=a0, b0=b0)


def random_paramset(
    surface: str,
    m: int | None = 0,
    n: int | None = 0,
    *,
    seed: int,
    generic: bool = False,
) -> ParamSet:
    """Draw a guard-passing parameter set, deterministically from ``seed``.

    Every drawn value is ``p/r`` with ``p, r`` coprime integers in
    ``[2, 97]``.  With ``generic=True`` the set carries free ``a0``, ``b0``
    values instead of the integer pair ``(m, n)``.  Candidates violating the
    genericity guard (or giving a vanishing first series coefficient) are
    rejected and redrawn.
    """
    rng = random.Random(seed)

    def draw() -> Q:
        while True:
            p = rng.randint(2, 97)
            r = rng.randint(2, 97)
            if gcd(p, r) == 1:
                return Q(p, r)

    na, nb = FACTOR_COUNTS[surface if surface in SURFACES else "d5"]
    if surface not in SURFACES:
        raise DegenerateParametersError(f"unknown surface {surface!r}")
    nb_draw = nb - 1 if surface == "e6" else nb
    for _ in range(5000):
        q = draw()
        a = tuple(draw() for _ in range(na))
        b = tuple(draw() for _ in range(nb_draw))
        kwargs = (
            dict(a0=draw(), b0=draw()) if generic else dict(m=m, n=n)
        )
        try:
            ps = ParamSet.make(surface, q, a, b, **kwargs)
        except DegenerateParametersError:
            continue
        if p1_formula(ps) == 0:
            continue
        return ps
    raise RuntimeError(
        f"could not draw a generic parameter set for {surface} from seed {seed}"
    )


# ---------------------------------------------------------------------------
# generating function coefficients
# ---------------------------------------------------------------------------


def qpoch_inf_series(a: Q, q: Q, order: int) -> TruncSeries:
    """Series of ``(a*x; q)_inf``: coefficients ``(-a)^n q^(n(n-1)/2)/(q;q)_n``."""
    a, q = Q(a), Q(q)
    out = [Q(1)]
    num = Q(1)  # (-a)^n q^(n(n-1)/2)
    den = Q(1)  # (q;q)_n
    qpow = Q(1)  # q^(n-1) tracker
    for k in range(1, order + 1):
        num *= -a * qpow
        qpow *= q
        den *= 1 - q**k
        if den == 0:
            raise DegenerateParametersError(f"(q;q)_{k} vanishes for q={q}")
        out.append(num / den)
    return TruncSeries(out)


def qpoch_inf_inverse_series(b: Q, q: Q, order: int) -> TruncSeries:
    """Series of ``1/(b*x; q)_inf``: coefficients ``b^n/(q;q)_n``."""
    b, q = Q(b), Q(q)
    out = [Q(1)]
    num = Q(1)
    den = Q(1)
    for k in range(1, order + 1):
        num *= b
        den *= 1 - q**k
        if den == 0:
            raise DegenerateParametersError(f"(q;q)_{k} vanishes for q={q}")
        out.append(num / den)
    return TruncSeries(out)


def default_order(ps: ParamSet) -> int:
    """Default working order for series built on a degree-carrying set."""
    m, n = ps.degrees
    return m + n + 9


def generating_series_factors(fs: FactorSpec, order: int) -> TruncSeries:
    """Series of ``prod (a_i x;q)_inf / prod (b_i x;q)_inf`` from raw factors."""
    out = series_const(Q(1), order)
    for a in fs.num:
        out = series_mul(out, qpoch_inf_series(a, fs.q, order))
    for b in fs.den:
        out = series_mul(out, qpoch_inf_inverse_series(b, fs.q, order))
    return out


def generating_series(ps: ParamSet, order: int | None = None) -> TruncSeries:
    if order is None:
        order = default_order(ps)
    return generating_series_factors(factor_spec(ps), order)


def p_list(src: Union[ParamSet, FactorSpec], order: int) -> list[Q]:
    """Coefficients ``p_0 .. p_order`` of the generating function."""
    fs = factor_spec(src) if isinstance(src, ParamSet) else src
    return list(generating_series_factors(fs, order).coeffs)


def p1_formula(src: Union[ParamSet, FactorSpec]) -> Q:
    """Independent closed form for ``p_1``: ``(sum b_i - sum a_i)/(1-q)``."""
    fs = factor_spec(src) if isinstance(src, ParamSet) else src
    return (sum(fs.den, Q(0)) - sum(fs.num, Q(0))) / (1 - fs.q)


def tsuda_series(ps: ParamSet, order: int | None = None) -> TruncSeries:
    """Exponential (trace-log) route to the generating series.

    Valid on the balanced surfaces (equal factor counts): writes
    ``Y = exp( sum_{k>=1} sum_s (b_s^k - a_s^k) / (k (1-q^k)) x^k )``
    and rebuilds the exponential by the standard recurrence
    ``k e_k = sum_{j=1..k} j L_j e_{k-j}``.
    """
    if ps.surface not in ("d5", "e6"):
        raise ValueError(
            f"the exponential route needs equal factor counts; surface {ps.surface}"
        )
    if order is None:
        order = default_order(ps)
    q = ps.q
    logc = [Q(0)] * (order + 1)  # L_j, j >= 1 used
    for j in range(1, order + 1):
        denom = j * (1 - q**j)
        acc = Q(0)
        for a_s, b_s in zip(ps.a, ps.b):
            acc += (b_s**j - a_s**j) / denom
        logc[j] = acc
    e = [Q(1)] + [Q(0)] * order
    for k in range(1, order + 1):
        acc = Q(0)
        for j in range(1, k + 1):
            acc += j * logc[j] * e[k - j]
        e[k] = acc / k
    return TruncSeries(e)


def pk_closed_form(ps: ParamSet, k: int, *, paper_literal: bool = False) -> Q:
    """Closed form for the single coefficient ``p_k``.

    Each surface expresses ``p_k`` through a terminating basic
    hypergeometric sum; the ``e6`` case uses the two-variable terminating
    q-Appell/Lauricella sum.  ``paper_literal`` switches the ``a21``
    prefactor from ``a2**k`` to the q-shifted factorial ``(a2;q)_k`` — a
    variant kept for comparison which fails already at ``k = 1``.
    """
    if k < 0:
        raise ValueError("coefficient index must be >= 0")
    q = ps.q
    qq_k = qpoch(q, q, k)
    if ps.surface == "e6":
        a1, a2, a3 = ps.a
        b1, b2, b3 = ps.b
        pre = b3**k * qpoch(a3 / b3, q, k) / qq_k
        phi = lauricella_phiD(
            alpha=q ** (-k),
            betas=(a1 / b1, a2 / b2),
            gamma=q ** (-k + 1) * b3 / a3,
            zs=(q * b1 / a3, q * b2 / a3),
            q=q,
            k_term=k,
        )
        return pre * phi
    if ps.surface == "d5":
        a1, a2 = ps.a
        b1, b2 = ps.b
        pre = b2**k * qpoch(a2 / b2, q, k) / qq_k
        spec = QHGFSpec(
            upper=(q ** (-k), a1 / b1),
            lower=(b2 * q ** (-k + 1) / a2,),
            base=q,
            argument=q * b1 / a2,
        )
        return pre * qhgf_terminating(spec, k)
    if ps.surface == "a4":
        a1, a2 = ps.a
        (b1,) = ps.b
        pre = q ** (k * (k - 1) // 2) * (-a2) ** k / qq_k
        spec = QHGFSpec(
            upper=(q ** (-k), a1 / b1),
            lower=(Q(0),),
            base=q,
            argument=q * b1 / a2,
        )
        return pre * qhgf_terminating(spec, k)
    if ps.surface == "a21":
        a1, a2 = ps.a
        head = qpoch(a2, q, k) if paper_literal else a2**k
        pre = Q(-1) ** k * q ** (k * (k - 1) // 2) * head / qq_k
        spec = QHGFSpec(
            upper=(q ** (-k),),
            lower=(Q(0),),
            base=q,
            argument=q * a1 / a2,
        )
        return pre * qhgf_terminating(spec, k)
    raise DegenerateParametersError(f"unknown surface {ps.surface!r}")
