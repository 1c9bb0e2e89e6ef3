"""Exact Padé approximation of the generating function.

Given the series ``Y(x) = sum p_k x^k`` (``p_0 = 1``) attached to a
parameter set with degrees ``(m, n)``, the approximation problem asks for
polynomials ``P`` (degree <= m) and ``Q`` (degree <= n) with

    Y(x) Q(x) - P(x) = O(x^(m+n+1)).

Three independent routes are provided:

* :func:`build_PQ` — coefficient-by-coefficient through Jacobi–Trudi
  determinants ``s_shape = det(p_{shape_i - i + j})``:

      P = sum_{i=0..m} s_{(m^n, i)} x^i,
      Q = sum_{i=0..n} s_{((m+1)^i, m^(n-i))} (-x)^i.

* :func:`build_PQ_single_det` — each polynomial as a single determinant
  whose entries are small Laurent polynomials, reproducing the same
  normalization exactly.
* :func:`pade_linear_solve` — a null-space computation on the raw linear
  system, agreeing with the other two up to one overall scalar.

The shared normalization has ``Q(0) = s_{(m^n)}``, the tau value of the
problem, which must be nonzero for the construction to be nondegenerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    DegenerateParametersError,
    InsufficientCoefficientsError,
    KernelDimensionError,
)
from .qcore import Q
from .series import (
    ParamSet,
    Poly,
    TruncSeries,
    generating_series,
    p_list,
    series_mul,
    series_sub,
)

__all__ = [
    "schur",
    "tau_value",
    "bareiss_det",
    "kernel_vector",
    "PadePair",
    "build_PQ",
    "build_PQ_single_det",
    "pade_linear_solve",
    "PadeReport",
    "verify_pade",
]


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def bareiss_det(rows: Sequence[Sequence[Q]]) -> Q:
    """Fraction-free (Bareiss) determinant of a square matrix."""
    n = len(rows)
    if n == 0:
        return Q(1)
    m = [[Q(v) for v in row] for row in rows]
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = Q(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Q(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Q(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def kernel_vector(rows: Sequence[Sequence[Q]], ncols: int) -> tuple[Q, ...]:
    """A basis vector of the null space of ``rows`` (over the rationals).

    Raises :class:`KernelDimensionError` unless the null space is exactly
    one-dimensional.
    """
    m = [[Q(v) for v in row] for row in rows]
    if any(len(row) != ncols for row in m):
        raise ValueError("inconsistent row length")
    nrows = len(m)
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [vi - factor * vr for vi, vr in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    pivot_cols = {c for _, c in pivots}
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    if len(free_cols) != 1:
        raise KernelDimensionError(
            f"null space has dimension {len(free_cols)}, expected 1"
        )
    free = free_cols[0]
    vec = [Q(0)] * ncols
    vec[free] = Q(1)
    for prow, pcol in pivots:
        vec[pcol] = -m[prow][free]
    return tuple(vec)


# ---------------------------------------------------------------------------
# Jacobi–Trudi determinants
# ---------------------------------------------------------------------------


def _entry(plist: Sequence[Q], idx: int) -> Q:
    if idx < 0:
        return Q(0)
    if idx >= len(plist):
        raise InsufficientCoefficientsError(
            f"need series coefficient p_{idx} but only p_0..p_{len(plist)-1} given"
        )
    return plist[idx]


def schur(plist: Sequence[Q], shape: Sequence[int]) -> Q:
    """Jacobi–Trudi determinant ``det(p_{shape_i - i + j})`` (1-based i, j).

    ``shape`` may be any integer sequence (not necessarily a partition);
    the empty shape gives 1.  Entries with negative index are zero, while
    an index beyond the supplied coefficient list raises
    :class:`InsufficientCoefficientsError`.
    """
    r = len(shape)
    if r == 0:
        return Q(1)
    rows = [
        [_entry(plist, shape[i] - (i + 1) + (j + 1)) for j in range(r)]
        for i in range(r)
    ]
    return bareiss_det(rows)


def tau_value(plist: Sequence[Q], m: int, n: int) -> Q:
    """The tau value ``s_{(m^n)}`` of the degree-(m, n) problem."""
    return schur(plist, (m,) * n)


# ---------------------------------------------------------------------------
# approximant construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadePair:
    """The approximant pair with its normalization constant ``tau = Q(0)``."""

    P: Poly
    Q: Poly
    tau: Q


def _degrees(ps: ParamSet) -> tuple[int, int]:
    m, n = ps.degrees
    if m < 0 or n < 0:
        raise DegenerateParametersError("degrees must be >= 0")
    return m, n


def build_PQ(ps: ParamSet) -> PadePair:
    """Approximant pair through per-coefficient Jacobi–Trudi determinants."""
    m, n = _degrees(ps)
    plist = p_list(ps, m + n)
    tau = tau_value(plist, m, n)
    if tau == 0:
        raise DegenerateParametersError(
            f"tau value s_(({m}^{n})) vanishes; approximant is degenerate"
        )
    p_coeffs = [schur(plist, (m,) * n + (i,)) for i in range(m + 1)]
    q_coeffs = [
        Q(-1) ** i * schur(plist, (m + 1,) * i + (m,) * (n - i))
        for i in range(n + 1)
    ]
    return PadePair(P=Poly(p_coeffs), Q=Poly(q_coeffs), tau=tau)


# -- single-determinant route (Laurent-polynomial entries) ------------------


def _l_add(u: dict[int, Q], v: dict[int, Q]) -> dict[int, Q]:
    out = dict(u)
    for e, c in v.items():
        c2 = out.get(e, Q(0)) + c
        if c2 == 0:
            out.pop(e, None)
        else:
            out[e] = c2
    return out


def _l_mul(u: dict[int, Q], v: dict[int, Q]) -> dict[int, Q]:
    out: dict[int, Q] = {}
    for e1, c1 in u.items():
        for e2, c2 in v.items():
            e = e1 + e2
            c = out.get(e, Q(0)) + c1 * c2
            if c == 0:
                out.pop(e, None)
            else:
                out[e] = c
    return out


def _l_scale(u: dict[int, Q], c: Q) -> dict[int, Q]:
    if c == 0:
        return {}
    return {e: c * v for e, v in u.items()}


def _laurent_det(mat: list[list[dict[int, Q]]]) -> dict[int, Q]:
    """Cofactor-expansion determinant of a matrix of Laurent polynomials."""
    size = len(mat)
    if size == 0:
        return {0: Q(1)}
    if size == 1:
        return mat[0][0]
    out: dict[int, Q] = {}
    sign = Q(1)
    for j in range(size):
        entry = mat[0][j]
        if entry:
            minor = [
                [mat[i][jj] for jj in range(size) if jj != j]
                for i in range(1, size)
            ]
            out = _l_add(out, _l_scale(_l_mul(entry, _laurent_det(minor)), sign))
        sign = -sign
    return out


def _laurent_to_poly(u: dict[int, Q], max_degree: int) -> Poly:
    if u and (min(u) < 0 or max(u) > max_degree):
        raise ValueError(
            f"Laurent result has exponent range {min(u)}..{max(u)}, "
            f"expected 0..{max_degree}"
        )
    return Poly(u.get(k, Q(0)) for k in range(max_degree + 1))


def build_PQ_single_det(ps: ParamSet) -> PadePair:
    """Approximant pair, each polynomial as one determinant.

    ``P`` is ``x**m`` times the ``(m^(n+1))`` determinant with each entry
    ``p_k`` replaced by ``sum_{l=0..k} p_l x^(l-k)``; ``Q`` is ``(-x)**n``
    times the ``((m+1)^n)`` determinant with ``p_k`` replaced by
    ``p_k - p_(k-1)/x``.  Both reproduce :func:`build_PQ` exactly.
    """
    m, n = _degrees(ps)
    plist = p_list(ps, m + n)

    def sub_p(k: int) -> dict[int, Q]:
        if k < 0:
            return {}
        out = {}
        for l in range(k + 1):
            if plist[l] != 0:
                out[l - k] = plist[l]
        return out

    def sub_q(k: int) -> dict[int, Q]:
        if k < 0:
            return {}
        out: dict[int, Q] = {}
        if _entry(plist, k) != 0:
            out[0] = plist[k]
        if k >= 1 and plist[k - 1] != 0:
            out[-1] = -plist[k - 1]
        return out

    p_mat = [[sub_p(m - (i + 1) + (j + 1)) for j in range(n + 1)] for i in range(n + 1)]
    p_laurent = _l_mul(_laurent_det(p_mat), {m: Q(1)})
    p_poly = _laurent_to_poly(p_laurent, m)

    q_mat = [[sub_q(m + 1 - (i + 1) + (j + 1)) for j in range(n)] for i in range(n)]
    q_laurent = _l_mul(_laurent_det(q_mat), {n: Q(-1) ** n})
    q_poly = _laurent_to_poly(q_laurent, n)

    tau = q_poly.coeff(0)
    if tau == 0:
        raise DegenerateParametersError(
            f"tau value s_(({m}^{n})) vanishes; approximant is degenerate"
        )
    return PadePair(P=p_poly, Q=q_poly, tau=tau)


def pade_linear_solve(ps: ParamSet) -> tuple[Poly, Poly]:
    """Null-space route: solve the defining linear system directly.

    Unknowns are the ``m+n+2`` coefficients of ``(P, Q)``; the ``m+n+1``
    equations are the coefficients of ``x^0 .. x^(m+n)`` in ``Y Q - P``.
    The null space must be one-dimensional
    (:class:`KernelDimensionError` otherwise); the basis vector returned by
    the elimination fixes the scaling.
    """
    m, n = _degrees(ps)
    y = p_list(ps, m + n)
    ncols = (m + 1) + (n + 1)
    rows = []
    for k in range(m + n + 1):
        row = [Q(0)] * ncols
        if k <= m:
            row[k] = Q(-1)
        for j in range(min(n, k) + 1):
            row[m + 1 + j] = y[k - j]
        rows.append(row)
    vec = kernel_vector(rows, ncols)
    return Poly(vec[: m + 1]), Poly(vec[m + 1 :])


@dataclass(frozen=True)
class PadeReport:
    """Outcome of an exact approximation check.

    ``window`` holds the coefficients of ``Y Q - P`` for ``x^0..x^(m+n)``
    (all must vanish); ``tail`` is the first coefficient beyond the window
    when the working order reaches it (it is *not* required to vanish).
    """

    ps: ParamSet
    pair: PadePair
    order: int
    window: tuple[Q, ...]
    tail: Q | None
    ok: bool


def verify_pade(
    ps: ParamSet, pair: PadePair | None = None, order: int | None = None
) -> PadeReport:
    """Check ``Y Q - P = O(x^(m+n+1))`` exactly."""
    m, n = _degrees(ps)
    if pair is None:
        pair = build_PQ(ps)
    if order is None:
        order = m + n + 9
    if order < m + n:
        raise ValueError("working order too small to cover the defect window")
    y = generating_series(ps, order)
    residual = series_sub(
        series_mul(y, pair.Q.to_series(order)), pair.P.to_series(order)
    )
    window = tuple(residual.coeffs[: m + n + 1])
    tail = residual.coeffs[m + n + 1] if order >= m + n + 1 else None
    ok = all(c == 0 for c in window)
    return PadeReport(ps=ps, pair=pair, order=order, window=window, tail=tail, ok=ok)
