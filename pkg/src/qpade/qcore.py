"""Exact rational scalars and q-special functions.

Conventions used throughout:

* ``Q`` is an alias for ``fractions.Fraction``; every scalar in an identity
  path is a ``Q`` (floats never appear).
* q-Pochhammer symbol: ``(a;q)_j = prod_{k=0}^{j-1} (1 - a q^k)`` with the
  empty product equal to 1; the multi-argument symbol is the product of the
  single-argument ones.
* Terminating basic hypergeometric sum (k upper, l lower parameters):

      kφl(a1..ak; b1..bl; q, x)
        = sum_s [(a1..ak;q)_s / ((b1..bl;q)_s (q;q)_s)]
              * [(-1)^s q^(s(s-1)/2)]^(1+l-k) * x^s

  The sign/power factor is applied with exponent ``1 + l - k`` literally for
  every (k, l).  Evaluation requires an upper parameter equal to ``q**-N``
  so the sum terminates at ``s = N``.  A lower parameter 0 contributes
  ``(0;q)_s = 1`` (this falls out of the product formula directly).
* q-Appell Lauricella sum:

      φ_D^(l)(α, β1..βl, γ; z1..zl)
        = sum over multi-indices m of
          (α;q)_|m| prod_i (βi;q)_{m_i}
            / [(γ;q)_|m| prod_i (q;q)_{m_i}] * prod_i zi^{m_i}

  terminating when ``α = q**-N`` (the sum runs over ``|m| <= N``).

All functions are pure and operate on immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _iter_product
from typing import Sequence

from .errors import NonTerminatingError

__all__ = [
    "Q",
    "ExactScalar",
    "QHGFSpec",
    "qpoch",
    "qpoch_multi",
    "qhgf_terminating",
    "lauricella_phiD",
]

#: Exact rational scalar type.  ``fractions.Fraction`` stores lowest terms
#: with a positive denominator and raises ``ZeroDivisionError`` on division
#: by zero, which is exactly the contract required here.
Q = Fraction
ExactScalar = Fraction


def qpoch(a: Q, q: Q, j: int) -> Q:
    """Return the q-shifted factorial ``(a;q)_j`` for ``j >= 0``."""
    if j < 0:
        raise ValueError(f"qpoch order must be >= 0, got {j}")
    out = Q(1)
    power = Q(1)
    for _ in range(j):
        out *= 1 - a * power
        power *= q
    return out


def qpoch_multi(aa: Sequence[Q], q: Q, j: int) -> Q:
    """Return ``(a1,...,ai;q)_j``, the product of single qpoch calls."""
    out = Q(1)
    for a in aa:
        out *= qpoch(a, q, j)
    return out


@dataclass(frozen=True)
class QHGFSpec:
    """Parameters of a basic hypergeometric sum kφl.

    ``upper`` holds a1..ak, ``lower`` holds b1..bl, ``base`` is q and
    ``argument`` is x.  Evaluation is only permitted when some upper
    parameter equals ``base**-k_term`` (checked by :func:`qhgf_terminating`,
    never by scanning an infinite series).
    """

    upper: tuple[Q, ...]
    lower: tuple[Q, ...]
    base: Q
    argument: Q

    def __init__(self, upper: Sequence[Q], lower: Sequence[Q], base: Q, argument: Q):
        object.__setattr__(self, "upper", tuple(Q(u) for u in upper))
        object.__setattr__(self, "lower", tuple(Q(b) for b in lower))
        object.__setattr__(self, "base", Q(base))
        object.__setattr__(self, "argument", Q(argument))


def qhgf_terminating(spec: QHGFSpec, k_term: int) -> Q:
    """Evaluate a terminating kφl sum exactly.

    Raises :class:`NonTerminatingError` if no upper parameter equals
    ``q**-k_term`` and ``ZeroDivisionError`` if a lower Pochhammer vanishes
    at a summand the upper Pochhammers do not already annihilate.
    """
    if k_term < 0:
        raise NonTerminatingError(f"termination order must be >= 0, got {k_term}")
    q = spec.base
    if q == 0:
        raise ZeroDivisionError("base q must be nonzero")
    if not any(u == q ** (-k_term) for u in spec.upper):
        raise NonTerminatingError(
            f"no upper parameter equals q**-{k_term}; upper={spec.upper}"
        )
    exponent = 1 + len(spec.lower) - len(spec.upper)
    x = spec.argument

    total = Q(0)
    for s in range(k_term + 1):
        up = qpoch_multi(spec.upper, q, s)
        if up == 0:
            continue  # summand annihilated by an upper Pochhammer
        low = qpoch_multi(spec.lower, q, s)
        if low == 0:
            raise ZeroDivisionError(
                f"lower Pochhammer vanishes at surviving summand s={s}"
            )
        qq = qpoch(q, q, s)
        if qq == 0:
            raise ZeroDivisionError(f"(q;q)_{s} = 0 for q={q}")
        factor = (Q(-1) ** s) * q ** (s * (s - 1) // 2)
        total += up / (low * qq) * factor**exponent * x**s
    return total


def lauricella_phiD(
    alpha: Q,
    betas: Sequence[Q],
    gamma: Q,
    zs: Sequence[Q],
    q: Q,
    k_term: int,
) -> Q:
    """Evaluate the terminating q-Appell Lauricella sum φ_D^(l).

    ``alpha`` must equal ``q**-k_term``; the multi-index sum then runs over
    ``|m| <= k_term``.  Raises :class:`NonTerminatingError` otherwise and
    ``ZeroDivisionError`` when ``(γ;q)_|m|`` vanishes at a summand where
    ``(α;q)_|m|`` does not.
    """
    if k_term < 0:
        raise NonTerminatingError(f"termination order must be >= 0, got {k_term}")
    if q == 0:
        raise ZeroDivisionError("base q must be nonzero")
    if alpha != q ** (-k_term):
        raise NonTerminatingError(f"alpha={alpha} is not q**-{k_term}")
    betas = tuple(Q(b) for b in betas)
    zs = tuple(Q(z) for z in zs)
    if len(betas) != len(zs):
        raise ValueError("betas and zs must have equal length")
    nvars = len(betas)

    # Precompute one-dimensional Pochhammer tables up to k_term.
    alpha_p = [qpoch(alpha, q, j) for j in range(k_term + 1)]
    gamma_p = [qpoch(gamma, q, j) for j in range(k_term + 1)]
    qq_p = [qpoch(q, q, j) for j in range(k_term + 1)]
    beta_p = [[qpoch(b, q, j) for j in range(k_term + 1)] for b in betas]

    total = Q(0)
    for multi in _iter_product(range(k_term + 1), repeat=nvars):
        weight = sum(multi)
        if weight > k_term:
            continue
        num = alpha_p[weight]
        if num == 0:
            continue
        for i, mi in enumerate(multi):
            num *= beta_p[i][mi]
        if gamma_p[weight] == 0:
            raise ZeroDivisionError(
                f"(gamma;q)_{weight} = 0 at surviving multi-index {multi}"
            )
        den = gamma_p[weight]
        for mi in multi:
            den *= qq_p[mi]
        mono = Q(1)
        for z, mi in zip(zs, multi):
            mono *= z**mi
        total += num / den * mono
    return total
