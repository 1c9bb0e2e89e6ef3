from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpade.errors import NonTerminatingError
from qpade.qcore import Q, QHGFSpec, lauricella_phiD, qhgf_terminating, qpoch, qpoch_multi

nonzero_q = st.fractions(
    min_value=Q(-5), max_value=Q(5), max_denominator=7
).filter(lambda v: v not in (0, 1, -1))

small_q = st.fractions(min_value=Q(-3), max_value=Q(3), max_denominator=5)


def test_qpoch_frozen_values():
    # (1/2; 1/3)_3 = (1/2)(5/6)(17/18)
    assert qpoch(Q(1, 2), Q(1, 3), 3) == Q(85, 216)
    assert qpoch(Q(1, 2), Q(1, 3), 0) == 1
    assert qpoch(Q(0), Q(2, 5), 4) == 1
    # one factor hits zero: a = q^{-1} makes the second factor vanish
    assert qpoch(Q(3, 1), Q(1, 3), 2) == 0


def test_qpoch_rejects_negative_length():
    with pytest.raises(ValueError):
        qpoch(Q(1, 2), Q(1, 3), -1)


@given(
    a=small_q,
    q=small_q,
    i=st.integers(min_value=0, max_value=8),
    j=st.integers(min_value=0, max_value=8),
)
def test_qpoch_additivity(a, q, i, j):
    # (a;q)_{i+j} = (a;q)_i (a q^i; q)_j
    assert qpoch(a, q, i + j) == qpoch(a, q, i) * qpoch(a * q**i, q, j)


@given(a=small_q, b=small_q, q=small_q, j=st.integers(min_value=0, max_value=6))
def test_qpoch_multi_is_product(a, b, q, j):
    assert qpoch_multi((a, b), q, j) == qpoch(a, q, j) * qpoch(b, q, j)


@given(q=nonzero_q, a1=nonzero_q, a2=nonzero_q)
def test_1phi1_order_one_literal(q, a1, a2):
    # 1phi1(q^-1; 0; q, q a1/a2) = 1 + a1/a2
    spec = QHGFSpec(upper=(1 / q,), lower=(Q(0),), base=q, argument=q * a1 / a2)
    assert qhgf_terminating(spec, 1) == 1 + a1 / a2


@given(q=nonzero_q, a1=nonzero_q, a2=nonzero_q, b1=nonzero_q)
def test_2phi1_order_one_literal(q, a1, a2, b1):
    # 2phi1(q^-1, a1/b1; 0; q, q b1/a2) = 1 - (b1 - a1)/a2
    spec = QHGFSpec(
        upper=(1 / q, a1 / b1), lower=(Q(0),), base=q, argument=q * b1 / a2
    )
    assert qhgf_terminating(spec, 1) == 1 - (b1 - a1) / a2


def test_qhgf_requires_terminating_parameter():
    spec = QHGFSpec(upper=(Q(5),), lower=(Q(0),), base=Q(1, 3), argument=Q(1))
    with pytest.raises(NonTerminatingError):
        qhgf_terminating(spec, 2)


def test_qhgf_zero_lower_on_surviving_term_raises():
    # lower parameter 1 makes (1;q)_s = 0 for s >= 1 while the numerator
    # still lives
    q = Q(1, 2)
    spec = QHGFSpec(upper=(1 / q**3,), lower=(Q(1),), base=q, argument=Q(1, 5))
    with pytest.raises(ZeroDivisionError):
        qhgf_terminating(spec, 3)


def test_qhgf_vanishing_upper_truncates_cleanly():
    # an extra upper parameter q^{-1} kills every term with s >= 2 before
    # the lower zero is ever touched
    q = Q(1, 2)
    spec = QHGFSpec(
        upper=(1 / q**3, 1 / q), lower=(Q(2),), base=q, argument=Q(1, 5)
    )
    # s=0 gives 1, s=1 gives 7/(-1/2) * 1/5, s>=2 are killed by (q^-1;q)_s
    assert qhgf_terminating(spec, 3) == 1 - Q(14, 5)


@given(
    q=nonzero_q,
    alpha_pow=st.integers(min_value=0, max_value=4),
    beta=nonzero_q,
    gamma=nonzero_q.filter(lambda v: v != 1),
    z=small_q,
)
def test_lauricella_one_variable_is_2phi1(q, alpha_pow, beta, gamma, z):
    k = alpha_pow
    alpha = q**-k
    try:
        direct = lauricella_phiD(alpha, (beta,), gamma, (z,), q, k)
    except ZeroDivisionError:
        return
    spec = QHGFSpec(upper=(alpha, beta), lower=(gamma,), base=q, argument=z)
    assert direct == qhgf_terminating(spec, k)


def test_lauricella_two_variable_frozen():
    # phi_D at k=1 is 1 + [(1-alpha)/((1-gamma)(1-q))] * sum_i (1-beta_i) z_i
    q = Q(1, 3)
    alpha, b1, b2, gamma = 1 / q, Q(2), Q(5), Q(7)
    z1, z2 = Q(1, 2), Q(1, 5)
    head = (1 - alpha) / ((1 - gamma) * (1 - q))
    expect = 1 + head * ((1 - b1) * z1 + (1 - b2) * z2)
    assert expect == Q(7, 20)
    assert lauricella_phiD(alpha, (b1, b2), gamma, (z1, z2), q, 1) == expect


def test_lauricella_requires_terminating_alpha():
    with pytest.raises(NonTerminatingError):
        lauricella_phiD(Q(3), (Q(2),), Q(5), (Q(1, 2),), Q(1, 3), 2)
