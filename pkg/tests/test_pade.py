from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpade.errors import InsufficientCoefficientsError, KernelDimensionError
from qpade.pade import (
    PadePair,
    bareiss_det,
    build_PQ,
    build_PQ_single_det,
    kernel_vector,
    pade_linear_solve,
    schur,
    tau_value,
    verify_pade,
)
from qpade.series import SURFACES, Poly, Q, p_list, random_paramset

coeff = st.fractions(min_value=Q(-3), max_value=Q(3), max_denominator=4)


def _matrix(n):
    return st.lists(
        st.lists(coeff, min_size=n, max_size=n), min_size=n, max_size=n
    )


# ---------------------------------------------------------------------------
# fraction-free linear algebra
# ---------------------------------------------------------------------------


def test_bareiss_frozen_values():
    assert bareiss_det([]) == 1
    assert bareiss_det([[Q(3, 7)]]) == Q(3, 7)
    assert bareiss_det([[Q(1), Q(2)], [Q(3), Q(4)]]) == Q(-2)
    # row swap path: leading zero pivot
    assert bareiss_det([[Q(0), Q(1)], [Q(1), Q(0)]]) == Q(-1)
    assert bareiss_det([[Q(1), Q(2)], [Q(2), Q(4)]]) == 0
    with pytest.raises(ValueError):
        bareiss_det([[Q(1), Q(2)]])


@given(a=_matrix(3), b=_matrix(3))
def test_bareiss_multiplicative(a, b):
    prod = [
        [sum((a[i][k] * b[k][j] for k in range(3)), Q(0)) for j in range(3)]
        for i in range(3)
    ]
    assert bareiss_det(prod) == bareiss_det(a) * bareiss_det(b)


def test_kernel_vector_shapes():
    # rank 1 on 3 columns: two free columns
    with pytest.raises(KernelDimensionError):
        kernel_vector([[Q(1), Q(2), Q(3)]], 3)
    # full rank: no free column
    with pytest.raises(KernelDimensionError):
        kernel_vector([[Q(1), Q(0)], [Q(0), Q(1)]], 2)
    vec = kernel_vector([[Q(1), Q(2)], [Q(2), Q(4)]], 2)
    assert vec[0] + 2 * vec[1] == 0 and any(v != 0 for v in vec)
    with pytest.raises(ValueError):
        kernel_vector([[Q(1)]], 2)


# ---------------------------------------------------------------------------
# Jacobi–Trudi determinants
# ---------------------------------------------------------------------------


def test_schur_edge_cases():
    plist = [Q(1), Q(2), Q(3), Q(4)]
    assert schur(plist, ()) == 1
    assert schur(plist, (2,)) == Q(3)
    # 2x2: det [[p1, p2], [p0, p1]]
    assert schur(plist, (1, 1)) == Q(2) * Q(2) - Q(3) * Q(1)
    assert tau_value(plist, 1, 2) == schur(plist, (1, 1))
    with pytest.raises(InsufficientCoefficientsError):
        schur(plist, (4,))


@pytest.mark.parametrize("surface", SURFACES)
def test_schur_vanishing_window(surface):
    # s_{(m^n, k)} = 0 for m < k <= m + n encodes the approximation defect
    ps = random_paramset(surface, 2, 2, seed=7)
    m, n = ps.degrees
    plist = p_list(ps, m + 2 * n)
    for k in range(m + 1, m + n + 1):
        assert schur(plist, (m,) * n + (k,)) == 0


# ---------------------------------------------------------------------------
# approximant construction
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("surface", SURFACES)
def test_three_routes_agree(surface):
    for m, n in ((1, 1), (3, 2), (2, 3)):
        ps = random_paramset(surface, m, n, seed=13 + m + 10 * n)
        pair = build_PQ(ps)
        single = build_PQ_single_det(ps)
        assert isinstance(single, PadePair)
        assert single.P.coeffs == pair.P.coeffs
        assert single.Q.coeffs == pair.Q.coeffs
        assert single.tau == pair.tau

        ker_p, ker_q = pade_linear_solve(ps)
        # the kernel route fixes its own scaling; compare projectively
        assert ker_q.coeff(0) != 0
        scale = pair.tau / ker_q.coeff(0)
        assert ker_p.scale(scale).coeffs == pair.P.coeffs
        assert ker_q.scale(scale).coeffs == pair.Q.coeffs


@pytest.mark.parametrize("surface", SURFACES)
def test_normalization_and_degrees(surface):
    ps = random_paramset(surface, 3, 2, seed=29)
    m, n = ps.degrees
    pair = build_PQ(ps)
    assert pair.Q.coeff(0) == pair.tau != 0
    assert pair.P.coeff(0) == pair.tau  # p_0 = 1 forces P(0) = Q(0)
    assert pair.P.degree <= m and pair.Q.degree <= n


@pytest.mark.parametrize("surface", SURFACES)
def test_verify_pade_window_and_tail(surface):
    ps = random_paramset(surface, 2, 2, seed=17)
    rep = verify_pade(ps)
    assert rep.ok
    assert all(c == 0 for c in rep.window)
    assert len(rep.window) == sum(ps.degrees) + 1
    # generically the defect is not better than required
    assert rep.tail is not None and rep.tail != 0


def test_verify_pade_detects_tampering():
    ps = random_paramset("d5", 2, 1, seed=23)
    pair = build_PQ(ps)
    bad = PadePair(P=pair.P + Poly((Q(0), Q(1, 7))), Q=pair.Q, tau=pair.tau)
    rep = verify_pade(ps, pair=bad)
    assert not rep.ok
    assert any(c != 0 for c in rep.window)


def test_verify_pade_order_floor():
    ps = random_paramset("a21", 2, 2, seed=31)
    with pytest.raises(ValueError):
        verify_pade(ps, order=1)
