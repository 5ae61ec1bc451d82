import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from hzmt.core import DomainError, riemann_zeta
from hzmt.herglotz import higher_herglotz_F
from hzmt.theta import (
    LaurentExpansion,
    ThetaPoint,
    fit_slope,
    klf_constant_series,
    mt_zeta,
    psi_shift_sum,
    richardson_limit,
    theta,
    theta11_laurent,
    theta11_via_01,
    theta11_via_phi,
    theta_01_reg,
    theta_0r,
    theta_direct,
    theta_recursion_rhs,
    theta_rr_laurent,
    theta_rr_near_pole,
    theta_split_rhs,
)

EPS = [mpf("1e-2"), mpf("5e-3"), mpf("2.5e-3")]


def z(k):
    return riemann_zeta(k).value


def brute_theta(r, s, t, x, N=600):
    n = np.arange(1, N + 1, dtype=np.float64)[:, None]
    m = np.arange(1, N + 1, dtype=np.float64)[None, :]
    return float(np.sum(n ** -r * m ** -s * (n + m * x) ** -t))


class TestThetaPoint:
    def test_region(self):
        assert ThetaPoint(2, 2, 1, 1).in_region_D(0.25)
        assert ThetaPoint(2, 2, -0.9, 1).in_region_D()
        assert not ThetaPoint(2, 2, -1.1, 1).in_region_D()
        assert ThetaPoint(2, 2, -0.7, 1).in_region_D(0.25)
        assert ThetaPoint(1, 1, 0.1, 1).in_region_D() and not ThetaPoint(1, 1, 0.1, 1).in_region_D(0.25)

    def test_margin(self):
        assert ThetaPoint(2, 3, 1, 1).margin() == 2

    def test_singularities(self):
        assert ThetaPoint(2, 2, -1, 1).on_singularity()
        assert ThetaPoint(1, 1, 0, 1).on_singularity()
        assert ThetaPoint(3, 0.5, -4, 1).on_singularity()
        assert not ThetaPoint(2, 2, 1, 1).on_singularity()
        assert not ThetaPoint(2, 2, -0.5, 1).on_singularity()

    def test_bad_x(self):
        with pytest.raises(DomainError):
            ThetaPoint(2, 2, 1, 0)

    def test_laurent_validation(self):
        with pytest.raises(ValueError):
            LaurentExpansion(mpf(0), {-2: mpf(1), 0: mpf(1)})
        L = LaurentExpansion(mpf(0), {-1: mpf(2), 0: mpf(3)})
        assert L.truncated(mpf("0.5")) == 7


class TestDirect:
    def test_product_at_t_zero(self):
        out = theta_direct(2, 3, 0, 1.7)
        assert abs(out.value - z(2) * z(3)) <= out.err_bound + mpf(10) ** -27

    def test_tornheim_111(self):
        out = theta_direct(1, 1, 1, 1)
        assert abs(out.value - 2 * z(3)) <= out.err_bound + mpf(10) ** -27

    def test_inversion(self):
        x = mpf(2)
        a = theta_direct(2, 3, mpf("1.5"), x)
        b = theta_direct(3, 2, mpf("1.5"), 1 / x)
        assert abs(a.value - x ** mpf("-1.5") * b.value) < 1e-24

    @pytest.mark.parametrize("p", [(3, 3, 2, 1.5), (2.5, 3, 1.7, 0.6), (4, -1, 5, 0.8)])
    def test_brute_force(self, p):
        assert abs(float(theta_direct(*p).value) - brute_theta(*p)) < 1e-7

    def test_mt(self):
        assert abs(mt_zeta(1, 1, 1).value - mpf("2.4041138063")) < 1e-9
        assert abs(mt_zeta(2, 4, 0).value - z(2) * z(4)) < 1e-24
        a, b = mt_zeta(2, 2, 2), mt_zeta(2, 2, 2, schedule=1)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_non_integer_inversion(self):
        x = mpf("0.25")
        a = theta_direct(mpf("2.5"), mpf("1.5"), mpf("0.7"), x)
        b = theta_direct(mpf("1.5"), mpf("2.5"), mpf("0.7"), 1 / x)
        assert abs(a.value - x ** mpf("-0.7") * b.value) < 1e-23

    def test_margin_enforced(self):
        with pytest.raises(DomainError):
            theta_direct(1, 1, 0.1, 1)
        with pytest.raises(DomainError):
            theta_direct(2, 2, -1.1, 1, margin=0)

    def test_error_honesty(self):
        from hzmt.core import Budget

        lo = theta_direct(2, 2, 1, 1.3, Budget(precision=20))
        hi = theta_direct(2, 2, 1, 1.3, Budget(precision=35))
        assert abs(lo.value - hi.value) <= lo.err_bound


class TestStructural:
    def test_split(self):
        a = theta_split_rhs(2, 2, 1, 1.3)
        b = theta_direct(2, 2, 1, 1.3)
        assert abs(a.value - b.value) < 1e-23

    def test_split_x_one(self):
        assert abs(theta_split_rhs(2, 2, 1, 1).value - mt_zeta(2, 2, 1).value) < 1e-23

    def test_split_low_weights(self):
        a = theta_split_rhs(1, 1, 1.5, 2)
        b = theta_direct(1, 1, 1.5, 2)
        assert abs(a.value - b.value) < 1e-23

    def test_recursion(self):
        p = (2, 2, 1, 1.5)
        base = theta_direct(*p).value
        assert theta_recursion_rhs(0, *p).value == base
        assert theta_recursion_rhs(1, *p).value == theta_split_rhs(*p).value
        assert abs(theta_recursion_rhs(2, *p).value - base) < 1e-23

    @settings(max_examples=4)
    @given(
        st.sampled_from([1, 2, 3]),
        st.sampled_from([1, 2]),
        st.sampled_from([0.5, 1.25, 2]),
        st.sampled_from([0.5, 1, 2, 3.7]),
    )
    def test_split_property(self, r, s, t, x):
        a = theta_direct(r, s, t, x)
        b = theta_split_rhs(r, s, t, x)
        assert abs(a.value - b.value) < 1e-7


class TestSingleSums:
    def test_0r_vs_direct(self):
        a = theta_0r(3, 2, 1)
        b = theta_direct(0, 2, 3, 1)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_0r_inversion(self):
        w, x = mpf("2.5"), mpf(2)
        a = theta_direct(2, 0, w, x)
        b = theta_0r(w, 2, 1 / x)
        assert abs(a.value - x ** -w * b.value) < 1e-23

    def test_0r_regularized_at_one(self):
        reg = theta_0r(1, 2, 1, regularized=True).value
        # -sum psi(m+1)/m^2 = -(F_2(1) + zeta(3))
        assert abs(reg + higher_herglotz_F(2, 1).value + z(3)) < 1e-23

    def test_0r_regularized_continuous(self):
        at = theta_0r(1, 3, 0.7, regularized=True).value
        near = theta_0r(1 + mpf("1e-8"), 3, 0.7, regularized=True).value
        assert abs(at - near) < 1e-6

    @pytest.mark.parametrize("args", [(3, 1, 1), (0.5, 2, 1), (1, 2, 1), (2, 2, 0)])
    def test_0r_domain(self, args):
        with pytest.raises(DomainError):
            theta_0r(*args)

    def test_01_vs_direct(self):
        a = theta_01_reg(2, 1)
        b = theta_direct(0, 1, 2, 1)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_01_assembly(self):
        a = theta11_via_01(mpf("1.2"), mpf("1.5"))
        b = theta_direct(1, 1, mpf("1.2"), mpf("1.5"))
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_01_double_pole(self):
        # x^(1-w) zeta(w)/(w-1) carries a double pole with unit leading coefficient
        for d in (mpf("1e-3"), mpf("-1e-3")):
            assert abs(d ** 2 * theta_01_reg(1 + d, 1.7).value - 1) < 1e-2

    def test_01_domain(self):
        with pytest.raises(DomainError):
            theta_01_reg(1, 1)
        with pytest.raises(DomainError):
            theta_01_reg(0.4, 1)

    def test_psi_shift_sum(self):
        # sum psi(m x + 1)/m^r = F_r(x) + zeta(r+1)/x
        x = mpf("0.8")
        assert abs(psi_shift_sum(4, x).value - higher_herglotz_F(4, x).value - z(5) / x) < 1e-23


class TestTheta11:
    def test_via_phi_vs_direct(self):
        a = theta11_via_phi(mpf("1.2"), mpf("1.5"))
        b = theta_direct(1, 1, mpf("1.2"), mpf("1.5"))
        assert abs(a.value - b.value) < 1e-23

    def test_routes_agree(self):
        a = theta11_via_phi(mpf("0.3"), 2)
        b = theta11_via_01(mpf("0.3"), 2)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_double_pole(self):
        v1 = mpf("1e-2") ** 2 * theta11_via_phi(mpf("1e-2"), 2).value
        v2 = mpf("1e-3") ** 2 * theta11_via_phi(mpf("1e-3"), 2).value
        assert abs(v2 - 2) < abs(v1 - 2) < 0.05

    def test_domain(self):
        with pytest.raises(DomainError):
            theta11_via_phi(0, 1)
        with pytest.raises(DomainError):
            theta11_via_phi(-1, 1)

    def test_laurent_coeffs(self):
        L = theta11_laurent(1)
        assert L.coeffs[-2] == 2
        assert abs(L.coeffs[-1] - mpf("1.1544313298030657")) < 1e-15
        assert abs(L.coeffs[0] - mpf("-1.3117561430405078")) < 1e-15
        assert L.remainder_order == 1 and L.center == 0

    def test_laurent_symmetry(self):
        x = mpf("2.7")
        assert abs(theta11_laurent(x).coeffs[-1] + theta11_laurent(1 / x).coeffs[-1] - 4 * mp.euler) < 1e-30

    @pytest.mark.parametrize("x", [0.5, 1, 2])
    def test_laurent_remainder_linear(self, x):
        L = theta11_laurent(x)
        res = [theta11_via_phi(e, x).value - L.truncated(e) for e in EPS[:2]]
        assert abs(fit_slope(EPS[:2], res) - 1) < 0.2


class TestNearPole:
    def test_vs_direct(self):
        t, x = mpf("-0.7"), mpf("1.5")
        a = theta_rr_near_pole(2, t, x)
        b = theta_direct(2, 2, t, x)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_vs_direct_r3(self):
        t, x = mpf("-1.7"), mpf("0.8")
        a = theta_rr_near_pole(3, t, x)
        b = theta_direct(3, 3, t, x)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_residue(self):
        r, x = 3, mpf(2)
        res = [e * theta_rr_near_pole(r, 1 - r + e, x).value - z(r) * (1 + x ** (r - 1)) for e in EPS]
        assert abs(fit_slope(EPS, res) - 1) < 0.2

    def test_s_limit(self):
        r, x = 3, mpf(2)
        lhs = theta_direct(r - 1, 1, 1, x).value
        rhs = mp.euler * z(r) + psi_shift_sum(r, 1 / x).value
        assert abs(lhs - rhs) < 1e-23

    def test_domain(self):
        with pytest.raises(DomainError):
            theta_rr_near_pole(2, -1, 1)
        with pytest.raises(DomainError):
            theta_rr_near_pole(1, 0.1, 1)
        with pytest.raises(DomainError):
            theta_rr_near_pole(2, 0, 1)


class TestKLF:
    def test_rr_laurent_r2(self):
        L = theta_rr_laurent(2, 1)
        assert abs(L.coeffs[-1] - mpf("3.2898681337")) < 1e-9
        assert abs(L.coeffs[0] - mpf("1.8989634222")) < 1e-9
        assert L.center == -1

    def test_rr_laurent_r3(self):
        x = mpf(2)
        L = theta_rr_laurent(3, x)
        expected = 4 * z(3) * (mp.euler - mp.log(2)) + mp.euler * z(3) + 4 * z(2) ** 2
        assert abs(L.coeffs[0] - expected) < 1e-24

    def test_rr_laurent_r3_numeric(self):
        # Richardson estimate of the constant from near-pole samples
        r, x = 3, mpf(2)
        L = theta_rr_laurent(r, x)
        vals = [theta_rr_near_pole(r, 1 - r + e, x).value - L.coeffs[-1] / e for e in EPS]
        assert abs(richardson_limit(EPS, vals) - L.coeffs[0]) < 1e-3

    @pytest.mark.parametrize("r,x", [(2, 2), (3, 0.5), (4, 3), (2, 1), (3, 2)])
    def test_constant_routes(self, r, x):
        assert abs(klf_constant_series(r, x).value - theta_rr_laurent(r, x).coeffs[0]) < 1e-22

    def test_domain(self):
        with pytest.raises(DomainError):
            theta_rr_laurent(1, 1)
        with pytest.raises(DomainError):
            klf_constant_series(2, 0)


class TestDispatcher:
    def test_regions(self):
        assert theta(2, 2, 1, 1.3).value == theta_direct(2, 2, 1, 1.3).value
        assert theta(2, 2, mpf("-0.9"), 2).value == theta_rr_near_pole(2, mpf("-0.9"), 2).value
        assert theta(1, 1, mpf("-0.5"), 2).value == theta11_via_phi(mpf("-0.5"), 2).value
        assert theta(ThetaPoint(1, 1, mpf("0.1"), 2)).value == theta11_via_phi(mpf("0.1"), 2).value

    def test_singular(self):
        with pytest.raises(DomainError):
            theta(1, 1, 0, 1)
        with pytest.raises(DomainError):
            theta(2, 2, -1, 1)

    def test_uncovered(self):
        with pytest.raises(DomainError):
            theta(0.3, 0.3, 0.2, 1)


class TestFitting:
    def test_slope(self):
        eps = [mpf("1e-2"), mpf("1e-3")]
        assert abs(fit_slope(eps, [3 * e ** 2 for e in eps]) - 2) < 1e-12
        assert fit_slope(eps, [0, 1]) != fit_slope(eps, [0, 1])

    def test_richardson(self):
        eps = [mpf("0.1"), mpf("0.05")]
        assert abs(richardson_limit(eps, [5 + 2 * e for e in eps]) - 5) < 1e-30
