import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpf

import oracles
from hzmt.core import Budget, DomainError, dilog, riemann_zeta
from hzmt.herglotz import (
    double_zeta,
    double_zeta_conv,
    f1_constant,
    herglotz_F,
    higher_herglotz_F,
    higher_herglotz_F_direct,
    phi,
    phi_limit_at_1,
    ramanujan_phi,
    zagier_P,
)

with mp.workdps(50):
    F_ONE = mpf("-0.9162401498442958305348092756257333888014")
    PHI_2_1 = mpf("0.759179739470962134327061156376874792311")
    ZETA3 = mpf("1.202056903159594285399738161511449990765")


def fe2_residual(x):
    x = mpf(x)
    lhs = herglotz_F(x).value + herglotz_F(1 / x).value
    rhs = 2 * f1_constant() + mp.log(x) ** 2 / 2 - mp.pi ** 2 / (6 * x) * (x - 1) ** 2
    return abs(lhs - rhs)


class TestF:
    def test_at_one(self):
        out = herglotz_F(1)
        assert out.converged
        assert abs(out.value - F_ONE) <= out.err_bound + mpf(10) ** -27

    def test_fe2_at_two(self):
        assert fe2_residual(2) < 1e-24

    def test_fe2_at_one(self):
        f1 = herglotz_F(1).value
        assert 2 * f1 == f1 + f1

    @given(st.floats(min_value=0.05, max_value=20))
    def test_fe2_property(self, x):
        assert fe2_residual(x) < 1e-22

    @given(st.floats(min_value=0.05, max_value=20))
    def test_fe1_property(self, x):
        x = mpf(x)
        lhs = herglotz_F(x).value - herglotz_F(x + 1).value - herglotz_F(x / (x + 1)).value
        rhs = -herglotz_F(1).value + dilog(1 / (1 + x)).value
        assert abs(lhs - rhs) < 1e-22

    @pytest.mark.parametrize("x", [0.3, 0.5, 1.0, 2.0, 3.7])
    def test_brute_force(self, x):
        assert abs(float(herglotz_F(x).value) - oracles.herglotz_F(x)) < 1e-8

    def test_domain(self):
        with pytest.raises(DomainError):
            herglotz_F(0)

    def test_error_honesty(self):
        lo = herglotz_F(0.7, Budget(precision=20))
        hi = herglotz_F(0.7, Budget(precision=40))
        assert lo.converged and abs(lo.value - hi.value) <= lo.err_bound


class TestFr:
    @pytest.mark.parametrize("r,x", [(2, 1.5), (2, 0.5), (3, 0.7), (4, 2.0), (6, 0.3)])
    def test_brute_force(self, r, x):
        assert abs(float(higher_herglotz_F(r, x).value) - oracles.higher_herglotz_F(r, x)) < 1e-6

    @pytest.mark.parametrize("r,x", [(2, 1.5), (3, 0.25), (5, 4), (2, 0.1), (6, 3.7)])
    def test_two_routes(self, r, x):
        a = higher_herglotz_F(r, x)
        b = higher_herglotz_F_direct(r, x)
        assert abs(a.value - b.value) <= a.err_bound + b.err_bound

    def test_vz2_at_two(self):
        r, x = 2, mpf(2)
        z = lambda k: mp.euler if k == 1 else riemann_zeta(k).value  # noqa: E731
        lhs = higher_herglotz_F(r, x).value + (-x) ** (r - 1) * higher_herglotz_F(r, 1 / x).value
        rhs = z(r + 1) * ((-x) ** r - 1 / x) - sum(z(l) * z(r - l + 1) * (-x) ** (l - 1) for l in range(1, r + 1))
        assert abs(lhs - rhs) < 1e-24

    def test_shifted_psi_rewrite(self):
        # sum psi(n x + 1)/n^r - zeta(r+1)/x
        from hzmt.theta import psi_shift_sum

        r, x = 3, mpf("0.7")
        alt = psi_shift_sum(r, x).value - riemann_zeta(r + 1).value / x
        assert abs(higher_herglotz_F(r, x).value - alt) < 1e-24

    @pytest.mark.parametrize("r,x", [(1, 1), (2, 0), (2, -1)])
    def test_domain(self, r, x):
        with pytest.raises(DomainError):
            higher_herglotz_F(r, x)


class TestPhi:
    def test_value(self):
        out = phi(2, 1)
        assert abs(out.value - PHI_2_1) <= out.err_bound + mpf(10) ** -26

    @pytest.mark.parametrize("z,x", [(1.5, 1.0), (2.0, 0.5), (3.0, 2.0), (2.5, 3.7), (1.2, 1.3)])
    def test_brute_force(self, z, x):
        assert abs(float(phi(z, x).value) - oracles.phi(z, x)) < 1e-8

    def test_near_one(self):
        eps = mpf("1e-4")
        assert abs(phi(1 + eps, 2).value + herglotz_F(2).value) < 5 * eps

    def test_continuity_linear(self):
        f = -herglotz_F(2).value
        d1 = abs(phi(1 + mpf("1e-2"), 2).value - f)
        d2 = abs(phi(1 + mpf("1e-3"), 2).value - f)
        assert 8 < d1 / d2 < 12

    def test_below_one(self):
        eps = mpf("1e-3")
        f = -herglotz_F(1.5).value
        assert abs(phi(1 - eps, 1.5).value - f) < 5 * eps

    def test_limit(self):
        assert abs(phi_limit_at_1(1).value + F_ONE) < 1e-24
        for x in (0.5, 3):
            assert phi_limit_at_1(x).value + herglotz_F(x).value == 0

    @pytest.mark.parametrize("z,x", [(1, 1), (0, 1), (-1, 2), (2, 0)])
    def test_domain(self, z, x):
        with pytest.raises(DomainError):
            phi(z, x)


class TestDoubleZeta:
    def test_euler(self):
        assert abs(double_zeta(2, 1).value - ZETA3) < 1e-24

    def test_brute_force(self):
        assert abs(float(double_zeta(2, 1).value) - oracles.double_zeta(2, 1)) < 1e-8
        assert abs(float(double_zeta(3, 2).value) - oracles.double_zeta(3, 2)) < 1e-8

    def test_22(self):
        assert abs(double_zeta(2, 2).value - 3 * riemann_zeta(4).value / 4) < 1e-24

    @pytest.mark.parametrize("a,b", [(2, 2), (3, 2), (2, 3), (4, 3)])
    def test_stuffle(self, a, b):
        lhs = riemann_zeta(a).value * riemann_zeta(b).value
        rhs = double_zeta(a, b).value + double_zeta(b, a).value + riemann_zeta(a + b).value
        assert abs(lhs - rhs) < 1e-23

    def test_non_integer(self):
        v = double_zeta(2.5, 1.5).value
        with mp.workdps(30):
            ref = mp.nsum(lambda n: mp.zeta(2.5, n + 1) / n ** 1.5, [1, mp.inf])
        assert abs(v - ref) < 1e-15

    def test_conv(self):
        v = double_zeta_conv(1, 2).value
        assert abs(v + (2 * ZETA3 - mp.euler * mp.pi ** 2 / 6)) < 1e-24
        assert abs(v - mpf("-1.4546320952")) < 1e-9
        assert double_zeta_conv(2, 1).value == double_zeta(2, 1).value
        # zeta_D(3, 1) = zeta(4)/4
        expected = -(mp.pi ** 4 / 360 + riemann_zeta(4).value - mp.euler * ZETA3)
        assert abs(double_zeta_conv(1, 3).value - expected) < 1e-24

    def test_alt_reading(self):
        v = double_zeta_conv(1, 2, reading="hurwitz").value
        assert abs(v + (mp.pi ** 2 / 6 + ZETA3 - mp.euler * mp.pi ** 2 / 6)) < 1e-24

    @pytest.mark.parametrize("s1,s2", [(1, 1), (1.5, 2), (1, 2.5), (0, 3)])
    def test_conv_domain(self, s1, s2):
        with pytest.raises(DomainError):
            double_zeta_conv(s1, s2)

    def test_domain(self):
        with pytest.raises(DomainError):
            double_zeta(1, 2)


class TestZagierRamanujan:
    def test_P_assembly(self):
        x, y = mpf(2), mpf(1)
        direct = (
            herglotz_F(x).value - herglotz_F(y).value + dilog(mpf(1) / 2).value - mp.pi ** 2 / 6
            + mp.log(2) * (mp.euler + mp.log(2) / 4)
        )
        assert abs(zagier_P(2, 1).value - direct) < 1e-24

    def test_P_precision_doubling(self):
        lo = zagier_P(2.5, 0.7)
        hi = zagier_P(2.5, 0.7, Budget(precision=60))
        assert abs(lo.value - hi.value) <= lo.err_bound

    def test_P_smoke(self):
        out = zagier_P(mp.e, 1)
        assert out.converged and mp.isfinite(out.value)

    @pytest.mark.parametrize("x,y", [(1, 2), (1, 1), (1, 0)])
    def test_P_domain(self, x, y):
        with pytest.raises(DomainError):
            zagier_P(x, y)

    def test_phi_ram(self):
        assert abs(ramanujan_phi(1).value - (mpf(1) / 2 - mp.euler)) < 1e-24
        assert abs(ramanujan_phi(0.5).value - (1 - mp.euler - mp.log(2))) < 1e-24
        assert abs(1000 ** 2 * ramanujan_phi(1000).value + mpf(1) / 12) < 1e-4
        with pytest.raises(DomainError):
            ramanujan_phi(0)

    def test_f1(self):
        assert abs(f1_constant() - F_ONE) < 1e-24
        x = mpf(3)
        rearranged = herglotz_F(x).value + herglotz_F(1 / x).value - mp.log(x) ** 2 / 2 + mp.pi ** 2 / (6 * x) * (x - 1) ** 2
        assert abs(2 * f1_constant() - rearranged) < 1e-24
