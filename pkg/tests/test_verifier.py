import pytest
from mpmath import mp, mpf

from hzmt.core import DomainError
from hzmt.verifier import (
    DEFAULT_POLICY,
    CheckResult,
    GridSpec,
    IdentityId,
    TolPolicy,
    build_cells,
    run_cell,
    run_suite,
    verify_decomposition,
    verify_f1_value,
    verify_fe1,
    verify_fe2,
    verify_guinand_deriv,
    verify_guinand_first,
    verify_inversion,
    verify_klf11,
    verify_klf_rr,
    verify_ramanujan_first,
    verify_recursion,
    verify_split,
    verify_stuffle,
    verify_vz2,
    verify_vz3,
)


def small_grid(**kw):
    base = dict(
        x_values=(1, 2),
        r_values=(2,),
        z_values=(3,),
        theta_points=((2, 2, 1),),
        theta_x_values=(1.5,),
        recursion_cases=((3, 3, 1, 1.5),),
        recursion_orders=(1,),
        stuffle_pairs=((2, 3),),
    )
    base.update(kw)
    return GridSpec(**base)


class TestChecks:
    def test_fe2(self):
        at_one = verify_fe2(1)
        assert at_one.passed and at_one.abs_residual < 1e-24
        assert verify_fe2(2).passed
        a, b = verify_fe2(mpf(1) / 3), verify_fe2(3)
        assert abs(a.lhs - b.lhs) < 1e-24 and abs(a.rhs - b.rhs) < 1e-20

    def test_fe1(self):
        assert verify_fe1(1).passed and verify_fe1(0.1).passed
        far = verify_fe1(1000)
        assert far.passed and abs(far.rhs + verify_f1_value().lhs) < 1e-3

    def test_vz2(self):
        r = verify_vz2(2, 1)
        assert r.passed and abs(r.rhs) < 1e-24
        assert verify_vz2(3, 2).passed and verify_vz2(5, 0.3).passed

    def test_vz3(self):
        r = verify_vz3(2, 1)
        assert r.passed
        # the alternative footnote reading leaves an O(1) residual
        assert r.diagnostics["alt_abs_residual"] > 1e-3
        assert verify_vz3(3, 2).passed

    def test_guinand(self):
        assert verify_guinand_deriv(3, 1).abs_residual == 0
        assert verify_guinand_deriv(3, 2).passed and verify_guinand_deriv(5, 0.4).passed
        with pytest.raises(DomainError):
            verify_guinand_deriv(2, 1)
        assert verify_guinand_first(1).abs_residual == 0
        a, b = verify_guinand_first(2), verify_guinand_first(0.5)
        assert a.passed and abs(a.lhs - b.rhs) < 1e-24

    def test_ramanujan(self):
        assert verify_ramanujan_first(1).abs_residual == 0
        assert verify_ramanujan_first(2).passed and verify_ramanujan_first(mp.pi).passed

    def test_decomposition(self):
        assert verify_decomposition(2, 1).passed and verify_decomposition(2.5, 2).passed
        slow = verify_decomposition(2.2, 1.5, route="direct")
        assert slow.passed and slow.tol == DEFAULT_POLICY.oracle
        assert "theta11_via_phi" not in verify_decomposition(2, 1).routes

    def test_structural(self):
        assert verify_split(2, 2, 1, 1.3).passed
        assert verify_inversion(2, 3, 1.5, 2).passed
        assert verify_recursion(2, 2, 2, 1, 1.5).passed

    def test_stuffle_and_f1(self):
        assert verify_stuffle(3, 2).abs_residual < 1e-20
        assert verify_f1_value().passed

    def test_klf(self):
        r = verify_klf11(1)
        assert r.passed and abs(r.lhs - 1) < 0.2
        k = verify_klf_rr(2, 2)
        assert k.passed and k.diagnostics["constant_pass"] and k.diagnostics["residue_slope_pass"]
        assert abs(k.diagnostics["richardson_c0"] - k.lhs) < 1e-3


class TestSuite:
    def test_identity_parse(self):
        assert IdentityId.parse("fe2") is IdentityId.FE2
        assert IdentityId.parse("klf-rr") is IdentityId.KLF_RR
        with pytest.raises(DomainError):
            IdentityId.parse("bogus")

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            GridSpec(x_values=())
        with pytest.raises(DomainError):
            GridSpec(r_values=(1,))

    def test_single_point_cardinality(self):
        grid = GridSpec(x_values=(1,))
        cells = build_cells(grid)
        for id_ in (IdentityId.FE2, IdentityId.FE1, IdentityId.GUINAND_FIRST, IdentityId.RAMANUJAN_FIRST, IdentityId.KLF11):
            assert sum(c[0] is id_ for c in cells) == 1

    def test_every_identity_scheduled(self):
        ids = {c[0] for c in build_cells(GridSpec())}
        assert ids == set(IdentityId)

    def test_small_suite_passes_and_is_deterministic(self):
        ids = ["FE2", "VZ2", "SPLIT", "STUFFLE", "F1_VALUE", "GUINAND_DERIV"]
        a = run_suite(small_grid(), ids=ids)
        b = run_suite(small_grid(), ids=ids)
        assert a.all_passed
        assert a.to_dict()["results"] == b.to_dict()["results"]
        assert a.summary["total"] == len(a.results) == 1 + 2 + 2 + 1 + 1 + 2
        order = [r.id for r in a.results]
        assert order == sorted(order, key=list(IdentityId).index)

    def test_parallel_matches_serial(self):
        ids = ["FE2", "FE1"]
        a = run_suite(small_grid(), ids=ids)
        b = run_suite(small_grid(), ids=ids, workers=2)
        assert a.to_dict()["results"] == b.to_dict()["results"]

    def test_tolerance_monotone(self):
        cell = (IdentityId.FE2, {"x": 2})
        tight, _ = run_cell(cell, policy=TolPolicy(default=1e-30))
        loose, _ = run_cell(cell, policy=TolPolicy(default=1e-5))
        assert loose.passed and (not tight.passed or loose.passed)
        for tol in (1e-30, 1e-20, 1e-9, 1e-3):
            res, _ = run_cell(cell, policy=TolPolicy(default=tol))
            if res.passed:
                assert run_cell(cell, policy=TolPolicy(default=tol * 10))[0].passed

    def test_failure_is_captured(self):
        res, _ = run_cell((IdentityId.VZ2, {"r": 1, "x": 1}))
        assert not res.passed and "DomainError" in res.error

    def test_pass_policy(self):
        res = CheckResult(IdentityId.FE2, {}, mpf(1e6), mpf(1e6 + 1e-4), mpf(1e-4), mpf(1e-10), 1e-9, True)
        assert res.to_dict()["pass"] is True

    def test_degraded_policy(self):
        from hzmt.core import Budget

        rep = run_suite(small_grid(x_values=(2,)), ids=["FE2"], budget=Budget(precision=15))
        assert rep.all_passed and rep.results[0].tol == pytest.approx(1e-6)

    def test_routes_disclosed(self):
        rep = run_suite(small_grid(x_values=(2,)), ids=["FE2", "DECOMPOSITION", "KLF11"])
        for r in rep.results:
            assert r.routes
            assert r.id.value.lower() not in " ".join(r.routes).lower()
