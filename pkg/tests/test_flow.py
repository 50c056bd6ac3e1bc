import pytest

from ricci_qc.flow import (CLOSED_FORM_THRESHOLD, ClosedFormUnavailable, component_value,
                           conserved_drift, validate_asymptotics, validate_closed_form)
from ricci_qc.geometry import ClassParams, Conserved, InitialData, Limit
from ricci_qc.integrate import IntegratorConfig, integrate
from ricci_qc.metric import DiagonalMetric, DomainError

from conftest import UNIT


def _traj(cls, params, init, t_end, rel_tol=1e-10):
    return integrate(cls, params, init, IntegratorConfig(t_end=t_end, rel_tol=rel_tol))


class TestConservedDrift:
    def test_a5_ab(self):
        d = conserved_drift(_traj("A5", ClassParams(), InitialData(2, 3, 1, 1), 100))
        assert d.per_name["AB"] < 1e-8
        assert d.passes(1e-8)

    def test_a7i_bcd2(self):
        d = conserved_drift(_traj("A7i", ClassParams(), InitialData(1, 2, 3, 4), 100))
        assert d.per_name["BCD²"] < 1e-8
        assert d.per_name["AD(B−C)"] < 1e-8

    def test_zero_initial_value_uses_absolute_drift(self):
        d = conserved_drift(_traj("A7i", ClassParams(), InitialData(1, 2, 2, 4), 100))
        assert d.absolute == ("AD(B−C)",)
        assert d.per_name["AD(B−C)"] < 1e-8

    @pytest.mark.parametrize("cls,params,init", [
        ("A7ii", ClassParams(a2=0.5), InitialData(1, 0.75, 1, 2)),
        ("A8", ClassParams(), InitialData(1, 2, 0.5, 1.5)),
        ("A9ii", ClassParams(a3=1.0), InitialData(1, 1, 2, 1)),
        ("A6", ClassParams(), InitialData(2, 1, 3, 1)),
    ])
    def test_other_classes(self, cls, params, init):
        assert conserved_drift(_traj(cls, params, init, 100)).max_drift < 1e-8

    def test_drift_grows_with_tolerance(self):
        init = InitialData(1, 2, 3, 4)
        tight = conserved_drift(_traj("A7i", ClassParams(), init, 100, 1e-10)).max_drift
        loose = conserved_drift(_traj("A7i", ClassParams(), init, 100, 1e-6)).max_drift
        assert tight <= loose

    def test_wrong_reference_value_is_detected(self):
        traj = _traj("A5", ClassParams(), InitialData(2, 3, 1, 1), 10)
        wrong = Conserved("AB", 6.0 * (1 + 1e-6), lambda A, B, C, D: A * B)
        assert not conserved_drift(traj, [wrong]).passes(1e-8)

    def test_requires_quantities(self):
        traj = _traj("A5", ClassParams(), UNIT, 1)
        with pytest.raises(DomainError):
            conserved_drift(traj, [])


class TestValidateClosedForm:
    def test_a4(self):
        assert validate_closed_form("A4", ClassParams(), UNIT, [1, 10, 100]) < 1e-7

    def test_a6(self):
        assert validate_closed_form("A6", ClassParams(), InitialData(2, 1, 3, 1), [1, 10, 100]) < 1e-7

    def test_a2iv(self):
        err = validate_closed_form("A2iv", ClassParams(k=-2.0), InitialData(1, 2, 3, 4), [1, 100])
        assert err < 1e-10

    @pytest.mark.parametrize("cls,init", [("A4", UNIT), ("A6", InitialData(2, 1, 3, 1))])
    def test_halving_tolerance_does_not_inflate_error(self, cls, init):
        samples = [1, 10, 100]
        for tol in (1e-6, 1e-8, 1e-10):
            coarse = validate_closed_form(cls, ClassParams(), init, samples,
                                          IntegratorConfig(t_end=1.0, rel_tol=tol))
            fine = validate_closed_form(cls, ClassParams(), init, samples,
                                        IntegratorConfig(t_end=1.0, rel_tol=tol / 2))
            assert fine <= 2 * coarse

    @pytest.mark.parametrize("cls,params,init", [
        ("A5", ClassParams(), UNIT), ("A3", ClassParams(k=1.0), InitialData(1, 2, 1, 1)),
        ("A7i", ClassParams(), UNIT),
    ])
    def test_unavailable(self, cls, params, init):
        with pytest.raises(ClosedFormUnavailable):
            validate_closed_form(cls, params, init, [1.0])


class TestValidateAsymptotics:
    def _by_component(self, checks):
        return {c.component: c for c in checks}

    def test_a7i_linear_growth(self):
        checks = self._by_component(validate_asymptotics("A7i", ClassParams(), UNIT, 1e6))
        assert checks["A"].residual < 0.01
        assert checks["B/C"].residual < 0.01
        assert checks["A"].path == "numeric"

    def test_a8_limit(self):
        checks = self._by_component(validate_asymptotics("A8", ClassParams(), UNIT, 1e6))
        assert checks["A"].descriptor == Limit(1.0)
        assert checks["A"].residual < 0.01

    def test_a9ii_c_limit(self):
        checks = self._by_component(
            validate_asymptotics("A9ii", ClassParams(a3=1.0), InitialData(1, 1, 2, 1), 1e5))
        assert checks["C"].descriptor.value == pytest.approx(1.1547, abs=1e-4)
        assert checks["C"].residual < 0.01

    def test_a3_limits(self):
        checks = self._by_component(
            validate_asymptotics("A3", ClassParams(k=1.0), InitialData(1, 4, 5, 1), 1e5))
        assert checks["A"].residual < 0.01 and checks["B"].residual < 0.01

    def test_a5_logarithmic_growth(self):
        checks = self._by_component(
            validate_asymptotics("A5", ClassParams(), InitialData(2, 3, 1, 1), 1e5))
        assert checks["A"].residual < 0.05
        # D = 3t + int B/A with B/A ~ 1/log t: the linear rate is approached like 1/log t
        assert checks["D"].residual < 0.05

    def test_closed_form_path_for_long_horizons(self):
        checks = validate_asymptotics("A4", ClassParams(), UNIT, 1e8)
        assert all(c.path == "closed-form" for c in checks)
        assert max(c.residual for c in checks) < 1e-6
        assert CLOSED_FORM_THRESHOLD == 1e6

    def test_closed_form_path_requires_solution(self):
        with pytest.raises(ClosedFormUnavailable):
            validate_asymptotics("A5", ClassParams(), UNIT, 1e3, path="closed-form")

    def test_bad_horizon(self):
        with pytest.raises(DomainError):
            validate_asymptotics("A4", ClassParams(), UNIT, 0.0)


def test_component_value_ratio():
    s = DiagonalMetric(1, 2, 4, 8)
    assert component_value(s, "B/C") == 0.5
    assert component_value(s, "D") == 8.0
