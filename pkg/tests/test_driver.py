"""Search orchestration: scans, precheck, epsilon mode, determinism."""

import random
from fractions import Fraction

import numpy as np
import pytest

from posicert import driver, sdp
from posicert.driver import (
    SearchOptions,
    _kernel_generators,
    certify,
    epsilon_margin,
    odd_power,
    positivity_precheck,
    system_to_sdp,
)
from posicert.exact import lift_certificate, verify_certificate
from posicert.gram import GramSystem, build_gram_system, build_reduced_system
from posicert.parsing import parse_polynomial, parse_problem
from posicert.poly import Grading, Polynomial, sum_of_squared_variables

XY = ["x", "y"]
XYZ = ["x", "y", "z"]


def make_spec(f_text, variables, **kwargs):
    f = parse_polynomial(f_text, variables)
    defaults = dict(
        variables=tuple(variables),
        grading=Grading.single(len(variables)),
        f=f,
        g=sum_of_squared_variables(len(variables)),
        constraints=(),
        mode="certify",
        n_max=4,
    )
    defaults.update(kwargs)
    from posicert.parsing import ProblemSpec

    return ProblemSpec(**defaults)


class TestCertify:
    def test_circle_at_zero(self):
        report = certify(make_spec("x^2 + y^2", XY))
        assert report.outcome == "certificate"
        cert = report.certificate
        assert cert.n == 0
        assert verify_certificate(cert).valid
        total = Polynomial.zero(2)
        for block in cert.blocks:
            for sq in block.squares:
                total = total + sq.weight * sq.poly * sq.poly
        assert total == cert.f

    def test_worked_constrained_example(self):
        spec = make_spec(
            "x^2 - 1/2*y^2",
            XY,
            g=parse_polynomial("x^2 + y^2", XY),
            constraints=(parse_polynomial("x^2 - y^2", XY),),
            n_max=2,
        )
        report = certify(spec)
        assert report.outcome == "certificate"
        assert report.certificate.n == 0
        assert verify_certificate(report.certificate).valid

    def test_check_sos_pins_n_and_drops_constraints(self):
        spec = make_spec(
            "x^2 + y^2",
            XY,
            mode="check-sos",
            constraints=(parse_polynomial("x^2 - y^2", XY),),
        )
        report = certify(spec)
        assert report.mode == "check-sos"
        assert [rec.exponent for rec in report.records] == [0]
        assert report.certificate.constraints == ()

    def test_parity_infeasible_scan_is_sound(self):
        # homogeneous odd-degree target: every n is parity infeasible, and an
        # independent sign check proves no representation exists at all
        spec = make_spec("x^3", ["x"], g=parse_polynomial("x^2", ["x"]), n_max=3)
        report = certify(spec)
        assert report.outcome == "not_found"
        assert all(rec.status == driver.PARITY_INFEASIBLE for rec in report.records)
        f = spec.f
        assert f.evaluate([-1]) < 0  # negative somewhere: certainly not SOS

    def test_zero_target_certifies_trivially(self):
        spec = make_spec("0", XY)
        report = certify(spec)
        assert report.outcome == "certificate"
        assert verify_certificate(report.certificate).valid

    def test_constant_g_scans_once(self):
        spec = make_spec("x^2 - y^2", XY, g=Polynomial.one(2), n_max=6)
        report = certify(spec)
        assert len(report.records) == 1
        assert report.warnings

    def test_scan_determinism(self):
        spec = make_spec(
            "x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2",
            XYZ,
            g=parse_polynomial("x^2 + y^2 + z^2", XYZ),
        )
        first = certify(spec)
        second = certify(spec)
        assert first == second

    def test_threads_match_sequential(self):
        spec = make_spec(
            "x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2",
            XYZ,
            g=parse_polynomial("x^2 + y^2 + z^2", XYZ),
            n_max=3,
        )
        sequential = certify(spec, SearchOptions(threads=1))
        threaded = certify(spec, SearchOptions(threads=3))
        assert sequential == threaded


class TestOddPower:
    def test_already_sos_stops_at_one(self):
        spec = make_spec("x^2 + y^2", XY, mode="odd-power", m_max=5)
        report = odd_power(spec)
        assert report.outcome == "certificate"
        assert report.records[-1].exponent == 1
        assert verify_certificate(report.certificate).valid

    def test_positive_definite_perturbation_finds_odd_power(self):
        spec = make_spec(
            "x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2 + 1/8*(x^2 + y^2 + z^2)^3",
            XYZ,
            mode="odd-power",
            m_max=3,
        )
        report = odd_power(spec)
        assert report.outcome == "certificate"
        m = report.records[-1].exponent
        assert m % 2 == 1
        cert = report.certificate
        assert cert.f * cert.g**cert.n == spec.f**m
        assert verify_certificate(cert).valid


class TestEpsilonMargin:
    def test_strictly_positive_form_gets_positive_margin(self):
        spec = make_spec(
            "x^2 + y^2",
            XY,
            mode="epsilon-margin",
            g=parse_polynomial("x^2 + y^2", XY),
            h_margin=parse_polynomial("x*y", XY),
            n_max=0,
        )
        report = epsilon_margin(spec)
        assert report.outcome == "certificate"
        assert report.epsilon == 3  # true optimum is 4, shrunk by 3/4
        assert verify_certificate(report.certificate).valid

    def test_zero_margin_polynomial_rejected(self):
        spec = make_spec(
            "x^2 + y^2",
            XY,
            mode="epsilon-margin",
            h_margin=Polynomial.zero(2),
            n_max=0,
        )
        report = epsilon_margin(spec)
        assert report.outcome == "rejected"
        assert any("unbounded" in w for w in report.warnings)

    def test_zero_of_f_forces_epsilon_to_zero(self):
        spec = make_spec(
            "(x - y)^2",
            XY,
            mode="epsilon-margin",
            h_margin=parse_polynomial("x^2", XY),
            n_max=1,
        )
        report = epsilon_margin(spec)
        assert report.outcome in ("not_found", "unknown")
        stage_one = [r for r in report.records if r.t_star is not None]
        assert stage_one and all(r.t_star <= 1e-5 for r in stage_one)


class TestPrecheck:
    def test_strictly_positive_is_clean(self):
        result = positivity_precheck(make_spec("x^2 + y^2", XY), samples=1000)
        assert result.negative is None and result.zero is None

    def test_indefinite_form_has_negative_point(self):
        result = positivity_precheck(make_spec("x^2 - y^2", XY), samples=200)
        assert result.negative is not None
        point, which, value = result.negative
        assert which == "f" and value < 0

    def test_nonnegative_with_zeros(self):
        spec = make_spec("x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2", XYZ,
                         g=parse_polynomial("x^2 + y^2 + z^2", XYZ))
        result = positivity_precheck(spec, samples=500)
        assert result.negative is None  # no counterexample to nonnegativity
        assert result.zero is not None  # the grid hits the zero rays exactly

    def test_constraints_filter_points(self):
        spec = make_spec(
            "x^2 - 1/2*y^2",
            XY,
            constraints=(parse_polynomial("x^2 - y^2", XY),),
        )
        result = positivity_precheck(spec, samples=800)
        assert result.negative is None
        assert result.kept < result.total

    def test_empty_feasible_set_warns(self):
        spec = make_spec(
            "x^2 + y^2",
            XY,
            constraints=(parse_polynomial("-1 - x^2", XY),),
        )
        result = positivity_precheck(spec, samples=100)
        assert result.kept == 0
        assert result.warnings

    def test_seeded_determinism(self):
        spec = make_spec("x^2 - y^2", XY)
        a = positivity_precheck(spec, samples=300, seed=7)
        b = positivity_precheck(spec, samples=300, seed=7)
        assert a == b


class TestKernelRestriction:
    def test_boundary_instance_reduces_and_certifies(self):
        # the classical boundary case: margin exactly zero at n = 1
        f = parse_polynomial("x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2", XYZ)
        g = parse_polynomial("x^2 + y^2 + z^2", XYZ)
        system = build_gram_system(f, g, 1, (), Grading.single(3))
        assert isinstance(system, GramSystem)
        solution = sdp.solve(system_to_sdp(system), 1e-8, 100)
        assert abs(solution.t_star) <= 1e-6  # genuinely on the boundary
        q_float = driver._gram_float(system, solution, max(solution.t_star, 0.0))
        generators = _kernel_generators(system, q_float)
        assert generators is not None
        reduced = build_reduced_system(system, generators)
        assert isinstance(reduced, GramSystem)
        assert reduced.block_dim(0) < system.block_dim(0)
        reduced_solution = sdp.solve(system_to_sdp(reduced), 1e-8, 100)
        assert reduced_solution.status == sdp.MARGIN_FEASIBLE
        assert reduced_solution.t_star > 1e-3  # interior after the restriction


def test_monotonicity_lift_through_driver():
    spec = make_spec(
        "x^4*y^2 + x^2*y^4 + z^6 - 3*x^2*y^2*z^2",
        XYZ,
        g=parse_polynomial("x^2 + y^2 + z^2", XYZ),
    )
    report = certify(spec)
    cert = report.certificate
    lifted = lift_certificate(cert)
    assert lifted.n == cert.n + 2
    assert verify_certificate(lifted).valid


def test_solver_does_not_claim_inconsistent_systems():
    # two copies of the same row with different right-hand sides: no iterate
    # can be primal feasible, so the solver must not report a margin verdict
    e11 = np.array([[[1.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]])
    problem = sdp.SdpProblem(
        block_dims=(2,),
        a_blocks=[e11],
        c_free=np.array([[1.0], [1.0]]),
        b=np.array([1.0, 2.0]),
    )
    solution = sdp.solve(problem, 1e-8, 60)
    assert solution.status in (sdp.NUMERICAL_FAILURE, sdp.MAX_ITERATIONS)


def test_numerical_failure_propagates(monkeypatch):
    spec = make_spec("x^2 + y^2", XY)
    broken = sdp.SdpSolution(
        status=sdp.NUMERICAL_FAILURE,
        t_star=float("nan"),
        x_blocks=[],
        free_values=np.zeros(1),
        y=np.zeros(0),
        s_blocks=[],
        gap=float("inf"),
        iterations=0,
    )
    monkeypatch.setattr(driver.sdp, "solve", lambda *a, **k: broken)
    with pytest.raises(driver.NumericalFailureError):
        certify(spec)
