"""Basis construction, pruning, and coefficient-matching assembly."""

import random
from fractions import Fraction

import pytest

from posicert import driver, sdp
from posicert.gram import (
    GramSystem,
    ParityInfeasible,
    SupportInfeasible,
    build_gram_system,
    monomial_basis,
    monomials_up_to,
    prune_basis,
    reconstruct,
)
from posicert.parsing import parse_polynomial
from posicert.poly import Grading, Polynomial, sum_of_squared_variables
from posicert import ratlin

XY = ["x", "y"]


class TestMonomialBasis:
    def test_univariate_constant_pruned(self):
        # target x^4 + x^2: nothing needs the constant, and 0 = 0+0 only
        basis = monomial_basis(1, Grading.single(1), (4,), {(4,), (2,)})
        assert basis == ((1,), (2,))

    def test_univariate_constant_kept(self):
        # target x^4 + 1: x survives since x^2 = 0 + 2 is pair-expressible
        basis = monomial_basis(1, Grading.single(1), (4,), {(4,), (0,)})
        assert basis == ((0,), (1,), (2,))

    def test_two_vars_full_support(self):
        support = {(2, 0), (1, 1), (0, 2)}
        basis = monomial_basis(2, Grading.single(2), (2,), support)
        assert basis == ((0, 1), (1, 0))

    def test_odd_multidegree_rejected(self):
        with pytest.raises(ValueError):
            monomial_basis(1, Grading.single(1), (3,), set())

    def test_no_pruning_keeps_candidates(self):
        basis = monomial_basis(1, Grading.single(1), (4,), {(4,)}, prune=False)
        assert basis == ((0,), (1,), (2,))


def test_prune_basis_fixpoint_is_stable():
    support = frozenset({(4, 2, 0), (2, 4, 0), (0, 0, 6), (2, 2, 2)})
    candidates = monomials_up_to(3, 3)
    candidates = [ev for ev in candidates if sum(ev) == 3]
    pruned = prune_basis(candidates, support)
    assert set(pruned) == {(2, 1, 0), (1, 2, 0), (1, 1, 1), (0, 0, 3)}
    assert prune_basis(pruned, support) == pruned


class TestBuildGramSystem:
    def test_simple_circle(self):
        f = parse_polynomial("x^2 + y^2", XY)
        system = build_gram_system(f, sum_of_squared_variables(2), 0, (), Grading.single(2))
        assert isinstance(system, GramSystem)
        (block,) = system.blocks
        assert set(block.basis) == {(1, 0), (0, 1)}
        rows = {c.monomial: c for c in system.constraints}
        assert set(rows) == {(2, 0), (1, 1), (0, 2)}
        assert rows[(2, 0)].rhs == 1 and rows[(0, 2)].rhs == 1 and rows[(1, 1)].rhs == 0
        x_idx = block.basis.index((1, 0))
        y_idx = block.basis.index((0, 1))
        assert rows[(2, 0)].coefficients == {(0, x_idx, x_idx): 1}
        lo, hi = min(x_idx, y_idx), max(x_idx, y_idx)
        assert rows[(1, 1)].coefficients == {(0, lo, hi): 1}  # doubled in row form
        assert system.row_sparse(list(rows).index((1, 1))) != {}

    def test_odd_degree_form_is_parity_infeasible(self):
        f = parse_polynomial("x^3 + x*y^2", XY)
        out = build_gram_system(f, sum_of_squared_variables(2), 0, (), Grading.single(2))
        assert isinstance(out, ParityInfeasible)

    def test_worked_constrained_example(self):
        f = parse_polynomial("x^2 - 1/2*y^2", XY)
        g = parse_polynomial("x^2 + y^2", XY)
        h = parse_polynomial("x^2 - y^2", XY)
        system = build_gram_system(f, g, 0, (h,), Grading.single(2))
        assert isinstance(system, GramSystem)
        plain, times_h = system.blocks
        assert plain.product_index == (0,) and times_h.product_index == (1,)
        assert set(plain.basis) == {(1, 0), (0, 1)}
        assert times_h.basis == ((0, 0),)
        rows = {c.monomial: c for c in system.constraints}
        assert set(rows) == {(2, 0), (1, 1), (0, 2)}
        x_idx = plain.basis.index((1, 0))
        y_idx = plain.basis.index((0, 1))
        # x^2: Q0_xx + Q1_11 = 1;  y^2: Q0_yy - Q1_11 = -1/2;  xy: 2*Q0_xy = 0
        assert rows[(2, 0)].coefficients == {(0, x_idx, x_idx): 1, (1, 0, 0): 1}
        assert rows[(0, 2)].coefficients == {(0, y_idx, y_idx): 1, (1, 0, 0): -1}
        assert rows[(0, 2)].rhs == Fraction(-1, 2)
        lo, hi = min(x_idx, y_idx), max(x_idx, y_idx)
        assert rows[(1, 1)].coefficients == {(0, lo, hi): 1}
        assert len(system.independent) == 3

    def test_unreachable_target_monomial(self):
        # x^4 + x^3: pruning leaves {x^2}, whose square cannot reach x^3
        f = parse_polynomial("x^4 + x^3", ["x"])
        out = build_gram_system(f, Polynomial.one(1), 0, (), Grading.single(1))
        assert isinstance(out, SupportInfeasible)

    def test_too_many_constraints(self):
        f = parse_polynomial("x^2", XY)
        h = tuple(parse_polynomial(f"x^2 + {k}*y^2", XY) for k in range(17))
        with pytest.raises(ValueError, match="16"):
            build_gram_system(f, sum_of_squared_variables(2), 0, h, Grading.single(2))


class TestReconstruct:
    def test_identity_matrix(self):
        f = parse_polynomial("x^2 + y^2", XY)
        system = build_gram_system(f, sum_of_squared_variables(2), 0, (), Grading.single(2))
        q = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
        assert reconstruct(system, {0: q}) == f

    def test_zero_matrix(self):
        f = parse_polynomial("x^2 + y^2", XY)
        system = build_gram_system(f, sum_of_squared_variables(2), 0, (), Grading.single(2))
        q = [[Fraction(0)] * 2 for _ in range(2)]
        assert reconstruct(system, {0: q}).is_zero()

    def test_worked_example_matrices(self):
        f = parse_polynomial("x^2 - 1/2*y^2", XY)
        g = parse_polynomial("x^2 + y^2", XY)
        h = parse_polynomial("x^2 - y^2", XY)
        system = build_gram_system(f, g, 0, (h,), Grading.single(2))
        q0 = [[Fraction(1, 4), Fraction(0)], [Fraction(0), Fraction(1, 4)]]
        q1 = [[Fraction(3, 4)]]
        assert reconstruct(system, {0: q0, 1: q1}) == f

    def test_dimension_mismatch(self):
        f = parse_polynomial("x^2 + y^2", XY)
        system = build_gram_system(f, sum_of_squared_variables(2), 0, (), Grading.single(2))
        with pytest.raises(ValueError):
            reconstruct(system, {0: [[Fraction(1)]]})


def random_square_sum(rng, n_vars, degree, count):
    monos = monomials_up_to(n_vars, degree)
    total = Polynomial.zero(n_vars)
    squares = []
    for _ in range(count):
        q = Polynomial(n_vars, {ev: Fraction(rng.randint(-2, 2)) for ev in monos})
        squares.append(q)
        total = total + q * q
    return total, squares


def test_any_exact_solution_reconstructs_target():
    # constraint assembly correctness: every exact solution of the linear
    # system reproduces the target, sampled via the exact nullspace
    rng = random.Random(5)
    for _ in range(10):
        target, squares = random_square_sum(rng, 2, 2, 2)
        if target.is_zero():
            continue
        system = build_gram_system(target, Polynomial.one(2), 0, (), Grading.single(2), prune=False)
        assert isinstance(system, GramSystem)
        basis = system.blocks[0].basis
        index = {ev: i for i, ev in enumerate(basis)}
        d = len(basis)
        q0 = [[Fraction(0)] * d for _ in range(d)]
        for q in squares:
            vec = [Fraction(0)] * d
            for ev, c in q.terms.items():
                vec[index[ev]] = c
            for i in range(d):
                for j in range(d):
                    q0[i][j] += vec[i] * vec[j]
        assert reconstruct(system, {0: q0}) == target
        rows = [system.row_sparse(k) for k in range(len(system.constraints))]
        kernel = ratlin.nullspace(rows, len(system.unknown_layout))
        for _ in range(3):
            vec = system.flatten({0: q0})
            for z in kernel:
                c = Fraction(rng.randint(-2, 2))
                vec = [v + c * zi for v, zi in zip(vec, z)]
            perturbed = system.unflatten(vec)
            assert reconstruct(system, perturbed) == target


def test_pruning_preserves_feasibility_verdict():
    # 50 random small instances: the margin sign agrees with pruning on/off
    rng = random.Random(99)
    checked = 0
    attempts = 0
    while checked < 50 and attempts < 200:
        attempts += 1
        n_vars = rng.choice([1, 2])
        monos = monomials_up_to(n_vars, 2)
        f = Polynomial(n_vars, {ev: Fraction(rng.randint(-2, 2)) for ev in monos})
        f = f * f + Polynomial(n_vars, {tuple([0] * n_vars): Fraction(rng.randint(-1, 1))})
        if f.is_zero():
            continue
        verdicts = []
        for prune in (True, False):
            system = build_gram_system(f, Polynomial.one(n_vars), 0, (), Grading.single(n_vars), prune=prune)
            if not isinstance(system, GramSystem):
                # an exact obstruction counts as a (proved) infeasible verdict
                verdicts.append(False)
                continue
            sol = sdp.solve(driver.system_to_sdp(system), 1e-9, 100)
            if sol.status == sdp.MARGIN_FEASIBLE:
                verdicts.append(True)
            elif sol.status == sdp.MARGIN_NEGATIVE:
                verdicts.append(False)
            else:
                verdicts.append(None)
        if None in verdicts:
            continue  # borderline at tolerance: no verdict to compare
        assert verdicts[0] == verdicts[1], f"pruning changed the verdict for {f}"
        checked += 1
    assert checked == 50


def test_active_blocks_match_degree_obstruction():
    rng = random.Random(123)
    for _ in range(40):
        grading = rng.choice([Grading.single(2), Grading(((0,), (1,)))])
        def random_form(even):
            while True:
                degs = tuple(rng.randint(0, 2) * 2 if even else rng.randint(1, 4)
                             for _ in grading.blocks)
                if any(degs):
                    break
            from posicert.gram import exact_degree_monomials
            monos = exact_degree_monomials(grading, degs)
            terms = {ev: Fraction(rng.randint(-2, 2)) for ev in monos}
            p = Polynomial(2, terms)
            return p if not p.is_zero() else random_form(even)
        f, g = random_form(False), random_form(False)
        h = (random_form(True),)
        out = build_gram_system(f, g, 1, h, grading)
        if not isinstance(out, GramSystem):
            continue
        target = f * g
        for block in out.blocks:
            need = tuple(
                dt - dm for dt, dm in zip(target.multidegree(grading), block.multiplier.multidegree(grading))
            )
            expected = all(d >= 0 and d % 2 == 0 for d in need)
            assert block.active == expected
