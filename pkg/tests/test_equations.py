import random

import pytest

from paraglyph.equations import (
    EquationSystem,
    InconsistentEquationError,
    LinExpr,
    UnderdeterminedError,
    UnknownVariableError,
)

from oracles import solve_dense


def var(name, coeff=1.0):
    return LinExpr.var(name, coeff)


def const(v):
    return LinExpr.const(v)


def listing_equations(width=100.0, height=100.0):
    """The five implicit point equations of the arc-shaped letter example."""
    return [
        # z0 = (x1 + width/4, 0)
        (var("x0"), var("x1") + const(width / 4)),
        (var("y0"), const(0)),
        # z1 = (0, y0 + height/2)
        (var("x1"), const(0)),
        (var("y1"), var("y0") + const(height / 2)),
        # z2 = (x1 + width/2, y1 + height/2)
        (var("x2"), var("x1") + const(width / 2)),
        (var("y2"), var("y1") + const(height / 2)),
        # z3 = (x2 + width/2, y1)
        (var("x3"), var("x2") + const(width / 2)),
        (var("y3"), var("y1")),
        # z4 = (x3 - width/4, y0)
        (var("x4"), var("x3") - const(width / 4)),
        (var("y4"), var("y0")),
    ]


LISTING_SOLUTION = {
    "x0": 25.0, "y0": 0.0,
    "x1": 0.0, "y1": 50.0,
    "x2": 50.0, "y2": 100.0,
    "x3": 100.0, "y3": 50.0,
    "x4": 75.0, "y4": 0.0,
}


class TestAssertEqual:
    def test_direct_assignment(self):
        sys = EquationSystem()
        sys.assert_equal(var("x"), const(5))
        assert sys.value_of("x") == 5.0

    def test_contradiction(self):
        sys = EquationSystem()
        sys.assert_equal(var("x"), const(1))
        with pytest.raises(InconsistentEquationError):
            sys.assert_equal(var("x"), const(2), label="x = 2")

    def test_inconsistency_names_equation(self):
        sys = EquationSystem()
        sys.assert_equal(var("x"), const(1))
        with pytest.raises(InconsistentEquationError, match="x = 2"):
            sys.assert_equal(var("x"), const(2), label="x = 2")

    def test_listing_system_exact(self):
        sys = EquationSystem()
        for lhs, rhs in listing_equations():
            sys.assert_equal(lhs, rhs)
        for name, want in LISTING_SOLUTION.items():
            assert sys.value_of(name) == want

    def test_listing_system_matches_dense_oracle(self):
        dense = [(dict((lhs - rhs).terms), (lhs - rhs).constant)
                 for lhs, rhs in listing_equations()]
        want = solve_dense(dense)
        sys = EquationSystem()
        for lhs, rhs in listing_equations():
            sys.assert_equal(lhs, rhs)
        for name, value in want.items():
            assert abs(sys.value_of(name) - value) < 1e-9

    def test_redundant_equation_is_noop(self):
        sys = EquationSystem()
        sys.assert_equal(var("x") + var("y"), const(10))
        sys.assert_equal(var("x"), const(4))
        # x + y = 10 again, now fully known: redundant, not an error.
        sys.assert_equal(var("x") + var("y"), const(10))
        # Also a scaled combination of the originals.
        sys.assert_equal(var("x", 2.0) + var("y", 2.0), const(20))
        assert sys.value_of("y") == 6.0

    def test_forward_reference(self):
        sys = EquationSystem()
        sys.assert_equal(var("a"), var("b") + const(1))
        assert not sys.is_known("a")
        sys.assert_equal(var("b"), const(2))
        assert sys.value_of("a") == 3.0
        assert sys.value_of("b") == 2.0


class TestValueOf:
    def test_known(self):
        sys = EquationSystem()
        sys.assert_equal(var("x"), const(5))
        assert sys.value_of("x") == 5.0

    def test_underdetermined_mentions_other_variable(self):
        sys = EquationSystem()
        sys.assert_equal(var("x") + var("y"), const(10))
        with pytest.raises(UnderdeterminedError) as exc:
            sys.value_of("x")
        assert "y" in exc.value.free_vars

    def test_unknown_variable(self):
        sys = EquationSystem()
        with pytest.raises(UnknownVariableError):
            sys.value_of("nope")

    def test_listing_x4(self):
        sys = EquationSystem()
        for lhs, rhs in listing_equations():
            sys.assert_equal(lhs, rhs)
        assert sys.value_of("x4") == 75.0


class TestProperties:
    def test_order_independence(self):
        rng = random.Random(8)
        equations = listing_equations()
        for _ in range(25):
            shuffled = equations[:]
            rng.shuffle(shuffled)
            sys = EquationSystem()
            for lhs, rhs in shuffled:
                sys.assert_equal(lhs, rhs)
            for name, want in LISTING_SOLUTION.items():
                assert abs(sys.value_of(name) - want) < 1e-9

    def test_solution_satisfies_original_equations(self):
        rng = random.Random(21)
        for _ in range(20):
            n = rng.randint(3, 8)
            names = [f"v{i}" for i in range(n)]
            truth = {name: rng.uniform(-100, 100) for name in names}
            equations = []
            for _ in range(n):
                terms = {name: rng.uniform(-3, 3)
                         for name in rng.sample(names, rng.randint(1, n))}
                constant = -sum(c * truth[v] for v, c in terms.items())
                equations.append((terms, constant))
            # Ensure solvability by pinning each variable once.
            for name in names:
                equations.append(({name: 1.0}, -truth[name]))
            sys = EquationSystem()
            for terms, constant in equations:
                expr = const(constant)
                for v, c in terms.items():
                    expr = expr + var(v, c)
                sys.assert_equal(expr, const(0))
            for terms, constant in equations:
                residual = constant + sum(
                    c * sys.value_of(v) for v, c in terms.items())
                assert abs(residual) < 1e-9 * max(
                    1.0, max(abs(x) for x in truth.values()))
