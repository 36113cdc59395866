"""Incremental linear-equation solving over named scalar variables.

Point coordinates in glyph programs are often pinned only implicitly (the x
of one point defined through the y of another), so equations are accepted in
any order and eliminated incrementally; a variable's value is published the
moment the accumulated system determines it.
"""

from __future__ import annotations

from dataclasses import dataclass

# Pivots smaller than this are treated as zero (dependent equations).
PIVOT_EPSILON = 1e-9


class EquationError(ValueError):
    pass


class UnknownVariableError(EquationError):
    def __init__(self, var: str):
        super().__init__(f"unknown variable '{var}'")
        self.var = var


class UnderdeterminedError(EquationError):
    def __init__(self, var: str, free_vars: list[str]):
        frees = ", ".join(free_vars)
        super().__init__(
            f"'{var}' is not determined yet; depends on free variable(s): {frees}")
        self.var = var
        self.free_vars = list(free_vars)


class InconsistentEquationError(EquationError):
    def __init__(self, label: str, residual: float):
        super().__init__(
            f"inconsistent equation {label}: reduces to {residual:g} = 0")
        self.label = label
        self.residual = residual


@dataclass(frozen=True)
class LinExpr:
    """Linear combination of variables plus a constant."""

    terms: tuple[tuple[str, float], ...] = ()
    constant: float = 0.0

    @staticmethod
    def const(value: float) -> LinExpr:
        return LinExpr((), float(value))

    @staticmethod
    def var(name: str, coeff: float = 1.0) -> LinExpr:
        if coeff == 0.0:
            return LinExpr((), 0.0)
        return LinExpr(((name, float(coeff)),), 0.0)

    @staticmethod
    def _from_map(terms: dict[str, float], constant: float) -> LinExpr:
        kept = tuple(sorted((v, c) for v, c in terms.items() if c != 0.0))
        return LinExpr(kept, constant)

    def as_map(self) -> dict[str, float]:
        return dict(self.terms)

    def __add__(self, other: LinExpr) -> LinExpr:
        terms = self.as_map()
        for v, c in other.terms:
            terms[v] = terms.get(v, 0.0) + c
        return LinExpr._from_map(terms, self.constant + other.constant)

    def __sub__(self, other: LinExpr) -> LinExpr:
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> LinExpr:
        if factor == 0.0:
            return LinExpr((), 0.0)
        return LinExpr(tuple((v, c * factor) for v, c in self.terms),
                       self.constant * factor)

    def is_constant(self) -> bool:
        return not self.terms

    def variables(self) -> list[str]:
        return [v for v, _ in self.terms]


class EquationSystem:
    """Gaussian elimination kept in reduced form between assertions.

    Rows are stored per pivot variable with the pivot coefficient normalised
    to 1 and every other pivot eliminated, so each new equation reduces in a
    single substitution pass.
    """

    def __init__(self) -> None:
        self.known: dict[str, float] = {}
        self._rows: dict[str, LinExpr] = {}  # pivot var -> expr (== 0)
        self._seen: set[str] = set()

    def declare(self, var: str) -> None:
        self._seen.add(var)

    def _reduce(self, expr: LinExpr) -> LinExpr:
        terms = expr.as_map()
        constant = expr.constant
        # Substitute solved values first.
        for v in list(terms):
            if v in self.known:
                constant += terms.pop(v) * self.known[v]
        # Eliminate existing pivots (their rows contain no other pivots).
        for v in list(terms):
            row = self._rows.get(v)
            if row is not None:
                coeff = terms.pop(v)
                for rv, rc in row.terms:
                    if rv == v:
                        continue
                    terms[rv] = terms.get(rv, 0.0) - coeff * rc
                constant -= coeff * row.constant
        # Near-singular coefficients count as absent.
        terms = {v: c for v, c in terms.items() if abs(c) >= PIVOT_EPSILON}
        return LinExpr._from_map(terms, constant)

    def assert_equal(self, lhs: LinExpr, rhs: LinExpr,
                     label: str = "<equation>") -> "EquationSystem":
        for v in lhs.variables() + rhs.variables():
            self._seen.add(v)
        expr = self._reduce(lhs - rhs)
        if expr.is_constant():
            if abs(expr.constant) > PIVOT_EPSILON * 1e3:
                raise InconsistentEquationError(label, expr.constant)
            return self  # redundant equation: no-op
        pivot, pivot_coeff = max(expr.terms, key=lambda vc: (abs(vc[1]), vc[0]))
        row = expr.scaled(1.0 / pivot_coeff)
        self._rows[pivot] = row
        self._substitute_pivot_into_rows(pivot, row)
        self._promote_solved()
        return self

    def _substitute_pivot_into_rows(self, pivot: str, row: LinExpr) -> None:
        for other_pivot, other in list(self._rows.items()):
            if other_pivot == pivot:
                continue
            coeff = other.as_map().get(pivot)
            if coeff is None:
                continue
            self._rows[other_pivot] = other - row.scaled(coeff)

    def _promote_solved(self) -> None:
        # A row reduced to its pivot alone fixes that variable; substituting
        # the value may cascade into further rows.
        while True:
            solved = [(pv, row) for pv, row in self._rows.items()
                      if len(row.terms) == 1]
            if not solved:
                return
            for pivot, row in solved:
                value = -row.constant / row.terms[0][1]
                del self._rows[pivot]
                self.known[pivot] = value
            for other_pivot, other in list(self._rows.items()):
                terms = other.as_map()
                constant = other.constant
                changed = False
                for pv, _ in solved:
                    if pv in terms:
                        constant += terms.pop(pv) * self.known[pv]
                        changed = True
                if changed:
                    self._rows[other_pivot] = LinExpr._from_map(terms, constant)

    def is_known(self, var: str) -> bool:
        return var in self.known

    def value_of(self, var: str) -> float:
        if var in self.known:
            return self.known[var]
        if var not in self._seen:
            raise UnknownVariableError(var)
        row = self._rows.get(var)
        if row is not None:
            frees = [v for v, _ in row.terms if v != var]
            raise UnderdeterminedError(var, frees or [var])
        # Not a pivot: report the other variables tied to it, so the message
        # points at what still needs pinning down.
        related: set[str] = set()
        for pivot, other in self._rows.items():
            if any(v == var for v, _ in other.terms):
                related.add(pivot)
                related.update(v for v, _ in other.terms)
        related.discard(var)
        raise UnderdeterminedError(var, sorted(related) or [var])

    def free_variables(self) -> list[str]:
        pivots = set(self._rows)
        frees = {v for row in self._rows.values() for v, _ in row.terms
                 if v not in pivots}
        frees |= {v for v in self._seen if v not in self.known
                  and v not in pivots}
        return sorted(frees)
