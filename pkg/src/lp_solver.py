import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from errors import LPError

logger = logging.getLogger(__name__)


@dataclass
class SimplexResult:
    x: List[Fraction]
    objective: Fraction
    pivots: int


class ExactSimplex:
    """
    Two-phase tableau simplex over Fractions with Bland's anti-cycling rule.

    Minimises objective . x subject to a_ub . x <= b_ub and a_eq . x = b_eq.
    Variables are non-negative unless flagged free, in which case they are split
    into a positive and a negative column. Entering column: lowest index with a
    negative reduced cost. Leaving row: minimum ratio, ties to the lowest basic index.
    """

    def __init__(self, objective: Sequence[Fraction], a_ub: Sequence[Sequence[Fraction]] = (),
                 b_ub: Sequence[Fraction] = (), a_eq: Sequence[Sequence[Fraction]] = (),
                 b_eq: Sequence[Fraction] = (), free: Optional[Sequence[bool]] = None,
                 max_pivots: int = 50_000):
        """
        :param objective: Cost per variable (minimised)
        :param a_ub: Inequality rows
        :param b_ub: Inequality right-hand sides
        :param a_eq: Equality rows
        :param b_eq: Equality right-hand sides
        :param free: Per-variable flag; free variables may take any sign
        :param max_pivots: Hard stop that turns a runaway solve into an LPError
        """
        self.num_vars = len(objective)
        free = [False] * self.num_vars if free is None else list(free)
        self.max_pivots = max_pivots
        self.pivots = 0

        # (variable, sign) for each structural column
        self.columns = []
        for j in range(self.num_vars):
            self.columns.append((j, 1))
            if free[j]:
                self.columns.append((j, -1))
        structural = len(self.columns)
        slacks = len(a_ub)

        def expand(row):
            row = [Fraction(v) for v in row]
            if len(row) != self.num_vars:
                raise LPError(f'Constraint row has {len(row)} entries for {self.num_vars} variables.')
            return [sign * row[j] for j, sign in self.columns]

        rows, rhs, needs_artificial = [], [], []
        for i, (row, b) in enumerate(zip(a_ub, b_ub)):
            coefficients = expand(row) + [Fraction(0)] * slacks
            coefficients[structural + i] = Fraction(1)
            rows.append(coefficients)
            rhs.append(Fraction(b))
            needs_artificial.append(False)
        for row, b in zip(a_eq, b_eq):
            rows.append(expand(row) + [Fraction(0)] * slacks)
            rhs.append(Fraction(b))
            needs_artificial.append(True)
        for i in range(len(rows)):
            if rhs[i] < 0:
                rows[i] = [-v for v in rows[i]]
                rhs[i] = -rhs[i]
                needs_artificial[i] = True

        self.artificial_start = structural + slacks
        artificials = sum(needs_artificial)
        self.basis = []
        next_artificial = self.artificial_start
        for i, row in enumerate(rows):
            row.extend([Fraction(0)] * artificials)
            if needs_artificial[i]:
                row[next_artificial] = Fraction(1)
                self.basis.append(next_artificial)
                next_artificial += 1
            else:
                self.basis.append(structural + i)
        self.tableau = rows
        self.rhs = rhs
        self.width = self.artificial_start + artificials

        self.cost = [Fraction(0)] * self.width
        for column, (j, sign) in enumerate(self.columns):
            self.cost[column] = sign * Fraction(objective[j])

    def pivot(self, i: int, j: int) -> None:
        row = self.tableau[i]
        p = row[j]
        if p != 1:
            row = [v / p for v in row]
            self.tableau[i] = row
            self.rhs[i] /= p
        nonzero = [c for c, v in enumerate(row) if v]
        for k, other in enumerate(self.tableau):
            if k == i:
                continue
            f = other[j]
            if f:
                for c in nonzero:
                    other[c] -= f * row[c]
                self.rhs[k] -= f * self.rhs[i]
        f = self.reduced[j]
        if f:
            for c in nonzero:
                self.reduced[c] -= f * row[c]
        self.basis[i] = j
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise LPError(f'Simplex exceeded {self.max_pivots} pivots.')

    def _price(self, cost: List[Fraction]) -> None:
        self.reduced = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for c, v in enumerate(self.tableau[i]):
                    if v:
                        self.reduced[c] -= cb * v

    def _optimise(self, cost: List[Fraction], allowed: int) -> None:
        """
        Runs Bland pivots over columns [0, allowed) until no reduced cost is negative.

        :raises LPError: If the objective is unbounded below
        """
        self._price(cost)
        while True:
            entering = next((j for j in range(allowed) if self.reduced[j] < 0), None)
            if entering is None:
                return
            candidates = [
                (self.rhs[i] / row[entering], self.basis[i], i)
                for i, row in enumerate(self.tableau)
                if row[entering] > 0
            ]
            if not candidates:
                raise LPError('Linear program is unbounded.')
            _, _, leaving = min(candidates)
            self.pivot(leaving, entering)

    def solve(self) -> SimplexResult:
        phase_one = [Fraction(0)] * self.width
        for c in range(self.artificial_start, self.width):
            phase_one[c] = Fraction(1)
        self._optimise(phase_one, self.width)
        infeasibility = sum(self.rhs[i] for i, b in enumerate(self.basis) if b >= self.artificial_start)
        if infeasibility > 0:
            raise LPError('Linear program is infeasible.')

        # Drive zero-level artificials out of the basis; rows where that is impossible are redundant.
        i = 0
        while i < len(self.basis):
            if self.basis[i] >= self.artificial_start:
                j = next((c for c in range(self.artificial_start) if self.tableau[i][c] != 0), None)
                if j is None:
                    del self.tableau[i], self.rhs[i], self.basis[i]
                    continue
                self.pivot(i, j)
            i += 1

        self._optimise(self.cost, self.artificial_start)

        values = [Fraction(0)] * self.width
        for i, b in enumerate(self.basis):
            values[b] = self.rhs[i]
        x = [Fraction(0)] * self.num_vars
        for column, (j, sign) in enumerate(self.columns):
            x[j] += sign * values[column]
        objective = sum((self.cost[c] * values[c] for c in range(len(self.columns))), Fraction(0))
        logger.debug(f"Exact simplex finished after {self.pivots} pivots, objective {objective}.")
        return SimplexResult(x=x, objective=objective, pivots=self.pivots)
