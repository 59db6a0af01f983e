"""Dense exact-rational simplex: two-phase, Bland's rule, Fractions
throughout.  Sized for the tiny LPs of the constraint-generation solvers
(tens of rows/columns), where exact separation decisions matter more
than speed."""

from fractions import Fraction


class LPError(Exception):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    prow = tableau[row]
    for i, trow in enumerate(tableau):
        if i != row and trow[col] != 0:
            coef = trow[col]
            tableau[i] = [a - coef * b for a, b in zip(trow, prow)]
    basis[row] = col


def _run_simplex(tableau, basis, cost, allowed):
    """Minimize cost over the tableau; Bland's rule (first improving
    column, smallest basic index on ratio ties) prevents cycling."""
    m = len(tableau)
    rhs = len(tableau[0]) - 1
    while True:
        cb = [cost[b] for b in basis]
        entering = None
        for j in allowed:
            red = cost[j]
            for i in range(m):
                if cb[i] != 0:
                    red -= cb[i] * tableau[i][j]
            if red < 0:
                entering = j
                break
        if entering is None:
            value = sum(cb[i] * tableau[i][rhs] for i in range(m))
            return value
        leaving = None
        best = None
        for i in range(m):
            coef = tableau[i][entering]
            if coef > 0:
                ratio = tableau[i][rhs] / coef
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leaving]):
                    best = ratio
                    leaving = i
        if leaving is None:
            raise Unbounded("unbounded direction")
        _pivot(tableau, basis, leaving, entering)


def solve_lp(objective, a_ub=(), b_ub=(), a_eq=(), b_eq=(), maximize=False):
    """Optimize objective @ x over a_ub x <= b_ub, a_eq x = b_eq, x >= 0.

    All data is converted to Fractions; returns (value, x) exactly.
    """
    n = len(objective)
    obj = [Fraction(c) for c in objective]
    if maximize:
        obj = [-c for c in obj]

    rows = []
    kinds = []
    for arow, bval in zip(a_ub, b_ub):
        rows.append([Fraction(v) for v in arow] + [Fraction(bval)])
        kinds.append("ub")
    for arow, bval in zip(a_eq, b_eq):
        rows.append([Fraction(v) for v in arow] + [Fraction(bval)])
        kinds.append("eq")
    m = len(rows)

    n_slack = sum(1 for k in kinds if k == "ub")
    total = n + n_slack + m  # artificials for every row keep the logic simple
    tableau = []
    basis = []
    slack_at = 0
    art_start = n + n_slack
    for i, (row, kind) in enumerate(zip(rows, kinds)):
        coeffs = row[:-1]
        b = row[-1]
        line = [Fraction(0)] * (total + 1)
        for j, v in enumerate(coeffs):
            line[j] = v
        if kind == "ub":
            line[n + slack_at] = Fraction(1)
            slack_at += 1
        if b < 0:
            line = [-v for v in line]
            b = -b
        line[art_start + i] = Fraction(1)
        line[total] = b
        tableau.append(line)
        basis.append(art_start + i)

    # phase 1: drive artificials to zero
    cost1 = [Fraction(0)] * (total + 1)
    for j in range(art_start, total):
        cost1[j] = Fraction(1)
    allowed = list(range(art_start))
    value1 = _run_simplex(tableau, basis, cost1, list(range(total)))
    if value1 > 0:
        raise Infeasible("no feasible point")
    # pivot any lingering artificial out of the basis (or drop its row)
    for i in range(m):
        if basis[i] >= art_start:
            pivot_col = next((j for j in allowed if tableau[i][j] != 0), None)
            if pivot_col is not None:
                _pivot(tableau, basis, i, pivot_col)

    keep = [i for i in range(m) if basis[i] < art_start]
    tableau = [tableau[i] for i in keep]
    basis = [basis[i] for i in keep]

    cost2 = [Fraction(0)] * (total + 1)
    for j in range(n):
        cost2[j] = obj[j]
    value = _run_simplex(tableau, basis, cost2, allowed)

    x = [Fraction(0)] * n
    rhs = total
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][rhs]
    if maximize:
        value = -value
    return value, x
