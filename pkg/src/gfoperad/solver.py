"""Order-by-order construction of associative deformations of the trivial product.

Given a polynomial Poisson structure alpha, the deformation starts at
S~(1) = (1/2) p1.alpha(x).p2 (the 1/2 is forced by the factor 2 in the
bivector extraction) and each following order solves the linear equation

    d S_n = -H_n,        H_n = order-n part of (1/2)[S~_{<n}, S~_{<n}],

subject to the structure-condition constraints S_n(p,0,x) = S_n(0,p,x) =
S_n(p,-p,x) = 0.  The coboundary d touches only p-variables, so the system
splits into one small exact linear system per x-monomial of H_n; deterministic
Gauss-Jordan elimination (smallest-monomial pivots, free unknowns set to zero)
picks a reproducible representative of the gauge freedom.

``bch_generating_function`` provides an independent construction for linear
(Lie-Poisson) structures: S0 + S~ = x . bch(p1, p2), with the series computed
by truncated exp/log in the free associative algebra and projected to nested
brackets via the Dynkin-Specht-Wever idempotent.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from gfoperad.deformation import coboundary_symbol, obstruction, verify_product
from gfoperad.groupoid import check_sgs
from gfoperad.operad import DEFAULT_ORDER_CAP
from gfoperad.poisson import PoissonStructure, validate_poisson
from gfoperad.symbols import FormalSeries, PolySymbol, p_key, x_key


class InfeasibleOrderError(RuntimeError):
    """The order-n linear system has no solution (Jacobi failure or a bug)."""

    def __init__(self, order, detail):
        self.order = order
        super().__init__(f"no solution at order {order}: {detail}")


def first_order_deformation(alpha: PoissonStructure) -> FormalSeries:
    """S~(1) = (1/2) p1.alpha(x).p2 as a graded arity-2 series."""
    d = alpha.dim
    total = PolySymbol.zero(d, 2)
    for (i, j), entry in alpha.entries.items():
        lifted = entry.with_shape(d, 2)
        p1i = PolySymbol.variable(p_key(1, i), d, 2)
        p2j = PolySymbol.variable(p_key(2, j), d, 2)
        p1j = PolySymbol.variable(p_key(1, j), d, 2)
        p2i = PolySymbol.variable(p_key(2, i), d, 2)
        total = total + (lifted * (p1i * p2j - p1j * p2i)).scale(Fraction(1, 2))
    return FormalSeries(d, 2, {1: total} if not total.is_zero() else {}, graded=True)


def _split_monomial(mono):
    p_part = tuple((v, e) for v, e in mono if v[0] == "p")
    x_part = tuple((v, e) for v, e in mono if v[0] == "x")
    return p_part, x_part


def _p_basis(n: int, d: int):
    """Arity-2 p-monomials of degree n+1 with positive degree in both blocks."""
    variables = [p_key(b, i) for b in (1, 2) for i in range(1, d + 1)]
    basis = []
    for combo in itertools.combinations_with_replacement(variables, n + 1):
        blocks = {v[1] for v in combo}
        if blocks != {1, 2}:
            continue
        counts = {}
        for v in combo:
            counts[v] = counts.get(v, 0) + 1
        basis.append(tuple(sorted(counts.items())))
    return sorted(basis)


def _linsolve(equations):
    """Exact Gauss-Jordan with deterministic pivoting; free unknowns are zero.

    ``equations``: iterable of (dict column->Fraction, Fraction rhs).  Raises
    ValueError on an inconsistent row.  Invariant: stored pivot rows reference
    free columns only, so the solution reads off as the pivot right-hand sides.
    """
    pivots = {}
    for row, rhs in equations:
        row = {c: v for c, v in row.items() if v != 0}
        # eliminate every pivot column present (pivot rows only add free
        # columns, so one pass over the initial pivot columns suffices)
        for col in sorted(c for c in row if c in pivots):
            factor = row.pop(col)
            prow, prhs = pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs = rhs - factor * prhs
        if not row:
            if rhs != 0:
                raise ValueError("inconsistent equation (nonzero rhs on a zero row)")
            continue
        col = min(row)
        inv = Fraction(1) / row.pop(col)
        prow = {c: v * inv for c, v in row.items()}
        prhs = rhs * inv
        for pc, (orow, orhs) in pivots.items():
            if col in orow:
                f = orow.pop(col)
                for c, v in prow.items():
                    nv = orow.get(c, 0) - f * v
                    if nv:
                        orow[c] = nv
                    else:
                        orow.pop(c, None)
                pivots[pc] = (orow, orhs - f * prhs)
        pivots[col] = (prow, prhs)
    return {col: prhs for col, (_, prhs) in pivots.items()}


def _order_columns(n: int, d: int):
    """Per unknown basis monomial: its coboundary image and inverse-condition image."""
    basis = _p_basis(n, d)
    d_cols = []
    sgs_cols = []
    flip = {
        p_key(2, i): PolySymbol.variable(p_key(1, i), d, 2).scale(-1)
        for i in range(1, d + 1)
    }
    for mono in basis:
        sym = PolySymbol(d, 2, {mono: Fraction(1)}, _validated=True)
        d_cols.append(dict(coboundary_symbol(sym, 2).terms))
        sgs_cols.append(dict(sym.substitute(flip).terms))
    return basis, d_cols, sgs_cols


def _solve_order(h_n: PolySymbol, n: int, d: int) -> PolySymbol:
    """Solve d S_n = -H_n with the structure-condition constraints."""
    by_x = {}
    for mono, coeff in h_n.terms.items():
        p_part, x_part = _split_monomial(mono)
        by_x.setdefault(x_part, {})[p_part] = coeff
    if not by_x:
        return PolySymbol.zero(d, 2)
    basis, d_cols, sgs_cols = _order_columns(n, d)
    equations = {}
    for tag, cols in (("d", d_cols), ("sgs", sgs_cols)):
        for idx, col in enumerate(cols):
            for p_mono, coeff in col.items():
                equations.setdefault((tag, p_mono), {})[idx] = coeff
    solution_terms = {}
    for x_part, h_terms in sorted(by_x.items()):
        seen = set(equations)
        for p_mono in h_terms:
            seen.add(("d", p_mono))
        rows = []
        for key in sorted(seen):
            row = equations.get(key, {})
            rhs = -h_terms.get(key[1], Fraction(0)) if key[0] == "d" else Fraction(0)
            rows.append((row, rhs))
        try:
            values = _linsolve(rows)
        except ValueError as exc:
            raise InfeasibleOrderError(n, f"x-monomial {x_part}: {exc}") from exc
        for idx, value in values.items():
            if value:
                mono = tuple(sorted(basis[idx] + x_part))
                solution_terms[mono] = value
    return PolySymbol(d, 2, solution_terms, _validated=True)


def solve_deformation(
    alpha: PoissonStructure,
    order: int,
    gauge: str = "sgs_constrained",
    cap: int = DEFAULT_ORDER_CAP,
) -> FormalSeries:
    """Associative deformation with first order (1/2) p1.alpha.p2, up to ``order``."""
    if gauge != "sgs_constrained":
        raise ValueError(f"unknown gauge {gauge!r}")
    if order > cap:
        raise ValueError(f"order {order} exceeds cap {cap}")
    report = validate_poisson(alpha)
    if not report.ok:
        raise ValueError(f"not a Poisson structure; first failing triple {report.failing_triple}")
    d = alpha.dim
    series = first_order_deformation(alpha)
    degree = alpha.max_degree
    for n in range(2, order + 1):
        h_n = obstruction(series, n, cap=cap, verified=True)
        for mono in h_n.terms:
            _, x_part = _split_monomial(mono)
            x_deg = sum(e for _, e in x_part)
            if x_deg > n * degree + 1:
                raise AssertionError(
                    f"H_{n} has x-degree {x_deg} > bound {n * degree + 1}"
                )
        s_n = _solve_order(h_n, n, d)
        if not s_n.is_zero():
            series = series.with_order(n, s_n)
    if not verify_product(series, order, cap=cap).all_zero:
        raise AssertionError("solver output fails the product equation")
    if not check_sgs(series, order).passed:
        raise AssertionError("solver output fails the structure conditions")
    return series


# -- Lie-Poisson structures and the bch oracle ---------------------------------


def lie_poisson_structure(dim: int, constants: dict) -> PoissonStructure:
    """alpha^{ij}(x) = sum_k c^{ij}_k x_k from constants {(i, j, k): c} with i < j."""
    entries = {}
    for (i, j, k), value in constants.items():
        if not (1 <= i < j <= dim):
            raise ValueError(f"store constants with i < j, got {(i, j, k)}")
        term = PolySymbol.variable(x_key(k), dim, 0).scale(Fraction(value))
        entries[(i, j)] = entries.get((i, j), PolySymbol.zero(dim, 0)) + term
    return PoissonStructure(dim, entries)


def heisenberg_structure() -> PoissonStructure:
    """d = 3, alpha^{12} = x_3, central third direction."""
    return lie_poisson_structure(3, {(1, 2, 3): 1})


def _mul_words(a, b, max_len):
    out = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            if len(w1) + len(w2) > max_len:
                continue
            w = w1 + w2
            out[w] = out.get(w, 0) + c1 * c2
    return {w: c for w, c in out.items() if c != 0}


def _exp_letter(letter, max_len):
    return {
        (letter,) * k: Fraction(1, math.factorial(k)) for k in range(max_len + 1)
    }


def _log_words(series, max_len):
    u = {w: c for w, c in series.items() if w}
    result = {}
    power = dict(u)
    for k in range(1, max_len + 1):
        sign = Fraction((-1) ** (k + 1), k)
        for w, c in power.items():
            result[w] = result.get(w, 0) + sign * c
        if k < max_len:
            power = _mul_words(power, u, max_len)
    return {w: c for w, c in result.items() if c != 0}


def bch_words(max_len: int):
    """log(exp(X) exp(Y)) in the free associative algebra, words up to max_len.

    Keys are tuples over {0, 1} (0 = X, 1 = Y); the degree-m part is a Lie
    element, recovered as nested brackets through the DSW projection.
    """
    product = _mul_words(_exp_letter(0, max_len), _exp_letter(1, max_len), max_len)
    return _log_words(product, max_len)


def _linear_constants(alpha: PoissonStructure):
    constants = {}
    for (i, j), entry in alpha.entries.items():
        for mono, coeff in entry.terms.items():
            if len(mono) != 1 or mono[0][1] != 1 or mono[0][0][0] != "x":
                raise ValueError(
                    "bch generating function needs a linear (Lie-Poisson) structure"
                )
            constants[(i, j, mono[0][0][1])] = coeff
    return constants


def bch_generating_function(alpha: PoissonStructure, order: int) -> FormalSeries:
    """Deformation with S0 + S~ = x . bch(p1, p2), truncated at ``order``.

    Requires a linear Poisson structure whose constants satisfy Jacobi; its
    order-n term carries the degree-(n+1) part of the series.
    """
    constants = _linear_constants(alpha)
    report = validate_poisson(alpha)
    if not report.ok:
        raise ValueError(f"constants violate Jacobi at triple {report.failing_triple}")
    d = alpha.dim

    def bracket_vec(u, v):
        out = [PolySymbol.zero(d, 2) for _ in range(d)]
        for (i, j, k), c in constants.items():
            term = (u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1]).scale(c)
            out[k - 1] = out[k - 1] + term
        return out

    letters = {
        0: [PolySymbol.variable(p_key(1, i), d, 2) for i in range(1, d + 1)],
        1: [PolySymbol.variable(p_key(2, i), d, 2) for i in range(1, d + 1)],
    }
    orders = {}
    for word, coeff in bch_words(order + 1).items():
        m = len(word)
        if m < 2:
            continue  # degree-1 words assemble the trivial part (p1+p2).x
        value = letters[word[0]]
        for letter in word[1:]:
            value = bracket_vec(value, letters[letter])
        scale = coeff * Fraction(1, m)
        contribution = PolySymbol.zero(d, 2)
        for k in range(d):
            contribution = contribution + (
                value[k] * PolySymbol.variable(x_key(k + 1), d, 2)
            ).scale(scale)
        if contribution.is_zero():
            continue
        n = m - 1
        orders[n] = orders.get(n, PolySymbol.zero(d, 2)) + contribution
    orders = {n: s for n, s in orders.items() if not s.is_zero()}
    return FormalSeries(d, 2, orders, graded=True)
