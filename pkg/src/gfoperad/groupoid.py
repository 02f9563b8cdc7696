"""Groupoid structure of arity-2 deformations and equivalence of products.

An associative S = S0 + S~ that also satisfies the structure conditions

    S(p, 0, x) = S(0, p, x) = p.x       and       S(p, -p, x) = 0

generates a Poisson structure alpha = 2 grad_{p1} grad_{p2} S(0,0,x) on the
base together with source/target maps; arity-1 functions act on products by
F(S)(F^{-1}, F^{-1}) and generate near-identity symplectomorphisms psi_F.

The trivial part satisfies the structure conditions on its own, so they are
enforced as exact substitution identities on the deformation S~.  For the
composition of symplectomorphisms the convention is psi_{F(G)} = psi_F o psi_G
(inner function applied first), matching the composition of the underlying
canonical relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gfoperad.operad import (
    DEFAULT_ORDER_CAP,
    GenFunction,
    NonConvergenceError,
    compose,
)
from gfoperad.poisson import PoissonStructure
from gfoperad.symbols import (
    FormalSeries,
    PolySymbol,
    monomial_p_degree,
    p_key,
    series_eval,
    x_key,
)


class SgsError(ValueError):
    """A deformation violates the groupoid structure conditions."""


@dataclass
class SgsReport:
    """Per-order residuals of the three structure conditions."""

    right_unit: dict  # order -> S~_n(p, 0, x)
    left_unit: dict  # order -> S~_n(0, p, x)
    inverse: dict  # order -> S~_n(p, -p, x)
    max_order: int

    @property
    def passed(self) -> bool:
        return all(
            sym.is_zero()
            for group in (self.right_unit, self.left_unit, self.inverse)
            for sym in group.values()
        )

    def first_failure(self):
        for name, group in (
            ("S(p,0,x)", self.right_unit),
            ("S(0,p,x)", self.left_unit),
            ("S(p,-p,x)", self.inverse),
        ):
            for order in sorted(group):
                if not group[order].is_zero():
                    return name, order, group[order]
        return None


def _zero_block(sym: PolySymbol, block: int) -> PolySymbol:
    mapping = {
        p_key(block, i): PolySymbol.zero(sym.dim, sym.blocks)
        for i in range(1, sym.dim + 1)
    }
    return sym.substitute(mapping)


def _negate_block_into(sym: PolySymbol, src: int, dst: int) -> PolySymbol:
    mapping = {
        p_key(src, i): PolySymbol.variable(p_key(dst, i), sym.dim, sym.blocks).scale(-1)
        for i in range(1, sym.dim + 1)
    }
    return sym.substitute(mapping)


def check_sgs(deformation: FormalSeries, order: int | None = None) -> SgsReport:
    """Exact substitution checks of the structure conditions, per order."""
    if deformation.blocks != 2:
        raise ValueError("structure conditions apply to arity-2 deformations")
    max_order = deformation.max_order() if order is None else order
    right, left, inv = {}, {}, {}
    for n in range(1, max_order + 1):
        sym = deformation.order(n)
        right[n] = _zero_block(sym, 2)
        left[n] = _zero_block(sym, 1)
        inv[n] = _negate_block_into(sym, 2, 1)
    return SgsReport(right, left, inv, max_order)


def extract_poisson(deformation: FormalSeries) -> PoissonStructure:
    """alpha^{kl}(x) = 2 d^2 S~^(1) / dp1^k dp2^l at p = 0; must be antisymmetric."""
    if deformation.blocks != 2:
        raise ValueError("expected an arity-2 deformation")
    d = deformation.dim
    s1 = deformation.order(1)
    kill_p = {
        p_key(b, i): PolySymbol.zero(d, 2)
        for b in (1, 2)
        for i in range(1, d + 1)
    }
    matrix = []
    for k in range(1, d + 1):
        row = []
        for l in range(1, d + 1):
            second = s1.diff(p_key(1, k)).diff(p_key(2, l))
            at_zero = second.substitute(kill_p).scale(2)
            row.append(at_zero.remap_variables({}, d, 0))
        matrix.append(row)
    try:
        return PoissonStructure.from_matrix(d, matrix)
    except ValueError as exc:
        raise SgsError(f"extracted bivector is not antisymmetric: {exc}") from exc


@dataclass
class StructureMaps:
    """Source/target corrections (the maps are x + correction); unit and
    inverse are the fixed affine maps (p,x) -> (0,x) and (p,x) -> (-p,x)."""

    dim: int
    source: tuple  # FormalSeries per component, arity 1
    target: tuple  # FormalSeries per component, arity 1

    def source_value(self, p, x, eps):
        return [x[i] + series_eval(self.source[i], [p], x, eps) for i in range(self.dim)]

    def target_value(self, p, x, eps):
        return [x[i] + series_eval(self.target[i], [p], x, eps) for i in range(self.dim)]

    @staticmethod
    def unit_value(x):
        return [0.0] * len(x), list(x)

    @staticmethod
    def inverse_value(p, x):
        return [-v for v in p], list(x)


def structure_maps(deformation: FormalSeries, order: int) -> StructureMaps:
    """Source x + grad_{p2} S~(p,0,x) and target x + grad_{p1} S~(0,p,x)."""
    report = check_sgs(deformation, order)
    if not report.passed:
        name, n, residual = report.first_failure()
        raise SgsError(f"structure condition {name} fails at order {n}: {residual}")
    d = deformation.dim
    source = []
    target = []
    for i in range(1, d + 1):
        src_orders = {}
        tgt_orders = {}
        for n in range(1, order + 1):
            sym = deformation.order(n)
            src = _zero_block(sym.diff(p_key(2, i)), 2)
            tgt = _zero_block(sym.diff(p_key(1, i)), 1)
            # survivors live in (p_1, x) resp. (p_2, x); re-express in arity 1
            src_orders[n] = src.with_shape(d, 1)
            tgt_orders[n] = tgt.remap_variables(
                {p_key(2, j): p_key(1, j) for j in range(1, d + 1)}, d, 1
            )
        source.append(FormalSeries(d, 1, src_orders, graded=False))
        target.append(FormalSeries(d, 1, tgt_orders, graded=False))
    return StructureMaps(d, tuple(source), tuple(target))


def invert_morphism(
    morphism: FormalSeries, order: int, cap: int = DEFAULT_ORDER_CAP
) -> FormalSeries:
    """The arity-1 series G~ with F(G) = I up to the given order.

    Order n of F(G) is F~_n + G~_n + (tree terms in lower orders), so G~ is
    built order by order; the same series is automatically a left and right
    inverse.
    """
    if morphism.blocks != 1:
        raise ValueError("only arity-1 morphisms can be inverted")
    dim = morphism.dim
    inverse = FormalSeries.zero(dim, 1)
    for n in range(1, order + 1):
        current = compose(
            GenFunction(1, dim, morphism.truncate(order)),
            [GenFunction(1, dim, inverse)],
            n,
            cap=cap,
        ).deformation
        residual = current.order(n)
        if not residual.is_zero():
            inverse = inverse.with_order(n, -residual)
    return inverse


def transform_product(
    deformation: FormalSeries,
    morphism: FormalSeries,
    order: int,
    cap: int = DEFAULT_ORDER_CAP,
) -> FormalSeries:
    """Equivalence action F(S)(F^{-1}, F^{-1}) on an arity-2 deformation."""
    if deformation.blocks != 2 or morphism.blocks != 1:
        raise ValueError("need an arity-2 deformation and an arity-1 morphism")
    dim = deformation.dim
    inverse = invert_morphism(morphism, order, cap=cap)
    outer = compose(
        GenFunction(1, dim, morphism),
        [GenFunction(2, dim, deformation)],
        order,
        cap=cap,
    )
    finv = GenFunction(1, dim, inverse)
    return compose(outer, [finv, finv], order, cap=cap).deformation


def is_odd_in_p(series: FormalSeries) -> bool:
    """True when every monomial of every order has odd total p-degree."""
    return all(
        monomial_p_degree(mono) % 2 == 1
        for sym in series.orders.values()
        for mono in sym.terms
    )


def psi_numeric(
    morphism: FormalSeries,
    p1,
    x1,
    eps: float,
    tol: float = 1e-12,
    max_iter: int = 200,
):
    """The symplectomorphism generated by F = p.x + F~ at one point.

    Solves x_1 = grad_p F(p_1, x_2) for x_2 by fixed-point iteration, then
    returns (p_2, x_2) with p_2 = grad_x F(p_1, x_2).  Fixes (0, x) exactly.
    """
    if morphism.blocks != 1:
        raise ValueError("psi is generated by arity-1 functions")
    d = morphism.dim
    grad_p = [
        FormalSeries(d, 1, {o: s.diff(p_key(1, i)) for o, s in morphism.orders.items()}, False)
        for i in range(1, d + 1)
    ]
    grad_x = [
        FormalSeries(d, 1, {o: s.diff(x_key(i)) for o, s in morphism.orders.items()}, False)
        for i in range(1, d + 1)
    ]
    p1 = [float(v) for v in p1]
    x1 = [float(v) for v in x1]
    x2 = list(x1)
    for _ in range(max_iter):
        new_x2 = [
            x1[i] - series_eval(grad_p[i], [p1], x2, eps) for i in range(d)
        ]
        delta = max(abs(a - b) for a, b in zip(new_x2, x2))
        if any(not math.isfinite(v) for v in new_x2):
            raise NonConvergenceError("psi iteration produced a non-finite value")
        x2 = new_x2
        if delta <= tol:
            break
    else:
        raise NonConvergenceError(f"psi did not converge within {max_iter} iterations")
    p2 = [p1[i] + series_eval(grad_x[i], [p1], x2, eps) for i in range(d)]
    return p2, x2
