"""The deformation complex on graded series.

The coboundary d sends an arity-n series to the arity-(n+1) series

    dF(p_1..p_{n+1}, x) = F(p_1..p_n, x)
                          + sum_j (-1)^(n+j-1) F(p_1.., p_j + p_{j+1}, .., p_{n+1}, x)
                          + (-1)^(n-1) F(p_2..p_{n+1}, x),

realized by exact variable substitution.  The Gerstenhaber-type bracket is
assembled from slot insertions through :func:`gfoperad.operad.compose` with
identity fillers, with the classical slot signs (-1)^((i-1)(l-1)); the
convention is pinned by bracket(0_2, F) = dF, which holds for every arity.

For an arity-2 deformation S~ the product equation is the vanishing of
S(S,I) - S(I,S) order by order; ``verify_product`` reports those residuals and
``obstruction`` extracts the order-n inhomogeneity H_n built from lower
orders, so that the product equation at order n reads dS_n + H_n = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gfoperad.operad import DEFAULT_ORDER_CAP, GenFunction, compose, identity, trivial_product
from gfoperad.symbols import FormalSeries, PolySymbol, p_key, x_key


@dataclass
class CochainReport:
    """Per-order residual symbols of the product equation."""

    residuals: dict  # order -> PolySymbol (arity-3 slot)
    max_order: int

    @property
    def all_zero(self) -> bool:
        return all(sym.is_zero() for sym in self.residuals.values())

    def first_failure(self):
        for order in sorted(self.residuals):
            if not self.residuals[order].is_zero():
                return order, self.residuals[order]
        return None


def _shift_blocks(sym: PolySymbol, shift: int, blocks: int) -> PolySymbol:
    mapping = {}
    for b in range(1, sym.blocks + 1):
        for i in range(1, sym.dim + 1):
            mapping[p_key(b, i)] = p_key(b + shift, i)
    return sym.remap_variables(mapping, sym.dim, blocks)


def _merge_blocks(sym: PolySymbol, j: int, blocks: int) -> PolySymbol:
    """Substitute p_j -> p_j + p_{j+1} and shift the blocks above j up by one."""
    dim = sym.dim
    mapping = {}
    for b in range(j + 1, sym.blocks + 1):
        for i in range(1, dim + 1):
            mapping[p_key(b, i)] = PolySymbol.variable(p_key(b + 1, i), dim, blocks)
    for i in range(1, dim + 1):
        mapping[p_key(j, i)] = PolySymbol.variable(p_key(j, i), dim, blocks) + PolySymbol.variable(
            p_key(j + 1, i), dim, blocks
        )
    return sym.substitute(mapping, dim=dim, blocks=blocks)


def coboundary_symbol(sym: PolySymbol, arity: int) -> PolySymbol:
    """Apply the coboundary substitution formula to one arity-``arity`` symbol."""
    if sym.blocks != arity:
        raise ValueError(f"symbol has {sym.blocks} blocks, expected {arity}")
    n = arity
    blocks = n + 1
    total = sym.with_shape(sym.dim, blocks)
    for j in range(1, n + 1):
        sign = -1 if (n + j - 1) % 2 else 1
        total = total + _merge_blocks(sym, j, blocks).scale(sign)
    last = _shift_blocks(sym, 1, blocks)
    total = total + last.scale(-1 if (n - 1) % 2 else 1)
    return total


def coboundary(series: FormalSeries) -> FormalSeries:
    """Order-by-order coboundary; graded input, graded output (p-degrees kept)."""
    if not series.graded:
        raise ValueError("coboundary expects a graded series")
    arity = series.blocks
    return FormalSeries(
        series.dim,
        arity + 1,
        {i: coboundary_symbol(s, arity) for i, s in series.orders.items()},
        graded=True,
    )


def _insert(outer: FormalSeries, inner: FormalSeries, slot: int, order: int, cap: int) -> FormalSeries:
    """Deformation of outer composed with ``inner`` in one slot, identities elsewhere."""
    dim = outer.dim
    fillers = []
    for position in range(1, outer.blocks + 1):
        if position == slot:
            fillers.append(GenFunction(inner.blocks, dim, inner))
        else:
            fillers.append(identity(dim))
    return compose(GenFunction(outer.blocks, dim, outer), fillers, order, cap=cap).deformation


def circ(F: FormalSeries, G: FormalSeries, order: int, cap: int = DEFAULT_ORDER_CAP) -> FormalSeries:
    """Sum of slot insertions F(0_1,..,G,..,0_1) with signs (-1)^((i-1)(l-1))."""
    k, l = F.blocks, G.blocks
    total = FormalSeries.zero(F.dim, k + l - 1)
    for i in range(1, k + 1):
        piece = _insert(F, G, i, order, cap)
        sign = -1 if ((i - 1) * (l - 1)) % 2 else 1
        total = total + piece.scale(sign)
    return total


def bracket(F: FormalSeries, G: FormalSeries, order: int, cap: int = DEFAULT_ORDER_CAP) -> FormalSeries:
    """Gerstenhaber bracket [F, G] = F o G - (-1)^((k-1)(l-1)) G o F."""
    if F.dim != G.dim:
        raise ValueError("bracket operands must share the base dimension")
    k, l = F.blocks, G.blocks
    sign = -1 if ((k - 1) * (l - 1)) % 2 else 1
    return circ(F, G, order, cap) - circ(G, F, order, cap).scale(sign)


def verify_product(
    deformation: FormalSeries, order: int, cap: int = DEFAULT_ORDER_CAP
) -> CochainReport:
    """Residuals of S(S, I) - S(I, S) for S = S0 + S~, per order up to ``order``."""
    if deformation.blocks != 2:
        raise ValueError("a product candidate must have arity 2")
    dim = deformation.dim
    S = GenFunction(2, dim, deformation)
    one = identity(dim)
    left = compose(S, [S, one], order, cap=cap).deformation
    right = compose(S, [one, S], order, cap=cap).deformation
    diff = left - right
    residuals = {n: diff.order(n) for n in range(1, order + 1)}
    return CochainReport(residuals, order)


class ProductPreconditionError(ValueError):
    """The partial deformation fails the product equation below the target order."""

    def __init__(self, order, residual):
        self.order = order
        self.residual = residual
        super().__init__(f"product equation already fails at order {order}: {residual}")


def obstruction(
    partial: FormalSeries, n: int, cap: int = DEFAULT_ORDER_CAP, verified: bool = False
) -> PolySymbol:
    """H_n: the order-n part of (1/2)[S~, S~] built from orders below n.

    ``partial`` must solve the product equation up to order n-1 (checked
    unless ``verified``); dS_n + H_n = 0 is then the order-n equation.
    """
    if partial.blocks != 2:
        raise ValueError("expected an arity-2 deformation")
    truncated = partial.truncate(n - 1)
    if n <= 1:
        return PolySymbol.zero(partial.dim, 3)
    if not verified:
        report = verify_product(truncated, n - 1, cap=cap)
        if not report.all_zero:
            order, residual = report.first_failure()
            raise ProductPreconditionError(order, residual)
    half = bracket(truncated, truncated, n, cap=cap).scale(Fraction(1, 2))
    return half.order(n)
