#!/usr/bin/env python3
"""From Poisson structures to groupoid data: Moyal-type and Lie-Poisson cases.

An associative deformation satisfying the structure conditions
S(p,0,x) = S(0,p,x) = p.x and S(p,-p,x) = 0 encodes a local symplectic
groupoid: it induces a Poisson bivector on the base and explicit source and
target maps.  For a linear (Lie-Poisson) structure the deformation is the
classic x.bch(p1,p2) series.
"""

from gfoperad import (
    bch_generating_function,
    check_sgs,
    extract_poisson,
    first_order_deformation,
    heisenberg_structure,
    lie_poisson_structure,
    structure_maps,
    validate_poisson,
    verify_product,
)
from gfoperad.poisson import PoissonStructure
from gfoperad.symbols import PolySymbol

print("== constant bivector (Moyal-type) ==")
alpha = PoissonStructure(2, {(1, 2): PolySymbol.constant(1, 2, 0)})
series = first_order_deformation(alpha)
print(f"  S~ = eps * {series.order(1)}")
print(f"  product equation through order 8: {verify_product(series, 8).all_zero}")
print(f"  structure conditions:             {check_sgs(series, 8).passed}")
maps = structure_maps(series, 2)
print(f"  source correction: {[str(c.order(1)) for c in maps.source]}")
print(f"  target correction: {[str(c.order(1)) for c in maps.target]}")
print("  source and target differ by eps * alpha(x) p - the bivector read off the maps")

print()
print("== Heisenberg algebra: alpha^12 = x_3 on R^3 ==")
heis = heisenberg_structure()
print(f"  Jacobi holds: {validate_poisson(heis).ok}")
bch = bch_generating_function(heis, 5)
print(f"  x.bch(p1,p2) deformation orders: {bch.order_indices()}")
print("  (the algebra is 2-step nilpotent, so the series stops after 1/2 [p1,p2])")
print(f"  associative through order 5: {verify_product(bch, 5).all_zero}")
print(f"  bivector round trip:         {extract_poisson(bch) == heis}")

print()
print("== a solvable algebra keeps all orders: [e1, e2] = e2 ==")
solvable = lie_poisson_structure(2, {(1, 2, 2): 1})
series = bch_generating_function(solvable, 5)
for order in series.order_indices():
    print(f"  eps^{order}: {series.order(order)}")
print(f"  associative through order 5: {verify_product(series, 5).all_zero}")
print("  the 1/2, 1/12, -1/24 coefficients are the classical bch pattern.")
