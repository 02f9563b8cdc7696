"""Exact sparse polynomials in block covector variables p[b][i] and base variables x[i].

A variable is a tuple ``("p", block, comp)`` or ``("x", comp)`` with 1-based
indices; a monomial is a tuple of ``(variable, exponent)`` pairs sorted by
variable.  Coefficients are :class:`fractions.Fraction`; zero coefficients are
never stored.  The natural tuple order on variables (p before x, blocks
ascending) combined with degree-major monomial sorting gives a fixed canonical
term order, so serialized output is byte-stable.

:class:`FormalSeries` collects an order-indexed family of symbols.  A graded
series of arity n keeps its order-i term homogeneous of p-degree i+1, which is
exactly scaling behavior F(mu*p, x) = mu^(i+1) F(p, x).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction


class ShapeError(ValueError):
    """Operands declare incompatible (dim, blocks) shapes."""


def p_key(block: int, comp: int) -> tuple:
    return ("p", block, comp)


def x_key(comp: int) -> tuple:
    return ("x", comp)


def _validate_var(var, dim, blocks):
    if var[0] == "p":
        _, b, i = var
        if not (1 <= b <= blocks and 1 <= i <= dim):
            raise ShapeError(f"variable {var} outside shape dim={dim}, blocks={blocks}")
    elif var[0] == "x":
        _, i = var
        if not (1 <= i <= dim):
            raise ShapeError(f"variable {var} outside shape dim={dim}, blocks={blocks}")
    else:
        raise ValueError(f"unknown variable kind {var!r}")


def _mul_monomials(m1, m2):
    """Merge two sorted (variable, exponent) tuples."""
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        v1, e1 = m1[i]
        v2, e2 = m2[j]
        if v1 == v2:
            out.append((v1, e1 + e2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def monomial_degree(monomial) -> int:
    return sum(e for _, e in monomial)


def monomial_p_degree(monomial) -> int:
    return sum(e for v, e in monomial if v[0] == "p")


def monomial_sort_key(monomial):
    return (monomial_degree(monomial), monomial)


class PolySymbol:
    """Immutable sparse polynomial over exact rationals."""

    __slots__ = ("dim", "blocks", "terms")

    def __init__(self, dim: int, blocks: int, terms=None, *, _validated=False):
        if dim < 1:
            raise ShapeError(f"dim must be positive, got {dim}")
        if blocks < 0:
            raise ShapeError(f"blocks must be non-negative, got {blocks}")
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff == 0:
                    continue
                if not _validated:
                    mono = tuple(sorted(mono))
                    for var, exp in mono:
                        if exp < 1:
                            raise ValueError(f"exponent must be >= 1 in {mono}")
                        _validate_var(var, dim, blocks)
                clean[mono] = coeff
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PolySymbol is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(dim: int, blocks: int) -> "PolySymbol":
        return PolySymbol(dim, blocks, {})

    @staticmethod
    def constant(value, dim: int, blocks: int) -> "PolySymbol":
        return PolySymbol(dim, blocks, {(): Fraction(value)})

    @staticmethod
    def variable(var, dim: int, blocks: int) -> "PolySymbol":
        return PolySymbol(dim, blocks, {((var, 1),): Fraction(1)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def same_shape(self, other: "PolySymbol") -> bool:
        return self.dim == other.dim and self.blocks == other.blocks

    def ordered_terms(self):
        """Terms in the canonical (degree-major, variable-major) order."""
        return sorted(self.terms.items(), key=lambda kv: monomial_sort_key(kv[0]))

    def p_degrees(self):
        return {monomial_p_degree(m) for m in self.terms}

    def max_x_degree(self) -> int:
        degs = [sum(e for v, e in m if v[0] == "x") for m in self.terms]
        return max(degs, default=0)

    def __eq__(self, other):
        return (
            isinstance(other, PolySymbol)
            and self.same_shape(other)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.dim, self.blocks, tuple(self.ordered_terms())))

    # -- ring operations ---------------------------------------------------

    def _require_shape(self, other):
        if not self.same_shape(other):
            raise ShapeError(
                f"shape mismatch: ({self.dim},{self.blocks}) vs ({other.dim},{other.blocks})"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolySymbol.constant(other, self.dim, self.blocks)
        self._require_shape(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            new = terms.get(mono, 0) + coeff
            if new == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = new
        return PolySymbol(self.dim, self.blocks, terms, _validated=True)

    def __neg__(self):
        return PolySymbol(
            self.dim,
            self.blocks,
            {m: -c for m, c in self.terms.items()},
            _validated=True,
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolySymbol.constant(other, self.dim, self.blocks)
        return self + (-other)

    def scale(self, factor) -> "PolySymbol":
        factor = Fraction(factor)
        if factor == 0:
            return PolySymbol.zero(self.dim, self.blocks)
        return PolySymbol(
            self.dim,
            self.blocks,
            {m: c * factor for m, c in self.terms.items()},
            _validated=True,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._require_shape(other)
        if not self.terms or not other.terms:
            return PolySymbol.zero(self.dim, self.blocks)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mul_monomials(m1, m2)
                new = terms.get(mono, 0) + c1 * c2
                if new == 0:
                    terms.pop(mono, None)
                else:
                    terms[mono] = new
        return PolySymbol(self.dim, self.blocks, terms, _validated=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = PolySymbol.constant(1, self.dim, self.blocks)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- calculus ----------------------------------------------------------

    def diff(self, var) -> "PolySymbol":
        _validate_var(var, self.dim, self.blocks)
        terms = {}
        for mono, coeff in self.terms.items():
            for idx, (v, e) in enumerate(mono):
                if v == var:
                    if e == 1:
                        new_mono = mono[:idx] + mono[idx + 1 :]
                    else:
                        new_mono = mono[:idx] + ((v, e - 1),) + mono[idx + 1 :]
                    terms[new_mono] = terms.get(new_mono, 0) + coeff * e
                    break
        return PolySymbol(self.dim, self.blocks, terms, _validated=True)

    def grad_p(self, block: int):
        """Partial derivatives with respect to p[block][1..dim]."""
        if not (1 <= block <= self.blocks):
            raise ShapeError(f"p-block {block} out of range 1..{self.blocks}")
        return tuple(self.diff(p_key(block, i)) for i in range(1, self.dim + 1))

    def grad_x(self):
        return tuple(self.diff(x_key(i)) for i in range(1, self.dim + 1))

    # -- substitution and reshaping ----------------------------------------

    def substitute(self, mapping, dim=None, blocks=None) -> "PolySymbol":
        """Simultaneously replace variables by polynomials.

        Unmapped variables survive unchanged; the result shape defaults to the
        input shape and must accommodate every surviving variable and image.
        """
        dim = self.dim if dim is None else dim
        blocks = self.blocks if blocks is None else blocks
        images = {}
        for var, image in mapping.items():
            if isinstance(image, PolySymbol):
                images[var] = image
            else:
                images[var] = PolySymbol.constant(image, dim, blocks)
        power_cache = {}

        def image_power(var, exp):
            key = (var, exp)
            if key not in power_cache:
                power_cache[key] = images[var] ** exp
            return power_cache[key]

        result = PolySymbol.zero(dim, blocks)
        for mono, coeff in self.terms.items():
            fixed = []
            factor = None
            for var, exp in mono:
                if var in images:
                    piece = image_power(var, exp)
                    factor = piece if factor is None else factor * piece
                else:
                    _validate_var(var, dim, blocks)
                    fixed.append((var, exp))
            term = PolySymbol(dim, blocks, {tuple(fixed): coeff}, _validated=True)
            if factor is not None:
                term = term * factor
            result = result + term
        return result

    def remap_variables(self, mapping, dim: int, blocks: int) -> "PolySymbol":
        """Rename variables via ``mapping`` (var -> var); unmapped vars kept."""
        terms = {}
        for mono, coeff in self.terms.items():
            acc = {}
            for var, exp in mono:
                new = mapping.get(var, var)
                _validate_var(new, dim, blocks)
                acc[new] = acc.get(new, 0) + exp
            new_mono = tuple(sorted(acc.items()))
            terms[new_mono] = terms.get(new_mono, 0) + coeff
        return PolySymbol(dim, blocks, terms, _validated=True)

    def with_shape(self, dim: int, blocks: int) -> "PolySymbol":
        """Reinterpret in another shape; every variable must stay in range."""
        for mono in self.terms:
            for var, _ in mono:
                _validate_var(var, dim, blocks)
        return PolySymbol(dim, blocks, self.terms, _validated=True)

    # -- evaluation ----------------------------------------------------------

    def eval(self, p_values, x_values):
        """Evaluate at a point.

        ``p_values``: one length-``dim`` sequence per block; ``x_values``: a
        length-``dim`` sequence.  Exact when fed ints/Fractions, floating when
        fed floats.
        """
        if len(p_values) != self.blocks:
            raise ShapeError(f"expected {self.blocks} p-blocks, got {len(p_values)}")
        for block in p_values:
            if len(block) != self.dim:
                raise ShapeError("p-block length mismatch")
        if len(x_values) != self.dim:
            raise ShapeError("x length mismatch")
        total = 0
        for mono, coeff in self.terms.items():
            value = coeff
            for var, exp in mono:
                if var[0] == "p":
                    base = p_values[var[1] - 1][var[2] - 1]
                else:
                    base = x_values[var[1] - 1]
                value = value * base**exp
            total = total + value
        return total

    # -- display -------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.ordered_terms():
            factors = []
            for var, exp in mono:
                name = f"p[{var[1]}][{var[2]}]" if var[0] == "p" else f"x[{var[1]}]"
                factors.append(name if exp == 1 else f"{name}^{exp}")
            body = "*".join(factors)
            if body:
                parts.append(f"{coeff}*{body}" if coeff != 1 else body)
            else:
                parts.append(str(coeff))
        return " + ".join(parts)

    def __repr__(self):
        return f"PolySymbol(dim={self.dim}, blocks={self.blocks}, {self})"


# -- derivative tensors and directional contraction ---------------------------


def _contract_variables(f: PolySymbol, against):
    if against == "x":
        return [x_key(i) for i in range(1, f.dim + 1)]
    kind, block = against
    if kind != "p":
        raise ValueError(f"against must be 'x' or ('p', block), got {against!r}")
    if not (1 <= block <= f.blocks):
        raise ShapeError(f"p-block {block} out of range 1..{f.blocks}")
    return [p_key(block, i) for i in range(1, f.dim + 1)]


def derivative_tensors(f: PolySymbol, variables, order: int):
    """Nonzero partial derivatives of the given order, keyed by sorted index tuple."""
    level = {(): f}
    for _ in range(order):
        nxt = {}
        for idx, g in level.items():
            start = idx[-1] if idx else 0
            for k in range(start, len(variables)):
                dg = g.diff(variables[k])
                if not dg.is_zero():
                    nxt[idx + (k,)] = dg
        level = nxt
    return level


def directional_contract(f: PolySymbol, directions, against) -> PolySymbol:
    """Contract the m-th derivative of ``f`` against m direction vectors.

    ``directions`` is a list of m sequences of symbols, each of length dim;
    ``against`` selects the x-variables or one p-block.  The result is
    symmetric and multilinear in the directions.
    """
    variables = _contract_variables(f, against)
    for d in directions:
        if len(d) != len(variables):
            raise ShapeError(
                f"direction length {len(d)} != variable count {len(variables)}"
            )
    m = len(directions)
    if m == 0:
        return f
    total = PolySymbol.zero(f.dim, f.blocks)
    for idx, g in derivative_tensors(f, variables, m).items():
        for perm in set(itertools.permutations(idx)):
            prod = g
            for slot, k in enumerate(perm):
                prod = prod * directions[slot][k]
                if prod.is_zero():
                    break
            total = total + prod
    return total


def contracted_gradient(f: PolySymbol, directions, against):
    """Contract the (m+1)-th derivative against m directions, one index free.

    Returns the length-dim vector of symbols corresponding to the free index.
    """
    variables = _contract_variables(f, against)
    for d in directions:
        if len(d) != len(variables):
            raise ShapeError(
                f"direction length {len(d)} != variable count {len(variables)}"
            )
    m = len(directions)
    comps = [PolySymbol.zero(f.dim, f.blocks) for _ in variables]
    for idx, g in derivative_tensors(f, variables, m + 1).items():
        for perm in set(itertools.permutations(idx)):
            assigned, free = perm[:-1], perm[-1]
            prod = g
            for slot, k in enumerate(assigned):
                prod = prod * directions[slot][k]
                if prod.is_zero():
                    break
            else:
                comps[free] = comps[free] + prod
    return tuple(comps)


# -- graded series -------------------------------------------------------------


@dataclass
class GradingReport:
    ok: bool
    violations: list  # (order, monomial as str, p-degree)

    def __bool__(self):
        return self.ok


class FormalSeries:
    """Order-indexed family of symbols; orders start at 1.

    With ``graded=True`` the intent is that the order-i term is homogeneous of
    p-degree i+1 (checked by :func:`check_grading`, not at construction).
    """

    __slots__ = ("dim", "blocks", "orders", "graded")

    def __init__(self, dim: int, blocks: int, orders=None, graded: bool = True):
        clean = {}
        if orders:
            for i, sym in orders.items():
                if not isinstance(i, int) or i < 1:
                    raise ValueError(f"order index must be a positive integer, got {i!r}")
                if sym.dim != dim or sym.blocks != blocks:
                    raise ShapeError(f"order {i} symbol has wrong shape")
                if not sym.is_zero():
                    clean[i] = sym
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "orders", clean)
        object.__setattr__(self, "graded", graded)

    def __setattr__(self, name, value):
        raise AttributeError("FormalSeries is immutable")

    @staticmethod
    def zero(dim: int, blocks: int, graded: bool = True) -> "FormalSeries":
        return FormalSeries(dim, blocks, {}, graded)

    def order(self, i: int) -> PolySymbol:
        return self.orders.get(i, PolySymbol.zero(self.dim, self.blocks))

    def order_indices(self):
        return sorted(self.orders)

    def max_order(self) -> int:
        return max(self.orders, default=0)

    def is_zero(self) -> bool:
        return not self.orders

    def with_order(self, i: int, sym: PolySymbol) -> "FormalSeries":
        orders = dict(self.orders)
        orders[i] = sym
        return FormalSeries(self.dim, self.blocks, orders, self.graded)

    def truncate(self, max_order: int) -> "FormalSeries":
        return FormalSeries(
            self.dim,
            self.blocks,
            {i: s for i, s in self.orders.items() if i <= max_order},
            self.graded,
        )

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        if self.dim != other.dim or self.blocks != other.blocks:
            raise ShapeError("series shape mismatch")
        orders = dict(self.orders)
        for i, sym in other.orders.items():
            orders[i] = orders[i] + sym if i in orders else sym
        return FormalSeries(self.dim, self.blocks, orders, self.graded and other.graded)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "FormalSeries":
        return FormalSeries(
            self.dim,
            self.blocks,
            {i: s.scale(factor) for i, s in self.orders.items()},
            self.graded,
        )

    def __eq__(self, other):
        return (
            isinstance(other, FormalSeries)
            and self.dim == other.dim
            and self.blocks == other.blocks
            and self.orders == other.orders
        )

    def __repr__(self):
        body = ", ".join(f"eps^{i}: {s}" for i, s in sorted(self.orders.items()))
        return f"FormalSeries(dim={self.dim}, arity={self.blocks}, {{{body}}})"


def check_grading(series: FormalSeries) -> GradingReport:
    """Verify every order-i monomial has total p-degree exactly i+1."""
    violations = []
    for i, sym in sorted(series.orders.items()):
        for mono in sym.terms:
            pdeg = monomial_p_degree(mono)
            if pdeg != i + 1:
                mono_sym = PolySymbol(series.dim, series.blocks, {mono: 1}, _validated=True)
                violations.append((i, str(mono_sym), pdeg))
    return GradingReport(not violations, violations)


def series_eval(series: FormalSeries, p_values, x_values, eps, truncation=None):
    """Sum eps^i * order_i(point) over stored orders i <= truncation."""
    total = 0
    for i, sym in series.orders.items():
        if truncation is not None and i > truncation:
            continue
        total = total + eps**i * sym.eval(p_values, x_values)
    return total


def flatten_blocks(series: FormalSeries) -> FormalSeries:
    """Reinterpret an arity-n series over dim d as arity 1 over dim d*n.

    p[b][i] moves to p[1][(b-1)d + i]; the x-variables keep their first-d
    slots of the widened base.  Inverse of :func:`unflatten_blocks`.
    """
    n, d = series.blocks, series.dim
    if n < 1:
        raise ShapeError("flattening needs at least one block")
    mapping = {
        p_key(b, i): p_key(1, (b - 1) * d + i)
        for b in range(1, n + 1)
        for i in range(1, d + 1)
    }
    wide = d * n
    return FormalSeries(
        wide,
        1,
        {o: s.remap_variables(mapping, wide, 1) for o, s in series.orders.items()},
        series.graded,
    )


def unflatten_blocks(series: FormalSeries, arity: int, dim: int) -> FormalSeries:
    """Undo :func:`flatten_blocks` for the given original (arity, dim)."""
    if series.blocks != 1 or series.dim != arity * dim:
        raise ShapeError(
            f"expected an arity-1 series over dim {arity * dim}, got "
            f"({series.dim},{series.blocks})"
        )
    mapping = {}
    for b in range(1, arity + 1):
        for i in range(1, dim + 1):
            mapping[p_key(1, (b - 1) * dim + i)] = p_key(b, i)
    return FormalSeries(
        dim,
        arity,
        {o: s.remap_variables(mapping, dim, arity) for o, s in series.orders.items()},
        series.graded,
    )


def random_graded_series(rng, arity, dim, orders, max_x_degree=2, terms_per_order=3):
    """Random graded series for property tests; deterministic given ``rng``."""
    p_vars = [p_key(b, i) for b in range(1, arity + 1) for i in range(1, dim + 1)]
    out = {}
    for order in orders:
        terms = {}
        for _ in range(terms_per_order):
            counts = {}
            for _ in range(order + 1):
                v = rng.choice(p_vars)
                counts[v] = counts.get(v, 0) + 1
            for _ in range(rng.randint(0, max_x_degree)):
                v = x_key(rng.randint(1, dim))
                counts[v] = counts.get(v, 0) + 1
            mono = tuple(sorted(counts.items()))
            coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if coeff == 0:
                coeff = Fraction(1)
            terms[mono] = terms.get(mono, 0) + coeff
        sym = PolySymbol(dim, arity, terms)
        if not sym.is_zero():
            out[order] = sym
    return FormalSeries(dim, arity, out, graded=True)


# -- JSON observation format ---------------------------------------------------


def poly_to_obj(sym: PolySymbol):
    terms = []
    for mono, coeff in sym.ordered_terms():
        p_part = sorted([v[1], v[2], e] for v, e in mono if v[0] == "p")
        x_part = sorted([v[1], e] for v, e in mono if v[0] == "x")
        terms.append({"coeff": str(coeff), "p": p_part, "x": x_part})
    return terms


def poly_from_obj(terms, dim, blocks) -> PolySymbol:
    acc = {}
    for term in terms:
        mono = {}
        for block, comp, exp in term.get("p", []):
            var = p_key(block, comp)
            mono[var] = mono.get(var, 0) + exp
        for comp, exp in term.get("x", []):
            var = x_key(comp)
            mono[var] = mono.get(var, 0) + exp
        key = tuple(sorted(mono.items()))
        acc[key] = acc.get(key, 0) + Fraction(term["coeff"])
    return PolySymbol(dim, blocks, acc)


def series_to_obj(series: FormalSeries):
    return {
        "arity": series.blocks,
        "dim": series.dim,
        "graded": series.graded,
        "orders": [
            {"order": i, "terms": poly_to_obj(series.orders[i])}
            for i in sorted(series.orders)
        ],
    }


def series_from_obj(obj) -> FormalSeries:
    dim = obj["dim"]
    arity = obj["arity"]
    orders = {
        entry["order"]: poly_from_obj(entry["terms"], dim, arity)
        for entry in obj["orders"]
    }
    return FormalSeries(dim, arity, orders, graded=obj.get("graded", True))


def series_dumps(series: FormalSeries) -> str:
    return json.dumps(series_to_obj(series), indent=2)


def series_loads(text: str) -> FormalSeries:
    return series_from_obj(json.loads(text))
