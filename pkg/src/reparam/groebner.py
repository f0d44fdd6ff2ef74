"""Ideal arithmetic: reduced Groebner bases, elimination, saturation,
dimension, membership, quotients and factor-and-branch component splitting.

The basis computation is plain Buchberger with sugar-strategy pair selection,
Gebauer-Moeller pair pruning, monic normalization after every reduction, and
a configurable budget on single-term reduction steps.  Coefficients may come
from any field domain (rationals or rational functions in the parameters);
zero tests are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

from .errors import BudgetExceeded
from .poly import MPoly, PolyRing, MonomialOrder, GREVLEX, BlockElim, Var, VarUniverse

__all__ = [
    "Budget", "Ideal", "groebner_basis", "normal_form", "s_polynomial",
    "eliminate", "saturate", "ideal_dimension", "ideal_membership",
    "intersect", "ideal_quotient", "quotient_dimension", "split_components",
    "DEFAULT_GB_BUDGET", "buchberger_postcheck",
]

DEFAULT_GB_BUDGET = 10 ** 6

# Test hook: when True every reduced basis is re-verified by reducing all
# S-polynomials to zero (acceptance criterion for the property suite).
POSTCHECK_ENABLED = False


class Budget:
    """Mutable counter of reduction steps shared along a computation."""

    __slots__ = ("limit", "steps")

    def __init__(self, limit: int = DEFAULT_GB_BUDGET):
        self.limit = limit
        self.steps = 0

    def spend(self, n: int = 1):
        self.steps += n
        if self.steps > self.limit:
            raise BudgetExceeded(self.steps)

    def clone(self) -> "Budget":
        b = Budget(self.limit)
        b.steps = self.steps
        return b


def _lcm_exps(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _disjoint(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def normal_form(p: MPoly, basis: Sequence[MPoly], order: MonomialOrder = GREVLEX,
                budget: Optional[Budget] = None) -> MPoly:
    """Full normal form of p modulo basis (every term reduced)."""
    if not basis or not p.terms:
        return p
    ring = p.ring
    lts = [(g.leading(order), g) for g in basis if g.terms]
    key = order.key
    work = dict(p.terms)
    rem = {}
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        hit = None
        for (le, lc), g in lts:
            if _divides(le, e):
                hit = (le, lc, g)
                break
        if hit is None:
            rem[e] = c
            continue
        le, lc, g = hit
        if budget is not None:
            budget.spend()
        m = tuple(x - y for x, y in zip(e, le))
        cc = c / lc
        for eg, cg in g.terms.items():
            if eg == le:
                continue
            k2 = tuple(x + y for x, y in zip(m, eg))
            acc = work.get(k2)
            s = -(cc * cg) if acc is None else acc - cc * cg
            if s:
                work[k2] = s
            elif acc is not None:
                del work[k2]
    return MPoly(ring, rem)


def s_polynomial(f: MPoly, g: MPoly, order: MonomialOrder = GREVLEX) -> MPoly:
    ef, cf = f.leading(order)
    eg, cg = g.leading(order)
    l = _lcm_exps(ef, eg)
    mf = tuple(x - y for x, y in zip(l, ef))
    mg = tuple(x - y for x, y in zip(l, eg))
    return f.mul_term(mf, f.ring.domain.one / cf) - g.mul_term(mg, g.ring.domain.one / cg)


def _sugar(exps, poly_sugar):
    return poly_sugar + sum(exps)


def groebner_basis(gens: Iterable[MPoly], order: MonomialOrder = GREVLEX,
                   budget: Optional[Budget] = None) -> list:
    """Reduced Groebner basis (monic, autoreduced, deterministically sorted)."""
    budget = budget or Budget()
    gens = [g for g in gens if g.terms]
    if not gens:
        return []
    ring = gens[0].ring
    key = order.key

    # deterministic seed order: by leading monomial then term count
    gens = sorted(gens, key=lambda g: (key(g.leading(order)[0]), len(g.terms)))
    basis: list = []
    sugars: list = []
    pairs: list = []   # entries (sugar, lcm_key, i, j, lcm)

    def update(j):
        """Gebauer-Moeller style pair update after basis[j] arrives."""
        ej = basis[j].leading(order)[0]
        new_pairs = []
        for i in range(j):
            ei = basis[i].leading(order)[0]
            l = _lcm_exps(ei, ej)
            new_pairs.append([i, j, l])
        # criterion F/M: drop pairs whose lcm is a proper multiple of another
        keep = []
        for a in new_pairs:
            dominated = False
            for b in new_pairs:
                if a is b:
                    continue
                if a[2] != b[2] and _divides(b[2], a[2]):
                    dominated = True
                    break
            if not dominated:
                keep.append(a)
        # Buchberger's first criterion: coprime leading terms
        keep = [a for a in keep
                if not _disjoint(basis[a[0]].leading(order)[0], ej)]
        # chain criterion against old pairs
        survivors = []
        for p in pairs:
            i, k = p[2], p[3]
            l = p[4]
            if _divides(ej, l) and _lcm_exps(basis[i].leading(order)[0], ej) != l \
                    and _lcm_exps(basis[k].leading(order)[0], ej) != l:
                continue
            survivors.append(p)
        pairs.clear()
        pairs.extend(survivors)
        for i, jj, l in keep:
            s = max(_sugar(tuple(a - b for a, b in zip(l, basis[i].leading(order)[0])), sugars[i]),
                    _sugar(tuple(a - b for a, b in zip(l, basis[jj].leading(order)[0])), sugars[jj]))
            pairs.append((s, key(l), i, jj, l))

    for g in gens:
        r = normal_form(g, basis, order, budget)
        if r.terms:
            basis.append(r.monic(order))
            sugars.append(r.total_degree())
            update(len(basis) - 1)

    while pairs:
        pairs.sort(key=lambda p: (p[0], p[1], p[2], p[3]))
        sug, _, i, j, l = pairs.pop(0)
        sp = s_polynomial(basis[i], basis[j], order)
        r = normal_form(sp, basis, order, budget)
        if r.terms:
            basis.append(r.monic(order))
            sugars.append(max(sug, r.total_degree()))
            update(len(basis) - 1)

    reduced = _interreduce(basis, order, budget)
    if POSTCHECK_ENABLED:
        buchberger_postcheck(reduced, order)
    return reduced


def _interreduce(basis, order, budget):
    # discard generators whose leading term another generator's divides
    basis = sorted((g for g in basis if g.terms),
                   key=lambda g: order.key(g.leading(order)[0]))
    lts = [g.leading(order)[0] for g in basis]
    keep = []
    for idx, g in enumerate(basis):
        e = lts[idx]
        dominated = False
        for jdx in range(len(basis)):
            if jdx == idx:
                continue
            if _divides(lts[jdx], e) and (lts[jdx] != e or jdx < idx):
                dominated = True
                break
        if not dominated:
            keep.append(g)
    # full tail reduction until stable
    changed = True
    while changed:
        changed = False
        out = []
        for i, g in enumerate(keep):
            others = out + keep[i + 1:]
            r = normal_form(g, others, order, budget)
            if r.terms:
                r = r.monic(order)
                if r != g:
                    changed = True
                out.append(r)
            else:
                changed = True
        keep = sorted(out, key=lambda g: order.key(g.leading(order)[0]))
    return keep


def buchberger_postcheck(basis, order: MonomialOrder = GREVLEX):
    """Re-verify the Buchberger criterion on a computed basis."""
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            sp = s_polynomial(basis[i], basis[j], order)
            r = normal_form(sp, basis, order)
            if r.terms:
                raise AssertionError(
                    f"Buchberger post-check failed for pair ({i},{j}): {r}")
    return True


# --------------------------------------------------------------------------
# the Ideal wrapper

class Ideal:
    """An ideal with cached reduced bases per monomial order."""

    def __init__(self, ring: PolyRing, generators: Iterable[MPoly]):
        self.ring = ring
        self.generators = [g for g in generators if g.terms]
        self._gb = {}

    def __repr__(self):
        return f"Ideal({len(self.generators)} gens over {self.ring.universe!r})"

    def _order_sig(self, order: MonomialOrder):
        if isinstance(order, BlockElim):
            return ("block", order.front)
        return order.name

    def gb(self, order: MonomialOrder = GREVLEX, budget: Optional[Budget] = None) -> list:
        sig = self._order_sig(order)
        if sig not in self._gb:
            self._gb[sig] = groebner_basis(self.generators, order, budget)
        return self._gb[sig]

    def is_trivial(self, budget=None) -> bool:
        g = self.gb(GREVLEX, budget)
        return len(g) == 1 and g[0].is_constant()

    def is_zero(self) -> bool:
        return not self.generators

    def contains(self, f: MPoly, budget=None) -> bool:
        return not normal_form(f, self.gb(GREVLEX, budget), GREVLEX, budget).terms

    def contains_ideal(self, other: "Ideal", budget=None) -> bool:
        return all(self.contains(g, budget) for g in other.generators)

    def equals(self, other: "Ideal", budget=None) -> bool:
        return self.gb(GREVLEX, budget) == other.gb(GREVLEX, budget)

    def plus(self, extra: Iterable[MPoly]) -> "Ideal":
        return Ideal(self.ring, self.generators + [g for g in extra if g.terms])


def ideal_membership(f: MPoly, I: Ideal, budget=None) -> bool:
    return I.contains(f, budget)


# --------------------------------------------------------------------------
# elimination and friends

def _with_fresh_var(ring: PolyRing, name: str) -> PolyRing:
    base = name
    k = 0
    while ring.universe.has(name):
        k += 1
        name = f"{base}{k}"
    uni = VarUniverse((Var(name, "aux"),) + ring.universe.vars)
    return PolyRing(uni, ring.domain), name


def eliminate(I: Ideal, front: Sequence[str], budget: Optional[Budget] = None) -> list:
    """Generators of I intersected with the subring without `front` vars."""
    if not front:
        return list(I.gb(GREVLEX, budget))
    uni = I.ring.universe
    idx = [uni.index(n) for n in front]
    order = BlockElim(idx, len(uni))
    gb = I.gb(order, budget)
    iset = set(idx)
    out = []
    for g in gb:
        if all(all(e[i] == 0 for i in iset) for e in g.terms):
            out.append(g)
    return out


def restrict_to_subring(polys: Sequence[MPoly], keep: Sequence[str]) -> list:
    """Move front-free polynomials into the smaller ring on `keep`."""
    if not polys:
        return []
    ring = polys[0].ring
    sub = PolyRing(ring.universe.restrict(keep), ring.domain)
    return [sub.convert(p) for p in polys]


def saturate(I: Ideal, f: MPoly, budget: Optional[Budget] = None) -> Ideal:
    """I : f^infinity via the extra-variable construction."""
    if not f.terms:
        raise ValueError("cannot saturate by zero")
    if f.is_constant():
        return Ideal(I.ring, list(I.generators))
    ring2, tname = _with_fresh_var(I.ring, "t@sat")
    gens2 = [ring2.convert(g) for g in I.generators]
    f2 = ring2.convert(f)
    t = ring2.var(tname)
    J = Ideal(ring2, gens2 + [t * f2 - ring2.one()])
    elim = eliminate(J, [tname], budget)
    return Ideal(I.ring, [I.ring.convert(g) for g in elim])


def saturate_many(I: Ideal, fs: Iterable[MPoly], budget=None) -> Ideal:
    out = I
    seen = set()
    for f in fs:
        if not f.terms or f.is_constant():
            continue
        s = str(f)
        if s in seen:
            continue
        seen.add(s)
        out = saturate(out, f, budget)
    return out


def intersect(I: Ideal, J: Ideal, budget=None) -> Ideal:
    ring2, tname = _with_fresh_var(I.ring, "t@cap")
    t = ring2.var(tname)
    gens = [t * ring2.convert(g) for g in I.generators]
    gens += [(ring2.one() - t) * ring2.convert(g) for g in J.generators]
    K = Ideal(ring2, gens)
    elim = eliminate(K, [tname], budget)
    return Ideal(I.ring, [I.ring.convert(g) for g in elim])


def ideal_quotient(I: Ideal, J: Ideal, budget=None) -> Ideal:
    """Colon ideal I : J."""
    from .gcd import poly_divmod
    out = None
    for g in J.generators:
        K = intersect(I, Ideal(I.ring, [g]), budget)
        quot = []
        for p in K.generators:
            q, r = poly_divmod(p, g)
            if r.terms:
                raise ArithmeticError("quotient division not exact")
            quot.append(q)
        Q = Ideal(I.ring, quot)
        out = Q if out is None else intersect(out, Q, budget)
    return out if out is not None else Ideal(I.ring, [])


# --------------------------------------------------------------------------
# dimension

def ideal_dimension(I: Ideal, budget=None) -> int:
    """Krull dimension via maximal independent variable sets modulo LT(I).

    The empty variety (GB = {1}) reports dimension -1.
    """
    gb = I.gb(GREVLEX, budget)
    n = I.ring.nvars
    if not gb:
        return n
    if len(gb) == 1 and gb[0].is_constant():
        return -1
    supports = []
    occurring = set()
    for g in gb:
        e = g.leading(GREVLEX)[0]
        sup = frozenset(i for i in range(n) if e[i])
        supports.append(sup)
        occurring |= sup
    free = n - len(occurring)   # vars absent from every leading term
    occ = sorted(occurring)
    from itertools import combinations
    best = 0
    for k in range(len(occ), 0, -1):
        if k <= best:
            break
        for combo in combinations(occ, k):
            s = set(combo)
            if not any(sup <= s for sup in supports):
                best = k
                break
        if best == k:
            break
    return best + free


def quotient_dimension(I: Ideal, budget=None):
    """Vector-space dimension of ring/I (None when not zero-dimensional)."""
    gb = I.gb(GREVLEX, budget)
    n = I.ring.nvars
    if not gb:
        return None
    if len(gb) == 1 and gb[0].is_constant():
        return 0
    lts = [g.leading(GREVLEX)[0] for g in gb]
    # need a pure power of every variable among the leading terms
    bounds = [None] * n
    for e in lts:
        sup = [i for i in range(n) if e[i]]
        if len(sup) == 1:
            i = sup[0]
            if bounds[i] is None or e[i] < bounds[i]:
                bounds[i] = e[i]
    if any(b is None for b in bounds):
        return None
    # count standard monomials below the bounds not divisible by any lt
    from itertools import product
    count = 0
    for combo in product(*[range(b) for b in bounds]):
        if not any(_divides(e, combo) for e in lts):
            count += 1
    return count


# --------------------------------------------------------------------------
# factor-and-branch component splitting

@dataclass
class ComponentSplit:
    components: list
    incomplete: bool = False


def split_components(I: Ideal, budget: Optional[Budget] = None,
                     factor_fn=None) -> ComponentSplit:
    """Factor-and-branch decomposition with containment pruning.

    Branches whose ideal strictly contains another surviving branch are
    redundant covers and get pruned unless the colon test (I : P) != I shows
    the bigger ideal is genuinely associated to I (an embedded component, as
    in a non-radical witness ideal).
    """
    if factor_fn is None:
        from .factor import factor_distinct
        factor_fn = factor_distinct

    leaves = []
    incomplete = False
    work = [Ideal(I.ring, list(I.generators))]
    guard = 256
    while work:
        guard -= 1
        if guard < 0:
            raise RuntimeError("component split runaway")
        J = work.pop()
        gb = J.gb(GREVLEX, budget)
        if not gb or (len(gb) == 1 and gb[0].is_constant()):
            continue
        branched = False
        for g in gb:
            factors, certified = factor_fn(g)
            if not certified and g.total_degree() > 2:
                incomplete = True
            if len(factors) > 1 or (len(factors) == 1 and factors[0] != g.monic(GREVLEX)):
                if len(factors) == 1:
                    # proper power or unit rescale: replace the generator
                    others = [h for h in gb if h is not g]
                    work.append(Ideal(I.ring, others + factors))
                    branched = True
                    break
                for f in factors:
                    work.append(J.plus([f]))
                branched = True
                break
        if not branched:
            leaves.append(J)

    # dedup by reduced basis
    uniq = []
    seen = []
    for J in leaves:
        gb = J.gb(GREVLEX, budget)
        sig = tuple(str(g) for g in gb)
        if sig not in seen:
            seen.append(sig)
            uniq.append(J)

    # containment pruning with the embedded-component exception
    keep = []
    for J in uniq:
        strictly_contains_other = False
        for K in uniq:
            if K is J:
                continue
            if J.contains_ideal(K, budget) and not K.contains_ideal(J, budget):
                strictly_contains_other = True
                break
        if strictly_contains_other:
            Q = ideal_quotient(I, J, budget)
            if Q.gb(GREVLEX, budget) == I.gb(GREVLEX, budget):
                continue   # not associated: redundant branch artifact
        keep.append(J)
    return ComponentSplit(components=keep, incomplete=incomplete)
