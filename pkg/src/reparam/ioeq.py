"""IO-equations by state elimination, and identifiable-function generators.

For each output the Lie chain y^(j) = L^j(g) up to the rank-saturation order
is turned into polynomial relations, the states are eliminated by a block
order over the parameter fraction field, and the (principal) generator is the
output's IO-equation.  The field of identifiable functions is generated by
the equation coefficients after dividing by the leading one; a deterministic
multiplicative simplification plus a field-membership redundancy pass turns
those raw coefficients into a small generating set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import EliminationFailed
from .poly import (MPoly, PolyRing, QQ, Var, VarUniverse, GREVLEX, deriv_name)
from .domains import (FracField, RatFunc, from_field_poly, ratfunc_subs,
                      to_field_poly)
from .gcd import primitive_part, poly_lcm, divexact
from .groebner import Budget, Ideal, eliminate, saturate_many
from .model import OdeModel, Parametrization, build_parametrization, default_orders

__all__ = [
    "IoEquation", "io_equations", "identifiable_generators", "Generator",
    "leading_io_monomial", "io_coefficients", "equations_proportional",
]


@dataclass
class IoEquation:
    poly: MPoly              # flat: params + y-derivatives + input derivatives
    output_index: int
    output_name: str
    order: int
    ring: PolyRing
    yu_vars: tuple           # names of the y/u variables of the equation
    leading_monomial: tuple  # exponents over yu_vars positions
    normalized_coeffs: list  # RatFunc in the parameters, leading one excluded
    not_principal: bool = False
    extra_gens: list = field(default_factory=list)

    def __str__(self):
        from .poly import format_poly
        return format_poly(self.poly)


def _output_var(name: str, j: int) -> Var:
    return Var(deriv_name(name, j), "output", base=name, order=j)


def io_equations(model: OdeModel, budget: Optional[Budget] = None,
                 parametrization: Optional[Parametrization] = None) -> list:
    """One equation per output (several generators only if the elimination
    ideal fails to be principal, flagged as such)."""
    P = parametrization or build_parametrization(model, budget=budget)
    eqs = []
    for i, y in enumerate(model.output_names):
        eqs.append(_io_equation_for(model, P, i, y, budget))
    return eqs


def _io_equation_for(model, P, i, yname, budget):
    n = P.orders[i]
    comps = [(j, P.component(i, j)) for j in range(n + 1)]
    # ring: states (front) + y-derivatives + input derivatives, over QQ(params)
    uvars = [v for v in P.ring.universe.vars if v.role == "input"]
    yvars = [_output_var(yname, j) for j in range(n + 1)]
    gb_uni = VarUniverse([Var(s, "state") for s in model.states] + yvars + uvars)
    param_ring = PolyRing(VarUniverse([Var(p, "param") for p in model.params]), QQ)
    fld = FracField(param_ring)
    gb_ring = PolyRing(gb_uni, fld)

    gens = []
    dens = []
    for j, c in comps:
        num = to_field_poly(c.num, gb_ring)
        den = to_field_poly(c.den, gb_ring)
        gens.append(gb_ring.var(deriv_name(yname, j)) * den - num)
        if not den.is_constant():
            dens.append(den)
    I = Ideal(gb_ring, gens)
    I = saturate_many(I, dens, budget)
    elim = eliminate(I, list(model.states), budget)
    if not elim:
        raise EliminationFailed(f"no IO-relation found for output {yname}")

    # move into the y/u subring and pick the minimal-degree generator that
    # vanishes on the parametrization and is irreducible
    flat = _flat_io_ring(model, yname, n, uvars)
    flats = sorted((_flatten_io(g, flat) for g in elim),
                   key=lambda q: (q.total_degree(), len(q.terms), str(q)))
    chosen = None
    for cand in flats:
        cand = _irreducible_vanishing_part(cand, model, P, i, yname, budget)
        if cand is not None:
            chosen = cand
            break
    if chosen is None:
        raise EliminationFailed(f"elimination produced no vanishing generator for {yname}")

    not_principal = len(flats) > 1
    extra = [f for f in flats if f != chosen] if not_principal else []
    yu_names = tuple(v.name for v in flat.universe.vars if v.role in ("output", "input"))
    lead = leading_io_monomial(chosen, flat, yname)
    coeffs = io_coefficients(chosen, flat)
    # sign convention: the leading IO-monomial's parameter coefficient has a
    # positive leading coefficient of its own
    if coeffs[lead].num.leading_coeff(GREVLEX) < 0:
        chosen = -chosen
        coeffs = {m: -c for m, c in coeffs.items()}
    lead_coeff = coeffs[lead]
    normalized = []
    for mono, cf in sorted(coeffs.items(), key=lambda kv: kv[0]):
        if mono == lead:
            continue
        normalized.append(cf / lead_coeff)
    return IoEquation(poly=chosen, output_index=i, output_name=yname, order=n,
                      ring=flat, yu_vars=yu_names, leading_monomial=lead,
                      normalized_coeffs=normalized, not_principal=not_principal,
                      extra_gens=extra)


def _flat_io_ring(model, yname, n, uvars) -> PolyRing:
    vars_ = ([Var(p, "param") for p in model.params]
             + [_output_var(yname, j) for j in range(n + 1)]
             + list(uvars))
    return PolyRing(VarUniverse(vars_), QQ)


def _flatten_io(g: MPoly, flat: PolyRing) -> MPoly:
    f = from_field_poly(g, flat)
    num = f.num if f.den.is_constant() else f.num  # denominator is a parameter unit
    _, p = primitive_part(num)
    return p


def _irreducible_vanishing_part(cand: MPoly, model, P, i, yname, budget):
    """Return the irreducible factor of cand vanishing on the Lie chain."""
    from .factor import factor_flat
    _, factors, _ = factor_flat(cand)
    vanishing = []
    for f, _m in factors:
        if _vanishes_on_chain(f, model, P, i, yname):
            vanishing.append(f)
    if not vanishing:
        return None
    vanishing.sort(key=lambda q: (q.total_degree(), len(q.terms), str(q)))
    return vanishing[0]


def _vanishes_on_chain(f: MPoly, model, P, i, yname) -> bool:
    target = P.ring
    values = {}
    for v in f.ring.universe.vars:
        if v.role == "output":
            values[v.name] = P.component(i, v.order)
    r = ratfunc_subs(RatFunc.from_poly(f), values, target)
    return r.is_zero()


def leading_io_monomial(poly: MPoly, ring: PolyRing, yname: str) -> tuple:
    """Highest y-derivative, ties by total degree, then grevlex."""
    uni = ring.universe
    orders = {idx: v.order for idx, v in enumerate(uni.vars) if v.role == "output"}

    def yu_exps(e):
        return tuple(e[idx] if uni.vars[idx].role in ("output", "input") else 0
                     for idx in range(len(uni)))

    best = None
    best_key = None
    for e in poly.terms:
        ye = yu_exps(e)
        hi = max((orders[idx] for idx, x in enumerate(ye) if x and idx in orders),
                 default=-1)
        key = (hi, sum(ye), GREVLEX.key(ye))
        if best_key is None or key > best_key:
            best_key = key
            best = ye
    return best


def io_coefficients(poly: MPoly, ring: PolyRing) -> dict:
    """Map (y,u)-monomial exponent tuple -> coefficient RatFunc in params."""
    uni = ring.universe
    param_ring = PolyRing(uni.restrict([v.name for v in uni.vars if v.role == "param"]), QQ)
    groups = {}
    for e, c in poly.terms.items():
        ye = tuple(e[idx] if uni.vars[idx].role in ("output", "input") else 0
                   for idx in range(len(uni)))
        pe = tuple(e[idx] if uni.vars[idx].role == "param" else 0
                   for idx in range(len(uni)))
        groups.setdefault(ye, {})[pe] = c
    out = {}
    for ye, terms in groups.items():
        p = MPoly(ring, terms)
        out[ye] = RatFunc.from_poly(param_ring.convert(p))
    return out


def equations_proportional(e1: MPoly, e2: MPoly) -> bool:
    """Equality up to a unit of the parameter field: cross-multiply by the
    leading coefficients and compare (both polys in flat io rings)."""
    r2 = e2.ring
    try:
        a = r2.convert(e1)
    except KeyError:
        return False
    b = e2
    if not a.terms and not b.terms:
        return True
    if not a.terms or not b.terms:
        return False
    ca = io_coefficients(a, r2)
    cb = io_coefficients(b, r2)
    if set(ca) != set(cb):
        return False
    mono = sorted(ca)[0]
    la, lb = ca[mono], cb[mono]
    return all(ca[m] * lb == cb[m] * la for m in ca)


# --------------------------------------------------------------------------
# identifiable generators

@dataclass
class Generator:
    value: RatFunc             # in the parameters, canonically oriented
    provenance: dict           # raw-coefficient index -> integer exponent

    def __str__(self):
        return str(self.value)


def _complexity(v: RatFunc):
    return (len(v.num.terms) + len(v.den.terms),
            v.num.total_degree() + v.den.total_degree(),
            len(str(v)))


def _canon(v: RatFunc) -> RatFunc:
    """Canonical representative up to a rational unit: orient so the simpler
    side is the denominator, then make both parts integer-primitive with
    positive leading coefficients."""
    if v.is_zero():
        return v
    ncx = (len(v.num.terms), v.num.total_degree(), str(v.num))
    dcx = (len(v.den.terms), v.den.total_degree(), str(v.den))
    if dcx > ncx:
        v = RatFunc(v.den, v.num)
    _, pn = primitive_part(v.num)
    _, pd = primitive_part(v.den)
    return RatFunc(pn, pd)


def identifiable_generators(eqs, budget: Optional[Budget] = None) -> list:
    """Reduced generating set of the field spanned by IO coefficients."""
    raw = []
    for eq in eqs:
        raw.extend(eq.normalized_coeffs)
    return simplify_generators(raw, budget)


def simplify_generators(raw, budget=None) -> list:
    items = []
    seen = set()
    for idx, g in enumerate(raw):
        if g.is_constant():
            continue
        c = _canon(g)
        key = str(c)
        if key in seen:
            continue
        seen.add(key)
        items.append(Generator(value=c, provenance={idx: 1}))

    # multiplicative hill-climb: replace a generator by a strictly simpler
    # product/quotient with another one
    changed = True
    guard = 64
    while changed and guard:
        guard -= 1
        changed = False
        items.sort(key=lambda g: (_complexity(g.value), str(g.value)))
        for i in range(len(items)):
            g = items[i]
            best = None
            for j in range(len(items)):
                if i == j:
                    continue
                h = items[j]
                for cand_v, sign in ((g.value * h.value, 1), (g.value / h.value, -1)):
                    c = _canon(cand_v)
                    if c.is_constant():
                        continue
                    if _complexity(c) < _complexity(g.value):
                        prov = dict(g.provenance)
                        for k, e in h.provenance.items():
                            prov[k] = prov.get(k, 0) + sign * e
                        cand = Generator(value=c, provenance={k: e for k, e in prov.items() if e})
                        if best is None or _complexity(c) < _complexity(best.value):
                            best = cand
            if best is not None:
                items[i] = best
                changed = True
        # dedup
        uniq = []
        seen = set()
        for g in sorted(items, key=lambda g: (_complexity(g.value), str(g.value))):
            if str(g.value) not in seen:
                seen.add(str(g.value))
                uniq.append(g)
        items = uniq

    # drop generators lying (degree 1) in the field of the others
    from .tower import field_membership_degree
    changed = True
    while changed:
        changed = False
        items.sort(key=lambda g: (_complexity(g.value), str(g.value)))
        for i in range(len(items) - 1, -1, -1):
            others = [g.value for k, g in enumerate(items) if k != i]
            if not others:
                continue
            if field_membership_degree(items[i].value, others, budget) == 1:
                del items[i]
                changed = True
                break
    items.sort(key=lambda g: (_complexity(g.value), str(g.value)))
    return items
