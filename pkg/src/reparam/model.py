"""ODE models, Lie derivatives and parametrizations.

A model is x' = f(u, c, x), y = g(u, c, x) with rational right-hand sides
over a flat polynomial ring holding states, inputs, parameters (and tower
generators once a reparametrization introduced them).  The Lie derivative
prolongs the ring with input-derivative variables on demand:

    L_f(P) = sum_i dP/dx_i * f_i  +  sum_j dP/du^(j) * u^(j+1)

with the second sum split out as the shift operator D_u so the
realization-from-parametrization criterion can use P_(i,j+1) - D_u(P_(i,j))
verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (InfiniteFiber, NotARealization, RankDeficient,
                     SingularSubstitution)
from .poly import MPoly, PolyRing, QQ, Var, VarUniverse, deriv_name
from .domains import FracField, RatFunc, ratfunc_subs, to_field_poly
from .groebner import Budget, Ideal, quotient_dimension, saturate_many
from .linalg import mat_rank, mat_det

__all__ = [
    "OdeModel", "Parametrization", "JacobianSelection",
    "lie_derivative", "du_shift", "build_parametrization", "default_orders",
    "jacobian", "realization_from_parametrization", "properness_check",
]


@dataclass
class OdeModel:
    ring: PolyRing
    states: tuple
    params: tuple
    inputs: tuple
    rhs: dict             # state name -> RatFunc
    outputs: dict         # output name -> RatFunc
    output_names: tuple

    def __post_init__(self):
        if set(self.rhs) != set(self.states):
            raise ValueError("every state needs exactly one equation")
        for name, f in {**self.rhs, **self.outputs}.items():
            for v in set(f.num.variables()) | set(f.den.variables()):
                var = self.ring.universe.var(v)
                if var.role == "input" and var.order > 0:
                    raise ValueError(
                        f"{name}: input derivatives may not appear in a model")

    @classmethod
    def build(cls, states, params, inputs, rhs_text=None, outputs_text=None,
              rhs=None, outputs=None, extra_vars=()):
        """Programmatic constructor; equations given as text or RatFunc."""
        from .exprs import parse_expr
        vars_ = ([Var(s, "state") for s in states]
                 + [Var(u, "input", base=u, order=0) for u in inputs]
                 + [Var(p, "param") for p in params]
                 + list(extra_vars))
        ring = PolyRing(VarUniverse(vars_), QQ)
        if rhs is None:
            rhs = {s: parse_expr(t, ring) for s, t in rhs_text.items()}
        if outputs is None:
            outputs = {y: parse_expr(t, ring) for y, t in outputs_text.items()}
        return cls(ring=ring, states=tuple(states), params=tuple(params),
                   inputs=tuple(inputs), rhs=rhs, outputs=outputs,
                   output_names=tuple(outputs))

    def prolonged_ring(self, max_order: int) -> PolyRing:
        """The model ring extended with input derivatives up to max_order."""
        extra = []
        for u in self.inputs:
            for j in range(1, max_order + 1):
                nm = deriv_name(u, j)
                if not self.ring.universe.has(nm):
                    extra.append(Var(nm, "input", base=u, order=j))
        if not extra:
            return self.ring
        return PolyRing(self.ring.universe.extend(extra), QQ)

    def convert_to(self, ring: PolyRing, f: RatFunc) -> RatFunc:
        if f.ring == ring:
            return f
        return RatFunc(ring.convert(f.num), ring.convert(f.den), _normalized=True)

    def pretty(self) -> str:
        lines = []
        for s in self.states:
            lines.append(f"{s}' = {self.rhs[s]}")
        for y in self.output_names:
            lines.append(f"{y} = {self.outputs[y]}")
        return "\n".join(lines)


def du_shift(P: RatFunc, model: OdeModel, ring: PolyRing) -> RatFunc:
    """D_u(P): the prolongation part of the Lie derivative."""
    out = RatFunc.from_poly(ring.zero())
    P = model.convert_to(ring, P)
    for v in ring.universe.vars:
        if v.role == "input":
            nxt = deriv_name(v.base, v.order + 1)
            if not ring.universe.has(nxt):
                continue
            d = P.derivative(v.name)
            if d:
                out = out + d * RatFunc.from_poly(ring.var(nxt))
    return out


def lie_derivative(P: RatFunc, model: OdeModel, ring: Optional[PolyRing] = None) -> RatFunc:
    """Exact symbolic Lie derivative; extends the ring with the next input
    derivative as needed."""
    # find the highest input-derivative order currently present in P
    max_ord = 0
    for name in set(P.num.variables()) | set(P.den.variables()):
        v = P.ring.universe.var(name)
        if v.role == "input" and v.order > max_ord:
            max_ord = v.order
    target = ring or model.prolonged_ring(max_ord + 1)
    P = model.convert_to(target, P)
    out = RatFunc.from_poly(target.zero())
    for s in model.states:
        d = P.derivative(s)
        if d:
            out = out + d * model.convert_to(target, model.rhs[s])
    return out + du_shift(P, model, target)


@dataclass
class Parametrization:
    model: OdeModel
    orders: tuple                 # n_i per output, in output order
    components: list              # [(output_index, j, RatFunc)]
    ring: PolyRing                # prolonged ring all components live in
    rank: int = 0
    rank_deficient: bool = False

    def rows(self):
        return [c for (_, _, c) in self.components]

    def component(self, i: int, j: int) -> RatFunc:
        for (oi, jj, c) in self.components:
            if oi == i and jj == j:
                return c
        raise KeyError((i, j))

    def nstates(self):
        return len(self.model.states)


@dataclass(frozen=True)
class JacobianSelection:
    row_orders: tuple   # m_i per output; rows are P_(i,0..m_i)


def default_orders(model: OdeModel, budget: Optional[Budget] = None) -> tuple:
    """Per-output Lie orders: extend each output's chain until the Jacobian
    rank with respect to the states stops growing; that first stagnation
    order is the order of the output's IO-equation."""
    d = len(model.states)
    orders = []
    for y in model.output_names:
        chain = [model.outputs[y]]
        rank = 0
        n = 0
        while True:
            rows = [[c.derivative(s) for s in model.states] for c in chain]
            r = mat_rank(_common_ring_rows(model, rows))
            if r == rank:
                break
            rank = r
            n += 1
            chain.append(lie_derivative(chain[-1], model))
            if n > d + 1:
                raise RuntimeError("order search runaway")
        orders.append(n)
    return tuple(orders)


def _common_ring_rows(model, rows):
    target = None
    for row in rows:
        for v in row:
            if target is None or len(v.ring.universe) > len(target.universe):
                target = v.ring
    return [[model.convert_to(target, v) for v in row] for row in rows]


def build_parametrization(model: OdeModel, orders: Optional[Sequence[int]] = None,
                          budget: Optional[Budget] = None) -> Parametrization:
    """The Lie-derivative chain (g_i, L(g_i), ..., L^(n_i)(g_i)) per output.

    Rank deficiency of the Jacobian is recorded as a warning flag, not an
    error: non-observable models still run the general pipeline.
    """
    if orders is None:
        orders = default_orders(model, budget)
    orders = tuple(orders)
    ring = model.prolonged_ring(max(orders) if orders else 0)
    comps = []
    for i, y in enumerate(model.output_names):
        cur = model.convert_to(ring, model.outputs[y])
        comps.append((i, 0, cur))
        for j in range(1, orders[i] + 1):
            cur = lie_derivative(cur, model, ring)
            comps.append((i, j, cur))
    P = Parametrization(model=model, orders=orders, components=comps, ring=ring)
    rows = [[c.derivative(s) for s in model.states] for (_, _, c) in comps]
    P.rank = mat_rank(rows)
    P.rank_deficient = P.rank < len(model.states)
    return P


def jacobian(P: Parametrization):
    """Matrix dP_(i,j)/dx_k in component order; entries RatFunc."""
    return [[c.derivative(s) for s in P.model.states] for (_, _, c) in P.components]


def _selection_rows(P: Parametrization, sel: JacobianSelection):
    rows = []
    for i, m in enumerate(sel.row_orders):
        for j in range(m + 1):
            rows.append((i, j))
    return rows


def _default_selection(P: Parametrization):
    """First prefix-selection (lexicographic in the m_i tuple) with nonzero
    determinant."""
    d = P.nstates()
    r = len(P.orders)
    choices = []

    def rec(i, remaining, acc):
        if i == r:
            if remaining == 0:
                choices.append(tuple(acc))
            return
        # m_i = -1 means output contributes no rows; the theorem's matrix
        # uses prefixes, at least row (i,0), but allow skipping an output
        # whose chain is constant
        for m in range(-1, min(P.orders[i], remaining)):
            if m + 1 <= remaining:
                rec(i + 1, remaining - (m + 1), acc + [m])
    rec(0, d, [])
    J = {(i, j): c for (i, j, c) in P.components}

    def row_list(combo):
        return [(i, j) for i, m in enumerate(combo) for j in range(m + 1)]

    for combo in sorted(choices, key=row_list):
        rows = []
        ok = True
        for i, m in enumerate(combo):
            for j in range(m + 1):
                rows.append((i, j))
        M = [[J[(i, j)].derivative(s) for s in P.model.states] for (i, j) in rows]
        try:
            det = mat_det(M)
        except ValueError:
            continue
        if det:
            return JacobianSelection(row_orders=combo), M, det
    raise RankDeficient(P.rank, P.nstates())


def realization_from_parametrization(P: Parametrization,
                                     sel: Optional[JacobianSelection] = None) -> OdeModel:
    """Rebuild the state-space model from a full-rank parametrization.

    Verifies the two theorem conditions: outputs free of input derivatives,
    and the state vector z = M^(-1)(P_(i,j+1) - D_u(P_(i,j))) free of input
    derivatives.
    """
    model = P.model
    ring = P.ring
    if sel is None:
        sel, M, det = _default_selection(P)
    else:
        rows = _selection_rows(P, sel)
        M = [[P.component(i, j).derivative(s) for s in model.states]
             for (i, j) in rows]
        det = mat_det(M)
        if not det:
            raise SingularSubstitution("selected Jacobian submatrix is singular")

    for i, y in enumerate(model.output_names):
        if _has_u_derivs(P.component(i, 0)):
            raise NotARealization(f"output component {y} contains input derivatives")

    rows = _selection_rows(P, sel)
    b = []
    for (i, j) in rows:
        nxt = P.component(i, j + 1)
        b.append(nxt - du_shift(P.component(i, j), model, ring))
    from .linalg import mat_solve
    z = mat_solve(M, b)
    for s, zs in zip(model.states, z):
        if _has_u_derivs(zs):
            raise NotARealization(
                f"state derivative for {s} retains an input derivative: {zs}")
    rhs = {}
    outs = {}
    base = model.ring
    for s, zs in zip(model.states, z):
        rhs[s] = RatFunc(base.convert(zs.num), base.convert(zs.den))
    for i, y in enumerate(model.output_names):
        c = P.component(i, 0)
        outs[y] = RatFunc(base.convert(c.num), base.convert(c.den))
    return OdeModel(ring=base, states=model.states, params=model.params,
                    inputs=model.inputs, rhs=rhs, outputs=outs,
                    output_names=model.output_names)


def _has_u_derivs(f: RatFunc) -> bool:
    for name in set(f.num.variables()) | set(f.den.variables()):
        v = f.ring.universe.var(name)
        if v.role == "input" and v.order > 0:
            return True
    return False


def properness_check(P: Parametrization, budget: Optional[Budget] = None) -> dict:
    """Generic fiber cardinality of the parametrization map.

    Works over the function field of a generic source point: a second copy w
    of the states goes into the coefficient field and the fiber ideal
    <numer(P_k(x) - P_k(w))> is saturated by the x-denominators.  The fiber
    degree is the vector-space dimension of the quotient; proper means 1.
    """
    model = P.model
    ring = P.ring
    wnames = {s: f"w@{s}" for s in model.states}
    coef_vars = [v for v in ring.universe.vars if v.role != "state"]
    coef_vars += [Var(wnames[s], "aux") for s in model.states]
    coef_ring = PolyRing(VarUniverse(coef_vars), QQ)
    fld = FracField(coef_ring)
    gb_ring = PolyRing(VarUniverse([Var(s, "state") for s in model.states]), fld)

    flat_uni = ring.universe.extend([Var(wnames[s], "aux") for s in model.states])
    flat = PolyRing(flat_uni, QQ)
    wsub = {s: flat.var(wnames[s]) for s in model.states}

    gens = []
    dens = []
    for (_, _, c) in P.components:
        num_x = flat.convert(c.num)
        den_x = flat.convert(c.den)
        num_w = c.num.subs_poly(wsub, flat)
        den_w = c.den.subs_poly(wsub, flat)
        g = num_x * den_w - num_w * den_x
        if g.terms:
            gens.append(to_field_poly(g, gb_ring))
        if not den_x.is_constant():
            dens.append(to_field_poly(den_x, gb_ring))
    I = Ideal(gb_ring, gens)
    I = saturate_many(I, dens, budget)
    dim = quotient_dimension(I, budget)
    if dim is None:
        raise InfiniteFiber("fiber ideal is not zero-dimensional")
    return {"proper": dim == 1, "fiber_degree": dim}


def _mentions_states(p: MPoly, model: OdeModel) -> bool:
    names = set(p.variables())
    return any(s in names for s in model.states)
