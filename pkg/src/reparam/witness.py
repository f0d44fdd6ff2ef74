"""The alpha-witness variety of a parametrization over Q(h)(alpha).

Each state is expanded in the basis {1, alpha, ..., alpha^(n-1)} with fresh
coordinates z_(i,j); substituting into the parametrization, reducing modulo
the minimal polynomial and clearing an alpha-free common denominator delta
yields the coefficient polynomials H_(i,j).  The witness variety is the
Zariski closure of V({H_(i,j), j >= 1}) off V(delta), realized as the
saturated ideal over the field Q(h, inputs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (CoefficientsOutsideField, DegreeOneExtension,
                     NonLinearComponent)
from .poly import MPoly, PolyRing, QQ, Var, VarUniverse, GREVLEX
from .domains import (AlgElem, AlgExt, FracField, RatFunc, from_field_poly,
                      to_field_poly, _poly_trim, _poly_divmod_univ,
                      _poly_mul_univ, _poly_sub_univ)
from .gcd import divexact, poly_lcm, primitive_part
from .groebner import (Budget, Ideal, ideal_dimension, saturate_many,
                       split_components)
from .model import OdeModel, Parametrization
from .tower import TowerReport, express_in_tower

__all__ = [
    "WitnessData", "WitnessComponent", "witness_ideal", "witness_components",
    "parametrize_linear_component", "line_check", "LinearParametrization",
    "zvar_name", "model_over_tower",
]


def zvar_name(state_index: int, j: int, nstates: int) -> str:
    """Basis coordinates: z0..z(n-1) for one state, z{i}_{j} otherwise."""
    if nstates == 1:
        return f"z{j}"
    return f"z{state_index + 1}_{j}"


@dataclass
class WitnessData:
    model: OdeModel
    tower: TowerReport
    ext: AlgExt
    zslots: list                  # (state_name, j, zvar_name) in canonical order
    z_ring: PolyRing              # z-vars over FracField(h + inputs)
    flat_ring: PolyRing           # QQ ring: h + inputs + z (for display)
    H_flat: list                  # raw H_(i,j) polynomials, display order
    H_labels: list                # (component_index, alpha_power)
    delta: MPoly                  # common denominator in the z-ring (monic)
    ideal: Ideal                  # saturate(<H>, delta)
    target_dim: int
    components: list = field(default_factory=list)

    def describe(self) -> dict:
        return {
            "z_variables": [name for (_, _, name) in self.zslots],
            "generators": [str(g) for g in self.H_flat],
            "delta": str(self.delta),
            "target_dim": self.target_dim,
            "components": [c.describe() for c in self.components],
        }


@dataclass
class WitnessComponent:
    ideal: Ideal
    dim: int
    linear: bool
    unverified: bool = False

    def describe(self) -> dict:
        return {
            "generators": [str(g) for g in self.ideal.gb()],
            "dim": self.dim,
            "linear": self.linear,
            "unverified": self.unverified,
        }


def model_over_tower(model: OdeModel, P: Parametrization, tower: TowerReport):
    """Rewrite every parametrization component as a polynomial pair with
    coefficients in Q(h)(alpha)."""
    ext = tower.alg_ext()
    ring = P.ring
    main_vars = [v for v in ring.universe.vars if v.role in ("state", "input")]
    main_ring = PolyRing(VarUniverse(main_vars), ext)
    param_ring = PolyRing(VarUniverse([Var(p, "param") for p in model.params]), QQ)

    def lift(p: MPoly) -> MPoly:
        groups = {}
        uni = p.ring.universe
        for e, c in p.terms.items():
            me = [0] * main_ring.nvars
            pe = [0] * param_ring.nvars
            for i, ex in enumerate(e):
                if not ex:
                    continue
                v = uni.vars[i]
                if v.role == "param":
                    pe[param_ring.universe.index(v.name)] = ex
                else:
                    me[main_ring.universe.index(v.name)] = ex
            groups.setdefault(tuple(me), {})[tuple(pe)] = c
        out = {}
        for me, terms in groups.items():
            cf = RatFunc.from_poly(MPoly(param_ring, terms))
            el = express_in_tower(cf, tower)
            if el:
                out[me] = el
        return MPoly(main_ring, out)

    lifted = []
    for (i, j, c) in P.components:
        lifted.append((i, j, lift(c.num), lift(c.den)))
    return main_ring, lifted


def witness_ideal(P: Parametrization, tower: TowerReport,
                  budget: Optional[Budget] = None) -> WitnessData:
    """Definition of the witness variety: basis expansion of the states,
    alpha-coefficient extraction, denominator clearing and saturation."""
    model = P.model
    n = tower.degree
    if n < 2:
        raise DegreeOneExtension("witness construction needs extension degree >= 2")
    ext = tower.alg_ext()
    main_ring, lifted = model_over_tower(model, P, tower)

    d = len(model.states)
    zslots = []
    for si, s in enumerate(model.states):
        for j in range(n):
            zslots.append((s, j, zvar_name(si, j, d)))

    uvars = [v for v in main_ring.universe.vars if v.role == "input"]
    hvars = [Var(nm, "tower") for nm in tower.gen_names]
    coef_ring = PolyRing(VarUniverse(hvars + uvars), QQ)
    fld = FracField(coef_ring)
    z_ring = PolyRing(VarUniverse([Var(nm, "aux") for (_, _, nm) in zslots]), fld)
    flat_ring = PolyRing(VarUniverse(hvars + uvars
                                     + [Var(nm, "aux") for (_, _, nm) in zslots]), QQ)

    # substitution ring: z-vars and inputs with AlgExt coefficients
    sub_ring = PolyRing(VarUniverse([Var(nm, "aux") for (_, _, nm) in zslots]
                                    + uvars), ext)
    alpha = ext.alpha()
    subs = {}
    for si, s in enumerate(model.states):
        total = sub_ring.zero()
        for j in range(n):
            nm = zvar_name(si, j, d)
            total = total + sub_ring.var(nm) * (alpha ** j)
        subs[s] = total

    # per-component alpha-coefficient fractions over the flat field
    flat_field = FracField(flat_ring)
    mlow = [_base_to_flatfield(c, tower, flat_ring) for c in ext.low]
    mpoly_coeffs = mlow + [flat_field.one]

    comp_coeffs = []      # per component: list of n RatFunc over flat_ring
    for (i, j, num_t, den_t) in lifted:
        num_s = num_t.subs_poly(subs, sub_ring)
        den_s = den_t.subs_poly(subs, sub_ring)
        N = _alg_poly_to_alpha_coeffs(num_s, tower, flat_ring, n)
        D = _alg_poly_to_alpha_coeffs(den_s, tower, flat_ring, n)
        D = _poly_trim(D)
        if len(D) == 1:
            C = [c / D[0] for c in N]
        else:
            inv = _invert_mod_minpoly(D, mpoly_coeffs, flat_field)
            C = _mul_mod_minpoly(N, inv, mpoly_coeffs, flat_field)
        C = C + [flat_field.zero] * (n - len(C))
        comp_coeffs.append(((i, j), C))

    # common alpha-free denominator
    delta_flat = flat_ring.one()
    for (_, C) in comp_coeffs:
        for c in C:
            if c and not c.den.is_constant():
                delta_flat = poly_lcm(delta_flat, c.den)

    H_flat = []
    H_labels = []
    gens = []
    for ci, ((i, j), C) in enumerate(comp_coeffs):
        for k in range(1, n):
            c = C[k]
            if not c:
                continue
            scale = divexact(delta_flat, c.den)
            Hf = c.num * scale
            H_flat.append(Hf)
            H_labels.append((ci, k))
            gens.append(to_field_poly(Hf, z_ring))
    gens = [g for g in gens if g.terms]
    I = Ideal(z_ring, gens)
    delta_z = to_field_poly(delta_flat, z_ring)
    if not delta_z.is_constant():
        I = saturate_many(I, [delta_z], budget)
        delta_z = delta_z.monic(GREVLEX)
    return WitnessData(model=model, tower=tower, ext=ext, zslots=zslots,
                       z_ring=z_ring, flat_ring=flat_ring, H_flat=H_flat,
                       H_labels=H_labels, delta=delta_z, ideal=I,
                       target_dim=d)


def _base_to_flatfield(c: RatFunc, tower: TowerReport, flat_ring: PolyRing) -> RatFunc:
    return RatFunc(flat_ring.convert(c.num), flat_ring.convert(c.den))


def _alg_poly_to_alpha_coeffs(p: MPoly, tower: TowerReport,
                              flat_ring: PolyRing, n: int):
    """MPoly over AlgExt -> univariate-in-alpha coefficient list of RatFunc
    over the flat QQ ring (h + inputs + z)."""
    out = [None] * n
    for e, el in p.terms.items():
        for j, cj in enumerate(el.coeffs):
            if not cj:
                continue
            mono = [0] * flat_ring.nvars
            for i, ex in enumerate(e):
                if ex:
                    nm = p.ring.universe.vars[i].name
                    mono[flat_ring.universe.index(nm)] = ex
            piece = RatFunc(flat_ring.convert(cj.num).mul_term(tuple(mono), Fraction(1)),
                            flat_ring.convert(cj.den))
            out[j] = piece if out[j] is None else out[j] + piece
    fld_zero = RatFunc.from_poly(flat_ring.zero())
    return [c if c is not None else fld_zero for c in out]


def _invert_mod_minpoly(D, m, field):
    r0, r1 = list(m), _poly_trim(list(D))
    t0, t1 = [field.zero], [field.one]
    while len(r1) > 1:
        q, r = _poly_divmod_univ(r0, r1, field)
        r0, r1 = r1, r
        t0, t1 = t1, _poly_sub_univ(t0, _poly_mul_univ(q, t1, field), field)
        if not r1:
            raise ZeroDivisionError("denominator is a zero divisor modulo "
                                    "the minimal polynomial")
    c = r1[0]
    return [t / c for t in t1]


def _mul_mod_minpoly(A, B, m, field):
    prod = _poly_mul_univ(_poly_trim(list(A)), _poly_trim(list(B)), field)
    _, r = _poly_divmod_univ(prod, m, field)
    return r


def witness_components(W: WitnessData, budget: Optional[Budget] = None) -> list:
    """Split, measure and classify; sorted highest dimension first, then
    fewest basis generators, then canonical text."""
    split = split_components(W.ideal, budget)
    comps = []
    for J in split.components:
        gb = J.gb(GREVLEX, budget)
        dim = ideal_dimension(J, budget)
        linear = all(g.total_degree() <= 1 for g in gb)
        comps.append(WitnessComponent(ideal=J, dim=dim, linear=linear,
                                      unverified=split.incomplete))
    comps.sort(key=lambda c: (-c.dim, len(c.ideal.gb()),
                              tuple(str(g) for g in c.ideal.gb())))
    W.components = comps
    return comps


def line_check(C: WitnessComponent) -> bool:
    return C.dim == 1 and C.linear


@dataclass
class LinearParametrization:
    component: WitnessComponent
    fresh_ring: PolyRing          # fresh z1..zk over the same field
    phi: list                     # per z-slot, MPoly in the fresh ring
    free_slots: list              # z-slot names that became fresh variables
    fresh_names: list

    def describe(self) -> dict:
        return {"phi": [str(p) for p in self.phi],
                "free": dict(zip(self.free_slots, self.fresh_names))}


def parametrize_linear_component(W: WitnessData, C: WitnessComponent,
                                 budget: Optional[Budget] = None) -> LinearParametrization:
    """Solve the linear system: bound coordinates in terms of free ones.

    Pivot choice per constraint: prefer a variable with a rational constant
    coefficient (earliest such), else the earliest variable; this reproduces
    the worked parametrizations.  Free coordinates are renamed z1, z2, ... in
    canonical order.
    """
    gb = C.ideal.gb(GREVLEX, budget)
    if any(g.total_degree() > 1 for g in gb):
        raise NonLinearComponent("component is not linear",
                                 generators=[str(g) for g in gb])
    ring = W.z_ring
    nz = ring.nvars
    fld = ring.domain

    # rows: coefficients per z-var plus the constant term
    rows = []
    for g in sorted(gb, key=lambda g: GREVLEX.key(g.leading(GREVLEX)[0])):
        row = []
        for i in range(nz):
            e = [0] * nz
            e[i] = 1
            row.append(g.terms.get(tuple(e), fld.zero))
        row.append(g.terms.get((0,) * nz, fld.zero))
        rows.append(row)

    bound = {}
    order = []
    for row in rows:
        row = list(row)
        for (pc, prow) in zip(order, [bound[c] for c in order]):
            if row[pc]:
                f = row[pc]
                row = [a - f * b for a, b in zip(row, prow)]
        cand = [i for i in range(nz) if row[i]]
        if not cand:
            continue
        cand.sort(key=lambda i: (0 if row[i].is_constant() else 1, i))
        pc = cand[0]
        piv = row[pc]
        row = [v / piv for v in row]
        for c in order:
            if bound[c][pc]:
                f = bound[c][pc]
                bound[c] = [a - f * b for a, b in zip(bound[c], row)]
        bound[pc] = row
        order.append(pc)

    free = [i for i in range(nz) if i not in bound]
    fresh_names = [f"z{k+1}" for k in range(len(free))]
    fresh_ring = PolyRing(VarUniverse([Var(nm, "state") for nm in fresh_names]), fld)
    fmap = {i: fresh_ring.var(nm) for i, nm in zip(free, fresh_names)}
    phi = []
    for i in range(nz):
        if i in fmap:
            phi.append(fmap[i])
        else:
            row = bound[i]
            # z_i = -(const + sum_j free coeff * z_j)
            expr = fresh_ring.const(-row[nz]) if row[nz] else fresh_ring.zero()
            for j in free:
                if row[j]:
                    expr = expr - fmap[j] * row[j]
            phi.append(expr)
    # verification: every generator vanishes under phi
    sub = {ring.universe.vars[i].name: phi[i] for i in range(nz)}
    for g in gb:
        val = g.subs_poly(sub, fresh_ring)
        if val.terms:
            raise NonLinearComponent("parametrization does not satisfy the component")
    return LinearParametrization(component=C, fresh_ring=fresh_ring, phi=phi,
                                 free_slots=[W.zslots[i][2] for i in free],
                                 fresh_names=fresh_names)
