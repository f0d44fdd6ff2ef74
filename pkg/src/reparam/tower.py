"""The identifiable-field tower: Q(h) and its primitive extension Q(h)(alpha).

Everything here reduces to one elimination pattern: relations
den_i(c)*h_i - num_i(c) for the field generators (plus optional defining
relations for alpha and for a tested expression), saturated by the common
denominator through an auxiliary variable, with the parameters eliminated.
Survivors in the kept variables answer algebraicity, field membership,
minimal polynomials and basis expression questions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (EvaluationSearchExhausted, NotInTower,
                     PrimitiveSearchExhausted)
from .poly import MPoly, PolyRing, QQ, Var, VarUniverse, GREVLEX
from .domains import AlgExt, AlgElem, FracField, RatFunc, ratfunc_subs
from .gcd import poly_lcm, primitive_part, squarefree_part
from .groebner import Budget, Ideal, eliminate
from .linalg import mat_rank

__all__ = [
    "TowerReport", "field_membership_degree", "is_algebraic_over",
    "build_field_tower", "express_in_tower", "suitable_evaluation",
    "EvalResult",
]


# --------------------------------------------------------------------------
# the shared elimination pattern

def _relations(param_names, defs, extra_defs, keep, budget):
    """Eliminate the parameters from the generator relations.

    defs: list of (internal_name, RatFunc in params); extra_defs the same for
    alpha / tested expressions.  Returns surviving generators in the ring on
    `keep` (internal names), as flat QQ polynomials.
    """
    all_defs = list(defs) + list(extra_defs)
    pvars = [Var(p, "param") for p in param_names]
    hvars = [Var(nm, "tower") for nm, _ in all_defs]
    uni = VarUniverse(pvars + hvars)
    need_w = any(not d.den.is_constant() for _, d in all_defs)
    if need_w:
        uni = VarUniverse([Var("W@sat", "aux")] + list(uni.vars))
    ring = PolyRing(uni, QQ)

    gens = []
    den_prod = ring.one()
    for nm, d in all_defs:
        num = ring.convert(d.num)
        den = ring.convert(d.den)
        gens.append(ring.var(nm) * den - num)
        if not den.is_constant():
            den_prod = poly_lcm(den_prod, den)
    if need_w:
        gens.append(ring.var("W@sat") * den_prod - ring.one())
    front = (["W@sat"] if need_w else []) + [p for p in param_names if p not in keep]
    I = Ideal(ring, gens)
    surv = eliminate(I, front, budget)
    keep_ring = PolyRing(uni.restrict([nm for nm, _ in all_defs]
                                      + [p for p in param_names if p in keep]), QQ)
    return [keep_ring.convert(g) for g in surv], keep_ring


def _min_positive_degree(survivors, ring, name):
    best = None
    for g in survivors:
        d = g.degree_in(name)
        if d > 0 and (best is None or d < best[0]
                      or (d == best[0] and (g.total_degree(), str(g)) <
                          (best[1].total_degree(), str(best[1])))):
            best = (d, g)
    return best


def field_membership_degree(f: RatFunc, gens: Sequence[RatFunc],
                            budget: Optional[Budget] = None):
    """Algebraic degree of f over Q(gens); None when transcendental."""
    params = tuple(f.ring.universe.names())
    defs = [(f"H{i+1}@", g) for i, g in enumerate(gens)]
    surv, ring = _relations(params, defs, [("T@", f)], {"T@"}, budget)
    got = _min_positive_degree(surv, ring, "T@")
    return got[0] if got else None


def is_algebraic_over(c_name: str, gens: Sequence[RatFunc],
                      budget: Optional[Budget] = None) -> dict:
    """The intersection-ideal algebraicity test for a parameter.

    Returns {algebraic, degree, min_poly, h_names, ring}; the minimal
    polynomial is the lowest-degree survivor, monic in the parameter and made
    square-free, over Q in the internal generator names.
    """
    if not gens:
        return {"algebraic": False, "degree": None, "min_poly": None}
    params = tuple(gens[0].ring.universe.names())
    defs = [(f"H{i+1}@", g) for i, g in enumerate(gens)]
    surv, ring = _relations(params, defs, [], {c_name}, budget)
    got = _min_positive_degree(surv, ring, c_name)
    if got is None:
        return {"algebraic": False, "degree": None, "min_poly": None,
                "h_names": [nm for nm, _ in defs], "ring": ring}
    d, g = got
    g = squarefree_part(g)
    d = g.degree_in(c_name)
    return {"algebraic": True, "degree": d, "min_poly": g,
            "h_names": [nm for nm, _ in defs], "ring": ring}


# --------------------------------------------------------------------------
# tower construction

@dataclass
class TowerReport:
    params: tuple                 # parameter names of the model the tower is over
    gen_names: tuple              # display names of the field generators
    gen_defs: tuple               # RatFunc definitions in the parameters
    residual_trans: tuple         # transcendental parameters adjoined by the loop
    alpha_name: Optional[str]
    alpha_combo: Optional[dict]   # param name -> Fraction; alpha = sum r_i c_i
    degree: int
    min_poly_low: tuple = ()      # low coefficients over Q(h), monic X^n + ...
    hring: Optional[PolyRing] = None

    def alg_ext(self) -> AlgExt:
        fld = FracField(self.hring)
        if self.degree == 1:
            return AlgExt(fld, [fld.zero], alpha_name=self.alpha_name or "alpha")
        return AlgExt(fld, list(self.min_poly_low), alpha_name=self.alpha_name)

    def alpha_def(self) -> Optional[RatFunc]:
        if self.alpha_combo is None:
            return None
        ring = self.gen_defs[0].ring if self.gen_defs else None
        total = None
        for p, r in self.alpha_combo.items():
            t = RatFunc.from_poly(ring.var(p)) * r
            total = t if total is None else total + t
        return total

    def describe(self) -> dict:
        out = {
            "generators": {n: str(d) for n, d in zip(self.gen_names, self.gen_defs)},
            "residual_transcendental": list(self.residual_trans),
            "degree": self.degree,
        }
        if self.alpha_name:
            out["alpha"] = {
                "name": self.alpha_name,
                "definition": str(self.alpha_def()),
                "min_poly": self.min_poly_text(),
            }
        return out

    def min_poly_text(self) -> str:
        if self.degree == 1:
            return "X - (" + str(self.alpha_def()) + ")"
        parts = [f"X^{self.degree}"]
        for j in range(self.degree - 1, -1, -1):
            c = self.min_poly_low[j]
            if not c:
                continue
            mono = "" if j == 0 else ("*X" if j == 1 else f"*X^{j}")
            parts.append(f"+ ({c}){mono}" if str(c)[0] != "-" else f"- ({-c}){mono}")
        return " ".join(parts)


def _display_names(gen_defs, params, taken):
    """Single bare parameters keep their own name; everything else becomes
    h1, h2, ... (collisions with `taken` names and the parameters avoided)."""
    names = []
    used = set(taken)
    blocked = used | set(params)
    counter = 1
    for d in gen_defs:
        nm = None
        if d.den.is_constant() and len(d.num.terms) == 1:
            (e, c), = d.num.terms.items()
            if sum(e) == 1:
                i = e.index(1)
                cand = d.num.ring.universe.vars[i].name
                if cand not in used:
                    nm = cand
        if nm is None:
            while f"h{counter}" in blocked or f"h{counter}" in used:
                counter += 1
            nm = f"h{counter}"
            counter += 1
        used.add(nm)
        names.append(nm)
    return tuple(names)


def _minpoly_to_low_coeffs(mp: MPoly, ring: PolyRing, var: str, h_names,
                           display_names, hring: PolyRing):
    """Rewrite the survivor polynomial as monic low-coefficient list over
    Q(display h names)."""
    n = mp.degree_in(var)
    i = ring.universe.index(var)
    buckets = {}
    for e, c in mp.terms.items():
        d = e[i]
        ne = list(e)
        ne[i] = 0
        buckets.setdefault(d, {})[tuple(ne)] = c
    rename = dict(zip(h_names, display_names))
    sub_ring = PolyRing(VarUniverse([Var(rename.get(v.name, v.name),
                                         "param") for v in ring.universe.vars
                                     if v.name != var]), QQ)

    def move(t):
        p = MPoly(ring, t)
        out = {}
        for e, c in p.terms.items():
            ne = [0] * sub_ring.nvars
            for k, ex in enumerate(e):
                if ex and k != i:
                    nm = rename.get(ring.universe.vars[k].name,
                                    ring.universe.vars[k].name)
                    ne[sub_ring.universe.index(nm)] = ex
            out[tuple(ne)] = c
        return MPoly(sub_ring, out)

    lead = RatFunc.from_poly(hring.convert(move(buckets[n])))
    low = []
    for j in range(n):
        if j in buckets:
            cj = RatFunc.from_poly(hring.convert(move(buckets[j])))
            low.append(cj / lead)
        else:
            low.append(RatFunc.from_poly(hring.zero()))
    return low


def build_field_tower(params: Sequence[str], gens: Sequence[RatFunc],
                      seed: int = 0, budget: Optional[Budget] = None,
                      max_draws: int = 32, taken_names=()) -> TowerReport:
    """The iterative construction: adjoin transcendental parameters, then
    find a primitive element for the residual algebraic extension."""
    if not gens:
        raise ValueError("need at least one field generator")
    pring = gens[0].ring
    work = list(gens)
    residual = []
    for p in params:
        f = RatFunc.from_poly(pring.var(p))
        if field_membership_degree(f, work, budget) is None:
            work.append(f)
            residual.append(p)

    degrees = {}
    for p in params:
        f = RatFunc.from_poly(pring.var(p))
        degrees[p] = field_membership_degree(f, work, budget)
        if degrees[p] is None:
            raise RuntimeError("parameter still transcendental after adjoining")

    display = _display_names(work, params, set(taken_names))
    hring = PolyRing(VarUniverse([Var(n, "tower") for n in display]), QQ)

    if all(d == 1 for d in degrees.values()):
        return TowerReport(params=tuple(params), gen_names=display,
                           gen_defs=tuple(work), residual_trans=tuple(residual),
                           alpha_name=None, alpha_combo=None, degree=1,
                           hring=hring)

    # single-parameter candidates first
    candidates = [({p: Fraction(1)},) for p in params if degrees[p] > 1]
    rng = random.Random(seed)
    for _ in range(max_draws):
        combo = {}
        for p in params:
            if degrees[p] > 1:
                r = 0
                while r == 0:
                    r = rng.randint(-10, 10)
                combo[p] = Fraction(r)
        candidates.append((combo,))

    for (combo,) in candidates:
        alpha = None
        for p, r in combo.items():
            t = RatFunc.from_poly(pring.var(p)) * r
            alpha = t if alpha is None else alpha + t
        ok = True
        for p in params:
            dp = field_membership_degree(RatFunc.from_poly(pring.var(p)),
                                         work + [alpha], budget)
            if dp != 1:
                ok = False
                break
        if not ok:
            continue
        got = _alpha_min_poly(params, work, alpha, budget)
        if got is None:
            continue
        mp, ring, h_names, avar = got
        mp = _certified_min_poly(mp, ring, avar, h_names, work, alpha, params)
        n = mp.degree_in(avar)
        low = _minpoly_to_low_coeffs(mp, ring, avar, h_names, display, hring)
        aname = _alpha_display(combo)
        return TowerReport(params=tuple(params), gen_names=display,
                           gen_defs=tuple(work), residual_trans=tuple(residual),
                           alpha_name=aname, alpha_combo=combo, degree=n,
                           min_poly_low=tuple(low), hring=hring)
    raise PrimitiveSearchExhausted(f"no primitive element found in {max_draws} draws")


def _alpha_display(combo) -> str:
    if len(combo) == 1:
        p, r = next(iter(combo.items()))
        if r == 1:
            return p
    return "alpha"


def _alpha_min_poly(params, work, alpha: RatFunc, budget):
    defs = [(f"H{i+1}@", g) for i, g in enumerate(work)]
    surv, ring = _relations(tuple(params), defs, [("A@", alpha)], {"A@"}, budget)
    got = _min_positive_degree(surv, ring, "A@")
    if got is None:
        return None
    _, g = got
    g = squarefree_part(g)
    return g, ring, [nm for nm, _ in defs], "A@"


def _certified_min_poly(mp, ring, avar, h_names, work, alpha, params):
    """Keep the irreducible factor that actually vanishes at alpha."""
    from .factor import factor_distinct_flat
    fs, _ = factor_distinct_flat(mp)
    fs = [f for f in fs if f.degree_in(avar) > 0]
    if len(fs) == 1:
        return fs[0]
    vals = {nm: d for nm, d in zip(h_names, work)}
    vals[avar] = alpha
    target = work[0].ring
    best = None
    for f in fs:
        r = ratfunc_subs(RatFunc.from_poly(f), vals, target)
        if r.is_zero():
            if best is None or f.degree_in(avar) < best.degree_in(avar):
                best = f
    return best if best is not None else mp


# --------------------------------------------------------------------------
# expressing parameter functions over the tower

def express_in_tower(f: RatFunc, tower: TowerReport,
                     budget: Optional[Budget] = None,
                     _cache={}) -> AlgElem:
    """Rewrite f(c) as an element of Q(h)(alpha) in the basis
    {1, alpha, ..., alpha^(n-1)}; NotInTower when no linear survivor exists."""
    key = (id(tower), str(f))
    if key in _cache:
        return _cache[key]
    ext = tower.alg_ext()
    if f.is_constant():
        out = ext.from_fraction(f.constant_value())
        _cache[key] = out
        return out
    defs = [(f"H{i+1}@", g) for i, g in enumerate(tower.gen_defs)]
    extras = []
    if tower.alpha_combo is not None and tower.degree > 1:
        extras.append(("A@", tower.alpha_def()))
    extras.append(("T@", f))
    surv, ring = _relations(tower.params, defs, extras, {"T@"}, budget)
    lin = [g for g in surv if g.degree_in("T@") == 1]
    best = None
    for g in lin:
        if best is None or (g.total_degree(), str(g)) < (best.total_degree(), str(best)):
            best = g
    if best is None:
        raise NotInTower(f"{f} is not expressible over the tower")
    i = ring.universe.index("T@")
    A = {}
    B = {}
    for e, c in best.terms.items():
        ne = list(e)
        d = ne[i]
        ne[i] = 0
        if d == 1:
            A[tuple(ne)] = c
        else:
            B[tuple(ne)] = -c
    Apoly = MPoly(ring, A)
    Bpoly = MPoly(ring, B)
    a_el = _keepring_to_alg(Apoly, ring, tower, ext)
    b_el = _keepring_to_alg(Bpoly, ring, tower, ext)
    if not a_el:
        raise NotInTower(f"degenerate linear survivor for {f}")
    out = b_el / a_el
    # exactness: substitute the definitions back and compare
    if not _verify_expression(out, f, tower):
        raise NotInTower(f"back-substitution failed for {f}")
    _cache[key] = out
    return out


def _keepring_to_alg(p: MPoly, ring: PolyRing, tower: TowerReport,
                     ext: AlgExt) -> AlgElem:
    """Polynomial in internal H-names and A@ -> element of Q(h)(alpha)."""
    rename = {f"H{i+1}@": n for i, n in enumerate(tower.gen_names)}
    coeffs = [ext.base.zero] * max(1, ext.degree)
    hring = tower.hring
    ai = ring.universe.index("A@") if ring.universe.has("A@") else None
    for e, c in p.terms.items():
        ad = e[ai] if ai is not None else 0
        ne = [0] * hring.nvars
        for k, ex in enumerate(e):
            if not ex or k == ai:
                continue
            nm = rename.get(ring.universe.vars[k].name)
            if nm is None:
                raise NotInTower("unexpected variable in tower expression")
            ne[hring.universe.index(nm)] = ex
        mono = RatFunc.from_poly(hring.monomial(tuple(ne), c))
        tmp = [ext.base.zero] * (ad + 1)
        tmp[ad] = mono
        el = ext.from_coeffs(ext._reduce(tmp) if ad >= ext.degree else
                             tmp + [ext.base.zero] * (ext.degree - ad - 1))
        coeffs = [a + b for a, b in zip(coeffs, el.coeffs)]
    return AlgElem(ext, coeffs)


def _verify_expression(el: AlgElem, f: RatFunc, tower: TowerReport) -> bool:
    """Substitute h and alpha definitions into the basis expression."""
    target = f.ring
    subs = {n: d for n, d in zip(tower.gen_names, tower.gen_defs)}
    alpha_val = tower.alpha_def()
    total = RatFunc.from_poly(target.zero())
    for j, cj in enumerate(el.coeffs):
        piece = ratfunc_subs(cj, subs, target)
        if j:
            piece = piece * alpha_val ** j
        total = total + piece
    return total == f


# --------------------------------------------------------------------------
# suitable evaluation of transcendental parameters

@dataclass
class EvalResult:
    assignment: dict        # param name -> Fraction
    sigma: dict             # surviving param -> RatFunc in the original params
    model: "OdeModel"       # the evaluated model
    attempts: int = 1


def suitable_evaluation(model, P, trans: Sequence[str], seed: int = 0,
                        gens: Sequence[RatFunc] = (), eqs=None,
                        forced: Optional[dict] = None,
                        budget: Optional[Budget] = None,
                        max_draws: int = 64) -> EvalResult:
    """Assign rationals to the transcendental parameters so that the
    parametrization Jacobian rank, the generator Jacobian rank, properness
    (when present) and the IO-equations are all preserved; also compute the
    induced rewrite of the surviving parameters that keeps every generator
    literally fixed."""
    from .model import OdeModel, properness_check, build_parametrization

    if not trans:
        return EvalResult(assignment={}, sigma={}, model=model)

    rng = random.Random(seed)
    J = [[c.derivative(s) for s in model.states] for (_, _, c) in P.components]
    rankP = P.rank
    Jh = [[g.derivative(p) for p in model.params] for g in gens]
    rankH = mat_rank(Jh) if gens else 0
    proper_deg = None
    if not P.rank_deficient:
        try:
            proper_deg = properness_check(P, budget)["fiber_degree"]
        except Exception:
            proper_deg = None

    last_reason = "no draws attempted"
    for attempt in range(1, max_draws + 1):
        if forced is not None:
            assignment = dict(forced)
            if set(assignment) != set(trans):
                raise ValueError("forced evaluation must cover exactly the "
                                 "transcendental parameters")
        else:
            assignment = {}
            for p in trans:
                v = 0
                while v == 0:
                    v = rng.randint(-10, 10)
                assignment[p] = Fraction(v)
        try:
            ok, reason, sigma, m2 = _check_assignment(
                model, P, J, rankP, Jh, rankH, proper_deg, gens, eqs,
                assignment, budget)
        except Exception as e:  # vanishing denominators etc. reject the draw
            ok, reason = False, f"{type(e).__name__}: {e}"
            sigma = None
            m2 = None
        if ok:
            return EvalResult(assignment=assignment, sigma=sigma, model=m2,
                              attempts=attempt)
        last_reason = reason
        if forced is not None:
            raise EvaluationSearchExhausted(
                f"forced evaluation rejected: {last_reason}")
    raise EvaluationSearchExhausted(
        f"no suitable evaluation in {max_draws} draws; last: {last_reason}")


def _check_assignment(model, P, J, rankP, Jh, rankH, proper_deg, gens, eqs,
                      assignment, budget):
    from .model import OdeModel, properness_check, build_parametrization
    sub = {p: Fraction(v) for p, v in assignment.items()}

    # (a) parametrization Jacobian keeps its rank
    J2 = [[_rf_eval(v, sub) for v in row] for row in J]
    if mat_rank(J2) != rankP:
        return False, "parametrization Jacobian rank drops", None, None
    # (b) generator Jacobian keeps its rank
    if gens:
        Jh2 = [[_rf_eval(v, sub) for v in row] for row in Jh]
        if mat_rank(Jh2) != rankH:
            return False, "generator Jacobian rank drops", None, None

    m2 = _evaluated_model(model, sub)

    # (c) properness degree preserved when the input was proper
    if proper_deg is not None:
        P2 = build_parametrization(m2, P.orders, budget)
        try:
            d2 = properness_check(P2, budget)["fiber_degree"]
        except Exception:
            return False, "fiber degenerates", None, None
        if d2 != proper_deg:
            return False, "properness degree changes", None, None

    # induced rewrite sigma keeping each generator literally fixed
    sigma = _induced_rewrite(gens, assignment, model)
    if sigma is None:
        return False, "no linear induced rewrite of surviving parameters", None, None

    # (d) every normalized IO coefficient is unchanged after eval + rewrite
    if eqs is not None:
        for eq in eqs:
            for cf in eq.normalized_coeffs:
                ev = _rf_eval(cf, sub)
                back = ratfunc_subs(ev, sigma, cf.ring) if sigma else ev
                if back != cf:
                    return False, "an IO coefficient moves under the evaluation", None, None
    return True, "", sigma, m2


def _rf_eval(f: RatFunc, sub):
    return ratfunc_subs(f, {k: Fraction(v) for k, v in sub.items()})


def _evaluated_model(model, sub):
    from .model import OdeModel
    survivors = [p for p in model.params if p not in sub]
    keep = [v for v in model.ring.universe.vars
            if not (v.role == "param" and v.name in sub)]
    ring = PolyRing(VarUniverse(keep), QQ)
    def mv(f):
        ev = _rf_eval(f, sub)
        return RatFunc(ring.convert(ev.num), ring.convert(ev.den))
    return OdeModel(ring=ring, states=model.states, params=tuple(survivors),
                    inputs=model.inputs,
                    rhs={s: mv(f) for s, f in model.rhs.items()},
                    outputs={y: mv(g) for y, g in model.outputs.items()},
                    output_names=model.output_names)


def _induced_rewrite(gens, assignment, model):
    """sigma with evaluated-generator(sigma) == generator for every field
    generator; solved one unknown parameter at a time, linearly."""
    sub = {p: Fraction(v) for p, v in assignment.items()}
    sigma = {}
    ring = model.ring
    for g in gens:
        ev = _rf_eval(g, sub)
        cur = ratfunc_subs(ev, sigma, ring) if sigma else ev
        if cur == g:
            continue
        unknowns = [p for p in set(cur.num.variables()) | set(cur.den.variables())
                    if ring.universe.var(p).role == "param" and p not in sigma]
        solved = False
        for p in unknowns:
            if cur.num.degree_in(p) <= 1 and cur.den.degree_in(p) == 0:
                # cur = (A p + B)/D = g  ->  p = (g D - B)/A
                A = cur.num.derivative(p)
                B = cur.num - A * ring.var(p)
                D = cur.den
                if not A.terms:
                    continue
                expr = (g * RatFunc.from_poly(D) - RatFunc.from_poly(B)) / RatFunc.from_poly(A)
                sigma[p] = expr
                solved = True
                break
        if not solved:
            return None
    # sanity: all generators now fixed
    for g in gens:
        ev = _rf_eval(g, sub)
        cur = ratfunc_subs(ev, sigma, ring) if sigma else ev
        if cur != g:
            return None
    return sigma
