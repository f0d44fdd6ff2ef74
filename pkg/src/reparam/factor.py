"""Polynomial factorization adequate for low-degree branch generators.

Factorization over Q(parameters) reduces to factorization in the flat ring
Q[parameters, vars] (Gauss), after which pure-parameter factors are units and
get dropped.  The flat factorizer handles: integer and monomial content,
per-variable content recursion, squarefree splitting, linear factors, the
quadratic discriminant test (complete, via exact polynomial square roots) and
a divisor-driven root search for cubics and beyond.  A primitive part of
total degree > 2 that resists all of this is returned unfactored with
`certified=False`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .gcd import (divexact, monomial_content, poly_gcd, poly_sqrt,
                  primitive_part, rational_content, strip_monomial)
from .poly import MPoly, PolyRing, GREVLEX, QQ
from .domains import FracField, RatFunc, to_field_poly, from_field_poly

__all__ = ["factor_flat", "factor_distinct", "factor_distinct_flat", "is_perfect_power_free"]


def factor_flat(p: MPoly):
    """(unit, [(irreducible_or_residual, multiplicity)], certified).

    Factors are integer-primitive with positive grevlex-leading coefficient;
    `certified` is False when some residual factor could not be proven
    irreducible.
    """
    if not p.terms:
        return Fraction(0), [], True
    cont, p = primitive_part(p)
    unit = cont
    factors = {}
    certified = True

    def add(f, mult):
        nonlocal unit
        c, fp = primitive_part(f)
        unit *= c ** mult
        if fp.is_constant():
            return
        key = _fkey(fp)
        if key in factors:
            factors[key] = (fp, factors[key][1] + mult)
        else:
            factors[key] = (fp, mult)

    work = [(p, 1)]
    guard = 512
    while work:
        guard -= 1
        if guard < 0:
            raise RuntimeError("factorization runaway")
        q, mult = work.pop()
        if q.is_constant():
            unit *= q.constant_value() ** mult
            continue
        # monomial content
        me = monomial_content(q)
        if any(me):
            for i, e in enumerate(me):
                if e:
                    v = q.ring.var(q.ring.universe.vars[i].name)
                    add(v, e * mult)
            q = strip_monomial(q, me)
            if q.is_constant():
                unit *= q.constant_value() ** mult
                continue
        if q.total_degree() == 1:
            add(q, mult)
            continue
        # per-variable content (coefficient gcd wrt a chosen variable)
        split = False
        for name in q.variables():
            cont_v = _content_wrt(q, name)
            if not cont_v.is_constant():
                work.append((cont_v, mult))
                work.append((divexact(q, cont_v), mult))
                split = True
                break
        if split:
            continue
        # squarefree split
        sq = _squarefree_split(q)
        if sq is not None:
            g, rest = sq
            work.append((g, mult))
            if not rest.is_constant():
                work.append((rest, mult))
            continue
        # primitive squarefree: try to break it
        res = _factor_primitive(q)
        if res is None:
            add(q, mult)
            if q.total_degree() > 2 and not _certify_irreducible(q):
                certified = False
        else:
            for f in res:
                work.append((f, mult))

    out = sorted(factors.values(), key=lambda t: _fkey(t[0]))
    return unit, out, certified


def _fkey(f: MPoly):
    return (f.total_degree(), len(f.terms), str(f))


def _content_wrt(p: MPoly, name: str) -> MPoly:
    i = p.ring.universe.index(name)
    groups = {}
    for e, c in p.terms.items():
        d = e[i]
        ne = list(e)
        ne[i] = 0
        groups.setdefault(d, {})[tuple(ne)] = c
    g = None
    for d, t in groups.items():
        q = MPoly(p.ring, t)
        g = q if g is None else poly_gcd(g, q)
        if g.is_constant():
            break
    return g if g is not None else p.ring.one()


def _squarefree_split(p: MPoly):
    """(gcd(p, p'), p/gcd) when some partial derivative shares a factor with
    p, else None.  Recursing on both halves at the same multiplicity makes
    the accumulated multiplicities come out right."""
    for name in p.variables():
        d = p.derivative(name)
        if not d.terms:
            continue
        g = poly_gcd(p, d)
        if not g.is_constant():
            return (g, divexact(p, g))
    return None


def _divides_exact(p: MPoly, q: MPoly) -> bool:
    from .gcd import poly_divmod
    try:
        _, r = poly_divmod(p, q)
    except ZeroDivisionError:
        return False
    return not r.terms


def _factor_primitive(q: MPoly):
    """Try to split a primitive squarefree polynomial; None if no split found."""
    # linear in some variable + primitive content => irreducible
    names = q.variables()
    degs = {n: q.degree_in(n) for n in names}
    if any(d == 1 for d in degs.values()):
        return None
    # quadratic-in-a-variable discriminant test (complete)
    for n in sorted(names, key=lambda n: (degs[n], n)):
        if degs[n] == 2:
            return _factor_quadratic(q, n)
    # root search for higher degree in the lowest-degree variable
    for n in sorted(names, key=lambda n: (degs[n], n)):
        got = _root_split(q, n)
        if got is not None:
            return got
    return None


def _factor_quadratic(q: MPoly, name: str):
    """Split A x^2 + B x + C when the discriminant is a perfect square."""
    ring = q.ring
    i = ring.universe.index(name)
    A = ring.zero()
    B = ring.zero()
    C = ring.zero()
    for e, c in q.terms.items():
        ne = list(e)
        d = ne[i]
        ne[i] = 0
        t = ring.monomial(tuple(ne), c)
        if d == 2:
            A = A + t
        elif d == 1:
            B = B + t
        else:
            C = C + t
    D = B * B - 4 * A * C
    if not D.terms:
        # perfect square: q = A (x + B/2A)^2 -> primitive split
        f = 2 * A * ring.var(name) + B
        _, f = primitive_part(f)
        return [f, divexact(q, f)]
    s = poly_sqrt(D)
    if s is None:
        return None
    x = ring.var(name)
    f1 = primitive_part(2 * A * x + B - s)[1]
    f2 = primitive_part(2 * A * x + B + s)[1]
    rest = divexact(q, f1 * f2) if _divides_exact(q, f1 * f2) else None
    if rest is None:
        # one of the halves may share content with A; fall back to f1 alone
        if _divides_exact(q, f1):
            return [f1, divexact(q, f1)]
        if _divides_exact(q, f2):
            return [f2, divexact(q, f2)]
        return None
    out = [f1, f2]
    if not rest.is_constant():
        out.append(rest)
    return out


def _certify_irreducible(q: MPoly) -> bool:
    """True only for shapes we can certify: linear-in-a-variable with trivial
    content (already handled upstream) or quadratic with non-square
    discriminant."""
    degs = {n: q.degree_in(n) for n in q.variables()}
    if any(d == 1 for d in degs.values()):
        return True
    for n, d in degs.items():
        if d == 2:
            return True   # quadratic test above is complete
    return False


def _divisor_candidates(p: MPoly, cap: int = 32):
    """Monic divisors of p up to rational units (products of irreducible
    factors), for the generalized rational-root search."""
    ring = p.ring
    if p.is_constant():
        return [ring.one()]
    _, factors, _ = factor_flat(p)
    expanded = []
    for f, m in factors:
        expanded.extend([f] * min(m, 2))
    out = [ring.one()]
    for f in expanded[:6]:
        out = out + [d * f for d in out]
        if len(out) > cap:
            break
    uniq = {}
    for d in out[:cap]:
        uniq[str(d)] = d
    return list(uniq.values())


def _root_split(q: MPoly, name: str):
    """Find a root x = lambda * (m_num / m_den) with lambda rational and
    m_* divisors of the trailing/leading coefficients; split off the factor."""
    ring = q.ring
    i = ring.universe.index(name)
    d = q.degree_in(name)
    coeffs = {}
    for e, c in q.terms.items():
        ne = list(e)
        k = ne[i]
        ne[i] = 0
        coeffs.setdefault(k, {})[tuple(ne)] = c
    cs = {k: MPoly(ring, t) for k, t in coeffs.items()}
    lead = cs.get(d, ring.zero())
    trail = cs.get(0, ring.zero())
    if not trail.terms:
        return [ring.var(name), divexact(q, ring.var(name))]
    for m_num in _divisor_candidates(trail):
        for m_den in _divisor_candidates(lead):
            lam = _solve_lambda(cs, d, m_num, m_den)
            if lam is None:
                continue
            x = ring.var(name)
            f = primitive_part(m_den * x - ring.const(lam) * m_num)[1]
            if _divides_exact(q, f):
                rest = divexact(q, f)
                return [f, rest] if not rest.is_constant() else [f]
    return None


def _solve_lambda(cs, d, m_num: MPoly, m_den: MPoly):
    """Rational lambda with sum_k c_k (lambda m_num)^k m_den^(d-k) == 0."""
    ring = m_num.ring
    lam_coeffs = {}
    for k, c in cs.items():
        piece = c * (m_num ** k) * (m_den ** (d - k))
        for e, cc in piece.terms.items():
            lam_coeffs.setdefault(e, {})[k] = lam_coeffs.get(e, {}).get(k, Fraction(0)) + cc
    # each monomial gives a univariate polynomial in lambda that must vanish
    uni_polys = []
    for e, m in lam_coeffs.items():
        m = {k: v for k, v in m.items() if v}
        if m:
            uni_polys.append(m)
    if not uni_polys:
        return Fraction(0)
    cands = _rational_roots(uni_polys[0])
    for lam in cands:
        if all(sum(v * lam ** k for k, v in m.items()) == 0 for m in uni_polys):
            return lam
    return None


def _rational_roots(m: dict):
    """Rational roots of sum_k m[k] lambda^k with Fraction coefficients."""
    den_l = 1
    for v in m.values():
        den_l = den_l * v.denominator // _igcd(den_l, v.denominator)
    ints = {k: int(v * den_l) for k, v in m.items()}
    degs = sorted(ints)
    low = degs[0]
    ints = {k - low: v for k, v in ints.items()}
    a0 = ints.get(0, 0)
    an = ints[max(ints)]
    roots = set()
    if low > 0:
        roots.add(Fraction(0))
    if a0 == 0:
        return sorted(roots)
    for p in _int_divisors(abs(a0)):
        for q in _int_divisors(abs(an)):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if sum(v * r ** k for k, v in ints.items()) == 0:
                    roots.add(r)
    return sorted(roots)


def _igcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _int_divisors(n, cap=64):
    out = []
    d = 1
    while d * d <= n and len(out) < cap:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def is_perfect_power_free(p: MPoly) -> bool:
    _, factors, _ = factor_flat(p)
    return all(m == 1 for _, m in factors)


# --------------------------------------------------------------------------
# factorization of field-coefficient polynomials (over Q(h))

def factor_distinct_flat(p: MPoly):
    """Distinct monic irreducible factors of a flat QQ polynomial."""
    _, factors, certified = factor_flat(p)
    return [f for f, _ in factors], certified


def factor_distinct(p: MPoly):
    """Distinct factors of a polynomial with FracField coefficients, as
    monic polynomials over the same field; pure-coefficient factors are
    units and disappear."""
    dom = p.ring.domain
    if dom == QQ or isinstance(dom, type(QQ)):
        fs, certified = factor_distinct_flat(p)
        return [f.monic(GREVLEX) for f in fs], certified
    if not isinstance(dom, FracField):
        raise TypeError("factor_distinct expects QQ or FracField coefficients")
    cring = dom.ring
    uni = p.ring.universe
    flat_uni = cring.universe.extend(uni.vars)
    flat = PolyRing(flat_uni, QQ)
    # clear denominators term by term
    den = None
    for c in p.terms.values():
        den = c.den if den is None else _lcm(den, c.den)
    num = flat.zero()
    for e, c in p.terms.items():
        scale = divexact(den, c.den)
        mono = [0] * flat.nvars
        for i, ex in enumerate(e):
            if ex:
                mono[flat.universe.index(uni.vars[i].name)] = ex
        num = num + (flat.convert(c.num) * flat.convert(scale)).mul_term(tuple(mono), Fraction(1))
    fs, certified = factor_distinct_flat(num)
    main_names = set(uni.names())
    out = []
    for f in fs:
        if not (set(f.variables()) & main_names):
            continue   # unit in the coefficient field
        out.append(to_field_poly(f, p.ring).monic(GREVLEX))
    return out, certified


def _lcm(a: MPoly, b: MPoly) -> MPoly:
    from .gcd import poly_lcm
    return poly_lcm(a, b)
