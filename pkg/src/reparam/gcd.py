"""Exact gcd, content and division for polynomials over the rationals.

The general multivariate gcd runs a primitive subresultant PRS recursively:
view both polynomials as univariate in a shared main variable with polynomial
coefficients, split off contents, and run the pseudo-remainder sequence on the
primitive parts.  Monomial and univariate fast paths cover the common cases
that arise while normalizing rational functions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

from .poly import MPoly, PolyRing, GREVLEX

__all__ = [
    "rational_content", "primitive_part", "poly_gcd", "poly_lcm",
    "divexact", "poly_divmod", "squarefree_part", "poly_sqrt",
]


def rational_content(p: MPoly) -> Fraction:
    """Positive rational c with p/c integer-primitive; content of 0 is 1.

    Requires Fraction coefficients.
    """
    if not p.terms:
        return Fraction(1)
    num = 0
    den = 1
    for c in p.terms.values():
        num = int_gcd(num, abs(c.numerator))
        den = den * c.denominator // int_gcd(den, c.denominator)
    return Fraction(num, den)


def primitive_part(p: MPoly, order=GREVLEX):
    """(content-with-sign, primitive p̂): p = content * p̂, p̂ integer-primitive
    with positive leading coefficient."""
    if not p.terms:
        return Fraction(1), p
    c = rational_content(p)
    if p.leading_coeff(order) < 0:
        c = -c
    return c, p * (1 / c)


def _monomial_gcd_exps(p: MPoly):
    it = iter(p.terms)
    mins = list(next(it))
    for e in it:
        for i, x in enumerate(e):
            if x < mins[i]:
                mins[i] = x
        if not any(mins):
            break
    return tuple(mins)


def monomial_content(p: MPoly) -> tuple:
    """Exponent tuple of the largest monomial dividing every term."""
    if not p.terms:
        return (0,) * p.ring.nvars
    return _monomial_gcd_exps(p)


def strip_monomial(p: MPoly, exps) -> MPoly:
    if not any(exps):
        return p
    out = {}
    for e, c in p.terms.items():
        out[tuple(x - y for x, y in zip(e, exps))] = c
    return MPoly(p.ring, out)


# -- dense-in-one-variable views -------------------------------------------

def _to_univ(p: MPoly, i: int):
    """dict: degree in var i -> MPoly coefficient (in the full ring)."""
    ring = p.ring
    out = {}
    for e, c in p.terms.items():
        d = e[i]
        ne = list(e)
        ne[i] = 0
        key = tuple(ne)
        bucket = out.setdefault(d, {})
        acc = bucket.get(key)
        s = c if acc is None else acc + c
        if s:
            bucket[key] = s
        elif acc is not None:
            del bucket[key]
    return {d: MPoly(ring, t) for d, t in out.items() if t}


def _from_univ(ring: PolyRing, i: int, coeffs) -> MPoly:
    out = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            ne = list(e)
            ne[i] += d
            out[tuple(ne)] = c
    return MPoly(ring, out)


def _univ_degree(coeffs):
    return max(coeffs) if coeffs else -1


def _univ_mul_shift(coeffs, k, factor: MPoly):
    return {d + k: c * factor for d, c in coeffs.items()}


def _univ_sub(a, b):
    out = dict(a)
    for d, c in b.items():
        acc = out.get(d)
        s = (-c) if acc is None else acc - c
        if s:
            out[d] = s
        elif acc is not None:
            del out[d]
    return out


def _pseudo_rem(a, b, ring):
    """Pseudo-remainder of univariate views a, b (coefficients MPoly)."""
    db = _univ_degree(b)
    lb = b[db]
    r = dict(a)
    while r and _univ_degree(r) >= db:
        dr = _univ_degree(r)
        lr = r[dr]
        r = _univ_sub({d: c * lb for d, c in r.items()},
                      _univ_mul_shift(b, dr - db, lr))
    return r


def poly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """gcd over QQ[vars], normalized integer-primitive with positive lead."""
    if not p.terms:
        return primitive_part(q)[1]
    if not q.terms:
        return primitive_part(p)[1]
    ring = p.ring

    # monomial fast path
    if len(p.terms) == 1 or len(q.terms) == 1:
        mp = _monomial_gcd_exps(p)
        mq = _monomial_gcd_exps(q)
        g = tuple(min(a, b) for a, b in zip(mp, mq))
        return ring.monomial(g, Fraction(1))

    # common monomial factor out front
    mp = monomial_content(p)
    mq = monomial_content(q)
    common = tuple(min(a, b) for a, b in zip(mp, mq))
    if any(mp) or any(mq):
        p = strip_monomial(p, mp)
        q = strip_monomial(q, mq)

    pv = set(p.variables())
    qv = set(q.variables())
    shared = pv & qv
    if not shared:
        g = ring.one()
    else:
        # main variable: smallest max-degree among shared vars
        main = min(shared, key=lambda n: (max(p.degree_in(n), q.degree_in(n)), n))
        g = _gcd_main(p, q, ring.universe.index(main))
    _, g = primitive_part(g)
    if any(common):
        g = g.mul_term(common, Fraction(1))
    return g


def _gcd_main(p: MPoly, q: MPoly, i: int) -> MPoly:
    ring = p.ring
    a = _to_univ(p, i)
    b = _to_univ(q, i)
    if _univ_degree(a) < _univ_degree(b):
        a, b = b, a

    def content_of(u):
        c = None
        for poly in u.values():
            c = poly if c is None else poly_gcd(c, poly)
            if c.is_constant():
                break
        return c if c is not None else ring.one()

    ca = content_of(a)
    cb = content_of(b)
    cont = poly_gcd(ca, cb)
    a = {d: divexact(c, ca) for d, c in a.items()}
    b = {d: divexact(c, cb) for d, c in b.items()}

    # primitive PRS
    while True:
        r = _pseudo_rem(a, b, ring)
        if not r:
            g = _from_univ(ring, i, b)
            break
        if _univ_degree(r) == 0:
            g = ring.one()
            break
        cr = content_of(r)
        r = {d: divexact(c, cr) for d, c in r.items()}
        a, b = b, r
    _, g = primitive_part(g)
    return cont * g


def poly_lcm(p: MPoly, q: MPoly) -> MPoly:
    if not p.terms or not q.terms:
        return p.ring.zero()
    g = poly_gcd(p, q)
    _, l = primitive_part(p * divexact(q, g))
    return l


def poly_divmod(p: MPoly, q: MPoly, order=GREVLEX):
    """Single-divisor division: p = quo*q + rem (rem has no term divisible
    by the leading term of q)."""
    if not q.terms:
        raise ZeroDivisionError("polynomial division by zero")
    ring = p.ring
    le, lc = q.leading(order)
    quo = {}
    rem = {}
    work = dict(p.terms)
    key = order.key
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        if all(x >= y for x, y in zip(e, le)):
            m = tuple(x - y for x, y in zip(e, le))
            cc = c / lc
            quo[m] = quo.get(m, ring.domain.zero) + cc
            for eq, cq in q.terms.items():
                if eq == le:
                    continue
                k2 = tuple(x + y for x, y in zip(m, eq))
                acc = work.get(k2)
                s = -(cc * cq) if acc is None else acc - cc * cq
                if s:
                    work[k2] = s
                elif acc is not None:
                    del work[k2]
        else:
            rem[e] = c
    return MPoly(ring, {e: c for e, c in quo.items() if c}), MPoly(ring, rem)


def divexact(p: MPoly, q: MPoly) -> MPoly:
    """Exact division; raises if q does not divide p."""
    if not p.terms:
        return p
    quo, rem = poly_divmod(p, q)
    if rem.terms:
        raise ArithmeticError("inexact polynomial division")
    return quo


def squarefree_part(p: MPoly) -> MPoly:
    """p divided by the gcds with its partials: same irreducible factors,
    multiplicity one."""
    out = p
    for name in p.variables():
        d = out.derivative(name)
        if d.terms:
            g = poly_gcd(out, d)
            if not g.is_constant():
                out = divexact(out, g)
    return primitive_part(out)[1]


def poly_sqrt(p: MPoly, order=GREVLEX):
    """Exact square root of p over QQ, or None."""
    if not p.terms:
        return p
    le, lc = p.leading(order)
    if any(e % 2 for e in le):
        return None
    if lc < 0:
        return None
    import math
    num_r = math.isqrt(lc.numerator)
    den_r = math.isqrt(lc.denominator)
    if num_r * num_r != lc.numerator or den_r * den_r != lc.denominator:
        return None
    ring = p.ring
    half = tuple(e // 2 for e in le)
    q = ring.monomial(half, Fraction(num_r, den_r))
    # iteratively match terms: r = p - q^2, next term = lead(r)/(2*lead(q))
    guard = 4 * (len(p.terms) + 2) ** 2
    while guard:
        guard -= 1
        r = p - q * q
        if not r.terms:
            return q
        er, cr = r.leading(order)
        if order.key(er) >= order.key(tuple(e + h for e, h in zip(half, half))):
            return None
        if not all(x >= y for x, y in zip(er, half)):
            return None
        q = q + ring.monomial(tuple(x - y for x, y in zip(er, half)),
                              cr / (2 * Fraction(num_r, den_r)))
    return None
