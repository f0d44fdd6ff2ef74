"""Rational functions and field domains layered over MPoly.

`RatFunc` is the reduced fraction num/den of two rational-coefficient
polynomials; construction always normalizes (poly gcd cancelled, the common
rational content removed, denominator sign fixed so its grevlex-leading
coefficient is positive).

Two coefficient domains let MPoly work over bigger fields:

* `FracField(ring)` — elements are RatFunc over `ring`; used whenever a
  computation needs parameters in the base field.
* `AlgExt(base, minpoly)` — a simple algebraic extension of a fraction field
  by one primitive element; elements are coefficient tuples in the basis
  {1, a, ..., a^(n-1)} and division inverts modulo the minimal polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Mapping, Optional

from .errors import ZeroDenominator, NoAlgebraicGenerator
from .gcd import poly_gcd, divexact, rational_content, primitive_part, poly_lcm
from .poly import MPoly, PolyRing, GREVLEX, QQ

__all__ = [
    "RatFunc", "rf_normalize", "evaluate",
    "FracField", "AlgExt", "AlgElem",
    "to_field_poly", "from_field_poly", "ratfunc_subs",
]


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    num = int_gcd(a.numerator, b.numerator)
    den = (a.denominator * b.denominator) // int_gcd(a.denominator, b.denominator)
    return Fraction(num, den)


class RatFunc:
    """Reduced fraction of two polynomials over the same ring."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly, _normalized=False):
        if not den.terms:
            raise ZeroDenominator("zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_poly(cls, p: MPoly) -> "RatFunc":
        return cls(p, p.ring.one(), _normalized=True)

    @classmethod
    def const(cls, ring: PolyRing, q) -> "RatFunc":
        q = Fraction(q)
        return cls(ring.const(Fraction(q.numerator)),
                   ring.const(Fraction(q.denominator)), _normalized=True)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        if not self.num.terms:
            return Fraction(0)
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MPoly:
        if not self.den.is_constant():
            raise ValueError("not a polynomial")
        return self.num * (1 / self.den.constant_value())

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MPoly):
            return RatFunc.from_poly(other)
        return RatFunc.const(self.ring, other)

    @staticmethod
    def _defer(other) -> bool:
        # polynomials with field-element coefficients handle the mixed case
        return isinstance(other, MPoly) and not isinstance(other.ring.domain, type(QQ))

    def __add__(self, other):
        if self._defer(other):
            return NotImplemented
        o = self._coerce(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        if self._defer(other):
            return NotImplemented
        o = self._coerce(other)
        if self.den == o.den:
            return RatFunc(self.num - o.num, self.den)
        return RatFunc(self.num * o.den - o.num * self.den, self.den * o.den)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._defer(other):
            return NotImplemented
        o = self._coerce(other)
        if not self.num.terms or not o.num.terms:
            return RatFunc(self.ring.zero(), self.ring.one(), _normalized=True)
        # cross-cancel first to keep intermediates small
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1 = self.num if g1.is_constant() else divexact(self.num, g1)
        d2 = o.den if g1.is_constant() else divexact(o.den, g1)
        n2 = o.num if g2.is_constant() else divexact(o.num, g2)
        d1 = self.den if g2.is_constant() else divexact(self.den, g2)
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if self._defer(other):
            return NotImplemented
        o = self._coerce(other)
        if not o.num.terms:
            raise ZeroDenominator("division by zero rational function")
        return self * RatFunc(o.den, o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return RatFunc.const(self.ring, 1)
        if n < 0:
            return (RatFunc.const(self.ring, 1) / self) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.num.terms
            other = RatFunc.const(self.ring, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def derivative(self, name: str) -> "RatFunc":
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        if not dd.terms:
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def __str__(self):
        from .poly import format_poly
        ns = format_poly(self.num)
        if self.den.is_constant() and self.den.constant_value() == 1:
            return ns
        ds = format_poly(self.den)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        # parens unless the denominator is a single positive power of one
        # variable or a positive integer
        simple = False
        if len(self.den.terms) == 1:
            (e, c), = self.den.terms.items()
            nweight = sum(1 for k in e if k)
            if c == 1 and nweight == 1:
                simple = True
            elif nweight == 0 and c > 0 and c.denominator == 1:
                simple = True
        if not simple:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    __repr__ = __str__


def _normalize(num: MPoly, den: MPoly):
    if not num.terms:
        return num.ring.zero(), num.ring.one()
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = divexact(num, g)
        den = divexact(den, g)
    cn = rational_content(num)
    cd = rational_content(den)
    c = _frac_gcd(cn, cd)
    if den.leading_coeff(GREVLEX) < 0:
        c = -c
    inv = 1 / c
    return num * inv, den * inv


def rf_normalize(num: MPoly, den: MPoly) -> RatFunc:
    """The reduced canonical fraction num/den; idempotent."""
    return RatFunc(num, den)


def ratfunc_subs(f: RatFunc, values: Mapping[str, "RatFunc"],
                 target: Optional[PolyRing] = None) -> RatFunc:
    """Substitute rational functions for variables of f; unassigned persist."""
    ring = target or f.ring
    vals = {}
    for name, v in values.items():
        if isinstance(v, RatFunc):
            vals[name] = v
        elif isinstance(v, MPoly):
            vals[name] = RatFunc.from_poly(v)
        else:
            vals[name] = RatFunc.const(ring, v)
    num = _poly_subs_rf(f.num, vals, ring)
    den = _poly_subs_rf(f.den, vals, ring)
    if not den.num.terms:
        raise ZeroDenominator("denominator vanishes under the assignment")
    return num / den


def _poly_subs_rf(p: MPoly, vals: Mapping[str, RatFunc], ring: PolyRing) -> RatFunc:
    uni = p.ring.universe
    val_ix = {uni.index(n): v for n, v in vals.items()}
    pow_cache = {}

    def power(i, e):
        key = (i, e)
        if key not in pow_cache:
            pow_cache[key] = val_ix[i] ** e
        return pow_cache[key]

    total = RatFunc.from_poly(ring.zero())
    for e, c in p.terms.items():
        rest = [0] * ring.nvars
        factor = None
        for i, exp in enumerate(e):
            if not exp:
                continue
            if i in val_ix:
                pw = power(i, exp)
                factor = pw if factor is None else factor * pw
            else:
                rest[ring.universe.index(uni.vars[i].name)] = exp
        term = RatFunc.from_poly(ring.monomial(tuple(rest), c))
        total = total + (term if factor is None else term * factor)
    return total


def evaluate(f: RatFunc, assignment: Mapping[str, object]) -> RatFunc:
    """Substitution followed by normalization; unassigned variables persist."""
    return ratfunc_subs(f, assignment)


# --------------------------------------------------------------------------
# fraction-field coefficient domain

class FracField:
    """Field of rational functions over a QQ polynomial ring."""

    def __init__(self, ring: PolyRing):
        if ring.domain != QQ:
            raise ValueError("FracField base must be a QQ polynomial ring")
        self.ring = ring
        self.zero = RatFunc.from_poly(ring.zero())
        self.one = RatFunc.from_poly(ring.one())
        self.name = "Frac(" + ",".join(ring.universe.names()) + ")"

    def from_fraction(self, q) -> RatFunc:
        return RatFunc.const(self.ring, q)

    def var(self, name: str) -> RatFunc:
        return RatFunc.from_poly(self.ring.var(name))

    def __eq__(self, other):
        return isinstance(other, FracField) and self.ring == other.ring

    def __hash__(self):
        return hash(("FracField", self.ring))

    def __repr__(self):
        return self.name


# --------------------------------------------------------------------------
# simple algebraic extension

class AlgElem:
    """Element of base(alpha): coefficient tuple in {1, a, ..., a^(n-1)}."""

    __slots__ = ("ext", "coeffs")

    def __init__(self, ext: "AlgExt", coeffs):
        self.ext = ext
        self.coeffs = tuple(coeffs)
        assert len(self.coeffs) == ext.degree

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def alpha_degree(self) -> int:
        d = -1
        for i, c in enumerate(self.coeffs):
            if c:
                d = i
        return d

    def base_value(self) -> RatFunc:
        if self.alpha_degree() > 0:
            raise ValueError("element is not in the base field")
        return self.coeffs[0]

    def _coerce(self, other) -> "AlgElem":
        if isinstance(other, AlgElem):
            return other
        return self.ext.from_base(self.ext.base.from_fraction(other)
                                  if isinstance(other, (int, Fraction)) else other)

    def __add__(self, other):
        o = self._coerce(other)
        return AlgElem(self.ext, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgElem(self.ext, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        return AlgElem(self.ext, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.ext.degree
        prod = [self.ext.base.zero] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if b:
                    prod[i + j] = prod[i + j] + a * b
        return AlgElem(self.ext, self.ext._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "AlgElem":
        return self.ext.invert(self)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ext.one
        b = self
        while k:
            if k & 1:
                out = out * b
            k >>= 1
            if k:
                b = b * b
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ext.from_fraction(other)
        if not isinstance(other, AlgElem):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(str(c) for c in self.coeffs))

    def __str__(self):
        a = self.ext.alpha_name
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = str(c)
            if i == 0:
                parts.append(cs)
            else:
                mono = a if i == 1 else f"{a}^{i}"
                if cs == "1":
                    parts.append(mono)
                elif cs == "-1":
                    parts.append("-" + mono)
                else:
                    needs = ("+" in cs[1:]) or ("-" in cs[1:]) or "/" in cs
                    parts.append((f"({cs})" if needs else cs) + "*" + mono)
        if not parts:
            return "0"
        out = parts[0]
        for piece in parts[1:]:
            out += (" - " + piece[1:]) if piece.startswith("-") else (" + " + piece)
        return out

    __repr__ = __str__


class AlgExt:
    """base(alpha) with alpha a root of a monic irreducible minimal polynomial.

    `minpoly_coeffs` are the low-order coefficients m_0..m_(n-1) of
    m(X) = X^n + m_(n-1) X^(n-1) + ... + m_0 over the base field.
    """

    def __init__(self, base: FracField, minpoly_coeffs, alpha_name="alpha"):
        self.base = base
        self.low = tuple(minpoly_coeffs)
        self.degree = len(self.low)
        if self.degree < 1:
            raise NoAlgebraicGenerator("extension degree must be >= 1")
        self.alpha_name = alpha_name
        self.zero = AlgElem(self, (base.zero,) * self.degree)
        one = [base.zero] * self.degree
        one[0] = base.one
        self.one = AlgElem(self, one)
        self.name = f"{base.name}({alpha_name})"

    def from_base(self, c: RatFunc) -> AlgElem:
        coeffs = [self.base.zero] * self.degree
        coeffs[0] = c
        return AlgElem(self, coeffs)

    def from_fraction(self, q) -> AlgElem:
        return self.from_base(self.base.from_fraction(q))

    def alpha(self) -> AlgElem:
        if self.degree == 1:
            # alpha = -m0 in a degree-1 "extension"
            return self.from_base(-self.low[0])
        coeffs = [self.base.zero] * self.degree
        coeffs[1] = self.base.one
        return AlgElem(self, coeffs)

    def from_coeffs(self, coeffs) -> AlgElem:
        cs = list(coeffs)[: self.degree] + [self.base.zero] * max(0, self.degree - len(coeffs))
        if len(coeffs) > self.degree:
            return AlgElem(self, self._reduce(list(coeffs)))
        return AlgElem(self, cs)

    def _reduce(self, coeffs):
        """Reduce a coefficient list of any length modulo the minimal poly."""
        n = self.degree
        work = list(coeffs)
        while len(work) > n:
            top = work.pop()
            if top:
                d = len(work)
                # a^(d) = a^(d-n) * (-(m0 + ... + m_(n-1) a^(n-1)))
                for j in range(n):
                    work[d - n + j] = work[d - n + j] - top * self.low[j]
        while len(work) < n:
            work.append(self.base.zero)
        return tuple(work)

    def invert(self, x: AlgElem) -> AlgElem:
        if x.is_zero():
            raise ZeroDenominator("division by zero in algebraic extension")
        if self.degree == 1:
            return self.from_base(self.base.one / x.coeffs[0])
        # extended Euclid in base[X] for gcd(minpoly, x) = 1
        m = list(self.low) + [self.base.one]          # minpoly coefficients
        a = list(x.coeffs)
        r0, r1 = m, _poly_trim(a)
        t0, t1 = [self.base.zero], [self.base.one]
        while _poly_deg(r1) > 0:
            q, r = _poly_divmod_univ(r0, r1, self.base)
            r0, r1 = r1, r
            t0, t1 = t1, _poly_sub_univ(t0, _poly_mul_univ(q, t1, self.base), self.base)
            if not r1:
                raise NoAlgebraicGenerator("minimal polynomial is not irreducible")
        c = r1[0]
        inv = [t / c for t in t1]
        return self.from_coeffs(self._reduce(inv))

    def __eq__(self, other):
        return (isinstance(other, AlgExt) and self.base == other.base
                and self.low == other.low)

    def __hash__(self):
        return hash(("AlgExt", self.base, tuple(str(c) for c in self.low)))

    def __repr__(self):
        return self.name


def _poly_trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _poly_deg(a):
    return len(a) - 1


def _poly_sub_univ(a, b, field):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero
        y = b[i] if i < len(b) else field.zero
        out.append(x - y)
    return _poly_trim(out)


def _poly_mul_univ(a, b, field):
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _poly_trim(out)


def _poly_divmod_univ(a, b, field):
    a = _poly_trim(a)
    b = _poly_trim(b)
    if not b:
        raise ZeroDivisionError
    q = [field.zero] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while r and len(r) >= len(b):
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i, bc in enumerate(b):
            r[k + i] = r[k + i] - c * bc
        r = _poly_trim(r)
    return _poly_trim(q), r


# --------------------------------------------------------------------------
# conversions between flat QQ polynomials and field-coefficient polynomials

def to_field_poly(p: MPoly, target: PolyRing) -> MPoly:
    """Split a flat QQ polynomial into a polynomial over a FracField domain.

    Variables of `target` stay polynomial variables; every other variable of
    p must belong to the coefficient field's ring.
    """
    dom = target.domain
    if not isinstance(dom, FracField):
        raise TypeError("target ring must have a FracField domain")
    cring = dom.ring
    src = p.ring.universe
    main_ix = {}
    coef_ix = {}
    for i, v in enumerate(src.vars):
        if target.universe.has(v.name):
            main_ix[i] = target.universe.index(v.name)
        elif cring.universe.has(v.name):
            coef_ix[i] = cring.universe.index(v.name)
        else:
            main_ix[i] = None  # checked lazily when the exponent is nonzero
    out = {}
    for e, c in p.terms.items():
        me = [0] * target.nvars
        ce = [0] * cring.nvars
        for i, exp in enumerate(e):
            if not exp:
                continue
            if i in coef_ix:
                ce[coef_ix[i]] = exp
            else:
                j = main_ix.get(i)
                if j is None:
                    raise KeyError(f"variable {src.vars[i].name!r} in neither "
                                   "main nor coefficient ring")
                me[j] = exp
        key = tuple(me)
        add = RatFunc.from_poly(cring.monomial(tuple(ce), c))
        acc = out.get(key)
        s = add if acc is None else acc + add
        if s:
            out[key] = s
        elif acc is not None:
            del out[key]
    return MPoly(target, out)


def from_field_poly(p: MPoly, flat: PolyRing) -> RatFunc:
    """Flatten a FracField-coefficient polynomial into a RatFunc over `flat`."""
    dom = p.ring.domain
    if not isinstance(dom, FracField):
        raise TypeError("expected a FracField-coefficient polynomial")
    if not p.terms:
        return RatFunc.from_poly(flat.zero())
    den = None
    for c in p.terms.values():
        den = c.den if den is None else poly_lcm(den, c.den)
    num = flat.zero()
    uni = p.ring.universe
    for e, c in p.terms.items():
        scale = divexact(den, c.den)
        cf = flat.convert(c.num)
        sf = flat.convert(scale)
        mono = [0] * flat.nvars
        for i, exp in enumerate(e):
            if exp:
                mono[flat.universe.index(uni.vars[i].name)] = exp
        num = num + (cf * sf).mul_term(tuple(mono), Fraction(1))
    return RatFunc(num, flat.convert(den))
