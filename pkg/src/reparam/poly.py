"""Sparse multivariate polynomials with exact coefficients.

A polynomial is a dict mapping exponent tuples to coefficients.  The
coefficient domain is pluggable: plain `fractions.Fraction` for polynomials
over the rationals, or field elements from `reparam.domains` (rational
functions, algebraic-extension elements) when a computation needs parameters
in the base field.  Zero coefficients are never stored; the grevlex order over
the declared variable universe is the canonical storage/printing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

__all__ = [
    "Var", "VarUniverse", "PolyRing", "MPoly",
    "MonomialOrder", "GrevLex", "Lex", "BlockElim",
    "QQ", "RationalDomain",
]


# --------------------------------------------------------------------------
# variables and universes

ROLES = ("state", "input", "output", "param", "tower", "aux")


@dataclass(frozen=True)
class Var:
    """A named variable with a role tag.

    `base`/`order` track derivative families: the j-th derivative of input u
    is a distinct algebraic variable named "u_j" with base "u", order j.
    """
    name: str
    role: str = "aux"
    base: str = ""
    order: int = 0

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown variable role {self.role!r}")

    def display(self) -> str:
        if self.base and self.order > 0:
            return self.base + "'" * self.order
        return self.name


def deriv_name(base: str, order: int) -> str:
    return base if order == 0 else f"{base}_{order}"


class VarUniverse:
    """Immutable ordered collection of distinct variables."""

    __slots__ = ("vars", "_index")

    def __init__(self, vars: Iterable[Var]):
        vs = tuple(vars)
        index = {}
        for i, v in enumerate(vs):
            if v.name in index:
                raise ValueError(f"duplicate variable name {v.name!r}")
            index[v.name] = i
        self.vars = vs
        self._index = index

    def __len__(self):
        return len(self.vars)

    def __iter__(self):
        return iter(self.vars)

    def __eq__(self, other):
        return isinstance(other, VarUniverse) and self.vars == other.vars

    def __hash__(self):
        return hash(self.vars)

    def __repr__(self):
        return "VarUniverse(" + ", ".join(v.name for v in self.vars) + ")"

    def names(self) -> tuple:
        return tuple(v.name for v in self.vars)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in universe") from None

    def has(self, name: str) -> bool:
        return name in self._index

    def var(self, name: str) -> Var:
        return self.vars[self.index(name)]

    def by_role(self, role: str) -> tuple:
        return tuple(v for v in self.vars if v.role == role)

    def extend(self, new_vars: Iterable[Var]) -> "VarUniverse":
        fresh = [v for v in new_vars if v.name not in self._index]
        return VarUniverse(self.vars + tuple(fresh))

    def restrict(self, names: Iterable[str]) -> "VarUniverse":
        keep = set(names)
        return VarUniverse(v for v in self.vars if v.name in keep)


# --------------------------------------------------------------------------
# monomial orders

def _grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


class MonomialOrder:
    name = "order"

    def key(self, exps):  # pragma: no cover - interface
        raise NotImplementedError


class GrevLex(MonomialOrder):
    name = "grevlex"

    def key(self, exps):
        return _grevlex_key(exps)

    def __repr__(self):
        return "GrevLex()"


class Lex(MonomialOrder):
    name = "lex"

    def key(self, exps):
        return exps

    def __repr__(self):
        return "Lex()"


class BlockElim(MonomialOrder):
    """Elimination order: the front block is compared first (by total degree,
    then reverse-lex), so front-block variables are eliminated."""

    name = "blockelim"

    def __init__(self, front_indices: Sequence[int], nvars: int):
        self.front = tuple(sorted(front_indices))
        self.nvars = nvars
        fset = set(self.front)
        self.rest = tuple(i for i in range(nvars) if i not in fset)

    def key(self, exps):
        fr = tuple(exps[i] for i in self.front)
        re = tuple(exps[i] for i in self.rest)
        return (_grevlex_key(fr), _grevlex_key(re))

    def __repr__(self):
        return f"BlockElim(front={self.front})"


GREVLEX = GrevLex()
LEX = Lex()


# --------------------------------------------------------------------------
# coefficient domains

class RationalDomain:
    """The field of big rationals, backed by fractions.Fraction."""

    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def from_fraction(self, q) -> Fraction:
        return Fraction(q)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalDomain)

    def __hash__(self):
        return hash("QQ")


QQ = RationalDomain()


# --------------------------------------------------------------------------
# polynomial ring and elements

class PolyRing:
    """A polynomial ring: a variable universe plus a coefficient domain."""

    __slots__ = ("universe", "domain", "_zero", "_one")

    def __init__(self, universe: VarUniverse, domain=QQ):
        self.universe = universe
        self.domain = domain
        self._zero = None
        self._one = None

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.universe == other.universe
                and self.domain == other.domain)

    def __hash__(self):
        return hash((self.universe, self.domain))

    def __repr__(self):
        return f"PolyRing({self.universe!r}, {self.domain!r})"

    @property
    def nvars(self):
        return len(self.universe)

    def zero(self) -> "MPoly":
        if self._zero is None:
            self._zero = MPoly(self, {})
        return self._zero

    def one(self) -> "MPoly":
        if self._one is None:
            self._one = self.const(self.domain.one)
        return self._one

    def const(self, c) -> "MPoly":
        if not c:
            return self.zero()
        return MPoly(self, {(0,) * self.nvars: c})

    def from_fraction(self, q) -> "MPoly":
        return self.const(self.domain.from_fraction(Fraction(q)))

    def var(self, name: str) -> "MPoly":
        i = self.universe.index(name)
        exps = [0] * self.nvars
        exps[i] = 1
        return MPoly(self, {tuple(exps): self.domain.one})

    def monomial(self, exps, c=None) -> "MPoly":
        c = self.domain.one if c is None else c
        if not c:
            return self.zero()
        return MPoly(self, {tuple(exps): c})

    def convert(self, p: "MPoly") -> "MPoly":
        """Transport a polynomial from another ring by variable name.

        Every variable effectively occurring in `p` must exist here, and the
        coefficient domains must agree.
        """
        if p.ring is self or p.ring == self:
            return MPoly(self, dict(p.terms))
        src = p.ring.universe
        mapping = [self.universe.index(v.name) if self.universe.has(v.name) else -1
                   for v in src.vars]
        n = self.nvars
        out = {}
        for exps, c in p.terms.items():
            new = [0] * n
            for i, e in enumerate(exps):
                if e:
                    j = mapping[i]
                    if j < 0:
                        raise KeyError(f"variable {src.vars[i].name!r} not in target ring")
                    new[j] = e
            key = tuple(new)
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return MPoly(self, {k: v for k, v in out.items() if v})


class MPoly:
    """Immutable-by-convention sparse multivariate polynomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The coefficient of the constant term (domain zero if absent)."""
        return self.terms.get((0,) * self.ring.nvars, self.ring.domain.zero)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.ring.universe.index(name)
        return max(e[i] for e in self.terms)

    def variables(self) -> tuple:
        """Names of variables occurring with a nonzero exponent."""
        n = self.ring.nvars
        seen = [False] * n
        for e in self.terms:
            for i in range(n):
                if e[i]:
                    seen[i] = True
        uni = self.ring.universe
        return tuple(uni.vars[i].name for i in range(n) if seen[i])

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.ring == other.ring and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.universe, frozenset(self.terms.items())
                     if all(isinstance(c, Fraction) for c in self.terms.values())
                     else id(self)))

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.from_fraction(Fraction(other))
        return self.ring.const(other)

    def __neg__(self):
        return MPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e)
            s = c if acc is None else acc + c
            if s:
                out[e] = s
            elif acc is not None:
                del out[e]
        return MPoly(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e)
            s = -c if acc is None else acc - c
            if s:
                out[e] = s
            elif acc is not None:
                del out[e]
        return MPoly(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c0 = self.ring.domain.from_fraction(Fraction(other))
            if not c0:
                return self.ring.zero()
            return MPoly(self.ring, {e: c * c0 for e, c in self.terms.items()})
        if not isinstance(other, MPoly):
            c0 = other
            if not c0:
                return self.ring.zero()
            out = {}
            for e, c in self.terms.items():
                p = c * c0
                if p:
                    out[e] = p
            return MPoly(self.ring, out)
        if not self.terms or not other.terms:
            return self.ring.zero()
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                acc = out.get(key)
                s = ca * cb if acc is None else acc + ca * cb
                if s:
                    out[key] = s
                elif acc is not None:
                    del out[key]
        return MPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def mul_term(self, exps, c):
        if not c:
            return self.ring.zero()
        out = {}
        for e, cc in self.terms.items():
            out[tuple(x + y for x, y in zip(e, exps))] = cc * c
        return MPoly(self.ring, out)

    # -- leading data --------------------------------------------------------

    def leading(self, order: MonomialOrder = GREVLEX):
        """(exponent tuple, coefficient) of the leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def leading_coeff(self, order: MonomialOrder = GREVLEX):
        return self.leading(order)[1]

    def sorted_terms(self, order: MonomialOrder = GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = GREVLEX) -> "MPoly":
        if not self.terms:
            return self
        lc = self.leading_coeff(order)
        one = self.ring.domain.one
        if lc == one:
            return self
        return MPoly(self.ring, {e: c / lc for e, c in self.terms.items()})

    # -- calculus ------------------------------------------------------------

    def derivative(self, name: str) -> "MPoly":
        i = self.ring.universe.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                key = tuple(ne)
                cc = c * e[i]
                acc = out.get(key)
                s = cc if acc is None else acc + cc
                if s:
                    out[key] = s
                elif acc is not None:
                    del out[key]
        return MPoly(self.ring, out)

    # -- substitution ----------------------------------------------------------

    def subs_poly(self, values: Mapping[str, "MPoly"], target: Optional[PolyRing] = None) -> "MPoly":
        """Substitute polynomials for variables; unmentioned variables persist.

        `target` is the ring of the result (defaults to this ring); values
        must live in the target ring.
        """
        ring = target or self.ring
        uni = self.ring.universe
        val_ix = {}
        for name, v in values.items():
            val_ix[uni.index(name)] = v if isinstance(v, MPoly) else ring.from_fraction(v)
        pow_cache = {}

        def power(i, e):
            key = (i, e)
            if key not in pow_cache:
                pow_cache[key] = val_ix[i] ** e
            return pow_cache[key]

        out = ring.zero()
        for e, c in self.terms.items():
            rest = [0] * ring.nvars
            factor = None
            ok = True
            for i, exp in enumerate(e):
                if not exp:
                    continue
                if i in val_ix:
                    p = power(i, exp)
                    factor = p if factor is None else factor * p
                else:
                    name = uni.vars[i].name
                    rest[ring.universe.index(name)] = exp
            term = ring.monomial(tuple(rest), c)
            out = out + (term if factor is None else term * factor)
        return out

    # -- printing --------------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MPoly({format_poly(self)})"


# --------------------------------------------------------------------------
# canonical text form

def _coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return str(c)


def _needs_parens(c) -> bool:
    if isinstance(c, Fraction):
        return c < 0
    s = str(c)
    return ("+" in s[1:]) or ("-" in s[1:]) or s.startswith("-") or "/" in s


def format_poly(p: MPoly, order: MonomialOrder = GREVLEX, deriv_marks: bool = True) -> str:
    """Canonical text: terms in descending order, `^` powers, explicit `*`."""
    if not p.terms:
        return "0"
    uni = p.ring.universe
    parts = []
    for e, c in p.sorted_terms(order):
        factors = []
        for i, exp in enumerate(e):
            if exp:
                nm = uni.vars[i].display() if deriv_marks else uni.vars[i].name
                factors.append(nm if exp == 1 else f"{nm}^{exp}")
        mono = "*".join(factors)
        if isinstance(c, Fraction):
            if not mono:
                piece = str(c)
            elif c == 1:
                piece = mono
            elif c == -1:
                piece = "-" + mono
            else:
                piece = f"{c}*{mono}"
        else:
            cs = _coeff_str(c)
            if not mono:
                piece = cs if not _needs_parens(c) else f"({cs})"
            elif cs == "1":
                piece = mono
            elif cs == "-1":
                piece = "-" + mono
            elif _needs_parens(c):
                piece = f"({cs})*{mono}"
            else:
                piece = f"{cs}*{mono}"
        parts.append(piece)
    out = parts[0]
    for piece in parts[1:]:
        if piece.startswith("-"):
            out += " - " + piece[1:]
        else:
            out += " + " + piece
    return out
