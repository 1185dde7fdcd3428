# exact arithmetic kernel for toro: rationals, sparse bivariate polynomials, reduced fractions
# gcd, factoring and parsing are delegated to sympy over QQ
# 2025 toro
import math
import re
from fractions import Fraction
from types import MappingProxyType

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from modules.log import logger

FIRST = "First"
SECOND = "Second"
CHARTS = (FIRST, SECOND)

X1, X2 = sympy.symbols("x1 x2")
T = sympy.Symbol("t")

VARIABLE_SETS = (("x1", "x2"), ("y1", "y2"))
GRAMMAR_CHARS = re.compile(r"^[0-9xy+\-*/^()\s]*$")
GRAMMAR_NAMES = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class AlgebraError(ValueError):
    pass


class ParseError(AlgebraError):
    pass


def scalar(value):
    # Fraction keeps numerator/denominator reduced with a positive denominator
    if isinstance(value, Fraction):
        return value
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, float):
        raise AlgebraError(f"floating point value {value} is not an exact scalar")
    return Fraction(value)


def format_scalar(c):
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _mono_str(e1, e2, names):
    parts = []
    for name, e in zip(names, (e1, e2)):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class Poly2:
    """Sparse polynomial in two variables with Fraction coefficients.

    Terms map (e1, e2) exponent pairs to nonzero coefficients. Instances are
    immutable and hashable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for (e1, e2), c in (terms or {}).items():
            if e1 < 0 or e2 < 0:
                raise AlgebraError(f"negative exponent in monomial ({e1}, {e2})")
            c = scalar(c)
            if c:
                clean[(int(e1), int(e2))] = c
        self._terms = MappingProxyType(clean)
        self._hash = None

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, e1, e2, c=1):
        return cls({(e1, e2): c})

    @classmethod
    def variable(cls, axis):
        return cls.monomial(1, 0) if axis == 1 else cls.monomial(0, 1)

    @property
    def terms(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly2.constant(other)
        if not isinstance(other, Poly2):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, Poly2):
            return other
        return Poly2.constant(scalar(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly2({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for (a1, a2), c in self._terms.items():
            for (b1, b2), d in other._terms.items():
                m = (a1 + b1, a2 + b2)
                out[m] = out.get(m, 0) + c * d
        return Poly2(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        result = Poly2.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        c = scalar(c)
        return Poly2({m: v * c for m, v in self._terms.items()})

    def degree(self, axis):
        if not self._terms:
            return -1
        return max(m[axis - 1] for m in self._terms)

    def total_degree(self):
        if not self._terms:
            return -1
        return max(e1 + e2 for e1, e2 in self._terms)

    def lead_term(self):
        # lexicographically greatest monomial, x1 exponent first
        m = max(self._terms)
        return m, self._terms[m]

    def evaluate(self, v1, v2):
        v1, v2 = scalar(v1), scalar(v2)
        return sum((c * v1 ** e1 * v2 ** e2 for (e1, e2), c in self._terms.items()), Fraction(0))

    def truncate(self, order):
        return Poly2({m: c for m, c in self._terms.items() if m[0] + m[1] <= order})

    def to_sympy(self):
        rep = {m: sympy.Rational(c.numerator, c.denominator) for m, c in self._terms.items()}
        return sympy.Poly.from_dict(rep or {(0, 0): 0}, X1, X2, domain="QQ")

    @classmethod
    def from_sympy(cls, poly):
        return cls({m: scalar(c) for m, c in poly.terms() if c != 0})

    def format(self, names=("x1", "x2")):
        if not self._terms:
            return "0"
        out = ""
        for m in sorted(self._terms, reverse=True):
            c = self._terms[m]
            mono = _mono_str(m[0], m[1], names)
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{format_scalar(mag)}*{mono}"
            else:
                body = format_scalar(mag)
            if not out:
                out = f"-{body}" if c < 0 else body
            else:
                out += f" - {body}" if c < 0 else f" + {body}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Poly2({self.format()})"


class UniPoly:
    """Univariate polynomial, coefficient index = degree."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients=()):
        coeffs = [scalar(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    def is_zero(self):
        return not self.coefficients

    def degree(self):
        return len(self.coefficients) - 1

    def evaluate(self, v):
        v = scalar(v)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * v + c
        return acc

    def to_sympy(self):
        rep = [sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coefficients)] or [0]
        return sympy.Poly(rep, T, domain="QQ")

    @classmethod
    def from_sympy(cls, poly):
        coeffs = [scalar(c) for c in reversed(poly.all_coeffs())]
        return cls(coeffs)

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __str__(self):
        if not self.coefficients:
            return "0"
        return Poly2({(e, 0): c for e, c in enumerate(self.coefficients)}).format(("t", "_"))

    def __repr__(self):
        return f"UniPoly({self})"


class Frac2:
    """Reduced quotient of two Poly2 values; build through reduce_fraction."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    @classmethod
    def of(cls, p):
        return reduce_fraction(p, Poly2.constant(1))

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, Frac2):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        return reduce_fraction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return reduce_fraction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return Frac2(-self.num, self.den)

    def __mul__(self, other):
        return reduce_fraction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise AlgebraError("division by the zero fraction")
        return reduce_fraction(self.num * other.den, self.den * other.num)

    def shift(self, c):
        return reduce_fraction(self.num - self.den.scale(c), self.den)

    def evaluate_origin(self):
        d = eval_origin(self.den)
        if d == 0:
            raise AlgebraError(f"denominator of {self} vanishes at the origin")
        return eval_origin(self.num) / d

    def format(self, names=("x1", "x2")):
        if self.den == Poly2.constant(1):
            return self.num.format(names)
        return f"({self.num.format(names)})/({self.den.format(names)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Frac2({self.format()})"


def partial_derivative(p, axis):
    out = {}
    for (e1, e2), c in p.terms.items():
        e = e1 if axis == 1 else e2
        if e == 0:
            continue
        m = (e1 - 1, e2) if axis == 1 else (e1, e2 - 1)
        out[m] = c * e
    return Poly2(out)


def frac_partial(f, axis):
    # quotient rule
    num = partial_derivative(f.num, axis) * f.den - f.num * partial_derivative(f.den, axis)
    return reduce_fraction(num, f.den * f.den)


def jacobian(f1, f2):
    """Jacobian determinant of the pair (f1, f2) of Frac2 values."""
    return frac_partial(f1, 1) * frac_partial(f2, 2) - frac_partial(f1, 2) * frac_partial(f2, 1)


def substitute_blowup(p, chart):
    # First: x2 <- x1*x2, so x1^i x2^j -> x1^(i+j) x2^j; Second: x1 <- x1*x2
    if chart == FIRST:
        return Poly2({(e1 + e2, e2): c for (e1, e2), c in p.terms.items()})
    if chart == SECOND:
        return Poly2({(e1, e1 + e2): c for (e1, e2), c in p.terms.items()})
    raise AlgebraError(f"unknown chart {chart!r}")


def shift_axis(p, axis, c):
    c = scalar(c)
    if c == 0:
        return p
    out = {}
    for (e1, e2), coeff in p.terms.items():
        e = e1 if axis == 1 else e2
        for k in range(e + 1):
            weight = coeff * math.comb(e, k) * c ** (e - k)
            m = (k, e2) if axis == 1 else (e1, k)
            out[m] = out.get(m, 0) + weight
    return Poly2(out)


def shift_axis2(p, c):
    return shift_axis(p, 2, c)


def axis_valuation(p, axis):
    if p.is_zero():
        return math.inf
    return min(m[axis - 1] for m in p.terms)


def monomial_split(p):
    if p.is_zero():
        raise AlgebraError("monomial_split of the zero polynomial")
    e1 = axis_valuation(p, 1)
    e2 = axis_valuation(p, 2)
    residual = Poly2({(m1 - e1, m2 - e2): c for (m1, m2), c in p.terms.items()})
    return e1, e2, residual


def normalize_lex(p):
    if p.is_zero():
        return p
    _, lead = p.lead_term()
    return p.scale(1 / lead)


def gcd2(p, q):
    if p.is_zero() and q.is_zero():
        raise AlgebraError("gcd2 of two zero polynomials")
    if p.is_zero():
        return normalize_lex(q)
    if q.is_zero():
        return normalize_lex(p)
    g = p.to_sympy().gcd(q.to_sympy())
    return normalize_lex(Poly2.from_sympy(g))


def exact_divide(p, q):
    if q.is_zero():
        raise AlgebraError("exact_divide by the zero polynomial")
    if p.is_zero():
        return p
    quotient, remainder = p.to_sympy().div(q.to_sympy())
    if not remainder.is_zero:
        raise AlgebraError(f"{q} does not divide {p}")
    return Poly2.from_sympy(quotient)


def resultant(p, q, axis):
    """Resultant of p and q eliminating the named variable, as a UniPoly in the other one."""
    gen, other = (X1, X2) if axis == 1 else (X2, X1)
    res = sympy.resultant(p.to_sympy().as_expr(), q.to_sympy().as_expr(), gen)
    return UniPoly.from_sympy(sympy.Poly(sympy.expand(res).subs(other, T), T, domain="QQ"))


def coprime(p, q):
    """True when p and q share no nonconstant factor.

    A common factor involves some variable in which both have positive degree,
    and then the resultant eliminating that variable is zero.
    """
    if p.is_zero() or q.is_zero():
        other = q if p.is_zero() else p
        return not other.is_zero() and other.total_degree() == 0
    for axis in (1, 2):
        if p.degree(axis) > 0 and q.degree(axis) > 0 and resultant(p, q, axis).is_zero():
            return False
    return True


def reduce_fraction(num, den):
    if den.is_zero():
        raise AlgebraError("reduce_fraction with a zero denominator")
    if num.is_zero():
        return Frac2(Poly2(), Poly2.constant(1))
    d = gcd2(num, den)
    if d != Poly2.constant(1):
        num = exact_divide(num, d)
        den = exact_divide(den, d)
    _, lead = den.lead_term()
    return Frac2(num.scale(1 / lead), den.scale(1 / lead))


def eval_origin(p):
    return p.terms.get((0, 0), Fraction(0))


def restrict_axis(p, axis):
    # set x_axis = 0, keep the other variable
    other = 1 if axis == 1 else 0
    coeffs = {}
    for m, c in p.terms.items():
        if m[axis - 1] == 0:
            coeffs[m[other]] = c
    if not coeffs:
        return UniPoly()
    return UniPoly([coeffs.get(k, 0) for k in range(max(coeffs) + 1)])


def rational_roots(u):
    """Rational roots of u and a flag telling whether an irreducible factor of degree >= 2 remains."""
    if u.is_zero():
        raise AlgebraError("rational_roots of the zero polynomial")
    roots = set()
    irrational = False
    if u.degree() == 0:
        return roots, irrational
    _, factors = u.to_sympy().factor_list()
    for factor, _mult in factors:
        if factor.degree() == 1:
            c1, c0 = factor.all_coeffs()
            roots.add(-scalar(c0) / scalar(c1))
        elif factor.degree() > 1:
            irrational = True
    return roots, irrational


def gcd_uni(u, v):
    if u.is_zero() and v.is_zero():
        raise AlgebraError("gcd_uni of two zero polynomials")
    if u.is_zero() or v.is_zero():
        w = v if u.is_zero() else u
    else:
        w = UniPoly.from_sympy(u.to_sympy().gcd(v.to_sympy()))
    lead = w.coefficients[-1]
    return UniPoly([c / lead for c in w.coefficients])


def series_inverse(p, order):
    """Power series of 1/p truncated at total degree `order`; p must be a unit at the origin."""
    p0 = eval_origin(p)
    if p0 == 0:
        raise AlgebraError(f"{p} is not a unit at the origin")
    u = (Poly2.constant(p0) - p).scale(1 / p0)
    acc = Poly2.constant(1)
    power = Poly2.constant(1)
    for _ in range(order):
        power = (power * u).truncate(order)
        if power.is_zero():
            break
        acc = acc + power
    return acc.scale(1 / p0)


def series_truncate(f, order):
    """Taylor polynomial of a regular fraction up to total degree `order`."""
    if f.den == Poly2.constant(1):
        return f.num.truncate(order)
    return (f.num * series_inverse(f.den, order)).truncate(order)


def parse_poly(text, variables=None):
    """Parse the polynomial text grammar into a Poly2.

    Accepts x1,x2 or y1,y2 (not mixed), integer and a/b literals, + - * ^ and
    parentheses. Returns the polynomial in the two positional variables.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty polynomial")
    if not GRAMMAR_CHARS.match(text):
        raise ParseError(f"unexpected characters in {text!r}")
    names = set(GRAMMAR_NAMES.findall(text))
    allowed = [v for v in VARIABLE_SETS if names <= set(v)]
    if variables is not None:
        allowed = [v for v in allowed if tuple(v) == tuple(variables)]
    if not allowed:
        raise ParseError(f"unknown or mixed variable names {sorted(names)} in {text!r}")
    v1, v2 = allowed[0]
    if "**" in text:
        raise ParseError(f"use ^ for exponents in {text!r}")
    try:
        expr = parse_expr(text, local_dict={v1: X1, v2: X2},
                          transformations=standard_transformations + (convert_xor,), evaluate=True)
        poly = sympy.Poly(sympy.expand(expr), X1, X2, domain="QQ")
    except Exception as e:
        logger.debug(f"Algebra: parse failure for {text!r}: {e}")
        raise ParseError(f"not a polynomial in {v1},{v2}: {text!r}") from e
    return Poly2.from_sympy(poly)

