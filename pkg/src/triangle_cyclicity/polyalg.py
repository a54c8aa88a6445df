"""Exact multivariate polynomials over the rationals.

``ExactPoly`` stores a sparse map from exponent tuples to ``Fraction``
coefficients together with an ordered tuple of variable names.  The module
also provides Sylvester resultants (fraction-free Bareiss elimination over
the polynomial ring), Sturm-sequence root counting for univariate
polynomials, a small text format, and the registry of named polynomials used
throughout the package (``zeta``, ``Psi1``, ``chi1`` ...).

Text format
-----------
A polynomial is written as a sum of terms, e.g. ``-12*w^4 + 3/4*h^2*w - 324``.
Integer and rational (``p/q``) coefficients, ``*`` products, ``^`` powers
with non-negative integer exponents, parentheses, unary minus and division
by non-zero constants are accepted on input.  ``str()`` emits terms in
descending total degree, ties broken lexicographically by the variable
order, and ``parse(str(p)) == p`` always holds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


class PolynomialError(ValueError):
    """Invalid polynomial construction or operation."""


class DegeneracyError(PolynomialError):
    """A polynomial is identically zero in the elimination variable."""


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise PolynomialError(f"coefficient {c!r} is not an exact rational")


class ExactPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exponent, Scalar] | None = None):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise PolynomialError(f"repeated variable in {vars}")
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(vars) or any(e < 0 for e in exp):
                raise PolynomialError(f"bad exponent {exp} for variables {vars}")
            c = _frac(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactPoly is immutable")

    # construction helpers -------------------------------------------------

    @classmethod
    def const(cls, c: Scalar, vars: Sequence[str] = ()) -> "ExactPoly":
        return cls(vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "ExactPoly":
        vars = tuple(vars) if vars is not None else (name,)
        if name not in vars:
            raise PolynomialError(f"{name} not among {vars}")
        exp = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {exp: 1})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Scalar], var: str) -> "ExactPoly":
        """Univariate polynomial from ascending coefficients."""
        return cls((var,), {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def parse(cls, text: str, vars: Sequence[str] | None = None) -> "ExactPoly":
        return parse(text, vars)

    # structure ---------------------------------------------------------------

    def with_vars(self, vars: Sequence[str]) -> "ExactPoly":
        """Re-express over a (super)set of variables."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = []
        for v in self.vars:
            if v not in vars:
                if any(e[self.vars.index(v)] for e in self.terms):
                    raise PolynomialError(f"variable {v} would be dropped")
                idx.append(None)
            else:
                idx.append(vars.index(v))
        out = {}
        for exp, c in self.terms.items():
            new = [0] * len(vars)
            for k, e in enumerate(exp):
                if idx[k] is not None:
                    new[idx[k]] = e
            out[tuple(new)] = c
        return ExactPoly(vars, out)

    def used_vars(self) -> Tuple[str, ...]:
        return tuple(v for k, v in enumerate(self.vars) if any(e[k] for e in self.terms))

    def _unify(self, other) -> Tuple["ExactPoly", "ExactPoly"]:
        if not isinstance(other, ExactPoly):
            other = ExactPoly.const(_frac(other), self.vars)
        if other.vars == self.vars:
            return self, other
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(vars), other.with_vars(vars)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolynomialError("polynomial is not constant")
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree when omitted); -1 for zero."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        k = self.vars.index(var)
        return max(e[k] for e in self.terms)

    def coeffs_in(self, var: str) -> list:
        """Ascending coefficients in ``var``; entries keep the full variable tuple."""
        k = self.vars.index(var)
        out = [dict() for _ in range(self.degree(var) + 1)]
        for exp, c in self.terms.items():
            rest = exp[:k] + (0,) + exp[k + 1:]
            out[exp[k]][rest] = c
        return [ExactPoly(self.vars, t) for t in out]

    def univariate_coeffs(self) -> list:
        """Ascending Fraction coefficients of a polynomial in at most one variable."""
        used = self.used_vars()
        if len(used) > 1:
            raise PolynomialError(f"not univariate: {used}")
        if not used:
            return [self.terms.get((0,) * len(self.vars), Fraction(0))] if self.terms else []
        k = self.vars.index(used[0])
        out = [Fraction(0)] * (self.degree(used[0]) + 1)
        for exp, c in self.terms.items():
            out[exp[k]] = c
        return out

    # arithmetic ----------------------------------------------------------------

    def __add__(self, other):
        a, b = self._unify(other)
        t = dict(a.terms)
        for exp, c in b.terms.items():
            t[exp] = t.get(exp, Fraction(0)) + c
        return ExactPoly(a.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._unify(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._unify(other)
        t: Dict[Exponent, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return ExactPoly(a.vars, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactPoly):
            if other.is_constant():
                other = other.constant_value()
            else:
                return self.exact_div(other)
        c = _frac(other)
        if not c:
            raise ZeroDivisionError("division of polynomial by zero")
        return ExactPoly(self.vars, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PolynomialError("only non-negative integer powers")
        result = ExactPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, ExactPoly):
            try:
                other = ExactPoly.const(_frac(other), self.vars)
            except PolynomialError:
                return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        if self._hash is None:
            used = self.used_vars()
            p = self.with_vars(used) if used != self.vars else self
            object.__setattr__(self, "_hash", hash((p.vars, frozenset(p.terms.items()))))
        return self._hash

    def leading(self) -> Tuple[Exponent, Fraction]:
        """Leading term in lexicographic order of ``self.vars``."""
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        exp = max(self.terms)
        return exp, self.terms[exp]

    def exact_div(self, other: "ExactPoly") -> "ExactPoly":
        """Quotient of an exact multivariate division; raises if a remainder is left."""
        a, b = self._unify(other)
        if b.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lb_exp, lb_c = b.leading()
        rem = dict(a.terms)
        quot: Dict[Exponent, Fraction] = {}
        while rem:
            exp = max(rem)
            c = rem[exp]
            shift = tuple(x - y for x, y in zip(exp, lb_exp))
            if any(s < 0 for s in shift):
                raise PolynomialError("division is not exact")
            q = c / lb_c
            quot[shift] = quot.get(shift, Fraction(0)) + q
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e2, shift))
                v = rem.get(e, Fraction(0)) - q * c2
                if v:
                    rem[e] = v
                else:
                    rem.pop(e, None)
        return ExactPoly(a.vars, quot)

    # calculus and evaluation ---------------------------------------------------

    def diff(self, var: str) -> "ExactPoly":
        if var not in self.vars:
            return ExactPoly(self.vars)
        k = self.vars.index(var)
        t = {}
        for exp, c in self.terms.items():
            if exp[k]:
                e = list(exp)
                e[k] -= 1
                t[tuple(e)] = c * exp[k]
        return ExactPoly(self.vars, t)

    def subs(self, **values) -> "ExactPoly":
        """Substitute numbers or polynomials for variables."""
        pieces = {}
        for name, val in values.items():
            if name not in self.vars:
                raise PolynomialError(f"unknown variable {name}")
            pieces[name] = val if isinstance(val, ExactPoly) else ExactPoly.const(_frac(val), ())
        keep = tuple(v for v in self.vars if v not in pieces)
        result = ExactPoly(keep)
        for exp, c in self.terms.items():
            term = ExactPoly.const(c, keep)
            mono = {}
            for k, v in enumerate(self.vars):
                if exp[k]:
                    if v in pieces:
                        term = term * pieces[v] ** exp[k]
                    else:
                        mono[v] = exp[k]
            if mono:
                term = term * ExactPoly(keep, {tuple(mono.get(v, 0) for v in keep): 1})
            result = result + term
        return result

    def __call__(self, *args, **kwargs):
        """Exact evaluation when every variable is bound to a rational, else float."""
        if args:
            if len(args) != len(self.vars):
                raise PolynomialError(f"expected {len(self.vars)} values")
            kwargs = dict(zip(self.vars, args))
        exact = all(isinstance(v, (int, Fraction)) for v in kwargs.values())
        total = Fraction(0) if exact else 0.0
        for exp, c in self.terms.items():
            t = c if exact else float(c)
            for k, v in enumerate(self.vars):
                if exp[k]:
                    t = t * kwargs[v] ** exp[k]
            total = total + t
        return total

    def numeric(self):
        """Float evaluator ``f(*arrays)`` broadcasting over numpy arrays, variables in order."""
        import numpy as np

        exps = np.array(list(self.terms), dtype=int).reshape(-1, len(self.vars))
        coefs = np.array([float(c) for c in self.terms.values()])

        def f(*xs):
            xs = [np.asarray(x, dtype=float) for x in xs]
            total = np.zeros(np.broadcast(*xs).shape) if xs else 0.0
            for e, c in zip(exps, coefs):
                t = c
                for k, x in enumerate(xs):
                    if e[k]:
                        t = t * x ** int(e[k])
                total = total + t
            return total[()] if isinstance(total, np.ndarray) and total.ndim == 0 else total

        return f

    def content(self) -> Fraction:
        """Positive rational ``c`` such that ``self / c`` has coprime integer coefficients."""
        from math import gcd, lcm

        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    # text ------------------------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"ExactPoly({self.vars!r}, {format_poly(self)!r})"


def _term_order(vars, exp):
    return (-sum(exp), tuple(-e for e in exp))


def format_poly(p: ExactPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for exp in sorted(p.terms, key=lambda e: _term_order(p.vars, e)):
        c = p.terms[exp]
        mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in zip(p.vars, exp) if e)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialError(f"cannot parse {text[pos:]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("var", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def parse(text: str, vars: Sequence[str] | None = None) -> ExactPoly:
    """Parse the text format; ``vars`` fixes the variable order."""
    tokens = _tokenize(text)
    names = [t[1] for t in tokens if t[0] == "var"]
    if vars is None:
        seen = []
        for n in names:
            if n not in seen:
                seen.append(n)
        vars = tuple(seen)
    else:
        vars = tuple(vars)
        extra = set(names) - set(vars)
        if extra:
            raise PolynomialError(f"unknown variables {sorted(extra)}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        if pos >= len(tokens):
            raise PolynomialError(f"unexpected end of input in {text!r}")
        pos += 1
        return tokens[pos - 1]

    def expr():
        node = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term():
        node = factor()
        while True:
            kind, val = peek()
            if (kind, val) == ("op", "*"):
                take()
                node = node * factor()
            elif (kind, val) == ("op", "/"):
                take()
                d = factor()
                if not d.is_constant():
                    raise PolynomialError("division only by constants")
                node = node / d.constant_value()
            elif kind in ("num", "var") or (kind, val) == ("op", "("):
                node = node * factor()
            else:
                return node

    def factor():
        kind, val = peek()
        if (kind, val) == ("op", "-"):
            take()
            return -factor()
        if (kind, val) == ("op", "+"):
            take()
            return factor()
        node = base()
        if peek() == ("op", "^"):
            take()
            k, e = take()
            if k != "num":
                raise PolynomialError("exponent must be a non-negative integer")
            node = node ** e
        return node

    def base():
        kind, val = take() if pos < len(tokens) else (None, None)
        if kind == "num":
            return ExactPoly.const(val, vars)
        if kind == "var":
            return ExactPoly.var(val, vars)
        if (kind, val) == ("op", "("):
            node = expr()
            if take() != ("op", ")"):
                raise PolynomialError("unbalanced parentheses")
            return node
        raise PolynomialError(f"unexpected token {val!r} in {text!r}")

    if not tokens:
        raise PolynomialError("empty polynomial text")
    result = expr()
    if pos != len(tokens):
        raise PolynomialError(f"trailing input in {text!r}")
    return result


# resultants ---------------------------------------------------------------------


def sylvester_matrix(p: ExactPoly, q: ExactPoly, var: str) -> list:
    p, q = p._unify(q)
    if var not in p.vars:
        raise DegeneracyError(f"{var} does not occur")
    m, n = p.degree(var), q.degree(var)
    if m < 0 or n < 0:
        raise DegeneracyError("zero polynomial has no resultant")
    if m == 0 and n == 0:
        raise DegeneracyError(f"both polynomials are free of {var}")
    pc = p.coeffs_in(var)[::-1]
    qc = q.coeffs_in(var)[::-1]
    zero = ExactPoly(p.vars)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def bareiss_det(matrix: list) -> ExactPoly:
    """Fraction-free determinant of a square matrix of ExactPoly entries."""
    a = [list(r) for r in matrix]
    n = len(a)
    if n == 0:
        raise PolynomialError("empty matrix")
    sign = 1
    prev = ExactPoly.const(1, a[0][0].vars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return ExactPoly(a[0][0].vars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev) if not num.is_zero() else num
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(p: ExactPoly, q: ExactPoly, var: str) -> ExactPoly:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``var``."""
    p, q = p._unify(q)
    m, n = p.degree(var), q.degree(var)
    if m < 0 or n < 0:
        raise DegeneracyError("zero polynomial in the elimination variable")
    if m == 0:
        return p.coeffs_in(var)[0] ** n if var in p.vars else p ** n
    if n == 0:
        return q.coeffs_in(var)[0] ** m
    res = bareiss_det(sylvester_matrix(p, q, var))
    k = p.vars.index(var)
    if any(e[k] for e in res.terms):
        raise PolynomialError("resultant still depends on the eliminated variable")
    rest = tuple(v for v in p.vars if v != var)
    return res.with_vars(rest)


# univariate helpers and Sturm chains ---------------------------------------------


def _trim(c: list) -> list:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _polydivmod(a: list, b: list):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r = _trim(r)
    return _trim(q), r


def _polygcd(a: list, b: list) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _polydivmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _deriv(c: list) -> list:
    return [c[i] * i for i in range(1, len(c))]


def _horner(c: list, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def squarefree_part(c: list) -> list:
    c = _trim(c)
    if len(c) <= 1:
        return c
    g = _polygcd(c, _deriv(c))
    q, r = _polydivmod(c, g)
    return q


def sturm_chain(p: ExactPoly) -> list:
    """Sturm chain of the square-free part of a univariate polynomial."""
    c = squarefree_part([_frac(x) for x in p.univariate_coeffs()])
    if not c:
        raise PolynomialError("Sturm chain of the zero polynomial")
    chain = [c, _deriv(c)]
    while _trim(chain[-1]):
        _, r = _polydivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-x for x in r])
    return [x for x in chain if _trim(x)]


def _one_sided_sign(c: list, x: Fraction, side: int) -> int:
    """Sign of the polynomial immediately right (side=+1) or left (-1) of ``x``."""
    k = 0
    d = list(c)
    while d:
        v = _horner(d, x)
        if v:
            s = 1 if v > 0 else -1
            return s * (side ** k)
        d = _deriv(d)
        k += 1
    return 0


def _variations(signs: Iterable[int]) -> int:
    s = [x for x in signs if x]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def sturm_count(p: ExactPoly, a, b) -> int:
    """Number of distinct real roots of ``p`` in the open interval ``(a, b)``.

    Endpoint roots are handled exactly by evaluating the chain one-sidedly
    (sign of the first non-vanishing derivative), so no perturbation of the
    interval is required.
    """
    a, b = _frac(a), _frac(b)
    if not a < b:
        raise PolynomialError("need a < b")
    chain = sturm_chain(p)
    va = _variations(_one_sided_sign(c, a, +1) for c in chain)
    vb = _variations(_one_sided_sign(c, b, -1) for c in chain)
    return va - vb


def is_identity(lhs: ExactPoly, rhs: ExactPoly) -> bool:
    """Exact polynomial identity check (difference reduces to zero)."""
    return (lhs - rhs).is_zero()


# named polynomials -----------------------------------------------------------------

_NAMED_TEXT: Dict[str, Tuple[str, Tuple[str, ...]]] = {
    "zeta": (
        "-324 - 108*h - 37*h^2 - 4*h^3 + 2*(108 - 42*h + 4*h^2 + h^3)*w"
        " + (-144 + 76*h + h^2)*w^2 - 12*(h - 6)*w^3 - 12*w^4",
        ("h", "w"),
    ),
    "Psi1": (
        "2*(h^3 + 13*h^2 + 108*h + 324) - (h^3 - 2*h^2 + 48*h + 432)*w - 2*(h^2 + 4*h - 36)*w^2",
        ("h", "w"),
    ),
    "Psi2": (
        "-2*(5*h^3 + 47*h^2 - 324) + (5*h^3 + 62*h^2 - 228*h - 1080)*w"
        " - 8*(h^2 - 23*h - 63)*w^2 - 36*(h + 2)*w^3",
        ("h", "w"),
    ),
    "psi": (
        "2*(11*h^4 + 119*h^3 + 714*h^2 + 2592*h + 3888)"
        " - (11*h^4 + 16*h^3 + 32*h^2 + 2304*h + 7776)*w"
        " - 6*(3*h^3 + 26*h^2 - 16*h - 432)*w^2 + 8*(h^2 + 4*h - 36)*w^3",
        ("h", "w"),
    ),
    "chi1": ("-21975 + 14660*w - 1841*w^2 - 912*w^3 + 114*w^4", ("w",)),
    "chi2": ("-170856 - 4036*h - 401*h^2 + 304*h^3 + 38*h^4", ("h",)),
    "l1": ("1 + (h + 4)/6", ("h",)),
    "l2": ("3 + h/2", ("h",)),
    # numerator of the Riccati right-hand side and its denominator 3h(h+4)
    "riccati_num": ("-2*w^2 + 2*(h + 6)*w - 2*(2*h + 9)", ("h", "w")),
    "riccati_den": ("3*h*(h + 4)", ("h",)),
    # closed-form second derivative numerator over 9 h^2 (h+4)^2
    "w2_num": ("-2*(6 + h - 2*w)*(-2*h - 6*w + h*w + 2*w^2)", ("h", "w")),
}


@lru_cache(maxsize=None)
def named_poly(name: str) -> ExactPoly:
    """The registered polynomial ``name`` as an ExactPoly."""
    try:
        text, vars = _NAMED_TEXT[name]
    except KeyError:
        raise KeyError(f"unknown polynomial {name!r}; known: {sorted(_NAMED_TEXT)}") from None
    return parse(text, vars)


def named_value(name: str, **point):
    """Evaluate a named polynomial exactly (rationals) or in floating point."""
    p = named_poly(name)
    missing = [v for v in p.vars if v not in point]
    if missing:
        raise PolynomialError(f"missing values for {missing}")
    return p(**{v: point[v] for v in p.vars})


def registered_names() -> Tuple[str, ...]:
    return tuple(sorted(_NAMED_TEXT))


# exact identities ----------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityRecord:
    name: str
    statement: str
    holds: bool
    difference: str  # "0" when the identity holds


def _hw(name):
    return named_poly(name).with_vars(("h", "w"))


def _line(name):
    return named_poly(name).with_vars(("h",))


def _identity_table():
    """(name, statement, lhs builder, rhs text, rhs vars)."""
    zeta, psi1, psi2, psi = _hw("zeta"), _hw("Psi1"), _hw("Psi2"), _hw("psi")
    l1, l2 = _line("l1"), _line("l2")
    zh, zw = zeta.diff("h"), zeta.diff("w")
    chi1, chi2 = named_poly("chi1"), named_poly("chi2")
    return [
        ("res_zeta_h", "Res_h(zeta_h, zeta_w) = -1024 (w-3)^2 (w-2) (w-1)^2 chi1(w)",
         lambda: resultant(zh, zw, "h"),
         lambda: parse("-1024*(w-3)^2*(w-2)*(w-1)^2", ("w",)) * chi1),
        ("res_zeta_w", "Res_w(zeta_h, zeta_w) = -6144 h^2 (h+2) (h+4)^2 chi2(h)",
         lambda: resultant(zh, zw, "w"),
         lambda: parse("-6144*h^2*(h+2)*(h+4)^2", ("h",)) * chi2),
        ("res_Psi1_Psi1w", "Res_h(Psi1, dPsi1/dw) = -746496 (w-3)^2 (w-1)^2 (69 - 20w + 5w^2)",
         lambda: resultant(psi1, psi1.diff("w"), "h"),
         lambda: parse("-746496*(w-3)^2*(w-1)^2*(69 - 20*w + 5*w^2)", ("w",))),
        ("res_psi_Psi1", "Res_w(psi, Psi1) = -466560 h^5 (h+4)^5 (h^2 + 4h - 36)",
         lambda: resultant(psi, psi1, "w"),
         lambda: parse("-466560*h^5*(h+4)^5*(h^2 + 4*h - 36)", ("h",))),
        ("chi1_prime", "chi1'(w) = 2 (w-2) (228w^2 - 912w - 3665)",
         lambda: chi1.diff("w"), lambda: parse("2*(w-2)*(228*w^2 - 912*w - 3665)", ("w",))),
        ("chi2_prime", "chi2'(h) = 2 (h+2) (76h^2 + 304h - 1009)",
         lambda: chi2.diff("h"), lambda: parse("2*(h+2)*(76*h^2 + 304*h - 1009)", ("h",))),
        ("zeta_at_-4", "zeta(-4, w) = -12 (w-1)^2 (19 - 8w + w^2)",
         lambda: zeta.subs(h=-4), lambda: parse("-12*(w-1)^2*(19 - 8*w + w^2)", ("w",))),
        ("zeta_at_0", "zeta(0, w) = -12 (w-3)^2 (w^2 + 3)",
         lambda: zeta.subs(h=0), lambda: parse("-12*(w-3)^2*(w^2 + 3)", ("w",))),
        ("zeta_at_w1", "zeta(h, 1) = -2 (4+h)^2 (6+h)",
         lambda: zeta.subs(w=1), lambda: parse("-2*(4+h)^2*(6+h)", ("h",))),
        ("zeta_at_w3", "zeta(h, 3) = 2 h^2 (h-2)",
         lambda: zeta.subs(w=3), lambda: parse("2*h^2*(h-2)", ("h",))),
        ("Psi1_on_l1", "Psi1(h, l1(h)) = -2 (h-9) (h+4)^3 / 9",
         lambda: psi1.subs(w=l1), lambda: parse("-2*(h-9)*(h+4)^3/9", ("h",))),
        ("Psi1_on_l2", "Psi1(h, l2(h)) = -h^2 (h+4)^2",
         lambda: psi1.subs(w=l2), lambda: parse("-h^2*(h+4)^2", ("h",))),
        ("Psi2_at_w1", "Psi2(h, 1) = -5 h (h+4)^2",
         lambda: psi2.subs(w=1), lambda: parse("-5*h*(h+4)^2", ("h",))),
        ("Psi2_on_l1", "Psi2(h, l1(h)) = 4 (h-3) (h+4)^3 / 9",
         lambda: psi2.subs(w=l1), lambda: parse("4*(h-3)*(h+4)^3/9", ("h",))),
        ("Psi2_on_l2", "Psi2(h, l2(h)) = -4 h^2 (h+4)^2",
         lambda: psi2.subs(w=l2), lambda: parse("-4*h^2*(h+4)^2", ("h",))),
        ("Psi2_at_w3", "Psi2(h, 3) = 5 h^2 (h+4)",
         lambda: psi2.subs(w=3), lambda: parse("5*h^2*(h+4)", ("h",))),
        ("Psi2_at_-2", "Psi2(-2, w) = 8 (44 - 52w + 13w^2)",
         lambda: psi2.subs(h=-2), lambda: parse("8*(44 - 52*w + 13*w^2)", ("w",))),
    ]


def identity_names() -> Tuple[str, ...]:
    return tuple(row[0] for row in _identity_table())


def verify_identity(name: str) -> IdentityRecord:
    for n, statement, lhs, rhs in _identity_table():
        if n == name:
            diff = lhs() - rhs()
            return IdentityRecord(n, statement, diff.is_zero(), format_poly(diff) if not diff.is_zero() else "0")
    raise KeyError(f"unknown identity {name!r}")


def verify_identities() -> list:
    """Every registered identity, checked by exact subtraction."""
    return [verify_identity(n) for n in identity_names()]


@dataclass(frozen=True)
class CriticalPointCheck:
    gradient_vanishes: bool  # zeta_h = zeta_w = 0 at (-2, 2)
    chi1_roots: int  # distinct roots of chi1 in (1, 3)
    chi2_roots: int  # distinct roots of chi2 in (-4, 0)
    w_factor_roots: int  # roots in (1, 3) of the full w-resultant
    h_factor_roots: int  # roots in (-4, 0) of the full h-resultant
    minimum: Fraction  # zeta(-2, 2)

    @property
    def unique(self) -> bool:
        return self.gradient_vanishes and self.w_factor_roots == 1 and self.h_factor_roots == 1


def zeta_critical_points() -> CriticalPointCheck:
    """Uniqueness of the interior critical point of zeta on (-4,0) x (1,3).

    Any interior critical point projects onto a root of each resultant; the
    only roots in the open intervals are w = 2 and h = -2.
    """
    zeta = _hw("zeta")
    zh, zw = zeta.diff("h"), zeta.diff("w")
    grad = zh(-2, 2) == 0 and zw(-2, 2) == 0
    rw = resultant(zh, zw, "h")
    rh = resultant(zh, zw, "w")
    return CriticalPointCheck(
        grad,
        sturm_count(named_poly("chi1"), 1, 3),
        sturm_count(named_poly("chi2"), -4, 0),
        sturm_count(rw, 1, 3),
        sturm_count(rh, -4, 0),
        zeta(-2, 2),
    )
