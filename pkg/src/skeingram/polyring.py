"""Sparse integer polynomials in the five curve variables d, z, x, y, w.

Monomials are packed into a single Python int so that multiplying two
monomials is one integer addition and comparing them is one integer
comparison.  Each of the six 16-bit fields (total degree, then the
exponents of d, z, x, y, w) keeps bit 15 free as a borrow guard, which
turns monomial divisibility into a single subtraction and mask test.
The packed value orders monomials by graded lexicographic order with
d > z > x > y > w.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

VARIABLES = ("d", "z", "x", "y", "w")
_NVARS = len(VARIABLES)
_WIDTH = 16
_FIELD = (1 << _WIDTH) - 1
_MAX_EXP = 1 << (_WIDTH - 1)
# field 0 (lowest) is w, field 4 is d, field 5 (highest) is the total degree
_GUARD = sum(1 << (_WIDTH * k + _WIDTH - 1) for k in range(_NVARS + 1))
_VAR_INDEX = {v: i for i, v in enumerate(VARIABLES)}


class NotDivisible(ArithmeticError):
    """Raised by :meth:`Polynomial.exact_div` when the quotient is not a polynomial."""


def _pack(exps: Sequence[int]) -> int:
    if len(exps) != _NVARS:
        raise ValueError(f"expected {_NVARS} exponents, got {len(exps)}")
    key = 0
    total = 0
    for e in exps:
        if e < 0 or e >= _MAX_EXP:
            raise ValueError(f"exponent {e} out of range")
        key = (key << _WIDTH) | e
        total += e
    if total >= _MAX_EXP:
        raise ValueError("total degree out of range")
    return (total << (_WIDTH * _NVARS)) | key


def _unpack(key: int) -> tuple[int, ...]:
    return tuple((key >> (_WIDTH * (_NVARS - 1 - i))) & _FIELD for i in range(_NVARS))


def _mono_div(num: int, den: int) -> int | None:
    diff = (num | _GUARD) - den
    if diff & _GUARD != _GUARD:
        return None
    return diff ^ _GUARD


class Polynomial:
    """Immutable sparse polynomial with integer coefficients.

    Construct with :meth:`var`, :meth:`const` or :meth:`from_terms`; plain
    ints are accepted wherever a polynomial operand is expected.

    >>> d, z = Polynomial.var("d"), Polynomial.var("z")
    >>> (d + z) * (d - z)
    d^2 - z^2
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        # terms maps packed monomial -> nonzero coefficient; trusted, not copied
        self._t: dict[int, int] = terms if terms is not None else {}
        self._hash: int | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def var(cls, name: str, power: int = 1) -> Polynomial:
        exps = [0] * _NVARS
        exps[_VAR_INDEX[name]] = power
        return cls({_pack(exps): 1})

    @classmethod
    def const(cls, c: int) -> Polynomial:
        return cls({0: c}) if c else cls()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, Sequence[int]]]) -> Polynomial:
        acc: dict[int, int] = {}
        for c, exps in terms:
            k = _pack(exps)
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return cls(acc)

    @classmethod
    def from_json(cls, data: Sequence) -> Polynomial:
        return cls.from_terms((int(c), tuple(e)) for c, e in data)

    # -- inspection -------------------------------------------------------

    def terms(self) -> list[tuple[int, tuple[int, ...]]]:
        """Canonical term list, graded-lex descending."""
        return [(self._t[k], _unpack(k)) for k in sorted(self._t, reverse=True)]

    def to_json(self) -> list:
        return [[c, list(e)] for c, e in self.terms()]

    def is_zero(self) -> bool:
        return not self._t

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def leading(self) -> tuple[int, tuple[int, ...]]:
        k = max(self._t)
        return self._t[k], _unpack(k)

    def total_degree(self) -> int:
        if not self._t:
            return -1
        return max(self._t) >> (_WIDTH * _NVARS)

    def degree(self, name: str) -> int:
        if not self._t:
            return -1
        shift = _WIDTH * (_NVARS - 1 - _VAR_INDEX[name])
        return max((k >> shift) & _FIELD for k in self._t)

    def variables(self) -> set[str]:
        used = set()
        for k in self._t:
            for v, e in zip(VARIABLES, _unpack(k)):
                if e:
                    used.add(v)
        return used

    def constant_value(self) -> int | None:
        """The integer value if this polynomial is constant, else None."""
        if not self._t:
            return 0
        if len(self._t) == 1 and 0 in self._t:
            return self._t[0]
        return None

    def content(self) -> int:
        g = 0
        for c in self._t.values():
            g = gcd(g, c)
        return g

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._t) < len(other._t):
            small, big = self._t, other._t
        else:
            small, big = other._t, self._t
        out = dict(big)
        for k, c in small.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                del out[k]
        return Polynomial(out)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if not a or not b:
            return Polynomial()
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            (ka, ca), = a.items()
            return Polynomial({ka + kb: ca * cb for kb, cb in b.items()})
        out: dict[int, int] = {}
        get = out.get
        bitems = list(b.items())
        for ka, ca in a.items():
            for kb, cb in bitems:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Polynomial({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Polynomial:
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c: int) -> Polynomial:
        if not c:
            return Polynomial()
        return Polynomial({k: v * c for k, v in self._t.items()})

    def exact_div(self, other) -> Polynomial:
        """Quotient ``q`` with ``other * q == self``; raises :class:`NotDivisible`.

        Leading-term reduction under the graded-lex order.  A heap of
        remainder monomials gives the current leading term in log time.
        """
        q = self._coerce(other)
        if not q._t:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self._t:
            return Polynomial()
        qt = q._t
        if len(qt) == 1:
            (kq, cq), = qt.items()
            out = {}
            for k, c in self._t.items():
                m = _mono_div(k, kq)
                if m is None or c % cq:
                    raise NotDivisible
                out[m] = c // cq
            return Polynomial(out)
        lk = max(qt)
        lc = qt[lk]
        if self.total_degree() < q.total_degree():
            raise NotDivisible
        qitems = list(qt.items())
        rem = dict(self._t)
        heap = [-k for k in rem]
        heapq.heapify(heap)
        quot: dict[int, int] = {}
        push, pop = heapq.heappush, heapq.heappop
        while heap:
            k = -pop(heap)
            c = rem.get(k)
            if c is None:
                continue
            m = _mono_div(k, lk)
            if m is None or c % lc:
                raise NotDivisible
            t = c // lc
            quot[m] = t
            for kk, cc in qitems:
                key = m + kk
                old = rem.get(key)
                if old is None:
                    rem[key] = -t * cc
                    push(heap, -key)
                else:
                    v = old - t * cc
                    if v:
                        rem[key] = v
                    else:
                        del rem[key]
        return Polynomial(quot)

    def divides(self, other) -> bool:
        try:
            self._coerce(other).exact_div(self)
        except NotDivisible:
            return False
        return True

    # -- substitution / evaluation -----------------------------------------

    def subs(self, **values) -> Polynomial:
        """Substitute polynomials (or ints) for variables."""
        repl = {_VAR_INDEX[k]: Polynomial._coerce(v) for k, v in values.items()}
        cache: dict[tuple[int, int], Polynomial] = {}
        out = Polynomial()
        for k, c in self._t.items():
            exps = list(_unpack(k))
            factor = Polynomial.const(c)
            for i, p in repl.items():
                e = exps[i]
                exps[i] = 0
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = p ** e
                    factor = factor * cache[key]
            out = out + factor * Polynomial({_pack(exps): 1})
        return out

    def evaluate(self, **values) -> int | Fraction:
        """Evaluate at numeric values for every variable present."""
        total = 0
        for k, c in self._t.items():
            term = c
            for v, e in zip(VARIABLES, _unpack(k)):
                if e:
                    term *= values[v] ** e
            total += term
        return total

    def univariate_coeffs(self, name: str) -> list[int]:
        """Coefficients low-to-high; requires the polynomial to involve only ``name``."""
        if self.variables() - {name}:
            raise ValueError(f"not univariate in {name}")
        i = _VAR_INDEX[name]
        deg = max(0, self.degree(name))
        coeffs = [0] * (deg + 1)
        for c, e in self.terms():
            coeffs[e[i]] += c
        return coeffs

    @classmethod
    def from_univariate(cls, coeffs: Sequence[int], name: str) -> Polynomial:
        i = _VAR_INDEX[name]
        terms = []
        for e, c in enumerate(coeffs):
            if c:
                exps = [0] * _NVARS
                exps[i] = e
                terms.append((c, exps))
        return cls.from_terms(terms)

    def coefficients_in(self, name: str) -> dict[int, Polynomial]:
        """Split as a polynomial in ``name`` with coefficients in the other variables."""
        shift = _WIDTH * (_NVARS - 1 - _VAR_INDEX[name])
        total_shift = _WIDTH * _NVARS
        out: dict[int, dict[int, int]] = {}
        for k, c in self._t.items():
            e = (k >> shift) & _FIELD
            rest = k - (e << shift) - (e << total_shift)
            out.setdefault(e, {})[rest] = c
        return {e: Polynomial(t) for e, t in out.items()}

    def coefficients_in_all_but(self, keep: str) -> list[Polynomial]:
        """Coefficients (polynomials in ``keep``) when viewed as a polynomial in the other variables."""
        shift = _WIDTH * (_NVARS - 1 - _VAR_INDEX[keep])
        total_shift = _WIDTH * _NVARS
        groups: dict[int, dict[int, int]] = {}
        for k, c in self._t.items():
            e = (k >> shift) & _FIELD
            rest = k - (e << shift) - (e << total_shift)
            groups.setdefault(rest, {})[(e << shift) | (e << total_shift)] = c
        return [Polynomial(t) for t in groups.values()]

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __repr__(self) -> str:
        return str(self)

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for i, (c, exps) in enumerate(self.terms()):
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(VARIABLES, exps) if e
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


def parse_polynomial(text: str) -> Polynomial:
    """Parse expressions like ``d^2 - 2*x*y + 3`` (``**`` also accepted)."""
    import ast

    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node) -> Polynomial:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Polynomial.const(node.value)
        if isinstance(node, ast.Name) and node.id in _VAR_INDEX:
            return Polynomial.var(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return ev(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise ValueError("exponents must be integer literals")
                return ev(node.left) ** e.value
            l, r = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return l + r
            if isinstance(node.op, ast.Sub):
                return l - r
            if isinstance(node.op, ast.Mult):
                return l * r
        raise ValueError(f"cannot parse polynomial: {text!r}")

    return ev(tree)


ZERO = Polynomial()
ONE = Polynomial.const(1)
d = Polynomial.var("d")
z = Polynomial.var("z")
x = Polynomial.var("x")
y = Polynomial.var("y")
w = Polynomial.var("w")


def poly_arith(op: str, p: Polynomial, q: Polynomial) -> Polynomial:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def try_exact_divide(p: Polynomial, q: Polynomial) -> Polynomial | None:
    """``p / q`` if it is a polynomial, else None."""
    try:
        return p.exact_div(q)
    except NotDivisible:
        return None


# -- Chebyshev families ----------------------------------------------------

_cheb_cache: dict[tuple[str, int, str], Polynomial] = {}


def _recurrence(kind: str, k: int, v: str, first: Polynomial) -> Polynomial:
    key = (kind, k, v)
    if key in _cheb_cache:
        return _cheb_cache[key]
    var = Polynomial.var(v)
    prev, cur = first, var
    if k == 0:
        return first
    for _ in range(k - 1):
        prev, cur = cur, var * cur - prev
    _cheb_cache[key] = cur
    return cur


def chebyshev_T(k: int, v: str = "d") -> Polynomial:
    """First kind with the ``T_0 = 2`` normalisation: T_{k+1} = v*T_k - T_{k-1}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _recurrence("T", k, v, Polynomial.const(2))


def chebyshev_S(k: int, v: str = "z") -> Polynomial:
    """Second kind: S_0 = 1, S_1 = v, S_{k+1} = v*S_k - S_{k-1}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if v not in ("d", "z", "w"):
        raise ValueError("second-kind Chebyshev is defined here in d, z or w")
    return _recurrence("S", k, v, Polynomial.const(1))


def delta(k: int) -> Polynomial:
    """The loop value sequence in d: delta(0)=1, delta(1)=d, delta(2)=d^2-1, ..."""
    return chebyshev_S(k, "d")


def delta_factorial(k: int) -> Polynomial:
    """delta(k) * delta(k-1) * ... * delta(1); the empty product for k <= 0."""
    out = ONE
    for i in range(1, k + 1):
        out = out * delta(i)
    return out


# -- univariate gcd (used to keep rational functions in d reduced) ---------


def _poly_gcd_q(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(list(a)), trim(list(b))
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] / b[-1]
            shift = len(r) - len(b)
            for i, c in enumerate(b):
                r[shift + i] -= f * c
            r.pop()
            trim(r)
        a, b = b, r
    return a


def univariate_gcd(p: Polynomial, q: Polynomial, name: str = "d") -> Polynomial:
    """Primitive gcd over Z of two polynomials in one variable, positive leading coefficient."""
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    g = _poly_gcd_q(
        [Fraction(c) for c in p.univariate_coeffs(name)],
        [Fraction(c) for c in q.univariate_coeffs(name)],
    )
    if len(g) <= 1:
        return ONE
    den = 1
    for c in g:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in g]
    cont = 0
    for c in ints:
        cont = gcd(cont, c)
    ints = [c // cont for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return Polynomial.from_univariate(ints, name)


class RationalFunction:
    """Quotient of two polynomials, kept lazily normalised.

    The denominator's leading coefficient is positive and common integer
    content is removed.  When the denominator is a polynomial in ``d`` alone
    (the only case that arises here) the common factor with the numerator is
    also cancelled, using univariate gcds in ``d``.  Equality never relies on
    normalisation: it is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, *, normalize: bool = True):
        num = Polynomial._coerce(num)
        den = Polynomial._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    def __add__(self, other):
        other = _as_rf(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return RationalFunction(self.den ** (-e), self.num ** (-e))
        return RationalFunction(self.num ** e, self.den ** e)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.divides(self.num)

    def as_polynomial(self) -> Polynomial:
        """Exact polynomial value; raises NotDivisible otherwise."""
        return self.num.exact_div(self.den)

    def subs(self, **values) -> RationalFunction:
        return RationalFunction(self.num.subs(**values), self.den.subs(**values))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Polynomial)):
            other = RationalFunction(other, normalize=False)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is by cross-multiplication

    def __repr__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num}) / ({self.den})"


def _as_rf(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    return RationalFunction(v, normalize=False)


def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return num, ONE
    if den.variables() <= {"d"}:
        c = den.constant_value()
        if c is None:
            g = den
            for coeff in num.coefficients_in_all_but("d"):
                g = univariate_gcd(g, coeff)
                if g.constant_value() is not None:
                    break
            if g.constant_value() is None:
                num = num.exact_div(g)
                den = den.exact_div(g)
    cont = gcd(num.content(), den.content())
    if den.leading()[0] < 0:
        cont = -cont
    if cont != 1:
        num = Polynomial({k: v // cont for k, v in num._t.items()})
        den = Polynomial({k: v // cont for k, v in den._t.items()})
    return num, den
