"""Truncated exact series arithmetic.

Four containers live here:

* QSeries      - univariate series in Q with half-integer exponents,
* BiSeries     - bivariate series in (Q, Q1) truncated by total degree,
* TaylorZ      - truncated Taylor polynomials in a formal z,
* LaurentTaylor- multivariate z-tables with an optional simple pole per
                 variable, whose values are QSeries.

Exponent convention: every Q-exponent is stored DOUBLED as a plain int
("exp2"), so Q^(3/2) lives at key 3 and Q^2 at key 4.  Half-integer powers
are pervasive here (theta sums carry Q^(a^2/2), the n-point weights carry
s^(1/2)), and doubling keeps the bookkeeping in integers.  Public entry
points accept either a plain int meaning a whole power of Q, or a HalfExp.

Truncation bookkeeping is honest: multiplying series known through exponents
Ta and Tb with lowest terms la and lb yields a series known through
min(Ta + lb, Tb + la), never beyond.
"""

from __future__ import annotations

from math import factorial

from ._rat import QQ, RAT_ONE, RAT_ZERO, is_rational, parse_rat, rat_str
from .cyclo import Cyclo
from .quadext import SqrtExt


class HalfExp:
    """An exponent n/2 stored as the integer n (twice the value)."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        object.__setattr__(self, "twice", int(twice))

    def __setattr__(self, name, value):
        raise AttributeError("HalfExp is immutable")

    def __add__(self, other):
        return HalfExp(self.twice + _as_exp2(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HalfExp(self.twice - _as_exp2(other))

    def __neg__(self):
        return HalfExp(-self.twice)

    def __eq__(self, other):
        try:
            return self.twice == _as_exp2(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self.twice < _as_exp2(other)

    def __le__(self, other):
        return self.twice <= _as_exp2(other)

    def __gt__(self, other):
        return self.twice > _as_exp2(other)

    def __ge__(self, other):
        return self.twice >= _as_exp2(other)

    def __hash__(self):
        return hash(("HalfExp", self.twice))

    def __repr__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def half(twice: int) -> HalfExp:
    """The exponent twice/2; half(3) is the exponent 3/2."""
    return HalfExp(twice)


def _as_exp2(order) -> int:
    """Doubled exponent from an int (whole power) or a HalfExp."""
    if isinstance(order, HalfExp):
        return order.twice
    if isinstance(order, int):
        return 2 * order
    raise TypeError(f"expected int or HalfExp, got {type(order).__name__}")


# ---------------------------------------------------------------------------
# coefficient domains


class RationalDomain:
    name = "Q"
    zero = RAT_ZERO
    one = RAT_ONE

    def coerce(self, x):
        if is_rational(x):
            return QQ(x)
        if isinstance(x, Cyclo) and x.is_rational():
            return x.rational_value()
        if isinstance(x, SqrtExt) and x.is_rational():
            return x.rational_value()
        raise TypeError(f"cannot coerce {x!r} into Q")

    def __eq__(self, other):
        return isinstance(other, RationalDomain) or getattr(other, "name", None) == self.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


QQ_DOMAIN = RationalDomain()


class CycloDomain:
    def __init__(self, m: int):
        self.m = m
        self.name = f"Q(zeta{m})"
        self.zero = Cyclo.zero(m)
        self.one = Cyclo.one(m)

    def coerce(self, x):
        if isinstance(x, Cyclo):
            if x.m != self.m:
                raise ValueError(f"conductor mismatch: {x.m} vs {self.m}")
            return x
        if is_rational(x):
            return Cyclo.from_rat(self.m, x)
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def __eq__(self, other):
        return getattr(other, "name", None) == self.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class SqrtExtDomain:
    def __init__(self, d):
        self.d = QQ(d)
        self.name = f"Q(sqrt({rat_str(self.d)}))"
        self.zero = SqrtExt(self.d, RAT_ZERO)
        self.one = SqrtExt(self.d, RAT_ONE)

    def coerce(self, x):
        if isinstance(x, SqrtExt):
            if x.d != self.d:
                raise ValueError(f"radicand mismatch: {x.d} vs {self.d}")
            return x
        if is_rational(x):
            return SqrtExt(self.d, x)
        raise TypeError(f"cannot coerce {x!r} into {self.name}")

    def __eq__(self, other):
        return getattr(other, "name", None) == self.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class TaylorDomain:
    """Truncated polynomials in z over an inner scalar domain."""

    def __init__(self, inner, z_order: int):
        self.inner = inner
        self.z_order = z_order
        self.name = f"Taylor(z^{z_order};{inner.name})"
        self.zero = TaylorZ(self, (inner.zero,) * (z_order + 1))
        self.one = TaylorZ(self, (inner.one,) + (inner.zero,) * z_order)

    def coerce(self, x):
        if isinstance(x, TaylorZ):
            if x.dom != self:
                raise ValueError(f"Taylor domain mismatch: {x.dom.name} vs {self.name}")
            return x
        c = self.inner.coerce(x)
        return TaylorZ(self, (c,) + (self.inner.zero,) * self.z_order)

    def __eq__(self, other):
        return getattr(other, "name", None) == self.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class TaylorZ:
    """A polynomial in z truncated at z^z_order, dense coefficient tuple."""

    __slots__ = ("dom", "cs")

    def __init__(self, dom: TaylorDomain, cs):
        cs = tuple(cs)
        if len(cs) != dom.z_order + 1:
            raise ValueError(f"need {dom.z_order + 1} coefficients, got {len(cs)}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("TaylorZ is immutable")

    @classmethod
    def exp_of(cls, dom: TaylorDomain, c) -> "TaylorZ":
        """exp(c*z) truncated, for a rational rate c."""
        c = QQ(c)
        cs, acc = [], RAT_ONE
        for k in range(dom.z_order + 1):
            cs.append(dom.inner.coerce(acc))
            acc = acc * c / (k + 1)
        return cls(dom, cs)

    @classmethod
    def variable(cls, dom: TaylorDomain) -> "TaylorZ":
        cs = [dom.inner.zero] * (dom.z_order + 1)
        if dom.z_order >= 1:
            cs[1] = dom.inner.one
        return cls(dom, cs)

    def coeff(self, k: int):
        return self.cs[k]

    @property
    def constant_term(self):
        return self.cs[0]

    def _coerce(self, other):
        if isinstance(other, TaylorZ):
            if other.dom != self.dom:
                raise ValueError("Taylor domain mismatch")
            return other
        try:
            return self.dom.coerce(other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TaylorZ(self.dom, tuple(a + b for a, b in zip(self.cs, o.cs)))

    __radd__ = __add__

    def __neg__(self):
        return TaylorZ(self.dom, tuple(-a for a in self.cs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TaylorZ(self.dom, tuple(a - b for a, b in zip(self.cs, o.cs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.dom.z_order
        zero = self.dom.inner.zero
        out = [zero] * (n + 1)
        for i, a in enumerate(self.cs):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = o.cs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TaylorZ(self.dom, out)

    __rmul__ = __mul__

    def inverse(self) -> "TaylorZ":
        c0 = self.cs[0]
        if not c0:
            raise ZeroDivisionError("TaylorZ inverse needs a nonzero constant term")
        n = self.dom.z_order
        inv0 = self.dom.inner.one / c0
        out = [inv0]
        for k in range(1, n + 1):
            acc = self.dom.inner.zero
            for j in range(1, k + 1):
                if self.cs[j]:
                    acc = acc + self.cs[j] * out[k - j]
            out.append(-acc * inv0)
        return TaylorZ(self.dom, out)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def mul_z_power(self, k: int) -> "TaylorZ":
        """Multiply by z^k (k >= 0), truncating at the domain order."""
        n = self.dom.z_order
        zero = self.dom.inner.zero
        out = [zero] * (n + 1)
        for i in range(n + 1 - k):
            out[i + k] = self.cs[i]
        return TaylorZ(self.dom, out)

    def log(self) -> "TaylorZ":
        """log of a series with constant term exactly 1 (finite sum in z)."""
        if self.cs[0] != self.dom.inner.one:
            raise ValueError("TaylorZ log needs constant term 1")
        u = self - self.dom.one
        acc = self.dom.zero
        p = u
        for m in range(1, self.dom.z_order + 1):
            term = p / m
            acc = acc + (term if m % 2 == 1 else -term)
            if m < self.dom.z_order:
                p = p * u
        return acc

    def __bool__(self):
        return any(self.cs)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.cs == o.cs

    def __hash__(self):
        return hash((self.dom.name, self.cs))

    def __repr__(self):
        bits = []
        for k, c in enumerate(self.cs):
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            bits.append(f"{c!r}{'*' if mono and k else ''}{mono}" if k else repr(c))
        return " + ".join(bits) if bits else "0"


# ---------------------------------------------------------------------------
# univariate Q-series


class QSeries:
    """Series in Q, exponents doubled, exact coefficients, hard truncation.

    terms maps doubled exponent -> nonzero coefficient, with every key at
    most trunc2.  Instances are immutable by convention; operations return
    fresh objects.
    """

    __slots__ = ("dom", "trunc2", "terms")

    def __init__(self, dom, trunc2: int, terms: dict):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "trunc2", int(trunc2))
        object.__setattr__(self, "terms", {e: c for e, c in terms.items() if c})
        if any(e > self.trunc2 for e in self.terms):
            raise ValueError("term exponent beyond the truncation order")

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dom, order) -> "QSeries":
        return cls(dom, _as_exp2(order), {})

    @classmethod
    def one(cls, dom, order) -> "QSeries":
        return cls(dom, _as_exp2(order), {0: dom.one})

    @classmethod
    def monomial(cls, dom, coeff, exp, order) -> "QSeries":
        return cls(dom, _as_exp2(order), {_as_exp2(exp): dom.coerce(coeff)})

    # -- inspection --------------------------------------------------------

    def low2(self):
        """Lowest stored doubled exponent, or None for the zero series."""
        return min(self.terms) if self.terms else None

    def _low_eff(self) -> int:
        return min(self.terms) if self.terms else self.trunc2 + 1

    def coeff(self, exp):
        """Coefficient of Q^exp (int or HalfExp)."""
        return self.terms.get(_as_exp2(exp), self.dom.zero)

    def coeff2(self, exp2: int):
        return self.terms.get(exp2, self.dom.zero)

    def __bool__(self):
        return bool(self.terms)

    def is_known_through(self, order) -> bool:
        return self.trunc2 >= _as_exp2(order)

    # -- ring operations ---------------------------------------------------

    def _check_dom(self, other: "QSeries"):
        if self.dom != other.dom:
            raise ValueError(f"domain mismatch: {self.dom.name} vs {other.dom.name}")

    def __add__(self, other):
        if isinstance(other, QSeries):
            self._check_dom(other)
            t2 = min(self.trunc2, other.trunc2)
            out = {e: c for e, c in self.terms.items() if e <= t2}
            for e, c in other.terms.items():
                if e <= t2:
                    out[e] = out.get(e, self.dom.zero) + c
            return QSeries(self.dom, t2, out)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self.terms)
        out[0] = out.get(0, self.dom.zero) + c
        return QSeries(self.dom, self.trunc2, out)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.dom, self.trunc2, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, QSeries):
            return self + (-other)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self.terms)
        out[0] = out.get(0, self.dom.zero) - c
        return QSeries(self.dom, self.trunc2, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QSeries):
            self._check_dom(other)
            t2 = min(self.trunc2 + other._low_eff(), other.trunc2 + self._low_eff())
            out = {}
            zero = self.dom.zero
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = e1 + e2
                    if e <= t2:
                        out[e] = out.get(e, zero) + c1 * c2
            return QSeries(self.dom, t2, out)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if not c:
            return QSeries.zero(self.dom, HalfExp(self.trunc2))
        return QSeries(self.dom, self.trunc2, {e: v * c for e, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return qdiv(self, other)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return QSeries(self.dom, self.trunc2, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QSeries.one(self.dom, HalfExp(self.trunc2))
        base = self
        e = n
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # -- reshaping ---------------------------------------------------------

    def truncated(self, order) -> "QSeries":
        t2 = _as_exp2(order)
        if t2 > self.trunc2:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.dom, t2, {e: c for e, c in self.terms.items() if e <= t2})

    def shifted(self, exp) -> "QSeries":
        """Multiply by Q^exp (exact, shifts the truncation window too)."""
        d2 = _as_exp2(exp)
        return QSeries(self.dom, self.trunc2 + d2, {e + d2: c for e, c in self.terms.items()})

    def substituted_power(self, d: int) -> "QSeries":
        """Replace Q by Q^d (d >= 1)."""
        return QSeries(self.dom, self.trunc2 * d, {e * d: c for e, c in self.terms.items()})

    def map_coeffs(self, f, dom=None) -> "QSeries":
        dom = dom or self.dom
        return QSeries(dom, self.trunc2, {e: f(c) for e, c in self.terms.items()})

    # -- comparison and presentation ----------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.dom == other.dom and self.trunc2 == other.trunc2 and self.terms == other.terms

    def __hash__(self):
        return hash((self.dom.name, self.trunc2, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def agrees_with(self, other: "QSeries", order=None) -> bool:
        """Equality of coefficients through the given order (or the shared one)."""
        t2 = min(self.trunc2, other.trunc2) if order is None else _as_exp2(order)
        if self.trunc2 < t2 or other.trunc2 < t2:
            raise ValueError("comparison order exceeds a truncation order")
        for e in set(self.terms) | set(other.terms):
            if e <= t2 and self.coeff2(e) != other.coeff2(e):
                return False
        return True

    def __repr__(self):
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "" if e == 0 else ("Q" if e == 2 else f"Q^{HalfExp(e)!r}")
            cs = repr(c) if not isinstance(c, type(RAT_ZERO)) else rat_str(c)
            bits.append(cs if not mono else f"({cs})*{mono}")
        body = " + ".join(bits) if bits else "0"
        return f"{body} + O(Q^{HalfExp(self.trunc2 + 1)!r})"

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "trunc2": self.trunc2,
            "terms": [
                {"exp2": e, "coeff": encode_coeff(self.terms[e])} for e in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json(cls, obj, dom) -> "QSeries":
        terms = {t["exp2"]: decode_coeff(t["coeff"], dom) for t in obj["terms"]}
        return cls(dom, obj["trunc2"], terms)


def qdiv(a: QSeries, b: QSeries) -> QSeries:
    """Series division a/b; the lowest term of b must be invertible."""
    a._check_dom(b)
    vb = b.low2()
    if vb is None:
        raise ZeroDivisionError("division by a series that is zero to its truncation order")
    c = b.terms[vb]
    cinv = a.dom.one / c
    va = a._low_eff()
    t2 = min(a.trunc2 - vb, b.trunc2 - 2 * vb + va)
    if not a.terms:
        return QSeries(a.dom, t2, {})
    rem = dict(a.terms)
    out = {}
    zero = a.dom.zero
    for e in range(va - vb, t2 + 1):
        ce = rem.get(e + vb, zero)
        if ce:
            q = ce * cinv
            out[e] = q
            for k, v in b.terms.items():
                if k == vb:
                    continue
                kk = e + k
                if kk <= t2 + vb:
                    rem[kk] = rem.get(kk, zero) - q * v
    return QSeries(a.dom, t2, out)


def qlog(a: QSeries) -> QSeries:
    """log of a series with constant term exactly 1."""
    if a.coeff2(0) != a.dom.one:
        raise ValueError("qlog needs constant term 1")
    u = a - a.dom.one
    if not u:
        return QSeries.zero(a.dom, HalfExp(a.trunc2))
    lu = u.low2()
    acc = QSeries.zero(a.dom, HalfExp(a.trunc2))
    p = u
    mmax = a.trunc2 // lu
    for m in range(1, mmax + 1):
        term = p / m
        acc = acc + (term if m % 2 == 1 else -term)
        if m < mmax:
            p = p * u
    return acc


def qexp(a: QSeries) -> QSeries:
    """exp of a series with zero constant term."""
    if a.coeff2(0):
        raise ValueError("qexp needs zero constant term")
    out = QSeries.one(a.dom, HalfExp(a.trunc2))
    if not a:
        return out
    la = a.low2()
    p = a
    mmax = a.trunc2 // la
    for m in range(1, mmax + 1):
        out = out + p / factorial(m)
        if m < mmax:
            p = p * a
    return out


def as_rational_series(a: QSeries) -> QSeries:
    """Project onto the rational-domain series, failing on any non-rational
    coefficient.  Doubles as the reality/rationality assertion for values
    computed in a cyclotomic field whose answer must be rational."""
    return a.map_coeffs(QQ_DOMAIN.coerce, QQ_DOMAIN)


def lift_series(a: QSeries, dom) -> QSeries:
    """Re-home a series into a larger coefficient domain."""
    return a.map_coeffs(dom.coerce, dom)


# ---------------------------------------------------------------------------
# bivariate (Q, Q1) series, total-degree truncation


class BiSeries:
    """Series in (Q, Q1) with doubled exponents and a shared total cutoff.

    Keys are pairs (eQ2, eQ12); every stored key satisfies eQ2 + eQ12 <=
    trunc2.  The two variables mix through products like Q1*Q, which is why
    the grading is by total degree.
    """

    __slots__ = ("dom", "trunc2", "terms")

    def __init__(self, dom, trunc2: int, terms: dict):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "trunc2", int(trunc2))
        object.__setattr__(self, "terms", {k: c for k, c in terms.items() if c})
        if any(k[0] + k[1] > self.trunc2 or k[0] < 0 or k[1] < 0 for k in self.terms):
            raise ValueError("bivariate term outside the truncation simplex")

    def __setattr__(self, name, value):
        raise AttributeError("BiSeries is immutable")

    @classmethod
    def zero(cls, dom, order) -> "BiSeries":
        return cls(dom, _as_exp2(order), {})

    @classmethod
    def one(cls, dom, order) -> "BiSeries":
        return cls(dom, _as_exp2(order), {(0, 0): dom.one})

    @classmethod
    def monomial(cls, dom, coeff, expQ, expQ1, order) -> "BiSeries":
        key = (_as_exp2(expQ), _as_exp2(expQ1))
        return cls(dom, _as_exp2(order), {key: dom.coerce(coeff)})

    def coeff(self, expQ, expQ1):
        return self.terms.get((_as_exp2(expQ), _as_exp2(expQ1)), self.dom.zero)

    def __bool__(self):
        return bool(self.terms)

    def _check_dom(self, other):
        if self.dom != other.dom:
            raise ValueError("domain mismatch")

    def __add__(self, other):
        if isinstance(other, BiSeries):
            self._check_dom(other)
            t2 = min(self.trunc2, other.trunc2)
            out = {k: c for k, c in self.terms.items() if k[0] + k[1] <= t2}
            for k, c in other.terms.items():
                if k[0] + k[1] <= t2:
                    out[k] = out.get(k, self.dom.zero) + c
            return BiSeries(self.dom, t2, out)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self.terms)
        out[(0, 0)] = out.get((0, 0), self.dom.zero) + c
        return BiSeries(self.dom, self.trunc2, out)

    __radd__ = __add__

    def __neg__(self):
        return BiSeries(self.dom, self.trunc2, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, BiSeries):
            return self + (-other)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        out = dict(self.terms)
        out[(0, 0)] = out.get((0, 0), self.dom.zero) - c
        return BiSeries(self.dom, self.trunc2, out)

    def __rsub__(self, other):
        return (-self) + other

    def _min_total(self) -> int:
        if not self.terms:
            return self.trunc2 + 1
        return min(k[0] + k[1] for k in self.terms)

    def __mul__(self, other):
        if isinstance(other, BiSeries):
            self._check_dom(other)
            t2 = min(self.trunc2 + other._min_total(), other.trunc2 + self._min_total())
            out = {}
            zero = self.dom.zero
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    ta, tb = a1 + a2, b1 + b2
                    if ta + tb <= t2:
                        key = (ta, tb)
                        out[key] = out.get(key, zero) + c1 * c2
            return BiSeries(self.dom, t2, out)
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if not c:
            return BiSeries(self.dom, self.trunc2, {})
        return BiSeries(self.dom, self.trunc2, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = BiSeries.one(self.dom, HalfExp(self.trunc2))
        base = self
        e = n
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def inverse(self) -> "BiSeries":
        c0 = self.terms.get((0, 0), self.dom.zero)
        if not c0:
            raise ZeroDivisionError("BiSeries inverse needs an invertible constant term")
        c0inv = self.dom.one / c0
        u = self * c0inv - self.dom.one
        out = BiSeries.one(self.dom, HalfExp(self.trunc2))
        if u:
            p = u
            mmax = self.trunc2 // u._min_total()
            for m in range(1, mmax + 1):
                out = out + (p if m % 2 == 0 else -p)
                if m < mmax:
                    p = p * u
        return out * c0inv

    def __truediv__(self, other):
        if isinstance(other, BiSeries):
            return self * other.inverse()
        try:
            c = self.dom.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return BiSeries(self.dom, self.trunc2, {k: v / c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.dom == other.dom and self.trunc2 == other.trunc2 and self.terms == other.terms

    def __hash__(self):
        return hash((self.dom.name, self.trunc2, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        bits = []
        for eq, e1 in sorted(self.terms):
            c = self.terms[(eq, e1)]
            mono = []
            if eq:
                mono.append("Q" if eq == 2 else f"Q^{HalfExp(eq)!r}")
            if e1:
                mono.append("Q1" if e1 == 2 else f"Q1^{HalfExp(e1)!r}")
            cs = rat_str(c) if is_rational(c) else repr(c)
            bits.append("*".join([f"({cs})"] + mono) if mono else cs)
        body = " + ".join(bits) if bits else "0"
        return f"{body} + O(total {HalfExp(self.trunc2 + 1)!r})"

    def to_json(self):
        return {
            "trunc2_total": self.trunc2,
            "terms": [
                {"expQ2": k[0], "expQ1_2": k[1], "coeff": encode_coeff(self.terms[k])}
                for k in sorted(self.terms)
            ],
        }


# ---------------------------------------------------------------------------
# multivariate Laurent-Taylor tables


class LaurentTaylor:
    """Truncated expansion in z_1..z_n whose values are QSeries.

    Each variable allows exponents from min_exp (0, or -1 when the expansion
    contains a sinh-reciprocal pole) through its truncation order.  Only the
    structure the correlation extraction needs is implemented: construction,
    addition, coefficient access, and division of all values by a QSeries.
    """

    __slots__ = ("nvars", "min_exps", "orders", "terms")

    def __init__(self, nvars: int, min_exps, orders, terms: dict):
        min_exps = tuple(min_exps)
        orders = tuple(orders)
        if len(min_exps) != nvars or len(orders) != nvars:
            raise ValueError("per-variable bounds must match the variable count")
        if any(m not in (-1, 0) for m in min_exps):
            raise ValueError("minimum exponent must be 0 or -1")
        for vec in terms:
            if len(vec) != nvars:
                raise ValueError("exponent vector arity mismatch")
            for x, m, o in zip(vec, min_exps, orders):
                if not (m <= x <= o):
                    raise ValueError(f"exponent {x} outside [{m}, {o}]")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "min_exps", min_exps)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentTaylor is immutable")

    def coeff(self, vec) -> QSeries:
        vec = tuple(vec)
        got = self.terms.get(vec)
        if got is None:
            raise KeyError(f"no term stored at z-exponents {vec}")
        return got

    def __add__(self, other):
        if not isinstance(other, LaurentTaylor):
            return NotImplemented
        if (self.nvars, self.min_exps, self.orders) != (other.nvars, other.min_exps, other.orders):
            raise ValueError("shape mismatch")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return LaurentTaylor(self.nvars, self.min_exps, self.orders, out)

    def scaled_by_inverse(self, denom: QSeries) -> "LaurentTaylor":
        """Divide every stored QSeries by denom."""
        out = {k: qdiv(v, denom) for k, v in self.terms.items()}
        return LaurentTaylor(self.nvars, self.min_exps, self.orders, out)


# ---------------------------------------------------------------------------
# coefficient (de)serialization shared by QSeries/BiSeries


def encode_coeff(c):
    if is_rational(c):
        return rat_str(c)
    if isinstance(c, Cyclo):
        return c.to_json()
    raise TypeError(f"no JSON encoding for coefficient type {type(c).__name__}")


def decode_coeff(obj, dom):
    if isinstance(obj, str):
        return dom.coerce(parse_rat(obj))
    if isinstance(obj, dict) and "m" in obj:
        return dom.coerce(Cyclo.from_json(obj))
    raise TypeError(f"cannot decode coefficient payload {obj!r}")
