"""n-point functions of t-core partitions, exact to a chosen Q-order.

Three independent routes produce the same series: the defining average
over enumerated t-cores, a theta-determinant sum over set partitions with
a free parameter Q2, and the specialization of that sum which eliminates
Q2 in favor of a marked index subset.  The module also carries the
q-deformed partition function behind those formulas (as a defining
vertex sum and as a MacMahon-type product) and the correlation-function
extraction with s_j = e^(z_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product

from tcore._rat import QQ, is_rational, rat, rat_pow, rat_str, rational_sqrt
from tcore.cyclo import Cyclo
from tcore.partitions import conjugate, enumerate_t_cores, partitions_of
from tcore.qseries import (
    QQ_DOMAIN,
    BiSeries,
    CycloDomain,
    QSeries,
    TaylorDomain,
    TaylorZ,
    qdiv,
)
from tcore.symfunc import topological_vertex
from tcore.theta import ThetaArg, macmahon, theta3, vartheta


@dataclass(frozen=True)
class SValue:
    """An evaluation point s > 1 carrying its exact square root."""

    s: QQ
    sqrt_s: QQ

    def __post_init__(self):
        object.__setattr__(self, "s", QQ(self.s))
        object.__setattr__(self, "sqrt_s", QQ(self.sqrt_s))
        if self.sqrt_s * self.sqrt_s != self.s:
            raise ValueError("sqrt_s does not square to s")
        if self.s <= 1:
            raise ValueError("s must exceed 1")

    @classmethod
    def of(cls, value) -> "SValue":
        if isinstance(value, SValue):
            return value
        value = QQ(value)
        root = rational_sqrt(value)
        if root is None:
            raise ValueError(f"{rat_str(value)} is not a perfect square of a rational")
        return cls(value, root)


def s_vector(values, t: int) -> tuple[SValue, ...]:
    """Coerce and screen a tuple of s-values for use at the given t.

    The screen rejects any nonempty sub-product equal to 1 or colliding
    with a t-th root of unity.  A product of rationals greater than 1 can
    do neither, so with the current SValue gate the loop never fires; it
    stays because it is the documented contract, not a consequence of it.
    """
    svals = tuple(SValue.of(v) for v in values)
    if len(svals) <= 10:
        for r in range(1, len(svals) + 1):
            for combo in combinations(svals, r):
                prodval = math.prod((c.s for c in combo), start=QQ(1))
                if prodval == 1:
                    raise ValueError("a sub-product of the s-values equals 1")
                # prod * xi_t^m = 1 would force xi_t^m rational, hence +-1,
                # and a positive product can only collide via prod == 1
    return svals


def partition_moment(sv: SValue, nu) -> QQ:
    """Sum of s^(nu_i - i + 1/2) over all rows i >= 1, tail in closed form.

    Past the last row the summand is the geometric s^(1/2 - i), giving the
    exact tail s^(1/2 - l) / (s - 1); this is the definition of the sum for
    s > 1, where the series converges.
    """
    total = QQ(0)
    for i, part in enumerate(nu, start=1):
        total += rat_pow(sv.s, part - i) * sv.sqrt_s
    tail = rat_pow(sv.s, -len(nu)) * sv.sqrt_s / (sv.s - 1)
    return total + tail


def brute_force_Ft(t: int, s_values, order: int) -> QSeries:
    """The defining average over t-cores, coefficient by coefficient.

    Numerator and denominator are both truncated at Q^order; since the
    denominator starts at 1 the division is exact to that order.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    if order < 0:
        raise ValueError("order must be nonnegative")
    svals = s_vector(s_values, t)
    num: dict[int, QQ] = {}
    den: dict[int, QQ] = {}
    for size, group in enumerate_t_cores(t, order).items():
        for nu in group:
            weight = math.prod((partition_moment(sv, nu) for sv in svals), start=QQ(1))
            num[2 * size] = num.get(2 * size, QQ(0)) + weight
            den[2 * size] = den.get(2 * size, QQ(0)) + 1
    order2 = 2 * order
    return qdiv(
        QSeries(QQ_DOMAIN, order2, num), QSeries(QQ_DOMAIN, order2, den)
    )


def bloch_okounkov_F(s_values, order: int) -> QSeries:
    """The same average taken over all partitions instead of t-cores."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    svals = tuple(SValue.of(v) for v in s_values)
    num: dict[int, QQ] = {}
    den: dict[int, QQ] = {}
    for size in range(order + 1):
        for nu in partitions_of(size):
            weight = math.prod((partition_moment(sv, nu) for sv in svals), start=QQ(1))
            num[2 * size] = num.get(2 * size, QQ(0)) + weight
            den[2 * size] = den.get(2 * size, QQ(0)) + 1
    order2 = 2 * order
    return qdiv(
        QSeries(QQ_DOMAIN, order2, num), QSeries(QQ_DOMAIN, order2, den)
    )


@dataclass(frozen=True)
class SetPartition:
    """Disjoint nonempty blocks covering {1..n}, ordered by least element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValueError("blocks must be nonempty")
            if seen & set(b):
                raise ValueError("blocks must be disjoint")
            seen.update(b)
        n = len(seen)
        if seen != set(range(1, n + 1)):
            raise ValueError("blocks must cover {1..n} exactly")
        if list(blocks) != sorted(blocks, key=lambda b: b[0]):
            raise ValueError("blocks must be ordered by least element")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)


def set_partitions(n: int) -> list[SetPartition]:
    """All set partitions of {1..n} via restricted growth strings."""
    if not 1 <= n <= 8:
        raise ValueError("n must be between 1 and 8")
    out: list[SetPartition] = []
    assignment = [0] * n

    def rec(i: int, used: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(used)]
            for idx, b in enumerate(assignment, start=1):
                blocks[b].append(idx)
            out.append(SetPartition(tuple(tuple(b) for b in blocks)))
            return
        for b in range(used + 1):
            assignment[i] = b
            rec(i + 1, used + (1 if b == used else 0))

    rec(0, 0)
    return out


def _block_product(svals, block) -> SValue:
    s = math.prod((svals[x - 1].s for x in block), start=QQ(1))
    root = math.prod((svals[x - 1].sqrt_s for x in block), start=QQ(1))
    return SValue(s, root)


# Square-root branch inside the determinant entries: the argument xi_t^e
# keeps its literal column difference e = l_i - l_j, so its root is
# xi_2t^e with e reduced mod 2t only.  Reducing e mod t instead flips the
# sign of every entry with a negative difference, and those signs do not
# factor out of the determinant; the agreement with the enumeration route
# singles out the literal convention (see tests/test_npoint.py).
_DET_BRANCH_PERIOD = 2  # in units of t


class _ThetaTable:
    """Memoized constant-argument theta series over Q(xi_2t).

    The square-root branch of x*xi_t^e is sqrt(x)*xi_2t^e after reducing
    e mod the requested period (t or 2t); the block products are branch
    independent, the determinant entries are not.
    """

    def __init__(self, t: int, order: int):
        self.t = t
        self.m = 2 * t
        self.order = order
        self.dom = CycloDomain(self.m)
        self._odd: dict = {}
        self._sym: dict = {}

    def root_scaled(self, scale: QQ, e: int):
        """scale * xi_t^e as a cyclotomic number (any sign of scale)."""
        e = e % self.t
        exp = 2 * e + (self.t if scale < 0 else 0)
        return Cyclo.root(self.m, exp) * abs(QQ(scale))

    def odd(self, sv: SValue, e: int, period: int | None = None) -> QSeries:
        """vartheta at sv.s * xi_t^e, branch sqrt(s)*xi_2t^(e mod period)."""
        if period is None:
            period = self.t
        key = (sv.s, e % period)
        if key not in self._odd:
            arg = ThetaArg.scaled_root(sv.s, t=self.t, e=e % period)
            self._odd[key] = vartheta(arg, self.order)
        return self._odd[key]

    def sym(self, scale: QQ, e: int) -> QSeries:
        """Theta3 at scale * xi_t^e; no square root is involved."""
        key = (QQ(scale), e % self.t)
        if key not in self._sym:
            arg = ThetaArg(self.root_scaled(scale, e), dom=self.dom)
            self._sym[key] = theta3(arg, self.order)
        return self._sym[key]


def _perm_det(entries) -> object:
    """Determinant by signed permutation expansion (k stays small here)."""
    k = len(entries)
    first = entries[0][0]
    total = None
    for perm in permutations(range(k)):
        inversions = sum(
            1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b]
        )
        term = entries[0][perm[0]]
        for i in range(1, k):
            term = term * entries[i][perm[i]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else first


def _distinct(l_tuple) -> bool:
    return len(set(l_tuple)) == len(l_tuple)


def _half_power_gap(sv: SValue, t: int) -> QQ:
    return rat_pow(sv.sqrt_s, t) - rat_pow(sv.sqrt_s, -t)


def closed_Ft(
    t: int,
    s_values,
    Q2,
    order: int,
    all_tuples: bool = False,
) -> QSeries:
    """The theta-determinant sum with free parameter Q2.

    The result does not depend on Q2 (any nonzero rational), which the
    tests exploit as an invariant.  Tuples with a repeated column label
    contribute a vanishing determinant, so they are skipped unless
    ``all_tuples`` asks for the full sum.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    Q2 = QQ(Q2)
    if Q2 == 0:
        raise ValueError("Q2 must be nonzero")
    svals = s_vector(s_values, t)
    n = len(svals)
    if n == 0:
        return QSeries.one(CycloDomain(2 * t), order)
    table = _ThetaTable(t, order)
    dom = table.dom

    # product of vartheta(xi_t^e) over e = 1..t-1, shared by every block
    root_den = QSeries.one(dom, order)
    for e in range(1, t):
        arg = ThetaArg.scaled_root(QQ(1), t=t, e=e)
        root_den = root_den * vartheta(arg, order)

    block_cache: dict = {}

    def block_factor(sv: SValue) -> QSeries:
        # with exponents reduced mod t, the product over a full residue
        # cycle does not depend on the column label l_m
        if sv.s not in block_cache:
            num = QSeries.one(dom, order)
            for e in range(t):
                num = num * table.odd(sv, e)
            block_cache[sv.s] = qdiv(num, root_den)
        return block_cache[sv.s]

    s_all = _block_product(svals, tuple(range(1, n + 1)))
    theta_q2 = table.sym(-Q2, 0)
    theta_q2_all = table.sym(-Q2 / s_all.s, 0)
    entry_cache: dict = {}

    period = _DET_BRANCH_PERIOD * t

    def det_entry(s_block: SValue, li: int, lj: int) -> QSeries:
        key = (s_block.s, (li - lj) % (2 * t))
        if key not in entry_cache:
            numer = table.sym(-Q2 / s_block.s, li - lj)
            denom = table.odd(s_block, lj - li, period)
            if not denom.coeff(0):
                raise ValueError(
                    f"vartheta({rat_str(s_block.s)}*xi_{t}^{(lj - li) % t}) "
                    "is singular in a determinant denominator"
                )
            entry_cache[key] = qdiv(numer, denom)
        return entry_cache[key]

    acc = QSeries(dom, 2 * order, {})
    inv_theta_q2 = qdiv(QSeries.one(dom, order), theta_q2)
    for sp in set_partitions(n):
        k = len(sp.blocks)
        if not all_tuples and k > t:
            continue
        blocks = [_block_product(svals, b) for b in sp.blocks]
        scalar_part = QSeries.one(dom, order)
        for bv in blocks:
            scalar_part = scalar_part * block_factor(bv)
        for power in range(k - 1):
            scalar_part = scalar_part * inv_theta_q2
        for l_tuple in product(range(1, t + 1), repeat=k):
            if not all_tuples and not _distinct(l_tuple):
                continue
            entries = [
                [det_entry(blocks[i], l_tuple[i], l_tuple[j]) for j in range(k)]
                for i in range(k)
            ]
            acc = acc + scalar_part * _perm_det(entries)

    pref = math.prod((_half_power_gap(sv, t) for sv in svals), start=QQ(1))
    result = qdiv(acc, theta_q2_all)
    inv_pref = dom.one / dom.coerce(pref)
    return result.map_coeffs(lambda c: c * inv_pref)


def closed_Ft_r(
    t: int,
    s_values,
    r: int,
    order: int,
    all_tuples: bool = False,
) -> QSeries:
    """The Q2-free specialization marking the index subset {1..r}, r < n."""
    if t < 2:
        raise ValueError("t must be at least 2")
    svals = s_vector(s_values, t)
    n = len(svals)
    if n < 2:
        raise ValueError("this route needs at least two s-values")
    if not 1 <= r < n:
        raise ValueError("r must satisfy 1 <= r < n")
    table = _ThetaTable(t, order)
    dom = table.dom

    root_den = QSeries.one(dom, order)
    for e in range(1, t):
        arg = ThetaArg.scaled_root(QQ(1), t=t, e=e)
        root_den = root_den * vartheta(arg, order)

    block_cache: dict = {}

    def block_factor(sv: SValue) -> QSeries:
        if sv.s not in block_cache:
            num = QSeries.one(dom, order)
            for e in range(t):
                num = num * table.odd(sv, e)
            block_cache[sv.s] = qdiv(num, root_den)
        return block_cache[sv.s]

    s_marked = _block_product(svals, tuple(range(1, r + 1)))
    s_rest = _block_product(svals, tuple(range(r + 1, n + 1)))
    inv_arg = ThetaArg(
        dom.one / dom.coerce(s_rest.s),
        dom.one / dom.coerce(s_rest.sqrt_s),
        dom=dom,
    )
    theta_rest_inv = vartheta(inv_arg, order)
    if not theta_rest_inv.coeff(0):
        raise ValueError("vartheta of the unmarked product inverse is singular")
    theta_marked = table.odd(s_marked, 0)
    inv_theta_marked = qdiv(QSeries.one(dom, order), theta_marked)

    entry_cache: dict = {}

    period = _DET_BRANCH_PERIOD * t

    def det_entry(s_block: SValue, li: int, lj: int) -> QSeries:
        key = (s_block.s, (li - lj) % (2 * t))
        if key not in entry_cache:
            ratio = s_marked.s / s_block.s
            num_arg = ThetaArg.scaled_root(ratio, t=t, e=(li - lj) % period)
            numer = vartheta(num_arg, order)
            denom = table.odd(s_block, lj - li, period)
            if not denom.coeff(0):
                raise ValueError(
                    f"vartheta({rat_str(s_block.s)}*xi_{t}^{(lj - li) % t}) "
                    "is singular in a determinant denominator"
                )
            entry_cache[key] = qdiv(numer, denom)
        return entry_cache[key]

    acc = QSeries(dom, 2 * order, {})
    for sp in set_partitions(n):
        k = len(sp.blocks)
        if not all_tuples and k > t:
            continue
        blocks = [_block_product(svals, b) for b in sp.blocks]
        scalar_part = QSeries.one(dom, order)
        for bv in blocks:
            scalar_part = scalar_part * block_factor(bv)
        for power in range(k - 1):
            scalar_part = scalar_part * inv_theta_marked
        for l_tuple in product(range(1, t + 1), repeat=k):
            if not all_tuples and not _distinct(l_tuple):
                continue
            entries = [
                [det_entry(blocks[i], l_tuple[i], l_tuple[j]) for j in range(k)]
                for i in range(k)
            ]
            acc = acc + scalar_part * _perm_det(entries)

    pref = math.prod((_half_power_gap(sv, t) for sv in svals), start=QQ(1))
    result = qdiv(acc, theta_rest_inv)
    inv_pref = dom.one / dom.coerce(pref)
    return result.map_coeffs(lambda c: c * inv_pref)


def _rational_part(value) -> QQ:
    """Extract the rational value of a field element, or fail loudly."""
    if is_rational(value):
        return QQ(value)
    if hasattr(value, "is_rational"):
        if not value.is_rational():
            raise ValueError(f"{value!r} has an irrational component")
        return value.rational_value()
    return QQ(value)


def qdeformed_Z_sum(q, order_total: int) -> BiSeries:
    """The defining vertex sum of the deformed partition function.

    Terms are graded by |nu| in Q and |mu| in Q1; every pair with
    |mu| + |nu| <= order_total contributes the exact rational value of
    the vertex product (the half-powers of q cancel pairwise).
    """
    q = QQ(q)
    if abs(q) <= 1:
        raise ValueError("the base must satisfy |q| > 1")
    if order_total < 0:
        raise ValueError("order must be nonnegative")
    terms: dict[tuple[int, int], QQ] = {}
    for d_nu in range(order_total + 1):
        for nu in partitions_of(d_nu):
            nu_t = conjugate(nu)
            for d_mu in range(order_total - d_nu + 1):
                for mu in partitions_of(d_mu):
                    value = topological_vertex((), conjugate(mu), nu, q)
                    value = value * topological_vertex((), mu, nu_t, q)
                    coeff = _rational_part(value)
                    if (d_mu + d_nu) % 2:
                        coeff = -coeff
                    key = (2 * d_nu, 2 * d_mu)
                    terms[key] = terms.get(key, QQ(0)) + coeff
    return BiSeries(QQ_DOMAIN, 2 * order_total, terms)


def qdeformed_Z_product(q, order_total: int) -> BiSeries:
    """The same function as a MacMahon-type product, truncated honestly.

    The b-th band contributes factors whose lowest total degree is 2b - 1,
    so bands beyond (order_total + 1) // 2 collapse to 1.
    """
    q = QQ(q)
    if abs(q) <= 1:
        raise ValueError("the base must satisfy |q| > 1")
    order2 = 2 * order_total
    out = macmahon(1, q, (0, 1), order_total)
    for b in range(1, (order_total + 1) // 2 + 1):
        out = out * macmahon(1, q, (b, b + 1), order_total)
        out = out * macmahon(1, q, (b, b - 1), order_total)
        band = BiSeries.one(QQ_DOMAIN, order_total) - BiSeries.monomial(
            QQ_DOMAIN, 1, b, b, order_total
        )
        out = out / band
        square = macmahon(1, q, (b, b), order_total)
        out = out / (square * square)
    return BiSeries(
        out.dom, order2, {k: c for k, c in out.terms.items() if k[0] + k[1] <= order2}
    )


def qdeformed_Zn_sum(q, s_values, order_total: int) -> BiSeries:
    """The deformed average of the row-moment product, normalized."""
    q = QQ(q)
    if abs(q) <= 1:
        raise ValueError("the base must satisfy |q| > 1")
    svals = tuple(SValue.of(v) for v in s_values)
    terms: dict[tuple[int, int], QQ] = {}
    for d_nu in range(order_total + 1):
        for nu in partitions_of(d_nu):
            nu_t = conjugate(nu)
            moment = math.prod((partition_moment(sv, nu) for sv in svals), start=QQ(1))
            for d_mu in range(order_total - d_nu + 1):
                for mu in partitions_of(d_mu):
                    value = topological_vertex((), conjugate(mu), nu, q)
                    value = value * topological_vertex((), mu, nu_t, q)
                    coeff = _rational_part(value) * moment
                    if (d_mu + d_nu) % 2:
                        coeff = -coeff
                    key = (2 * d_nu, 2 * d_mu)
                    terms[key] = terms.get(key, QQ(0)) + coeff
    numerator = BiSeries(QQ_DOMAIN, 2 * order_total, terms)
    return numerator / qdeformed_Z_sum(q, order_total)


def correlation_expansion(
    t: int, n: int, l_orders, q_order: int
) -> dict[tuple[int, ...], QSeries]:
    """Correlation coefficients of the t-core average at s_j = e^(z_j).

    Each row moment is z^(-1) times an honest Taylor series G(z), because
    the geometric tail contributes e^((1/2 - l)z) * z/(e^z - 1).  The
    returned table maps (l_1..l_n) to the exact q-series multiplying
    z_1^(l_1 - 1) ... z_n^(l_n - 1); separate variables never mix, so one
    G per partition serves every slot.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    l_orders = tuple(int(l) for l in l_orders)
    if len(l_orders) != n:
        raise ValueError("need one l-order per point")
    if any(l < 0 for l in l_orders):
        raise ValueError("l-orders must be nonnegative")
    if n == 0:
        return {(): QSeries.one(QQ_DOMAIN, q_order)}
    l_max = max(l_orders)
    tdom = TaylorDomain(QQ_DOMAIN, l_max)
    exp_ratio = TaylorZ(
        tdom, [rat(1, math.factorial(k + 1)) for k in range(l_max + 1)]
    )
    tail_core = exp_ratio.inverse()  # z / (e^z - 1)
    zvar = TaylorZ.variable(tdom)

    keys = list(product(*(range(l + 1) for l in l_orders)))
    num: dict[tuple[int, ...], dict[int, QQ]] = {key: {} for key in keys}
    den: dict[int, QQ] = {}
    for size, group in enumerate_t_cores(t, q_order).items():
        for nu in group:
            taylor = TaylorZ(tdom, [QQ(0)] * (l_max + 1))
            for i, part in enumerate(nu, start=1):
                rate = rat(2 * (part - i) + 1, 2)
                taylor = taylor + zvar * TaylorZ.exp_of(tdom, rate)
            tail_rate = rat(1 - 2 * len(nu), 2)
            taylor = taylor + TaylorZ.exp_of(tdom, tail_rate) * tail_core
            g_coeffs = [taylor.coeff(k) for k in range(l_max + 1)]
            for key in keys:
                weight = math.prod((g_coeffs[l] for l in key), start=QQ(1))
                if weight:
                    bucket = num[key]
                    bucket[2 * size] = bucket.get(2 * size, QQ(0)) + weight
            den[2 * size] = den.get(2 * size, QQ(0)) + 1
    order2 = 2 * q_order
    den_series = QSeries(QQ_DOMAIN, order2, den)
    return {
        key: qdiv(QSeries(QQ_DOMAIN, order2, num[key]), den_series) for key in keys
    }


def is_real_series(series: QSeries) -> bool:
    """True when every coefficient equals its own complex conjugate."""
    for c in series.terms.values():
        if hasattr(c, "is_real"):
            if not c.is_real():
                return False
        elif hasattr(c, "conjugate") and c.conjugate() != c:
            return False
    return True


def rational_series(series: QSeries) -> QSeries:
    """Push a series with rational-valued coefficients down to the rationals."""
    return series.map_coeffs(_rational_part, QQ_DOMAIN)


@dataclass(frozen=True)
class NPointResult:
    """A computed n-point series plus the metadata that identifies the run."""

    method: str
    t: int | None
    n: int
    s: tuple[SValue, ...]
    value: object
    order2: int
    q2: object = None
    r: int | None = None
    elapsed_ms: float | None = None

    def as_payload(self) -> dict:
        series = self.value
        if isinstance(series, QSeries):
            body = {
                str(e2): rat_str(_rational_part(c)) for e2, c in sorted(series.terms.items())
            }
        elif isinstance(series, BiSeries):
            body = {
                f"{k[0]},{k[1]}": rat_str(_rational_part(c))
                for k, c in sorted(series.terms.items())
            }
        else:
            body = {"value": str(series)}
        payload = {
            "method": self.method,
            "t": self.t,
            "n": self.n,
            "s": [rat_str(sv.s) for sv in self.s],
            "order2": self.order2,
            "series": body,
            "elapsed_ms": self.elapsed_ms,
        }
        if self.q2 is not None:
            payload["q2"] = rat_str(QQ(self.q2))
        if self.r is not None:
            payload["r"] = self.r
        return payload
