"""Torus quadrature for constant-mode extraction at numeric Q.

The exact routes in :mod:`tcore.npoint` produce Q-series.  This module
approaches the same quantities analytically: each generating function is the
w_1^0...w_n^0 coefficient of an explicit integrand on a product of circles,
and averaging the integrand over an M-point grid per circle recovers that
coefficient with error decaying exponentially in M.  Everything runs in
mpmath arbitrary-precision arithmetic, so the extracted numbers serve as a
floating-point cross-check of the exact series at a fixed numeric nome.

A note on branches.  The odd theta function carries a factor z^(1/2), so a
single theta value is only defined up to sign.  In every integrand used here
the half-powers occur in reciprocal pairs: numerator against denominator
within each grid axis, row against column inside the determinants.  The
evaluators therefore never take a square root of a grid variable.  Each theta
value is split as z^(1/2) * (1 - 1/z) * (even product), the paired z^(1/2)
factors are cancelled by hand before any evaluation happens, and what remains
is a single-valued function of the grid point.  Square roots are taken only
of positive reals and of the nome itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from math import exp, log

import mpmath as mp

from tcore._rat import is_rational

__all__ = [
    "ExtractionResult",
    "QuadratureConfig",
    "eval_bo_determinant",
    "eval_cor42",
    "eval_cor43",
    "extract_bo_determinant",
    "extract_cor42",
    "extract_cor43",
    "extract_with_doubling",
    "torus_extract",
]

_GUARD_BITS = 16
_MAX_VARS = 3


def _as_mp(x):
    """Convert a rational/float/complex input to an mpmath number."""
    if is_rational(x):
        return mp.mpf(int(x.numerator)) / int(x.denominator)
    return mp.mpmathify(x)


def _abs_float(x) -> float:
    """Crude magnitude of a numeric input, for feasibility checks."""
    if is_rational(x):
        return abs(int(x.numerator)) / int(x.denominator)
    return abs(complex(x))


# -- numeric theta building blocks -----------------------------------------


class _NomeContext:
    """Per-(Q, precision) state shared by the theta product evaluators.

    Holds the nome powers and the z-independent normalizing products so that
    evaluating a theta function at a new argument only costs the argument-
    dependent factors.  Products are truncated once a factor differs from 1
    by less than 2^-(prec + guard); the guard keeps the discarded tail below
    the rounding floor of the requested precision.
    """

    __slots__ = ("Q", "abs_Q", "sqrt_Q", "tol", "euler", "vt_norm", "_pow")

    def __init__(self, Q):
        self.Q = Q
        self.abs_Q = abs(Q)
        if self.abs_Q >= 1:
            raise ValueError("the nome must satisfy |Q| < 1")
        self.sqrt_Q = mp.sqrt(Q)
        self.tol = mp.mpf(2) ** (-(mp.mp.prec + _GUARD_BITS))
        self._pow = [mp.mpf(1), Q]
        euler = mp.mpf(1)
        b, m = 1, self.abs_Q
        while m >= self.tol:
            euler *= 1 - self.power(b)
            b += 1
            m *= self.abs_Q
        self.euler = euler
        self.vt_norm = 1 / (euler * euler)

    def power(self, b: int):
        while len(self._pow) <= b:
            self._pow.append(self._pow[-1] * self.Q)
        return self._pow[b]

    def half_power(self, b: int):
        """Q^(b - 1/2), principal square root of Q."""
        return self.sqrt_Q * self.power(b - 1)


_nome_cache: dict = {}


def _nome_context(Q) -> _NomeContext:
    key = (mp.mp.prec, Q)
    ctx = _nome_cache.get(key)
    if ctx is None:
        if len(_nome_cache) >= 16:
            _nome_cache.clear()
        ctx = _NomeContext(Q)
        _nome_cache[key] = ctx
    return ctx


def _vartheta_even(z, ctx: _NomeContext):
    """The odd theta function with its z^(1/2) stripped off.

    Returns (1 - 1/z) * prod_b (1 - z Q^b)(1 - Q^b/z) / (1 - Q^b)^2, so that
    the true theta value is z^(1/2) times this.  Single-valued in z.
    """
    zinv = 1 / z
    acc = (1 - zinv) * ctx.vt_norm
    scale = max(abs(z), abs(zinv))
    b, m = 1, scale * ctx.abs_Q
    while m >= ctx.tol:
        qb = ctx.power(b)
        acc *= (1 - z * qb) * (1 - zinv * qb)
        b += 1
        m *= ctx.abs_Q
    return acc


def _vartheta_pos(x, ctx: _NomeContext):
    """Full odd theta value at a positive real argument."""
    return mp.sqrt(x) * _vartheta_even(x, ctx)


def _theta3(z, ctx: _NomeContext):
    """Even theta value: prod_b (1 - Q^b)(1 + z Q^(b-1/2))(1 + Q^(b-1/2)/z)."""
    zinv = 1 / z
    acc = ctx.euler
    scale = max(abs(z), abs(zinv), mp.mpf(1))
    b, m = 1, scale * abs(ctx.sqrt_Q)
    while m >= ctx.tol:
        qh = ctx.half_power(b)
        acc *= (1 + z * qh) * (1 + zinv * qh)
        b += 1
        m *= ctx.abs_Q
    return acc


# -- grid geometry -----------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    """Grid geometry and working precision for a torus extraction.

    M points per circle (a power of two, so that doubled grids nest), one
    radius per auxiliary variable, and the numeric nome.  The radii must
    place each circle inside the annulus where the integrand's Laurent
    expansion converges; ``validate_region`` checks that chain against a
    concrete s-vector.
    """

    M: int
    precision_bits: int
    radii: tuple
    Q: object
    guard_bits: int = _GUARD_BITS

    def __post_init__(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ValueError("M must be a power of two, at least 2")
        if self.precision_bits < 53:
            raise ValueError("precision_bits must be at least 53")
        radii = tuple(float(c) for c in self.radii)
        object.__setattr__(self, "radii", radii)
        if not 1 <= len(radii) <= _MAX_VARS:
            raise ValueError(
                f"between 1 and {_MAX_VARS} circles supported "
                f"(cost grows like M^n), got {len(radii)}"
            )
        if any(c2 >= c1 for c1, c2 in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        if radii[-1] <= 1:
            raise ValueError("the innermost radius must exceed 1")
        if not 0 <= _abs_float(self.Q) < 1:
            raise ValueError("the nome must satisfy |Q| < 1")

    @property
    def n(self) -> int:
        return len(self.radii)

    def validate_region(self, s, margin: float = 0.1) -> None:
        """Check 1 < c_n < s_n c_n < ... < c_1 < s_1 c_1 < 1/|Q| with headroom.

        The margin rejects configurations whose smallest gap falls below the
        given fraction of the equal-split gap, since a circle hugging one of
        the theta zero loci ruins the exponential convergence in M.
        """
        if len(s) != self.n:
            raise ValueError("one radius per s value is required")
        s_logs = [log(_abs_float(sj)) for sj in s]
        chain = [0.0]
        for c, g in zip(reversed(self.radii), reversed(s_logs)):
            chain.append(log(c))
            chain.append(log(c) + g)
        abs_q = _abs_float(self.Q)
        slack = None
        if abs_q:
            chain.append(log(1 / abs_q))
            slack = chain[-1] - sum(s_logs)
            if slack <= 0:
                raise ValueError("no annuli fit between 1 and 1/|Q| for these s")
        gaps = [b - a for a, b in zip(chain, chain[1:])]
        free_gaps = gaps[::2]
        floor = 0.0 if slack is None else margin * slack / (self.n + 1)
        for g in gaps[1::2]:
            if g <= 0:
                raise ValueError("every s value must exceed 1 in magnitude")
        if min(free_gaps) <= floor:
            raise ValueError(
                f"smallest log-gap {min(free_gaps):.3g} is under the safety "
                f"margin {floor:.3g}; respace the radii"
            )

    @classmethod
    def for_region(cls, s, Q, M: int | None = None, precision_bits: int = 256):
        """Solve the region inequalities for radii with equal log-gaps.

        Equal spacing maximizes the smallest gap, which is what controls the
        quadrature error, so this is the maximin placement rather than any
        assumed closed form.
        """
        n = len(s)
        if not 1 <= n <= _MAX_VARS:
            raise ValueError(f"between 1 and {_MAX_VARS} s values supported")
        s_logs = [log(_abs_float(sj)) for sj in s]
        if any(g <= 0 for g in s_logs):
            raise ValueError("every s value must exceed 1 in magnitude")
        abs_q = _abs_float(Q)
        if abs_q:
            total = log(1 / abs_q)
        else:
            # Q = 0 kills the outer constraint; any comfortable spacing works.
            total = sum(s_logs) + (n + 1) * log(4.0)
        slack = total - sum(s_logs)
        if slack <= 0:
            raise ValueError("no annuli fit between 1 and 1/|Q| for these s")
        gap = slack / (n + 1)
        radii = []
        pos = 0.0
        for j in range(n - 1, -1, -1):
            pos += gap
            radii.append(exp(pos))
            pos += s_logs[j]
        radii.reverse()
        if M is None:
            M = {1: 512, 2: 1024, 3: 32}[n]
        cfg = cls(M=M, precision_bits=precision_bits, radii=tuple(radii), Q=Q)
        cfg.validate_region(s)
        return cfg


def _pairwise_sum(values):
    """Sum in a fixed balanced order, independent of how values were produced."""
    k = len(values)
    if k == 0:
        return mp.mpf(0)
    if k == 1:
        return values[0]
    mid = k // 2
    return _pairwise_sum(values[:mid]) + _pairwise_sum(values[mid:])


def _phases(M: int) -> list:
    return [mp.expjpi(mp.mpf(2 * k) / M) for k in range(M)]


def torus_extract(f, cfg: QuadratureConfig):
    """Average ``f`` over the grid w_j = c_j exp(2 pi i k_j / M).

    For f analytic on a neighbourhood of the torus this converges to the
    constant Laurent coefficient exponentially in M, and it is exact whenever
    f is a Laurent polynomial of degree below M in each variable.  Grid
    evaluations are independent of one another; the reduction is a pairwise
    sum in grid order, so results are reproducible no matter how the
    evaluations are scheduled.
    """
    with mp.workprec(cfg.precision_bits):
        phases = _phases(cfg.M)
        radii = [mp.mpf(c) for c in cfg.radii]
        block: list = []
        block_sums: list = []
        for ks in itertools.product(range(cfg.M), repeat=cfg.n):
            w = tuple(c * phases[k] for c, k in zip(radii, ks))
            try:
                value = mp.mpc(f(w))
            except ZeroDivisionError as exc:
                raise ValueError(
                    f"integrand denominator vanished at grid index {ks}; "
                    "the radii sit on a zero locus"
                ) from exc
            if not mp.isfinite(value):
                raise ValueError(f"integrand not finite at grid index {ks}")
            block.append(value)
            if len(block) == 4096:
                block_sums.append(_pairwise_sum(block))
                block = []
        if block:
            block_sums.append(_pairwise_sum(block))
        return _pairwise_sum(block_sums) / mp.mpf(cfg.M) ** cfg.n


# -- integrands --------------------------------------------------------------


def _check_point(s, w):
    if not 1 <= len(s) <= _MAX_VARS:
        raise ValueError(f"between 1 and {_MAX_VARS} s values supported")
    if len(w) != len(s):
        raise ValueError("one grid coordinate per s value is required")


def _roots_of_unity(t: int) -> list:
    return [mp.expjpi(mp.mpf(2 * a) / t) for a in range(t)]


def _axis_factor(sj, half_t_power, wj, xi, ctx):
    """prod_a theta(-s w xi^a) / theta(-w xi^a), half-powers pre-cancelled.

    Each factor pair shares the root of -w xi^a, so only s^(t/2) survives
    from the half-powers; ``half_t_power`` supplies it.
    """
    acc = half_t_power
    for root in xi:
        z = -wj * root
        acc *= _vartheta_even(sj * z, ctx) / _vartheta_even(z, ctx)
    return acc


def _cross_factor(si, sk, u, ctx):
    """theta cross-ratio in u = w_i^(-1) w_k; the four roots of u cancel."""
    return (
        _vartheta_even(u * sk / si, ctx)
        * _vartheta_even(u, ctx)
        / (_vartheta_even(u / si, ctx) * _vartheta_even(u * sk, ctx))
    )


def _det(rows):
    if len(rows) == 1:
        return rows[0][0]
    if len(rows) == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _stripped_det(s_m, sqrt_s, w, q2_mp, sign, ctx):
    """det of Theta_3(sign Q2 s_i^(-1) w_i^(-1) w_j) / theta(s_i w_i w_j^(-1)).

    Matrix entries are computed without the (w_i/w_j)^(1/2) factors: those
    multiply to 1 along every permutation, so stripping them changes no
    determinant, while the leftover s_i^(1/2) per row is divided out here.
    """
    n = len(s_m)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            v = s_m[i] * w[i] / w[j]
            row.append(_theta3(sign * q2_mp / v, ctx) / _vartheta_even(v, ctx))
        rows.append(row)
    det = _det(rows)
    for r in sqrt_s:
        det /= r
    return det


def eval_cor42(t: int, s, Q, w):
    """Product-form integrand for the t-core n-point function.

    Includes the constant prefactor prod_j s_j^(-t/2)/theta(s_j), so the
    torus average of this function is the final value.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    _check_point(s, w)
    ctx = _nome_context(_as_mp(Q))
    s_m = [_as_mp(sj) for sj in s]
    sqrt_s = [mp.sqrt(sj) for sj in s_m]
    xi = _roots_of_unity(t)
    acc = mp.mpc(1)
    for sj, rj, wj in zip(s_m, sqrt_s, w):
        pref = rj ** (-t) / _vartheta_pos(sj, ctx)
        acc *= pref * _axis_factor(sj, rj**t, wj, xi, ctx)
    for i in range(len(s_m)):
        for k in range(i + 1, len(s_m)):
            acc *= _cross_factor(s_m[i], s_m[k], w[k] / w[i], ctx)
    return acc


def eval_cor43(t: int, s, Q, Q2, w):
    """Determinant-form integrand for the t-core n-point function.

    The free parameter Q2 may be any nonzero number; the extracted constant
    mode does not depend on it.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    _check_point(s, w)
    q2_mp = _as_mp(Q2)
    if not q2_mp:
        raise ValueError("Q2 must be nonzero")
    ctx = _nome_context(_as_mp(Q))
    s_m = [_as_mp(sj) for sj in s]
    sqrt_s = [mp.sqrt(sj) for sj in s_m]
    xi = _roots_of_unity(t)
    s_all = mp.mpf(1)
    for sj in s_m:
        s_all *= sj
    pref = 1
    for rj in sqrt_s:
        pref /= rj**t
    pref /= _theta3(-q2_mp, ctx) ** (len(s_m) - 1) * _theta3(-q2_mp / s_all, ctx)
    acc = mp.mpc(pref)
    for sj, rj, wj in zip(s_m, sqrt_s, w):
        acc *= _axis_factor(sj, rj**t, wj, xi, ctx)
    return acc * _stripped_det(s_m, sqrt_s, w, q2_mp, -1, ctx)


def eval_bo_determinant(s, Q, Q2, w):
    """Determinant integrand for the n-point function of all partitions."""
    _check_point(s, w)
    q2_mp = _as_mp(Q2)
    if not q2_mp:
        raise ValueError("Q2 must be nonzero")
    ctx = _nome_context(_as_mp(Q))
    s_m = [_as_mp(sj) for sj in s]
    sqrt_s = [mp.sqrt(sj) for sj in s_m]
    s_all = mp.mpf(1)
    for sj in s_m:
        s_all *= sj
    pref = 1 / (_theta3(q2_mp, ctx) ** (len(s_m) - 1) * _theta3(q2_mp / s_all, ctx))
    return pref * _stripped_det(s_m, sqrt_s, w, q2_mp, 1, ctx)


# -- tabulated two-variable path ---------------------------------------------


def _pair_average(axis1, axis2, g_table, M: int):
    """Average A1(k1) A2(k2) g(k2 - k1 mod M) over the M^2 grid.

    The integrands only couple the two circles through the ratio w_1^(-1)w_2,
    so the double sum collapses to M circular correlations of the axis
    tables; this turns an M^2-point integrand sweep into O(M) theta
    evaluations plus M^2 multiplications.
    """
    total = []
    for d in range(M):
        prods = [axis1[k] * axis2[(k + d) % M] for k in range(M)]
        total.append(g_table[d] * _pairwise_sum(prods))
    return _pairwise_sum(total) / mp.mpf(M) ** 2


def _two_var_tables(t, s_m, sqrt_s, cfg, ctx, phases):
    """Axis tables for both circles at every grid angle."""
    xi = _roots_of_unity(t)
    tables = []
    for sj, rj, c in zip(s_m, sqrt_s, (mp.mpf(cfg.radii[0]), mp.mpf(cfg.radii[1]))):
        half = rj**t
        tables.append([_axis_factor(sj, half, c * ph, xi, ctx) for ph in phases])
    return tables


def extract_cor42(t: int, s, cfg: QuadratureConfig):
    """Torus extraction of the product-form integrand."""
    cfg.validate_region(s)
    if cfg.n != 2:
        return torus_extract(lambda w: eval_cor42(t, s, cfg.Q, w), cfg)
    if t < 2:
        raise ValueError("t must be at least 2")
    with mp.workprec(cfg.precision_bits):
        ctx = _nome_context(_as_mp(cfg.Q))
        s_m = [_as_mp(sj) for sj in s]
        sqrt_s = [mp.sqrt(sj) for sj in s_m]
        phases = _phases(cfg.M)
        axis1, axis2 = _two_var_tables(t, s_m, sqrt_s, cfg, ctx, phases)
        ratio = mp.mpf(cfg.radii[1]) / mp.mpf(cfg.radii[0])
        g_table = [
            _cross_factor(s_m[0], s_m[1], ratio * ph, ctx) for ph in phases
        ]
        pref = mp.mpc(1)
        for sj, rj in zip(s_m, sqrt_s):
            pref *= rj ** (-t) / _vartheta_pos(sj, ctx)
        return pref * _pair_average(axis1, axis2, g_table, cfg.M)


def _two_var_det_table(s_m, sqrt_s, q2_mp, sign, cfg, ctx, phases):
    """Determinant values over the ratio angle d, half-powers pre-cancelled."""
    diag = [
        _theta3(sign * q2_mp / sj, ctx) / _vartheta_even(sj, ctx) for sj in s_m
    ]
    ratio = mp.mpf(cfg.radii[0]) / mp.mpf(cfg.radii[1])
    table = []
    for d in range(cfg.M):
        u = ratio / phases[d]  # w_1 / w_2 at k_2 - k_1 = d
        b12 = _theta3(sign * q2_mp / (s_m[0] * u), ctx) / _vartheta_even(
            s_m[0] * u, ctx
        )
        b21 = _theta3(sign * q2_mp * u / s_m[1], ctx) / _vartheta_even(
            s_m[1] / u, ctx
        )
        table.append((diag[0] * diag[1] - b12 * b21) / (sqrt_s[0] * sqrt_s[1]))
    return table


def extract_cor43(t: int, s, Q2, cfg: QuadratureConfig):
    """Torus extraction of the determinant-form integrand."""
    cfg.validate_region(s)
    if cfg.n != 2:
        return torus_extract(lambda w: eval_cor43(t, s, cfg.Q, Q2, w), cfg)
    if t < 2:
        raise ValueError("t must be at least 2")
    with mp.workprec(cfg.precision_bits):
        q2_mp = _as_mp(Q2)
        if not q2_mp:
            raise ValueError("Q2 must be nonzero")
        ctx = _nome_context(_as_mp(cfg.Q))
        s_m = [_as_mp(sj) for sj in s]
        sqrt_s = [mp.sqrt(sj) for sj in s_m]
        phases = _phases(cfg.M)
        axis1, axis2 = _two_var_tables(t, s_m, sqrt_s, cfg, ctx, phases)
        g_table = _two_var_det_table(s_m, sqrt_s, q2_mp, -1, cfg, ctx, phases)
        pref = 1 / (_theta3(-q2_mp, ctx) * _theta3(-q2_mp / (s_m[0] * s_m[1]), ctx))
        for rj in sqrt_s:
            pref /= rj**t
        return pref * _pair_average(axis1, axis2, g_table, cfg.M)


def extract_bo_determinant(s, Q2, cfg: QuadratureConfig):
    """Torus extraction of the all-partitions determinant integrand."""
    cfg.validate_region(s)
    if cfg.n != 2:
        return torus_extract(lambda w: eval_bo_determinant(s, cfg.Q, Q2, w), cfg)
    with mp.workprec(cfg.precision_bits):
        q2_mp = _as_mp(Q2)
        if not q2_mp:
            raise ValueError("Q2 must be nonzero")
        ctx = _nome_context(_as_mp(cfg.Q))
        s_m = [_as_mp(sj) for sj in s]
        sqrt_s = [mp.sqrt(sj) for sj in s_m]
        phases = _phases(cfg.M)
        g_table = _two_var_det_table(s_m, sqrt_s, q2_mp, 1, cfg, ctx, phases)
        pref = 1 / (_theta3(q2_mp, ctx) * _theta3(q2_mp / (s_m[0] * s_m[1]), ctx))
        # No axis factors here, so the double grid average is a plain mean
        # over the ratio angle.
        return pref * _pairwise_sum(g_table) / cfg.M


# -- convergence driver --------------------------------------------------------


@dataclass(frozen=True)
class ExtractionResult:
    """Outcome of an M-doubling run: the value and how much to trust it."""

    value: object
    M: int
    precision_bits: int
    converged: bool
    est_error: object

    def as_payload(self) -> dict:
        """JSON-ready summary; withholds the value when not converged."""
        ok = self.converged
        return {
            "value_re": float(mp.re(self.value)) if ok else None,
            "value_im": float(mp.im(self.value)) if ok else None,
            "M": self.M,
            "precision_bits": self.precision_bits,
            "converged": ok,
            "est_error": None if self.est_error is None else float(self.est_error),
        }


def extract_with_doubling(
    extract_at, cfg: QuadratureConfig, target_digits: int, max_doublings: int = 3
) -> ExtractionResult:
    """Double M until two consecutive extractions agree.

    ``extract_at`` maps a config to a complex value.  Agreement is demanded
    five digits beyond the target, so an accepted value has its quadrature
    error well under the comparison tolerances built on top of it.  When the
    budget runs out the result reports non-convergence instead of a value.
    """
    threshold = mp.mpf(10) ** (-(target_digits + 5))
    value = extract_at(cfg)
    est = None
    for _ in range(max_doublings):
        cfg = replace(cfg, M=2 * cfg.M)
        refined = extract_at(cfg)
        # The difference is formed at the extraction precision; re-wrapping
        # the value itself at ambient precision would throw digits away.
        with mp.workprec(cfg.precision_bits):
            est = abs(refined - value)
        value = refined
        if est < threshold:
            return ExtractionResult(value, cfg.M, cfg.precision_bits, True, est)
    return ExtractionResult(value, cfg.M, cfg.precision_bits, False, est)
