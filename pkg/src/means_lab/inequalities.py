"""Signed margins for the inequalities and proof identities between the means.

Every margin is oriented so that a nonnegative value means the stated
direction holds. Margins are absolute differences in the natural units of the
inequality: products in squared units, sums in linear units.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import DomainError, OutOfRangeError
from .means import MeanKind, PairLike, PositivePair, as_pair, eval_all

__all__ = [
    "InequalityId",
    "MarginRecord",
    "ChainMargins",
    "IdentityResiduals",
    "REL_TOL",
    "margin_product",
    "power_gap",
    "margin_sum",
    "margin_sandor",
    "margin_seiffert_conj",
    "margin_p_le_i",
    "chain_margins",
    "lemma_gap",
    "power_sum_recurrence",
    "proof_identity_residuals",
    "margin",
    "margin_with_scale",
    "margin_record",
    "tolerance",
]

#: Relative tolerance below which a negative binary64 margin is treated as rounding noise.
REL_TOL = 1e-12

# log(sys.float_info.max)
_LOG_MAX = 709.782712893384


class InequalityId(str, enum.Enum):
    EQ2_PRODUCT = "EQ2_PRODUCT"
    EQ1_POWER = "EQ1_POWER"
    EQ3_SUM = "EQ3_SUM"
    EQ4_SANDOR = "EQ4_SANDOR"
    EQ6_CONJ = "EQ6_CONJ"
    P_LE_I = "P_LE_I"
    CHAIN_EQ10 = "CHAIN_EQ10"
    LEMMA_EQ11 = "LEMMA_EQ11"

    @classmethod
    def parse(cls, value) -> "InequalityId":
        if isinstance(value, InequalityId):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown inequality {value!r}; expected one of {names}") from None

    @property
    def needs_exponent(self) -> bool:
        return self in (InequalityId.EQ1_POWER, InequalityId.LEMMA_EQ11)


def check_exponent(ineq: InequalityId, exponent) -> Optional[float]:
    """Validate that an exponent is present exactly when the inequality needs one."""
    if not ineq.needs_exponent:
        if exponent is not None:
            raise DomainError(f"{ineq.value} takes no exponent")
        return None
    if exponent is None:
        raise DomainError(f"{ineq.value} requires an exponent n")
    n = float(exponent)
    if not math.isfinite(n):
        raise DomainError(f"exponent must be finite, got {exponent!r}")
    if ineq is InequalityId.LEMMA_EQ11 and n != int(n):
        raise DomainError("LEMMA_EQ11 requires an integer exponent")
    return n


@dataclass(frozen=True)
class MarginRecord:
    id: InequalityId
    pair: PositivePair
    exponent: Optional[float]
    margin: float
    precision: int = 16
    rel_margin: float = 0.0
    sign: str = ""
    certified: bool = False

    def __post_init__(self):
        if (self.exponent is not None) != self.id.needs_exponent:
            raise DomainError(f"exponent presence does not match {self.id.value}")
        if not math.isfinite(self.margin):
            raise DomainError("margin must be finite")


def _power(m: float, n: float) -> float:
    if n == 0.0:
        return 1.0
    e = n * math.log(m)
    if e > _LOG_MAX:
        raise OutOfRangeError(f"M**n overflows binary64 (n*ln M = {e:.6g})")
    return math.exp(e)


def _power_sides(means, n):
    q, h, a, g = (means[k] for k in (MeanKind.Q, MeanKind.H, MeanKind.A, MeanKind.G))
    return _power(q, n) + _power(h, n), _power(a, n) + _power(g, n)


def _product_margin(hi, lo, means):
    # A G - Q H = xy (x-y)^4 / (4 (x+y)^2 (A G + Q H)); no cancellation near the diagonal.
    a, g, q, h = (means[k] for k in (MeanKind.A, MeanKind.G, MeanKind.Q, MeanKind.H))
    ag, qh = a * g, q * h
    if hi == lo:
        return 0.0, ag
    u = 0.5 * (hi - lo) / a
    # xy (x-y)^4 / (4 (x+y)^2) = G^2 * A^2 * u^4
    return (g * a) * (g * a) * u ** 4 / (ag + qh), max(ag, qh)


def margin_product(pair: PairLike) -> float:
    """``A*G - Q*H``; zero exactly on the diagonal."""
    p = as_pair(pair)
    return _product_margin(p.hi, p.lo, eval_all(p))[0]


def power_gap(pair: PairLike, n: float) -> float:
    """``Q**n + H**n - A**n - G**n`` with powers taken in log-space.

    Exactly zero on the diagonal for every ``n``. Raises :class:`OutOfRangeError` when a power overflows binary64.
    """
    n = float(n)
    if not math.isfinite(n):
        raise DomainError("exponent must be finite")
    p = as_pair(pair)
    if p.is_diagonal:
        # All four means coincide, so the gap is zero even where M**n overflows.
        return 0.0
    right, left = _power_sides(eval_all(p), n)
    return right - left


def margin_sum(pair: PairLike) -> float:
    """``Q + H - A - G``."""
    m = eval_all(as_pair(pair))
    return (m[MeanKind.Q] + m[MeanKind.H]) - (m[MeanKind.A] + m[MeanKind.G])


def margin_sandor(pair: PairLike) -> float:
    """``2P - (A + G)``."""
    m = eval_all(as_pair(pair))
    return 2.0 * m[MeanKind.P] - (m[MeanKind.A] + m[MeanKind.G])


def margin_seiffert_conj(pair: PairLike) -> float:
    """``2P - (Q + H)``. Its sign is reported, not assumed."""
    m = eval_all(as_pair(pair))
    return 2.0 * m[MeanKind.P] - (m[MeanKind.Q] + m[MeanKind.H])


def margin_p_le_i(pair: PairLike) -> float:
    m = eval_all(as_pair(pair))
    return m[MeanKind.I] - m[MeanKind.P]


@dataclass(frozen=True)
class ChainMargins:
    """The six chain quantities (ascending) and their five consecutive differences."""

    quantities: Tuple[float, ...]
    margins: Tuple[float, ...]

    NAMES = ("sqrt_QH", "sqrt_AG", "sqrt_LI", "mean_LI", "mean_GA", "mean_QH")

    @property
    def min_margin(self) -> float:
        return min(self.margins)


def _root_product(u, v):
    # Split square roots avoid overflow; equal factors stay exact.
    return u if u == v else math.sqrt(u) * math.sqrt(v)


def _chain(means) -> ChainMargins:
    h, g, a, q, l, i = (means[k] for k in "HGAQLI")
    quantities = (
        _root_product(q, h),
        _root_product(a, g),
        _root_product(l, i),
        0.5 * (l + i),
        0.5 * (g + a),
        0.5 * (q + h),
    )
    margins = tuple(quantities[k + 1] - quantities[k] for k in range(5))
    return ChainMargins(quantities, margins)


def chain_margins(pair: PairLike) -> ChainMargins:
    return _chain(_by_letter(eval_all(as_pair(pair))))


def _by_letter(means):
    return {k.value: v for k, v in means.items()}


def lemma_gap(a: float, b: float, c: float, d: float, n: int, rtol: float = 1e-14) -> float:
    """``c**n + d**n - a**n - b**n`` for quadruples with ``a+b <= c+d`` and ``ab >= cd``.

    The two hypotheses are checked up to a relative slack ``rtol`` so that
    quadruples built in floating point are not rejected over a rounding.
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("d", d)):
        if not (v > 0) or not math.isfinite(v):
            raise DomainError(f"{name} must be a finite positive real, got {v!r}")
    if not isinstance(n, numbers.Integral):
        if float(n) != int(n):
            raise DomainError(f"n must be an integer, got {n!r}")
        n = int(n)
    if a + b > (c + d) * (1.0 + rtol):
        raise DomainError(f"hypothesis a+b <= c+d fails: {a + b!r} > {c + d!r}")
    if a * b < c * d * (1.0 - rtol):
        raise DomainError(f"hypothesis ab >= cd fails: {a * b!r} < {c * d!r}")
    if n == 0:
        return 0.0
    return (c ** n + d ** n) - (a ** n + b ** n)


def power_sum_recurrence(a, b, n_max: int) -> List:
    """Power sums ``p_k = a**k + b**k`` for ``k = 0..n_max`` via
    ``p_{k+1} = (a+b) p_k - ab p_{k-1}``.

    Works for any numeric type closed under ``+``, ``-`` and ``*`` (floats,
    ints, :class:`fractions.Fraction`, mpmath numbers).
    """
    if int(n_max) != n_max or n_max < 0:
        raise DomainError("n_max must be a nonnegative integer")
    s, p = a + b, a * b
    seq = [2 * (a ** 0), s]
    for _ in range(1, int(n_max)):
        seq.append(s * seq[-1] - p * seq[-2])
    return seq[: int(n_max) + 1]


@dataclass(frozen=True)
class IdentityResiduals:
    square_root_bound: float  # (x+y)^2 - 2 sqrt(2xy(x^2+y^2)) >= 0
    arith_harmonic_residual: float  # (A - H) - (x-y)^2 / (2(x+y)) ~ 0
    root_sum_bound: float  # (x+y) - (sqrt(2(x^2+y^2)) + sqrt(4xy))/2 >= 0
    quad_geom_residual: float  # (Q - G) - (x-y)^2 / (sqrt(2(x^2+y^2)) + sqrt(4xy)) ~ 0

    def as_tuple(self):
        return (
            self.square_root_bound,
            self.arith_harmonic_residual,
            self.root_sum_bound,
            self.quad_geom_residual,
        )


def proof_identity_residuals(pair: PairLike) -> IdentityResiduals:
    p = as_pair(pair)
    k = p.hi
    m = eval_all(p)
    # Work in units of hi so no square or fourth power overflows.
    s = 1.0 + p.lo / k
    d = (p.hi - p.lo) / k
    d2 = d * d
    u = 2.0 * m[MeanKind.Q] / k  # sqrt(2(x^2+y^2)) / hi
    v = 2.0 * m[MeanKind.G] / k  # sqrt(4xy) / hi
    uv = u * v
    # (x+y)^4 - 8xy(x^2+y^2) = (x-y)^4 removes the cancellation in both bounds.
    sq_bound = d2 * d2 / (s * s + uv)
    root_sum = d2 * d2 / (2.0 * (s * s + uv) * (s + 0.5 * (u + v)))
    ah = (m[MeanKind.A] - m[MeanKind.H]) - k * (d2 / (2.0 * s))
    qg = (m[MeanKind.Q] - m[MeanKind.G]) - k * (d2 / (u + v))
    return IdentityResiduals(k * k * sq_bound, ah, k * root_sum, qg)


def margin_with_scale(ineq, pair: PairLike, exponent=None) -> Tuple[float, float]:
    """Binary64 margin and the magnitude of its larger side."""
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    p = as_pair(pair)
    means = eval_all(p)
    m = _by_letter(means)
    if ineq is InequalityId.EQ2_PRODUCT:
        return _product_margin(p.hi, p.lo, means)
    if ineq in (InequalityId.EQ1_POWER, InequalityId.LEMMA_EQ11):
        right, left = _power_sides(means, n)
        return right - left, max(right, left)
    if ineq is InequalityId.EQ3_SUM:
        right, left = m["Q"] + m["H"], m["A"] + m["G"]
        return right - left, max(right, left)
    if ineq is InequalityId.EQ4_SANDOR:
        right, left = 2.0 * m["P"], m["A"] + m["G"]
        return right - left, max(right, left)
    if ineq is InequalityId.EQ6_CONJ:
        right, left = 2.0 * m["P"], m["Q"] + m["H"]
        return right - left, max(right, left)
    if ineq is InequalityId.P_LE_I:
        return m["I"] - m["P"], max(m["I"], m["P"])
    chain = _chain(m)
    return chain.min_margin, chain.quantities[-1]


def margin(ineq, pair: PairLike, exponent=None) -> float:
    return margin_with_scale(ineq, pair, exponent)[0]


def tolerance(scale: float) -> float:
    """Absolute noise tolerance for a margin whose larger side is ``scale``."""
    return REL_TOL * scale


def margin_record(ineq, pair: PairLike, exponent=None) -> MarginRecord:
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    p = as_pair(pair)
    value, scale = margin_with_scale(ineq, p, n)
    sign = "+" if value > 0 else "-" if value < 0 else "0"
    return MarginRecord(ineq, p, n, value, 16, value / scale, sign, False)

