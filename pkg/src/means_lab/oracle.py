"""Extended-precision evaluation and sign certification.

Means are computed from their literal closed forms (not the reduced forms
used in binary64), so this module is an independent check on
:mod:`means_lab.means`. Each call works in its own mpmath context; no global
precision is read or written.
"""
from __future__ import annotations

import enum
import math
import os
import threading
from dataclasses import dataclass
from typing import Optional, Tuple

import mpmath

from .errors import DomainError
from .inequalities import InequalityId, check_exponent
from .means import MeanKind, PairLike, as_pair

__all__ = [
    "HPValue",
    "SignOutcome",
    "CertifiedSign",
    "MIN_DIGITS",
    "DEFAULT_CAP",
    "default_start_digits",
    "eval_mean_hp",
    "eval_all_hp",
    "margin_hp",
    "margin_hp_with_scale",
    "certify_sign",
]

MIN_DIGITS = 30
DEFAULT_CAP = 480
DIGITS_ENV = "MEANS_LAB_DIGITS"

_local = threading.local()


def default_start_digits() -> int:
    raw = os.environ.get(DIGITS_ENV)
    if raw is None or raw.strip() == "":
        return 50
    try:
        digits = int(raw)
    except ValueError:
        raise DomainError(f"{DIGITS_ENV} must be an integer, got {raw!r}") from None
    _check_digits(digits)
    return digits


def _check_digits(digits):
    if int(digits) != digits or digits < MIN_DIGITS:
        raise DomainError(f"digit count must be an integer >= {MIN_DIGITS}, got {digits!r}")


def _ctx(digits: int) -> mpmath.ctx_mp.MPContext:
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(digits)
    if ctx is None:
        ctx = mpmath.ctx_mp.MPContext()
        ctx.dps = digits
        cache[digits] = ctx
    return ctx


@dataclass(frozen=True)
class HPValue:
    value: mpmath.mpf
    digits: int

    def __float__(self):
        return float(self.value)


def _guard_digits(hi, lo):
    # Digits lost to cancellation in hi - lo, in the logs, and in arcsin near 1.
    w = (hi - lo) / (hi + lo) if hi < 1e300 else 0.5 * (hi - lo) / (0.5 * hi + 0.5 * lo)
    guard = 20
    if w > 0:
        guard += max(0, math.ceil(-math.log10(w)))
        guard += max(0, math.ceil(math.log10(hi / lo) / 2)) if hi / lo < math.inf else 160
    guard += max(0, math.ceil(math.log10(1.0 + abs(math.log(hi)))))
    return guard


def _means_literal(ctx, hi, lo):
    x, y = ctx.mpf(hi), ctx.mpf(lo)
    out = {
        "H": 2 * x * y / (x + y),
        "G": ctx.sqrt(x * y),
        "A": (x + y) / 2,
        "Q": ctx.sqrt((x * x + y * y) / 2),
    }
    if x == y:
        out.update(P=x, L=x, I=x)
        return out
    w = (x - y) / (x + y)
    # arcsin(w) through atan2(w, sqrt(1 - w^2)).
    out["P"] = (x - y) / (2 * ctx.atan2(w, ctx.sqrt((1 - w) * (1 + w))))
    out["L"] = (x - y) / (ctx.ln(x) - ctx.ln(y))
    out["I"] = ctx.exp((y * ctx.ln(y) - x * ctx.ln(x)) / (y - x) - 1)
    return out


def _working(pair, digits):
    _check_digits(digits)
    p = as_pair(pair)
    return p, _ctx(digits + _guard_digits(p.hi, p.lo))


def eval_all_hp(pair: PairLike, digits: int) -> dict:
    p, work = _working(pair, digits)
    out = _ctx(digits)
    return {MeanKind(k): HPValue(out.mpf(v), digits) for k, v in _means_literal(work, p.hi, p.lo).items()}


def eval_mean_hp(kind, pair: PairLike, digits: int) -> HPValue:
    """One mean to about ``digits - 3`` significant digits."""
    kind = MeanKind.parse(kind)
    return eval_all_hp(pair, digits)[kind]


def _margin_in(ctx, ineq, m, n):
    if ineq is InequalityId.EQ2_PRODUCT:
        right, left = m["A"] * m["G"], m["Q"] * m["H"]
    elif ineq in (InequalityId.EQ1_POWER, InequalityId.LEMMA_EQ11):
        e = ctx.mpf(n)
        right = m["Q"] ** e + m["H"] ** e
        left = m["A"] ** e + m["G"] ** e
    elif ineq is InequalityId.EQ3_SUM:
        right, left = m["Q"] + m["H"], m["A"] + m["G"]
    elif ineq is InequalityId.EQ4_SANDOR:
        right, left = 2 * m["P"], m["A"] + m["G"]
    elif ineq is InequalityId.EQ6_CONJ:
        right, left = 2 * m["P"], m["Q"] + m["H"]
    elif ineq is InequalityId.P_LE_I:
        right, left = m["I"], m["P"]
    else:
        q = [
            ctx.sqrt(m["Q"] * m["H"]),
            ctx.sqrt(m["A"] * m["G"]),
            ctx.sqrt(m["L"] * m["I"]),
            (m["L"] + m["I"]) / 2,
            (m["G"] + m["A"]) / 2,
            (m["Q"] + m["H"]) / 2,
        ]
        return min(q[k + 1] - q[k] for k in range(5)), q[-1]
    return right - left, max(abs(right), abs(left))


def margin_hp_with_scale(ineq, pair: PairLike, exponent=None, digits: int = 50) -> Tuple[HPValue, HPValue]:
    """Margin and larger-side magnitude, both rounded to ``digits``."""
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    p, work = _working(pair, digits)
    value, scale = _margin_in(work, ineq, _means_literal(work, p.hi, p.lo), n)
    out = _ctx(digits)
    return HPValue(out.mpf(value), digits), HPValue(out.mpf(scale), digits)


def margin_hp(ineq, pair: PairLike, exponent=None, digits: int = 50) -> HPValue:
    return margin_hp_with_scale(ineq, pair, exponent, digits)[0]


class SignOutcome(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO_WITHIN_BOUND = "ZeroWithinBound"

    @property
    def symbol(self) -> str:
        return {"Positive": "+", "Negative": "-", "ZeroWithinBound": "0"}[self.value]


@dataclass(frozen=True)
class CertifiedSign:
    """Outcome of :func:`certify_sign`.

    ``bound`` is the magnitude below which the margin is indistinguishable from
    zero at ``digits``; ``value`` is the margin at the last precision used.
    Both are mpmath numbers because bounds at a few hundred digits underflow
    binary64.
    """

    outcome: SignOutcome
    bound: mpmath.mpf
    digits: int
    value: mpmath.mpf

    @property
    def is_exact_zero(self) -> bool:
        return self.outcome is SignOutcome.ZERO_WITHIN_BOUND and self.value == 0


def _bound(digits, scale):
    ctx = _ctx(digits)
    return ctx.mpf(10) ** (5 - digits) * abs(scale)


def certify_sign(
    ineq,
    pair: PairLike,
    exponent=None,
    start_digits: Optional[int] = None,
    cap: int = DEFAULT_CAP,
) -> CertifiedSign:
    """Certify the sign of a margin by doubling the working precision.

    A sign is accepted once two successive levels ``d`` and ``2d`` agree and
    both exceed ``10**(5-d)`` times the larger side. If the schedule
    ``d, 2d, 4d, ...`` reaches ``cap`` without agreement the result is
    ``ZeroWithinBound``.
    """
    d = default_start_digits() if start_digits is None else start_digits
    _check_digits(d)
    if 2 * d > cap:
        raise DomainError(f"cap {cap} leaves no room to double start precision {d}")
    value, scale = margin_hp_with_scale(ineq, pair, exponent, d)
    while 2 * d <= cap:
        nxt, nscale = margin_hp_with_scale(ineq, pair, exponent, 2 * d)
        v0, v1 = value.value, nxt.value
        if (
            v0 != 0
            and (v0 > 0) == (v1 > 0)
            and abs(v0) > _bound(d, scale.value)
            and abs(v1) > _bound(2 * d, nscale.value)
        ):
            outcome = SignOutcome.POSITIVE if v0 > 0 else SignOutcome.NEGATIVE
            return CertifiedSign(outcome, _bound(d, scale.value), d, v1)
        d *= 2
        value, scale = nxt, nscale
    return CertifiedSign(
        SignOutcome.ZERO_WITHIN_BOUND, _bound(d, scale.value), d, value.value
    )
