"""Binary64 evaluation of the seven bivariate means.

All seven means are symmetric and homogeneous of degree one. Every evaluator
canonicalizes the argument order first (``hi >= lo``), so ``M(x, y)`` and
``M(y, x)`` are bit-identical, and removable singularities on the diagonal are
handled through the reduced variable ``w = (hi - lo) / (hi + lo)``.
"""
from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from typing import Mapping, Tuple, Union

from .errors import DomainError

__all__ = [
    "PositivePair",
    "RatioForm",
    "MeanKind",
    "EvalPolicy",
    "DEFAULT_POLICY",
    "as_pair",
    "normalize",
    "eval_classical",
    "eval_seiffert",
    "eval_logarithmic",
    "eval_identric",
    "eval_mean",
    "eval_all",
]

_TINY = sys.float_info.min
_EPS = sys.float_info.epsilon
# Above this magnitude hi + lo may overflow; halve before adding.
_BIG = 2.0 ** 1020
# Branch point for the ill-conditioned inverse hyperbolic forms (t = 3).
_W_SWITCH = 0.5


@dataclass(frozen=True)
class PositivePair:
    """Two strictly positive, finite, normal-range binary64 arguments.

    The original order is kept for reporting; evaluators use ``hi`` and ``lo``.
    """

    x: float
    y: float

    def __post_init__(self):
        for name in ("x", "y"):
            raw = getattr(self, name)
            try:
                v = float(raw)
            except (TypeError, ValueError, OverflowError):
                raise DomainError(f"{name} must be a real number, got {raw!r}") from None
            if math.isnan(v) or math.isinf(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            if v <= 0.0:
                raise DomainError(f"{name} must be strictly positive, got {v!r}")
            if v < _TINY:
                raise DomainError(f"{name}={v!r} is subnormal; inputs must be normal binary64")
            object.__setattr__(self, name, v)

    @property
    def hi(self) -> float:
        return self.x if self.x >= self.y else self.y

    @property
    def lo(self) -> float:
        return self.y if self.x >= self.y else self.x

    @property
    def is_diagonal(self) -> bool:
        return self.x == self.y

    def scaled(self, factor: float) -> "PositivePair":
        return PositivePair(self.x * factor, self.y * factor)


PairLike = Union[PositivePair, Tuple[float, float]]


def as_pair(pair: PairLike) -> PositivePair:
    if isinstance(pair, PositivePair):
        return pair
    try:
        x, y = pair
    except (TypeError, ValueError):
        raise DomainError(f"expected a pair of positive reals, got {pair!r}") from None
    return PositivePair(x, y)


@dataclass(frozen=True)
class RatioForm:
    """Canonical ratio ``t = hi / lo >= 1`` together with ``scale = lo``."""

    t: float
    scale: float = 1.0

    def __post_init__(self):
        t, scale = float(self.t), float(self.scale)
        if not (t >= 1.0) or math.isinf(t):
            raise DomainError(f"ratio t must be a finite real >= 1, got {self.t!r}")
        if not (scale > 0.0) or math.isinf(scale):
            raise DomainError(f"scale must be finite and positive, got {self.scale!r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "scale", scale)

    def to_pair(self) -> PositivePair:
        return PositivePair(self.t * self.scale, self.scale)


def normalize(pair: PairLike) -> RatioForm:
    p = as_pair(pair)
    return RatioForm(p.hi / p.lo, p.lo)


class MeanKind(str, enum.Enum):
    H = "H"
    G = "G"
    A = "A"
    Q = "Q"
    P = "P"
    L = "L"
    I = "I"  # noqa: E741

    @classmethod
    def parse(cls, value: Union[str, "MeanKind"]) -> "MeanKind":
        if isinstance(value, MeanKind):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown mean kind {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class EvalPolicy:
    """Evaluation knobs.

    ``diagonal_window`` is the threshold on ``|w|`` below which the identric
    mean switches to its series. ``working_format`` is ``"binary64"`` or an
    integer decimal digit count, in which case evaluation is delegated to the
    extended-precision oracle.
    """

    diagonal_window: float = 1e-3
    working_format: Union[str, int] = "binary64"

    def __post_init__(self):
        if not (0.0 < self.diagonal_window < 1.0):
            raise DomainError("diagonal_window must lie in (0, 1)")
        wf = self.working_format
        if wf != "binary64" and not (isinstance(wf, int) and wf >= 30):
            raise DomainError("working_format must be 'binary64' or an integer digit count >= 30")

    @property
    def extended_digits(self):
        return None if self.working_format == "binary64" else int(self.working_format)


DEFAULT_POLICY = EvalPolicy()


def _half_sum(hi, lo):
    if hi > _BIG:
        return 0.5 * hi + 0.5 * lo
    return 0.5 * (hi + lo)


def _reduced(hi, lo):
    """Return ``(w, a)`` with ``w = (hi-lo)/(hi+lo)`` and ``a`` the arithmetic mean."""
    a = _half_sum(hi, lo)
    # hi - lo is exact whenever lo <= hi <= 2 lo.
    w = 0.5 * (hi - lo) / a if hi > _BIG else (hi - lo) / (hi + lo)
    return w, a


def _geometric(hi, lo):
    return math.sqrt(hi) * math.sqrt(lo)


def _classical(kind, hi, lo):
    if kind is MeanKind.A:
        return _half_sum(hi, lo)
    if kind is MeanKind.G:
        return _geometric(hi, lo)
    r = lo / hi
    if kind is MeanKind.H:
        return lo * (2.0 / (1.0 + r))
    # Factor out hi so hi**2 never overflows.
    return hi * math.sqrt(0.5 * (1.0 + r * r))


def eval_classical(kind, pair: PairLike) -> float:
    """Harmonic, geometric, arithmetic or quadratic mean."""
    kind = MeanKind.parse(kind)
    if kind not in (MeanKind.H, MeanKind.G, MeanKind.A, MeanKind.Q):
        raise DomainError(f"{kind.value} is not a classical mean; use eval_mean")
    p = as_pair(pair)
    if p.is_diagonal:
        return p.hi
    return _classical(kind, p.hi, p.lo)


def _seiffert(hi, lo):
    # arcsin(w) = atan((hi - lo) / (2 G)); well conditioned for w -> 1.
    g = _geometric(hi, lo)
    half_d = 0.5 * (hi - lo)
    return half_d / math.atan2(half_d, g)


def eval_seiffert(pair: PairLike) -> float:
    """Seiffert mean ``A * w / arcsin(w)``, equal to ``x`` on the diagonal."""
    p = as_pair(pair)
    if p.is_diagonal:
        return p.hi
    return _seiffert(p.hi, p.lo)


def _log_ratio(hi, lo):
    t = hi / lo
    if math.isinf(t):
        return math.log(hi) - math.log(lo)
    return math.log(t)


def _logarithmic(hi, lo):
    w, a = _reduced(hi, lo)
    if w < _W_SWITCH:
        return a * (w / math.atanh(w))
    return (hi - lo) / _log_ratio(hi, lo)


def eval_logarithmic(pair: PairLike) -> float:
    """Logarithmic mean ``A * w / atanh(w)``, equal to ``x`` on the diagonal."""
    p = as_pair(pair)
    if p.is_diagonal:
        return p.hi
    return _logarithmic(p.hi, p.lo)


def _log_identric_over_arith_series(w):
    # ln(I/A) = -sum_{k>=1} w^(2k) / (2k (2k+1))
    w2 = w * w
    power = w2
    total = 0.0
    k = 1
    while True:
        term = power / (2 * k * (2 * k + 1))
        total += term
        if term <= _EPS * total * 0.25:
            break
        power *= w2
        k += 1
    return -total


def _identric(hi, lo, window):
    w, a = _reduced(hi, lo)
    if w < window:
        return a * math.exp(_log_identric_over_arith_series(w))
    if w < _W_SWITCH:
        return a * math.exp(math.atanh(w) / w - 1.0 + 0.5 * math.log1p(-w * w))
    # ln(I/hi) = r ln(t) / (1 - r) - 1 with r = lo/hi; never forms hi**hi.
    r = lo / hi
    return hi * math.exp(_log_ratio(hi, lo) * r / (1.0 - r) - 1.0)


def eval_identric(pair: PairLike, policy: EvalPolicy = DEFAULT_POLICY) -> float:
    """Identric mean evaluated in log-space; equal to ``x`` on the diagonal."""
    p = as_pair(pair)
    if p.is_diagonal:
        return p.hi
    return _identric(p.hi, p.lo, policy.diagonal_window)


def eval_mean(kind, pair: PairLike, policy: EvalPolicy = DEFAULT_POLICY):
    kind = MeanKind.parse(kind)
    if policy.extended_digits is not None:
        from .oracle import eval_mean_hp

        return eval_mean_hp(kind, pair, policy.extended_digits)
    p = as_pair(pair)
    if p.is_diagonal:
        return p.hi
    if kind is MeanKind.P:
        return _seiffert(p.hi, p.lo)
    if kind is MeanKind.L:
        return _logarithmic(p.hi, p.lo)
    if kind is MeanKind.I:
        return _identric(p.hi, p.lo, policy.diagonal_window)
    return _classical(kind, p.hi, p.lo)


def eval_all(pair: PairLike, policy: EvalPolicy = DEFAULT_POLICY) -> Mapping[MeanKind, float]:
    """All seven means in one pass, keyed by :class:`MeanKind` in H, G, A, Q, P, L, I order."""
    p = as_pair(pair)
    hi, lo = p.hi, p.lo
    if p.is_diagonal:
        return {k: hi for k in MeanKind}
    r = lo / hi
    w, a = _reduced(hi, lo)
    g = _geometric(hi, lo)
    half_d = 0.5 * (hi - lo)
    if w < _W_SWITCH:
        at = math.atanh(w)
        lmean = a * (w / at)
        if w < policy.diagonal_window:
            imean = a * math.exp(_log_identric_over_arith_series(w))
        else:
            imean = a * math.exp(at / w - 1.0 + 0.5 * math.log1p(-w * w))
    else:
        lt = _log_ratio(hi, lo)
        lmean = (hi - lo) / lt
        imean = hi * math.exp(lt * r / (1.0 - r) - 1.0)
    return {
        MeanKind.H: lo * (2.0 / (1.0 + r)),
        MeanKind.G: g,
        MeanKind.A: a,
        MeanKind.Q: hi * math.sqrt(0.5 * (1.0 + r * r)),
        MeanKind.P: half_d / math.atan2(half_d, g),
        MeanKind.L: lmean,
        MeanKind.I: imean,
    }
