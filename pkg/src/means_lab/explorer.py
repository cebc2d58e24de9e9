"""Sign maps, counterexample hunting and critical-exponent profiling.

Every margin here is a function of the canonical ratio ``t >= 1`` alone (the
means are homogeneous), so all searches run on pairs ``(t, 1)``. Binary64 is
used to look; the extended-precision oracle decides.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, OutOfRangeError
from .inequalities import REL_TOL, InequalityId, MarginRecord, check_exponent, margin_with_scale
from .means import PositivePair, RatioForm, as_pair
from .oracle import CertifiedSign, SignOutcome, certify_sign, margin_hp_with_scale

__all__ = [
    "ScanConfig",
    "SignMap",
    "Witness",
    "HuntResult",
    "Bracket",
    "RatioMinimum",
    "ProfileRow",
    "CriticalProfile",
    "DEFAULT_T_MAX",
    "NEAR_ZERO_FACTOR",
    "golden_section_min",
    "assess_margin",
    "scan",
    "hunt",
    "bracket_ratio_crossing",
    "min_margin_over_ratio",
    "exponent_profile",
]

DEFAULT_T_MAX = 1e8
#: Margins within this many tolerances of zero are handed to the oracle.
NEAR_ZERO_FACTOR = 1e3
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ScanConfig:
    id: InequalityId
    t_range: Tuple[float, float]
    t_steps: int = 64
    log_t: bool = True
    n_range: Optional[Tuple[float, float]] = None
    n_steps: Optional[int] = None
    seed: int = 0
    budget: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "id", InequalityId.parse(self.id))
        t_lo, t_hi = (float(v) for v in self.t_range)
        if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or not (1.0 <= t_lo < t_hi):
            raise DomainError(f"t_range must satisfy 1 <= t_lo < t_hi, got {self.t_range!r}")
        object.__setattr__(self, "t_range", (t_lo, t_hi))
        if int(self.t_steps) != self.t_steps or self.t_steps < 2:
            raise DomainError("t_steps must be an integer >= 2")
        if int(self.budget) != self.budget or self.budget < 1:
            raise DomainError("budget must be a positive integer")
        if self.id.needs_exponent:
            if self.n_range is None:
                raise DomainError(f"{self.id.value} requires n_range")
            n_lo, n_hi = (float(v) for v in self.n_range)
            if not (math.isfinite(n_lo) and math.isfinite(n_hi)) or n_lo > n_hi:
                raise DomainError(f"n_range must satisfy n_lo <= n_hi, got {self.n_range!r}")
            steps = self.n_steps if self.n_steps is not None else (1 if n_lo == n_hi else 2)
            if int(steps) != steps or steps < 1 or (steps == 1) != (n_lo == n_hi):
                raise DomainError("n_steps must be >= 2, or 1 for a single exponent")
            object.__setattr__(self, "n_range", (n_lo, n_hi))
            object.__setattr__(self, "n_steps", int(steps))
            for n in self.n_grid():
                check_exponent(self.id, n)
        elif self.n_range is not None or self.n_steps is not None:
            raise DomainError(f"{self.id.value} takes no exponent range")

    def t_grid(self) -> List[float]:
        t_lo, t_hi = self.t_range
        if self.log_t:
            grid = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), self.t_steps))
        else:
            grid = np.linspace(t_lo, t_hi, self.t_steps)
        grid[0], grid[-1] = t_lo, t_hi
        return [float(t) for t in grid]

    def n_grid(self) -> List[Optional[float]]:
        if self.n_range is None:
            return [None]
        n_lo, n_hi = self.n_range
        if self.n_steps == 1:
            return [n_lo]
        grid = np.linspace(n_lo, n_hi, self.n_steps)
        grid[0], grid[-1] = n_lo, n_hi
        return [float(n) for n in grid]

    def to_dict(self) -> dict:
        return {
            "id": self.id.value,
            "t_range": list(self.t_range),
            "t_steps": self.t_steps,
            "log_t": self.log_t,
            "n_range": None if self.n_range is None else list(self.n_range),
            "n_steps": self.n_steps,
            "seed": self.seed,
            "budget": self.budget,
        }


def _pair(t: float) -> PositivePair:
    return RatioForm(t).to_pair()


def _sign(value: float) -> str:
    return "+" if value > 0 else "-" if value < 0 else "0"


def _rng(seed: int, *keys: int) -> np.random.Generator:
    # Keyed by (seed, row, cell) so draws never depend on evaluation order.
    return np.random.default_rng(np.random.SeedSequence([seed & _SEED_MASK, *keys]))


def golden_section_min(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_evals: int = 200
) -> Tuple[float, float, int]:
    """Minimize ``f`` on ``(a, b)`` by golden-section search.

    Only interior points are evaluated. Returns ``(x_best, f_best, evals)``,
    the best point actually evaluated.
    """
    if not a < b:
        raise DomainError("golden_section_min needs a < b")
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    best = min((f1, x1), (f2, x2))
    while abs(b - a) > tol and evals < max_evals:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
            best = min(best, (f1, x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
            best = min(best, (f2, x2))
        evals += 1
    return best[1], best[0], evals


def _margin_at(ineq, t, n):
    """Binary64 margin and side scale at ``(t, 1)``; ``None`` on overflow."""
    try:
        return margin_with_scale(ineq, _pair(t), n)
    except OutOfRangeError:
        return None


def _map(fn, items, workers):
    if workers is None or workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- scan -------------------------------------------------------------------


@dataclass(frozen=True)
class SignMap:
    config: ScanConfig
    cells: Tuple[MarginRecord, ...]
    complete: bool

    def __len__(self):
        return len(self.cells)


def assess_margin(ineq, pair, exponent=None, start_digits=None, force: bool = False) -> MarginRecord:
    """Margin record for one pair, certified by the oracle when the binary64
    value is near zero, overflows, or ``force`` is set."""
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    pair = as_pair(pair)
    if not force:
        try:
            value, scale = margin_with_scale(ineq, pair, n)
        except OutOfRangeError:
            pass
        else:
            if abs(value) >= NEAR_ZERO_FACTOR * REL_TOL * scale:
                return MarginRecord(ineq, pair, n, value, 16, value / scale, _sign(value), False)
    cert = certify_sign(ineq, pair, n, start_digits)
    hp_value, hp_scale = margin_hp_with_scale(ineq, pair, n, cert.digits)
    rel = float(hp_value.value / hp_scale.value) if hp_scale.value else 0.0
    return MarginRecord(
        ineq, pair, n, float(hp_value.value), cert.digits, rel, cert.outcome.symbol, True
    )


def scan(config: ScanConfig, workers: int = 1, start_digits: Optional[int] = None) -> SignMap:
    """Evaluate the margin on the (n, t) grid in row-major order.

    Cells whose binary64 margin lies within ``NEAR_ZERO_FACTOR`` tolerances of
    zero (or overflows) are re-evaluated and sign-certified by the oracle.
    At most ``config.budget`` cells are evaluated; a truncated map has
    ``complete=False``.
    """
    points = [(t, n) for n in config.n_grid() for t in config.t_grid()]
    complete = len(points) <= config.budget
    points = points[: config.budget]
    cells = _map(lambda tn: assess_margin(config.id, _pair(tn[0]), tn[1], start_digits), points, workers)
    return SignMap(config, tuple(cells), complete)


# -- hunt -------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A certified counterexample at ratio ``t`` (scale 1)."""

    ratio: RatioForm
    exponent: Optional[float]
    margin: float
    certified: CertifiedSign
    digits: int

    @property
    def t(self) -> float:
        return self.ratio.t


@dataclass(frozen=True)
class HuntResult:
    witness: Optional[Witness]
    min_margin: float
    t_at_min: float
    exponent_at_min: Optional[float]
    evaluations: int
    seed: int
    complete: bool = True
    min_certified: Optional[CertifiedSign] = None

    @property
    def found(self) -> bool:
        return self.witness is not None


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    @property
    def left(self):
        return self.limit - self.used

    def take(self):
        if self.used >= self.limit:
            return False
        self.used += 1
        return True


class _BudgetExhausted(Exception):
    pass


def hunt(
    config: ScanConfig,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    refine_samples: int = 32,
    start_digits: Optional[int] = None,
) -> HuntResult:
    """Search for a certified negative margin.

    For each exponent row: evaluate the coarse ``t`` grid in ascending order
    and take the first cell whose negative margin certifies; descend by
    golden-section search within the cell that ends there. If the grid shows
    no certified negative, draw seeded log-uniform samples around the
    smallest-margin cell and descend from the best. The result is the witness
    closest to the diagonal among the grid's sign changes, deterministic for a
    given seed and budget.
    """
    ineq = config.id
    seed = config.seed if seed is None else int(seed)
    spend = _Budget(config.budget if budget is None else int(budget))
    grid = config.t_grid()
    best = (math.inf, grid[0], None)

    def evaluate(t, n):
        nonlocal best
        if not spend.take():
            raise _BudgetExhausted
        res = _margin_at(ineq, t, n)
        value = math.inf if res is None else res[0]
        if value < best[0]:
            best = (value, t, n)
        return value

    def certified_witness(t, n, value):
        cert = certify_sign(ineq, _pair(t), n, start_digits)
        if cert.outcome is SignOutcome.NEGATIVE:
            return Witness(RatioForm(t), n, value, cert, cert.digits)
        return None

    def descend(n, lo, hi):
        log_f = lambda u: evaluate(math.exp(u), n)  # noqa: E731
        max_evals = min(80, spend.left)
        if max_evals < 2 or not lo < hi:
            return None
        u, value, _ = golden_section_min(log_f, math.log(lo), math.log(hi), 1e-12, max_evals)
        return math.exp(u), value

    def row(r, n):
        values = []
        for t in grid:
            values.append(evaluate(t, n))
        for i, value in enumerate(values):
            if value < 0:
                found = certified_witness(grid[i], n, value)
                if found is None:
                    continue
                lo = grid[i - 1] if i > 0 else grid[i]
                try:
                    cand = descend(n, lo, grid[i])
                except _BudgetExhausted:
                    cand = None
                if cand is not None and cand[1] < value:
                    deeper = certified_witness(cand[0], n, cand[1])
                    if deeper is not None:
                        return deeper
                return found
        j = min(range(len(values)), key=lambda k: (values[k], k))
        lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
        rng = _rng(seed, r, j)
        us = rng.uniform(math.log(lo), math.log(hi), size=refine_samples)
        samples = [(evaluate(math.exp(u), n), math.exp(u)) for u in us]
        s_val, s_t = min(samples + [(values[j], grid[j])])
        cand = descend(n, lo, hi)
        if cand is not None and cand[1] < s_val:
            s_t, s_val = cand
        if s_val < 0:
            return certified_witness(s_t, n, s_val)
        return None

    witness = None
    complete = True
    try:
        for r, n in enumerate(config.n_grid()):
            witness = row(r, n)
            if witness is not None:
                break
    except _BudgetExhausted:
        complete = False
    min_margin, cert = best[0], None
    if witness is None and math.isfinite(min_margin):
        cert = certify_sign(ineq, _pair(best[1]), best[2], start_digits)
        min_margin = float(cert.value)
    return HuntResult(witness, min_margin, best[1], best[2], spend.used, seed, complete, cert)


# -- bracket ----------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    t_minus: float
    t_plus: float
    sign_minus: CertifiedSign
    sign_plus: CertifiedSign

    @property
    def log_width(self) -> float:
        return math.log(self.t_plus) - math.log(self.t_minus)


def bracket_ratio_crossing(
    ineq,
    t_lo: float,
    t_hi: float,
    exponent=None,
    tol_t: float = 1e-6,
    start_digits: Optional[int] = None,
) -> Bracket:
    """Bisect on ``log t`` between two ratios whose margins have certified
    opposite signs, until the bracket is at most ``tol_t`` wide in ``log t``.
    Every bisection point is certified, so both ends keep certified signs.
    """
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    if not (1.0 <= t_lo < t_hi) or not math.isfinite(t_hi):
        raise DomainError("bracket needs 1 <= t_lo < t_hi")
    if not tol_t > 0:
        raise DomainError("tol_t must be positive")

    def certify(t):
        return certify_sign(ineq, _pair(t), n, start_digits)

    s_lo, s_hi = certify(t_lo), certify(t_hi)
    zero = SignOutcome.ZERO_WITHIN_BOUND
    if zero in (s_lo.outcome, s_hi.outcome) or s_lo.outcome is s_hi.outcome:
        raise DomainError(
            f"endpoints need certified opposite signs, got {s_lo.outcome.value} at t={t_lo!r} "
            f"and {s_hi.outcome.value} at t={t_hi!r}"
        )
    lo, hi = t_lo, t_hi
    while math.log(hi) - math.log(lo) > tol_t:
        mid = math.exp(0.5 * (math.log(lo) + math.log(hi)))
        if not lo < mid < hi:
            break
        s_mid = certify(mid)
        if s_mid.outcome is zero:
            raise DomainError(f"margin is indistinguishable from zero at t={mid!r}")
        if s_mid.outcome is s_lo.outcome:
            lo, s_lo = mid, s_mid
        else:
            hi, s_hi = mid, s_mid
    return Bracket(lo, hi, s_lo, s_hi)


# -- minimum over the ratio and exponent profile ------------------------------


@dataclass(frozen=True)
class RatioMinimum:
    t: float
    margin: float
    scale: float
    certified: Optional[CertifiedSign] = None


def min_margin_over_ratio(
    ineq,
    t_range: Tuple[float, float],
    exponent=None,
    refine_tol: float = 1e-10,
    grid_points: int = 512,
    open_lower: bool = False,
    start_digits: Optional[int] = None,
) -> RatioMinimum:
    """Smallest margin over ``t`` in ``t_range``.

    A log grid of ``grid_points`` ratios locates the best cell and a
    golden-section search on ``log t`` refines it to ``refine_tol``. With
    ``open_lower`` the lower end is excluded. The result is certified by the
    oracle when it lies within ``NEAR_ZERO_FACTOR`` tolerances of zero, and
    its margin is then the oracle's value.
    """
    ineq = InequalityId.parse(ineq)
    n = check_exponent(ineq, exponent)
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if not (1.0 <= t_lo < t_hi) or not math.isfinite(t_hi):
        raise DomainError("t_range must satisfy 1 <= t_lo < t_hi")
    if grid_points < 3:
        raise DomainError("grid_points must be >= 3")
    us = np.linspace(math.log(t_lo), math.log(t_hi), grid_points)
    grid = [float(v) for v in np.exp(us)]
    grid[0], grid[-1] = t_lo, t_hi
    start = 1 if open_lower else 0

    def value_at(t):
        res = _margin_at(ineq, t, n)
        if res is None:
            hp, hs = margin_hp_with_scale(ineq, _pair(t), n, 50)
            return float(hp.value), float(hs.value)
        return res

    evaluated = [(value_at(grid[k]), k) for k in range(start, grid_points)]
    (_, _), i = min(evaluated, key=lambda item: (item[0][0], item[1]))
    best_value, best_scale = dict((k, v) for v, k in evaluated)[i]
    best_t = grid[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    if lo < hi:
        u, v, _ = golden_section_min(
            lambda u: value_at(math.exp(u))[0], math.log(lo), math.log(hi), refine_tol
        )
        if v < best_value:
            best_t = math.exp(u)
            best_value, best_scale = value_at(best_t)
    cert = None
    if abs(best_value) < NEAR_ZERO_FACTOR * REL_TOL * best_scale:
        cert = certify_sign(ineq, _pair(best_t), n, start_digits)
        best_value = float(cert.value)
    return RatioMinimum(best_t, best_value, best_scale, cert)


HOLDS = "holds-on-grid"
FAILS = "fails"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class ProfileRow:
    n: float
    t_at_min: float
    min_margin: float
    classification: str
    certified: CertifiedSign


@dataclass(frozen=True)
class CriticalProfile:
    rows: Tuple[ProfileRow, ...]
    t_range: Tuple[float, float]
    open_lower: bool = True

    def row(self, n: float) -> ProfileRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def _classify(cert: CertifiedSign) -> str:
    if cert.outcome is SignOutcome.NEGATIVE:
        return FAILS
    if cert.outcome is SignOutcome.POSITIVE or cert.is_exact_zero:
        return HOLDS
    return BOUNDARY


def exponent_profile(
    n_grid: Sequence[float],
    t_range: Tuple[float, float] = (1.0, 1e6),
    open_lower: bool = True,
    grid_points: int = 512,
    refine_tol: float = 1e-10,
    start_digits: Optional[int] = None,
    workers: int = 1,
) -> CriticalProfile:
    """Per-exponent minimum of the power gap over the ratio range.

    Each row is classified from the certified sign of its minimum: ``fails``
    when negative, ``holds-on-grid`` when positive or identically zero, and
    ``boundary`` when the minimum cannot be told apart from zero.
    """
    ns = [float(n) for n in n_grid]
    for n in ns:
        check_exponent(InequalityId.EQ1_POWER, n)

    def one(n):
        res = min_margin_over_ratio(
            InequalityId.EQ1_POWER, t_range, n, refine_tol, grid_points, open_lower, start_digits
        )
        cert = res.certified or certify_sign(
            InequalityId.EQ1_POWER, _pair(res.t), n, start_digits
        )
        return ProfileRow(n, res.t, res.margin, _classify(cert), cert)

    rows = _map(one, ns, workers)
    return CriticalProfile(tuple(rows), (float(t_range[0]), float(t_range[1])), open_lower)
