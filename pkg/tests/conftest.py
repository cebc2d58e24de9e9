"""Shared helpers.

``literal`` evaluates the means straight from their closed forms with a
private mpmath context. It shares no code with ``means_lab`` and serves as the
independent reference for binary64 results.
"""
import math

import mpmath
import numpy as np
import pytest

_CTX = mpmath.ctx_mp.MPContext()
_CTX.dps = 80


def literal(x, y):
    ctx = _CTX
    x, y = ctx.mpf(x), ctx.mpf(y)
    out = {
        "H": 2 * x * y / (x + y),
        "G": ctx.sqrt(x * y),
        "A": (x + y) / 2,
        "Q": ctx.sqrt((x ** 2 + y ** 2) / 2),
    }
    if x == y:
        out.update(P=x, L=x, I=x)
    else:
        out["P"] = (x - y) / (2 * ctx.asin((x - y) / (x + y)))
        out["L"] = (x - y) / (ctx.ln(x) - ctx.ln(y))
        out["I"] = ctx.exp((y * ctx.ln(y) - x * ctx.ln(x)) / (y - x) - 1)
    return out


def rel_err(value, ref):
    ref = _CTX.mpf(ref)
    return float(abs((_CTX.mpf(value) - ref) / ref))


def log_uniform_ratios(rng, size, t_lo, t_hi):
    """Ratios with ``log(t - 1)`` uniform, so the near-diagonal is well covered."""
    lo, hi = math.log(t_lo - 1.0), math.log(t_hi - 1.0)
    return 1.0 + np.exp(rng.uniform(lo, hi, size=size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance outcomes, filled in by test_acceptance and printed at the end of the run.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
