import math

import pytest

from means_lab import (
    DomainError,
    ScanConfig,
    SignOutcome,
    bracket_ratio_crossing,
    certify_sign,
    exponent_profile,
    hunt,
    min_margin_over_ratio,
    scan,
)
from means_lab.explorer import BOUNDARY, FAILS, HOLDS, golden_section_min


def test_config_validation():
    with pytest.raises(DomainError):
        ScanConfig("EQ2_PRODUCT", (10, 1))
    with pytest.raises(DomainError):
        ScanConfig("EQ2_PRODUCT", (1, 10), t_steps=1)
    with pytest.raises(DomainError):
        ScanConfig("EQ1_POWER", (1, 10))
    with pytest.raises(DomainError):
        ScanConfig("EQ6_CONJ", (1, 10), n_range=(0, 1))
    cfg = ScanConfig("EQ1_POWER", (1, 10), n_range=(0.5, 0.5))
    assert cfg.n_grid() == [0.5]


def test_grids_hit_endpoints_exactly():
    cfg = ScanConfig("EQ6_CONJ", (1.0, 1000.0), t_steps=37)
    g = cfg.t_grid()
    assert g[0] == 1.0 and g[-1] == 1000.0 and len(g) == 37
    assert all(a < b for a, b in zip(g, g[1:]))


def test_golden_section_min():
    x, fx, evals = golden_section_min(lambda u: (u - 0.3) ** 2, -1.0, 2.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8) and fx < 1e-15 and evals < 80
    x, _, evals = golden_section_min(lambda u: (u - 0.3) ** 2, -1.0, 2.0, 1e-10, max_evals=5)
    assert evals <= 5


def test_scan_product_is_nonnegative():
    smap = scan(ScanConfig("EQ2_PRODUCT", (1, 100), t_steps=50))
    assert smap.complete and len(smap) == 50
    assert smap.cells[0].sign == "0" and smap.cells[0].certified
    assert all(c.sign == "+" for c in smap.cells[1:])


def test_scan_conjecture_mixed_signs():
    smap = scan(ScanConfig("EQ6_CONJ", (1, 1000), t_steps=40))
    signs = [c.sign for c in smap.cells[1:]]
    assert signs[0] == "+" and signs[-1] == "-"
    # one sign change: positive then negative
    assert "".join(signs).strip("+").strip("-") == ""


def test_scan_power_rows_nonnegative():
    smap = scan(ScanConfig("EQ1_POWER", (1, 1e4), t_steps=20, n_range=(-1, 1), n_steps=3))
    assert len(smap) == 60
    assert [c.exponent for c in smap.cells[::20]] == [-1.0, 0.0, 1.0]
    assert all(c.sign in "+0" for c in smap.cells)


def test_scan_budget_truncates():
    smap = scan(ScanConfig("EQ6_CONJ", (1, 1000), t_steps=40, budget=10))
    assert not smap.complete and len(smap) == 10


def test_scan_deterministic_across_workers():
    cfg = ScanConfig("EQ1_POWER", (1, 1e3), t_steps=25, n_range=(0, 1), n_steps=5, seed=7)
    assert scan(cfg, workers=1) == scan(cfg, workers=4)


def test_hunt_conjecture_small_range_finds_nothing():
    res = hunt(ScanConfig("EQ6_CONJ", (1, 10)))
    assert not res.found and res.complete
    assert res.min_margin >= 0
    assert res.min_certified is not None


def test_hunt_conjecture_finds_certified_witness():
    res = hunt(ScanConfig("EQ6_CONJ", (1, 1000), seed=3))
    w = res.witness
    assert w is not None and 10 < w.t < 100
    assert w.certified.outcome is SignOutcome.NEGATIVE and w.margin < 0
    # Witnesses re-verify at twice the recorded precision.
    again = certify_sign("EQ6_CONJ", w.ratio.to_pair(), None, start_digits=2 * w.digits, cap=4 * w.digits)
    assert again.outcome is SignOutcome.NEGATIVE


def test_hunt_fractional_exponent_near_diagonal():
    res = hunt(ScanConfig("EQ1_POWER", (1.01, 2), n_range=(0.5, 0.5)))
    assert res.found and 1.01 <= res.witness.t <= 2
    assert res.witness.exponent == 0.5


def test_hunt_is_deterministic():
    cfg = ScanConfig("EQ1_POWER", (1, 1e3), n_range=(0.1, 0.9), n_steps=3, seed=11)
    assert hunt(cfg) == hunt(cfg)
    cfg = ScanConfig("EQ6_CONJ", (1, 10), seed=11)
    assert hunt(cfg, seed=5) == hunt(cfg, seed=5)


def test_hunt_budget_exhaustion_reports_minimum():
    res = hunt(ScanConfig("EQ6_CONJ", (1, 10), budget=20))
    assert not res.complete and not res.found and res.evaluations == 20
    assert math.isfinite(res.min_margin)


@pytest.mark.parametrize(
    "ineq, n_range",
    [("EQ2_PRODUCT", None), ("EQ4_SANDOR", None), ("CHAIN_EQ10", None), ("P_LE_I", None),
     ("EQ1_POWER", (-10, 10))],
)
def test_no_false_alarms_on_proved_inequalities(ineq, n_range):
    steps = 21 if n_range else None
    res = hunt(ScanConfig(ineq, (1, 1e8), n_range=n_range, n_steps=steps))
    assert not res.found


def test_bracket_conjecture_crossing():
    b = bracket_ratio_crossing("EQ6_CONJ", 10, 100, tol_t=1e-6)
    assert 10 < b.t_minus < b.t_plus < 100
    assert b.log_width <= 1e-6
    assert b.sign_minus.outcome is SignOutcome.POSITIVE
    assert b.sign_plus.outcome is SignOutcome.NEGATIVE
    assert b.t_minus == pytest.approx(82.0155, rel=1e-5)


def test_bracket_fractional_exponent():
    b = bracket_ratio_crossing("EQ1_POWER", 1.22, 1e6, exponent=0.5, tol_t=1e-6)
    assert b.sign_minus.outcome is SignOutcome.NEGATIVE
    assert b.sign_plus.outcome is SignOutcome.POSITIVE
    assert b.log_width <= 1e-6


def test_bracket_rejects_same_sign():
    with pytest.raises(DomainError):
        bracket_ratio_crossing("EQ6_CONJ", 2, 10)
    with pytest.raises(DomainError):
        bracket_ratio_crossing("EQ2_PRODUCT", 1, 10)


def test_min_margin_examples():
    r = min_margin_over_ratio("EQ2_PRODUCT", (1, 1e6))
    assert r.t == 1.0 and r.margin == 0.0
    assert r.certified.outcome is SignOutcome.ZERO_WITHIN_BOUND
    r = min_margin_over_ratio("EQ1_POWER", (1, 1e3), 0.5, open_lower=True)
    assert r.margin < 0 and 1 < r.t < 1e3
    r = min_margin_over_ratio("EQ1_POWER", (1, 1e3), -0.5, open_lower=True)
    assert r.margin >= 0


def test_exponent_profile_rows():
    prof = exponent_profile([-0.5, 0, 0.5, 1], t_range=(1, 1e6))
    assert [r.n for r in prof.rows] == [-0.5, 0.0, 0.5, 1.0]
    assert prof.row(0.5).classification == FAILS
    assert prof.row(0.5).certified.outcome is SignOutcome.NEGATIVE
    for n in (-0.5, 0, 1):
        assert prof.row(n).classification == HOLDS
    assert BOUNDARY not in {r.classification for r in prof.rows}


def test_exponent_profile_deterministic_across_workers():
    ns = [-1, 0.25, 0.75, 2]
    assert exponent_profile(ns, workers=1) == exponent_profile(ns, workers=4)
