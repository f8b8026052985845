"""Tests for spectral-gap reports, the polynomial spectral condition search,
and decay-exponent fits.

Closed-form oracles used below:

* powerlaw family, alpha = 1, beta = 1: the decay curve is
  sup_n |lambda_n|^-1 e^(-t/n) ~ 1/(e t), so the fitted exponent is 1.
* powerlaw alpha = 2, beta = 1: sup_n n^-1 e^(-t/n^2) = e^(-1/2)/sqrt(2 t)
  up to O(1/t) discreteness, exponent 1/2.
* scores |Im lambda| |Re lambda|^(1/alpha) are exactly 1 for the matched
  powerlaw/dyadic families, so the grid search must return C = 1, and decay
  like log(n)/n for the powerlaw_logim family, which must fail the tail
  trend test.
"""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from semistab.errors import UsageError
from semistab.spectral_core import DiagonalGenerator
from semistab.stability_analysis import (
    EVIDENCE_CERTIFIED,
    EVIDENCE_FINITE,
    check_polynomial_spectral_condition,
    check_spectral_gap,
    fit_decay_exponent,
)

SLOPE_TOL = 0.03     # fitted exponent vs closed-form asymptote
RATIO_RTOL = 0.15    # consistency of exponent ratios across beta
C_TOL = 1e-9


# ---------------------------------------------------------------------------
# spectral gap


def test_gap_powerlaw_certified():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=256, alpha=1.0)
    rep = check_spectral_gap(gen)
    assert rep.gap == pytest.approx(1.0 / 256.0, rel=1e-15)
    assert rep.semi_uniform
    assert rep.evidence == EVIDENCE_CERTIFIED
    assert rep.n_modes == 256


def test_gap_explicit_list_is_finite_evidence():
    gen = DiagonalGenerator.from_eigenvalues([-1 + 2j, -3 + 0j])
    rep = check_spectral_gap(gen)
    assert rep.gap == pytest.approx(1.0)
    assert rep.semi_uniform
    assert rep.evidence == EVIDENCE_FINITE


def test_gap_right_halfplane_mode_breaks_stability():
    gen = DiagonalGenerator.from_eigenvalues([-1 + 0j, 0.25 + 1j])
    rep = check_spectral_gap(gen)
    assert not rep.semi_uniform
    assert rep.gap == pytest.approx(0.25)


def test_gap_axis_accumulation_without_im_escape():
    # constant eigenvalue on the axis: the tail stays on a bounded axis
    # window, so no semi-uniform certificate
    gen = DiagonalGenerator.closed_form("uniform", truncation=16, re=0.0, im=1.0)
    rep = check_spectral_gap(gen)
    assert not rep.semi_uniform
    assert rep.evidence == EVIDENCE_CERTIFIED


# ---------------------------------------------------------------------------
# polynomial spectral condition


def test_condition_powerlaw_alpha1_exact_constant():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=512, alpha=1.0)
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert rep.holds
    assert rep.constant == pytest.approx(1.0, abs=C_TOL)
    assert rep.threshold == pytest.approx(1.0)
    assert not rep.vacuous
    assert rep.witness is None
    assert rep.evidence == EVIDENCE_CERTIFIED
    assert rep.score_infimum == pytest.approx(1.0, abs=1e-9)


def test_condition_dyadic_alpha1():
    gen = DiagonalGenerator.closed_form("dyadic", truncation=1024)
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert rep.holds
    assert rep.constant == pytest.approx(1.0, abs=C_TOL)
    assert not rep.vacuous


def test_condition_logim_fails_tail_trend():
    # scores log(n)/n -> 0: any C found on a truncation is an artifact
    n = 4096
    gen = DiagonalGenerator.closed_form("powerlaw_logim", truncation=n, alpha=1.0)
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert not rep.holds
    assert rep.constant is None
    assert rep.witness is not None
    idx, lam = rep.witness
    assert idx >= n // 4
    assert lam == pytest.approx(gen.eigenvalues[idx])
    assert 0 < rep.score_infimum < 0.01


def test_condition_mismatched_alpha_fails():
    # alpha = 2 eigenvalues probed with alpha = 1: scores n^-1 -> 0
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=512, alpha=2.0)
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert not rep.holds
    assert rep.witness is not None


def test_condition_matched_alpha2():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=512, alpha=2.0)
    rep = check_polynomial_spectral_condition(gen, alpha=2.0)
    assert rep.holds
    assert rep.constant == pytest.approx(1.0, abs=1e-6)


def test_condition_vacuous_for_uniform_gap():
    # every eigenvalue sits at Re = -1: all strips Re > -p with p <= 1 are
    # empty, so the condition holds vacuously with an infinite constant
    gen = DiagonalGenerator.closed_form("uniform", truncation=32, re=-1.0, im=7.0)
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert rep.holds
    assert rep.vacuous
    assert rep.constant == np.inf
    assert rep.score_infimum is None


def test_condition_witnesses_right_halfplane():
    gen = DiagonalGenerator.from_eigenvalues([-1 + 1j, 0.5 + 3j])
    rep = check_polynomial_spectral_condition(gen, alpha=1.0)
    assert not rep.holds
    assert rep.witness == (1, 0.5 + 3j)
    assert rep.evidence == EVIDENCE_FINITE


def test_condition_rejects_bad_alpha():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=8, alpha=1.0)
    with pytest.raises(UsageError):
        check_polynomial_spectral_condition(gen, alpha=0.0)


@seed(20250819)
@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.5, 3.0, allow_nan=False))
def test_condition_matched_powerlaw_any_alpha(alpha):
    """Matched query on the powerlaw family always certifies C = 1."""
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=64, alpha=alpha)
    rep = check_polynomial_spectral_condition(gen, alpha=alpha)
    assert rep.holds
    assert not rep.vacuous
    assert rep.constant == pytest.approx(1.0, abs=1e-6)
    assert rep.threshold == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# decay-exponent fit


def test_fit_powerlaw_alpha1_exponent_one():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=40000, alpha=1.0)
    ts = np.geomspace(2.0**4, 2.0**14, 11)
    fit = fit_decay_exponent(gen, beta=1.0, t_grid=ts)
    assert fit.classification == "polynomial"
    assert fit.exponent == pytest.approx(1.0, abs=SLOPE_TOL)
    assert fit.residual <= 0.05
    assert fit.beta == 1.0
    np.testing.assert_allclose(fit.t_grid, ts)

    # brute-force oracle at t = 256 (grid point index 4), built from scratch
    n = np.arange(1, 40001, dtype=np.float64)
    lam = -1.0 / n + 1j * n
    brute = float(np.max(np.exp(256.0 * lam.real) / np.abs(lam)))
    assert fit.values[4] == pytest.approx(brute, rel=1e-12)
    # asymptote 1/(e t): amplitude sanity at the same point
    assert brute * np.e * 256.0 == pytest.approx(1.0, abs=0.05)


def test_fit_powerlaw_alpha2_exponent_half():
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=2000, alpha=2.0)
    fit = fit_decay_exponent(gen, beta=1.0)
    assert fit.classification == "polynomial"
    assert fit.exponent == pytest.approx(0.5, abs=SLOPE_TOL)


def test_fit_exponent_ratio_across_beta():
    # doubling beta doubles the decay exponent on the alpha = 1 family
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=40000, alpha=1.0)
    e1 = fit_decay_exponent(gen, beta=1.0).exponent
    e2 = fit_decay_exponent(gen, beta=2.0).exponent
    assert e2 / e1 == pytest.approx(2.0, rel=RATIO_RTOL)


def test_fit_single_mode_is_exponential():
    gen = DiagonalGenerator.from_eigenvalues([-1 + 0j])
    fit = fit_decay_exponent(gen, beta=1.0)
    assert fit.classification == "exponential-or-faster"


def test_fit_fast_mode_underflows_to_exponential():
    gen = DiagonalGenerator.from_eigenvalues([-10 + 2j])
    fit = fit_decay_exponent(gen, beta=1.0)
    assert fit.classification == "exponential-or-faster"
    assert fit.exponent is None


def test_fit_flat_curve_is_non_decaying():
    # stable but with a 1e-12 gap: the curve is flat on any practical window
    gen = DiagonalGenerator.from_eigenvalues([-1e-12 + 1j])
    fit = fit_decay_exponent(gen, beta=1.0)
    assert fit.classification == "non-decaying"
    assert fit.exponent is None


def test_fit_requires_semi_uniform_stability():
    gen = DiagonalGenerator.closed_form("uniform", truncation=4, re=0.0, im=1.0)
    with pytest.raises(UsageError):
        fit_decay_exponent(gen, beta=1.0)


@pytest.mark.parametrize(
    "grid",
    [
        np.geomspace(1.0, 1e4, 5),        # too few points
        np.geomspace(1.0, 100.0, 12),     # under three decades
        np.linspace(1.0, 2000.0, 12),     # not geometric
        np.geomspace(1e4, 1.0, 12),       # decreasing
    ],
)
def test_fit_grid_validation(grid):
    gen = DiagonalGenerator.closed_form("powerlaw", truncation=64, alpha=1.0)
    with pytest.raises(UsageError):
        fit_decay_exponent(gen, beta=1.0, t_grid=grid)
