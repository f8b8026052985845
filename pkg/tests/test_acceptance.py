"""Acceptance checklist: ten end-to-end reproductions of the package's
headline results, each with pinned tolerances and a wall-clock budget.

Run with ``pytest -v tests/test_acceptance.py`` to get one pass/fail line
per criterion.  The checks are deliberately independent of the unit suites:
every oracle here is recomputed from closed forms or brute force.
"""

import time

import numpy as np
import pytest

from semistab.admissibility import (
    InputOperator,
    carleson_sum_general,
    phi_sums,
    range_condition_margin,
)
from semistab.iss_certify import (
    PowerFn,
    RunRecord,
    bilinear_iiss_envelope,
    probe_asymptotic_gain,
    probe_limit_property,
    verify_envelope,
)
from semistab.scenarios import (
    admissibility_growth_demo,
    build_scenario,
    ugs_failure_demo,
)
from semistab.spectral_core import (
    DiagonalGenerator,
    SpectralVector,
    fractional_power_apply,
    generator_apply,
    graph_norm,
    resolvent_apply,
    semigroup_apply,
)
from semistab.stability_analysis import fit_decay_exponent
from semistab.trajectory_sim import (
    InputSignal,
    NonlinearTerm,
    simulate_linear,
    simulate_semilinear,
)


def _budget(t_start, limit):
    elapsed = time.perf_counter() - t_start
    assert elapsed < limit, f"took {elapsed:.1f}s, budget {limit:.0f}s"


def test_01_powerlaw_decay_exponent_and_curve():
    # lambda_n = -1/n + i n at 1e5 modes: fitted exponent 1.0 +- 0.1 and
    # the decay curve within 10% of the stationary-point value 1/(e t)
    # once t clears 2^8.
    t0 = time.perf_counter()
    scn = build_scenario("powerlaw", alpha=1.0, n_modes=100_000)
    fit = fit_decay_exponent(scn.gen, beta=1.0)
    assert fit.classification == "polynomial"
    assert abs(fit.exponent - 1.0) <= 0.1
    tail = fit.t_grid >= 2.0**8
    oracle = 1.0 / (np.e * fit.t_grid[tail])
    assert np.all(np.abs(fit.values[tail] - oracle) <= 0.10 * oracle)
    _budget(t0, 30.0)


def test_02_decay_exponent_doubles_with_smoothing_order():
    t0 = time.perf_counter()
    gen = build_scenario("powerlaw", alpha=1.0, n_modes=100_000).gen
    e1 = fit_decay_exponent(gen, beta=1.0).exponent
    e2 = fit_decay_exponent(gen, beta=2.0).exponent
    assert abs(e2 / e1 - 2.0) <= 0.15
    _budget(t0, 60.0)


def test_03_beam_spectrum_decay_and_undamped_energy():
    t0 = time.perf_counter()
    scn = build_scenario("beam", n_modes=64)
    assert scn.gen.n_modes == 128
    assert np.all(scn.gen.re < 0.0)
    assert scn.meta["residual"] <= 1e-8
    fit = fit_decay_exponent(scn.gen)
    assert 0.8 <= fit.exponent <= 1.2

    free = build_scenario("beam", n_modes=64, damped=False)
    rng = np.random.default_rng(3)
    x0 = SpectralVector(
        rng.standard_normal(free.gen.n_modes)
        + 1j * rng.standard_normal(free.gen.n_modes)
    )
    x0 = x0 * (1.0 / x0.norm)
    grid = np.linspace(0.0, 100.0, 401)
    traj = simulate_linear(free.gen, None, InputSignal.constant([0.0]), x0, grid)
    assert np.max(np.abs(traj.norms - 1.0)) <= 1e-10
    _budget(t0, 60.0)


def test_04_saturating_channel_convolutions_obey_certified_gain():
    # linear part of the saturating scenario (smoothing order 2 against
    # decay order 1): every unit-sup convolution stays under the certified
    # input gain, horizons out to 1e3.
    t0 = time.perf_counter()
    scn = build_scenario("saturating")
    gain = scn.expected["iss_gain"]
    h = scn.term.h
    grid = np.linspace(0.0, 1000.0, 1001)
    breakpoints = grid[::4][:-1]
    x0 = SpectralVector.zero(scn.gen.n_modes)
    worst = 0.0
    for seed_val in range(100):
        u = InputSignal.random_unit(breakpoints, m=h.rank, seed=seed_val)
        traj = simulate_linear(scn.gen, h, u, x0, grid, store_states=False)
        worst = max(worst, float(np.max(traj.norms)))
    assert worst <= gain + 1e-6
    _budget(t0, 60.0)


def test_05_stripe_sums_bracket_general_carleson_value():
    # separated spectra: per-coefficient stripe sums sit below the general
    # (measure) stripe value, which in turn sits below the bracket
    # (1/gap^2 + 4/p^2) ||b||^2 + stripe total.
    t0 = time.perf_counter()
    cases = []
    for alpha, n in ((0.6, 48), (1.0, 64), (1.5, 48), (2.0, 64)):
        scn = build_scenario("powerlaw", alpha=alpha, n_modes=n)
        cases.append((scn.gen, SpectralVector(scn.b_op.matrix[:, 0])))
    beam = build_scenario("beam", n_modes=24)
    cases.append((beam.gen, SpectralVector(beam.b_op.matrix[:, 0])))
    for seed_val in range(5):
        rng = np.random.default_rng(100 + seed_val)
        n = int(rng.integers(12, 40))
        ims = np.cumsum(rng.uniform(0.5, 2.0, n))
        res = -(10.0 ** rng.uniform(-1.5, 0.7, n))
        gen = DiagonalGenerator.from_eigenvalues(res + 1j * ims)
        b = SpectralVector(
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
        cases.append((gen, b))
    assert len(cases) == 10

    for gen, b in cases:
        rep = phi_sums(gen, b)
        assert rep.gap > 0.0
        general = carleson_sum_general(gen, b).value
        slack = 1e-9 * max(1.0, rep.total, general)
        assert rep.total <= general + slack
        assert general <= rep.upper_bracket + slack
    _budget(t0, 30.0)


def test_06_dyadic_coefficient_rule_decides_admissibility():
    # divergent rule: the admissibility lower estimate grows by >= 1.5x
    # per horizon doubling; convergent rule: it levels off within 10%.
    t0 = time.perf_counter()
    horizons = (4.0, 8.0, 16.0, 32.0)
    div = build_scenario("dyadic", k_max=5, b_rule="divergent")
    assert SpectralVector(div.b_op.matrix[:, 0]).norm < np.inf
    g_div = admissibility_growth_demo(div, horizons)
    assert g_div.ratios.size == 3
    assert np.all(g_div.ratios >= 1.5)

    con = build_scenario("dyadic", k_max=5, b_rule="convergent")
    g_con = admissibility_growth_demo(con, horizons)
    assert np.all(np.abs(g_con.ratios - 1.0) <= 0.10)
    _budget(t0, 60.0)


def test_07_resonant_tones_defeat_uniform_boundedness():
    # half-power coefficients on a decay-order-1 spectrum: resonant tones
    # grow >= 1.3x per doubling and track the per-mode brute-force oracle.
    t0 = time.perf_counter()
    scn = build_scenario("nonadmissible", alpha=1.0, beta=0.5)
    growth = ugs_failure_demo(scn, horizons=(8.0, 16.0, 32.0, 64.0))
    assert growth.ratios.size == 3
    assert np.all(growth.ratios >= 1.3)
    assert np.all(np.abs(growth.values / growth.oracle - 1.0) <= 0.10)
    _budget(t0, 30.0)


def test_08_bilinear_envelope_certifies_fifty_runs():
    t0 = time.perf_counter()
    scn = build_scenario("bilinear")
    exp = scn.expected
    env = bilinear_iiss_envelope(
        exp["m_const"],
        exp["k_const"],
        exp["input_norm"],
        PowerFn(scn.term.chi_slope, 1.0),
        exp["alpha"],
    )
    for r in (0.1, 0.7, 1.3, 2.0, 3.5):
        target = r**4 + 4 * r**3 + 6 * r**2 + 4 * r + np.exp(r) - 1.0
        assert float(env.theta(r)) == pytest.approx(target, rel=1e-12)

    gen, b_op, term = scn.gen, scn.b_op, scn.term
    rng = np.random.default_rng(42)
    grid = np.linspace(0.0, 24.0, 385)
    breakpoints = grid[::16][:-1]
    records = []
    for i in range(50):
        direction = SpectralVector(
            rng.standard_normal(gen.n_modes)
            + 1j * rng.standard_normal(gen.n_modes)
        )
        x0 = direction * (rng.uniform(0.2, 1.5) / graph_norm(gen, direction))
        base = InputSignal.random_unit(breakpoints, m=b_op.rank, seed=1000 + i)
        u = InputSignal(breakpoints, base.values * rng.uniform(0.0, 1.2))
        traj = simulate_semilinear(gen, b_op, term, u, x0, grid)
        assert not traj.blown_up
        records.append(RunRecord(traj, x0, u, graph_norm=graph_norm(gen, x0)))

    report = verify_envelope(env, records)
    assert report.passed and report.n_runs == 50

    # crude a-priori bound: ||x(t)|| <= M (||x0|| + t ||B|| sup||u||)
    # times exp(t K chi(sup||u||)); pointwise on every run
    m_c, k_c, norm_b = exp["m_const"], exp["k_const"], exp["input_norm"]
    slope = scn.term.chi_slope
    for rec in records:
        ts = rec.trajectory.times
        sup_u = rec.u.sup_norm
        ceiling = (
            m_c
            * (rec.x0.norm + ts * norm_b * sup_u)
            * np.exp(ts * k_c * slope * sup_u)
        )
        slack = rec.trajectory.error_estimate + 1e-9
        assert np.all(rec.trajectory.norms <= ceiling + slack)
    _budget(t0, 120.0)


def test_09_attractivity_probes_and_falsification():
    t0 = time.perf_counter()
    scn = build_scenario("powerlaw", alpha=1.0)
    gen, b_op = scn.gen, scn.b_op
    margin = range_condition_margin(gen, b_op, beta=1.05, alpha=1.0)
    assert margin.converges
    mu = PowerFn(margin.bound, 1.0)

    taus = {}
    for eps in (0.1, 0.01):
        for radius in (1.0, 10.0):
            lim = probe_limit_property(gen, b_op, None, mu, eps, radius,
                                       seed=3)
            gai = probe_asymptotic_gain(gen, b_op, None, mu, eps, radius,
                                        seed=3)
            assert lim.passed and gai.passed
            assert lim.tau_hat is not None and np.isfinite(lim.tau_hat)
            assert gai.tau_hat is not None and np.isfinite(gai.tau_hat)
            taus[(eps, radius)] = (lim.tau_hat, gai.tau_hat)
    for radius in (1.0, 10.0):
        assert taus[(0.01, radius)][0] >= taus[(0.1, radius)][0]
        assert taus[(0.01, radius)][1] >= taus[(0.1, radius)][1]

    # an eigenvalue in the right half-plane must produce a witness
    bad = DiagonalGenerator.from_eigenvalues(
        np.array([0.5 + 2.0j, -1.0 + 1.0j, -2.0 - 3.0j, -4.0 + 5.0j])
    )
    rep = probe_limit_property(
        bad, InputOperator.rank_one(np.ones(4)), None,
        PowerFn(1.0, 1.0), 0.1, 1.0, horizon=40.0,
    )
    assert rep.passed is False
    assert rep.witness is not None
    assert rep.tau_hat is None
    _budget(t0, 60.0)


def test_10_core_algebra_invariants_hold_across_random_cases():
    t0 = time.perf_counter()
    for case in range(100):
        rng = np.random.default_rng(9000 + case)
        n = int(rng.integers(3, 24))
        lam = (
            -(10.0 ** rng.uniform(-2.0, 0.8, n))
            + 1j * rng.uniform(-30.0, 30.0, n)
        )
        gen = DiagonalGenerator.from_eigenvalues(lam)
        x = SpectralVector(
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
        scale = max(1.0, x.norm)

        # semigroup law at 1e-12
        s, t = rng.uniform(0.0, 4.0, 2)
        joint = semigroup_apply(gen, s + t, x)
        seq = semigroup_apply(gen, t, semigroup_apply(gen, s, x))
        assert np.linalg.norm(joint.coeffs - seq.coeffs) <= 1e-12 * scale

        # resolvent: defining identity and the two-point identity at 1e-12
        z1 = complex(rng.uniform(0.2, 3.0), rng.uniform(-3.0, 3.0))
        z2 = complex(rng.uniform(0.2, 3.0), rng.uniform(-3.0, 3.0))
        y = resolvent_apply(gen, z1, x)
        recovered = z1 * y.coeffs - generator_apply(gen, y).coeffs
        assert np.linalg.norm(recovered - x.coeffs) <= 1e-12 * scale
        lhs = y.coeffs - resolvent_apply(gen, z2, x).coeffs
        rhs = (z2 - z1) * resolvent_apply(
            gen, z1, resolvent_apply(gen, z2, x)
        ).coeffs
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale

        # fractional-power inverse pair at 1e-10
        beta = float(rng.uniform(0.3, 2.5))
        back = fractional_power_apply(
            gen, beta, fractional_power_apply(gen, -beta, x)
        )
        assert np.linalg.norm(back.coeffs - x.coeffs) <= 1e-10 * scale

        # cocycle of the forced semilinear flow at 1e-8
        col = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        b = InputOperator.rank_one(col / max(1.0, np.linalg.norm(col)))
        term = NonlinearTerm.bilinear(0.2 / np.arange(1.0, n + 1.0))
        u = InputSignal.random_unit([0.0, 0.5, 1.0], m=1, seed=case)
        x0 = x * (0.5 / scale)
        full = simulate_semilinear(
            gen, b, term, u, x0, np.linspace(0.0, 1.5, 49), tol=1e-10
        )
        restart = simulate_semilinear(
            gen, b, term, u.shift(0.5), full.state_at(16),
            np.linspace(0.0, 1.0, 33), tol=1e-10,
        )
        gap = np.linalg.norm(restart.states[-1] - full.states[-1])
        assert gap <= 1e-8
    _budget(t0, 10.0)
