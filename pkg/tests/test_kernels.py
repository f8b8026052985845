"""Backend parity for the numeric kernels.

The compiled extension and the numpy reference implement the same three
operations; these tests pin them to each other and to closed forms.
"""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from semistab import kernels
from semistab.kernels import _reference

PARITY_RTOL = 1e-13
LIMIT_RTOL = 1e-12

_speedups = pytest.importorskip(
    "semistab.kernels._speedups",
    reason="compiled extension not built; parity has nothing to compare",
)


def _problem(seed_val, n_modes, pieces, channels, uniform):
    rng = np.random.default_rng(seed_val)
    lam = -rng.uniform(0.01, 2.0, n_modes) + 1j * rng.normal(0.0, 5.0, n_modes)
    if uniform:
        dts = np.full(pieces, rng.uniform(0.05, 0.5))
    else:
        dts = rng.uniform(0.05, 0.5, pieces)
    coeffs = rng.normal(size=(pieces, channels)) + 1j * rng.normal(
        size=(pieces, channels)
    )
    cols = rng.normal(size=(channels, n_modes)) + 1j * rng.normal(
        size=(channels, n_modes)
    )
    x0 = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
    return (
        lam.astype(np.complex128),
        dts,
        coeffs.astype(np.complex128),
        cols.astype(np.complex128),
        x0.astype(np.complex128),
    )


class TestParity:
    @pytest.mark.parametrize("uniform", [True, False])
    @pytest.mark.parametrize(
        "n_modes,pieces,channels", [(1, 1, 1), (7, 13, 2), (64, 40, 3)]
    )
    def test_scan_states(self, n_modes, pieces, channels, uniform):
        args = _problem(3, n_modes, pieces, channels, uniform)
        ref = _reference.scan_states(*args)
        fast = _speedups.scan_states(*args)
        assert fast.shape == (pieces + 1, n_modes)
        np.testing.assert_allclose(fast, ref, rtol=PARITY_RTOL, atol=1e-300)

    @pytest.mark.parametrize("uniform", [True, False])
    def test_scan_norms(self, uniform):
        args = _problem(4, 33, 21, 2, uniform)
        np.testing.assert_allclose(
            _speedups.scan_norms(*args),
            _reference.scan_norms(*args),
            rtol=PARITY_RTOL,
        )

    @pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
    def test_decay_sup_grid(self, beta):
        rng = np.random.default_rng(5)
        re = -rng.uniform(1e-4, 1.0, 200)
        ab = rng.uniform(0.5, 50.0, 200)
        ts = np.geomspace(0.1, 1e4, 40)
        np.testing.assert_allclose(
            _speedups.decay_sup_grid(re, ab, beta, ts),
            _reference.decay_sup_grid(re, ab, beta, ts),
            rtol=PARITY_RTOL,
        )

    @seed(20250819)
    @settings(max_examples=40, deadline=None)
    @given(
        seed_val=st.integers(0, 10_000),
        n_modes=st.integers(1, 24),
        pieces=st.integers(0, 12),
        channels=st.integers(1, 3),
        uniform=st.booleans(),
    )
    def test_scan_parity_property(
        self, seed_val, n_modes, pieces, channels, uniform
    ):
        args = _problem(seed_val, n_modes, pieces, channels, uniform)
        np.testing.assert_allclose(
            _speedups.scan_states(*args),
            _reference.scan_states(*args),
            rtol=PARITY_RTOL,
            atol=1e-300,
        )


class TestSemantics:
    """Closed-form pins, checked against both implementations."""

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_zero_eigenvalue_is_exact_integrator(self, impl):
        # lam = 0 turns each piece into x += dt * forcing, exactly
        lam = np.zeros(3, dtype=np.complex128)
        dts = np.array([0.3, 0.7])
        coeffs = np.array([[2.0 + 0j], [-1.0 + 0j]])
        cols = np.array([[1.0, 10.0, -4.0]], dtype=np.complex128)
        x0 = np.array([1.0, 0.0, 0.5], dtype=np.complex128)
        states = impl.scan_states(lam, dts, coeffs, cols, x0)
        np.testing.assert_array_equal(states[1], x0 + 0.3 * 2.0 * cols[0])
        np.testing.assert_array_equal(
            states[2], states[1] - 0.7 * 1.0 * cols[0]
        )

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_tiny_eigenvalue_matches_expm1(self, impl):
        # below the series cutoff the kernels switch to a Taylor phi; expm1
        # is a precision-safe independent evaluation of the same quotient
        lam = np.array([1e-9 + 2e-9j, -3e-8 + 0j, 1e-12 + 0j])
        dt = 0.25
        dts = np.array([dt])
        coeffs = np.array([[1.0 + 0j]])
        cols = np.ones((1, 3), dtype=np.complex128)
        x0 = np.zeros(3, dtype=np.complex128)
        states = impl.scan_states(lam, dts, coeffs, cols, x0)
        z = lam * dt
        phi_exact = np.expm1(z) / lam
        np.testing.assert_allclose(states[1], phi_exact, rtol=LIMIT_RTOL)

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_uniform_path_equals_chained_pieces(self, impl):
        lam, _, coeffs, cols, x0 = _problem(9, 16, 6, 2, True)
        dts = np.full(6, 0.21)
        whole = impl.scan_states(lam, dts, coeffs, cols, x0)
        x = x0
        for j in range(6):
            step = impl.scan_states(
                lam, dts[j : j + 1], coeffs[j : j + 1], cols, x
            )
            x = step[1]
            np.testing.assert_allclose(
                whole[j + 1], x, rtol=1e-12, atol=1e-300
            )

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_norms_match_state_rows(self, impl):
        args = _problem(11, 20, 15, 2, False)
        states = impl.scan_states(*args)
        norms = impl.scan_norms(*args)
        np.testing.assert_allclose(
            norms, np.linalg.norm(states, axis=1), rtol=1e-13
        )

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_decay_sup_matches_naive_max(self, impl):
        rng = np.random.default_rng(13)
        re = -rng.uniform(0.001, 1.0, 50)
        ab = np.abs(re + 1j * rng.normal(size=50))
        ts = np.array([0.0, 1.0, 10.0, 300.0])
        got = impl.decay_sup_grid(re, ab, 1.5, ts)
        want = [np.max(np.exp(t * re) * ab**-1.5) for t in ts]
        np.testing.assert_allclose(got, want, rtol=1e-13)

    @pytest.mark.parametrize("impl", [_reference, _speedups],
                             ids=["reference", "compiled"])
    def test_empty_piece_list(self, impl):
        lam = np.array([-1.0 + 1j])
        dts = np.zeros(0)
        coeffs = np.zeros((0, 1), dtype=np.complex128)
        cols = np.ones((1, 1), dtype=np.complex128)
        x0 = np.array([2.0 + 0j])
        states = impl.scan_states(lam, dts, coeffs, cols, x0)
        assert states.shape == (1, 1)
        np.testing.assert_array_equal(states[0], x0)
        np.testing.assert_array_equal(
            impl.scan_norms(lam, dts, coeffs, cols, x0), [2.0]
        )


class TestDispatch:
    def test_active_backend_is_compiled_here(self):
        # the extension imported above, so the dispatcher must have taken it
        # unless the fallback was forced through the environment
        if os.environ.get("SEMISTAB_NO_EXT"):
            assert kernels.BACKEND == "reference"
        else:
            assert kernels.BACKEND == "compiled"

    def test_env_var_forces_reference_backend(self):
        env = dict(os.environ, SEMISTAB_NO_EXT="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "from semistab.kernels import BACKEND; print(BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "reference"

    def test_dispatch_accepts_loose_dtypes(self):
        # the wrappers coerce lists / float arrays before dispatch
        states = kernels.scan_states(
            [-1.0], [1.0], [[1.0]], [[1.0]], [0.0]
        )
        assert states.dtype == np.complex128
        np.testing.assert_allclose(states[1], [1.0 - np.exp(-1.0)])
        sup = kernels.decay_sup_grid([-1.0, -2.0], [1.0, 2.0], 1.0, [0.0])
        np.testing.assert_allclose(sup, [1.0])
