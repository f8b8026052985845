"""Diagonal generator model and the coefficientwise operator calculus.

Everything acts on spectral coordinates: a state is its coefficient sequence
against the eigenvector basis, truncated to N modes.  Norms are coordinate
l2 norms; a non-orthonormal basis is accounted for by the Riesz constant pair
(m1, M1), which turns coordinate operator norms into two-sided brackets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .eigenmodels import (
    ClosedFormModel,
    ExplicitListModel,
    model_from_config,
)
from .errors import DimensionMismatch, NotSectorial, SpectrumHit, UsageError

#: relative tolerance for deciding that a resolvent point hits the spectrum
SPECTRUM_RTOL = 1e-9


class SpectralVector:
    """Immutable coefficient vector against the eigenvector basis."""

    __slots__ = ("_coeffs", "_norm")

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=np.complex128, copy=True).reshape(-1)
        if arr.size == 0:
            raise UsageError("spectral vector must have at least one mode")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise UsageError("spectral vector coefficients must be finite")
        arr.setflags(write=False)
        self._coeffs = arr
        self._norm = None

    @classmethod
    def basis(cls, n_modes: int, index: int) -> "SpectralVector":
        """Basis vector e_index (0-based) in an n_modes-dimensional model."""
        c = np.zeros(n_modes, dtype=np.complex128)
        c[index] = 1.0
        return cls(c)

    @classmethod
    def zero(cls, n_modes: int) -> "SpectralVector":
        return cls(np.zeros(n_modes, dtype=np.complex128))

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def dim(self) -> int:
        return self._coeffs.shape[0]

    @property
    def norm(self) -> float:
        if self._norm is None:
            self._norm = float(np.linalg.norm(self._coeffs))
        return self._norm

    def __add__(self, other):
        self._check(other)
        return SpectralVector(self._coeffs + other._coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralVector(self._coeffs - other._coeffs)

    def __mul__(self, scalar):
        return SpectralVector(self._coeffs * complex(scalar))

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, SpectralVector):
            raise TypeError("expected a SpectralVector")
        if other.dim != self.dim:
            raise DimensionMismatch(
                f"vector dims differ: {self.dim} vs {other.dim}"
            )

    def __repr__(self):
        return f"SpectralVector(dim={self.dim}, norm={self.norm:.6g})"


class DiagonalGenerator:
    """Truncated diagonal generator: N retained eigenvalues plus the Riesz
    constant pair of the underlying basis.

    Parameters
    ----------
    model : ClosedFormModel | ExplicitListModel
    truncation : number of retained modes (for explicit lists, at most the
        list length; defaults to the full list).
    riesz : (m1, M1) frame bounds, 0 < m1 <= M1.  (1, 1) means orthonormal.
    """

    def __init__(self, model, truncation=None, riesz=(1.0, 1.0)):
        if truncation is None:
            if model.max_modes is None:
                raise UsageError("closed-form models need an explicit truncation")
            truncation = model.max_modes
        truncation = int(truncation)
        if truncation < 1:
            raise UsageError("truncation must be >= 1")
        if model.max_modes is not None and truncation > model.max_modes:
            raise UsageError(
                f"truncation {truncation} exceeds the explicit list length "
                f"{model.max_modes}"
            )
        m1, M1 = float(riesz[0]), float(riesz[1])
        if not (0 < m1 <= M1):
            raise UsageError(f"riesz pair must satisfy 0 < m1 <= M1, got {riesz}")
        self.model = model
        self.truncation = truncation
        self.riesz = (m1, M1)
        lam = model.values(truncation)
        if not np.all(np.isfinite(lam.view(np.float64))):
            raise UsageError("eigenvalues must be finite")
        lam.setflags(write=False)
        self._lam = lam

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_eigenvalues(cls, eigenvalues, riesz=(1.0, 1.0)):
        return cls(ExplicitListModel(tuple(eigenvalues)), riesz=riesz)

    @classmethod
    def closed_form(cls, family, truncation, riesz=(1.0, 1.0), **params):
        return cls(ClosedFormModel(family, params), truncation, riesz)

    @classmethod
    def from_config(cls, cfg: dict) -> "DiagonalGenerator":
        try:
            model = model_from_config(cfg["eigenvalues"])
            trunc = cfg["truncation"]
            riesz = tuple(cfg.get("riesz", (1.0, 1.0)))
        except (TypeError, KeyError) as exc:
            raise UsageError(f"bad generator config: missing {exc}") from None
        return cls(model, trunc, riesz)

    def to_config(self) -> dict:
        return {
            "eigenvalues": self.model.to_config(),
            "truncation": self.truncation,
            "riesz": list(self.riesz),
        }

    # -- views -------------------------------------------------------------

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._lam

    @property
    def re(self) -> np.ndarray:
        return self._lam.real

    @property
    def n_modes(self) -> int:
        return self.truncation

    @property
    def abs_eigenvalues(self) -> np.ndarray:
        return np.abs(self._lam)

    @property
    def tail(self):
        return self.model.tail

    @property
    def is_sectorial(self) -> bool:
        """All retained eigenvalues strictly in the open left half-plane."""
        return bool(np.all(self._lam.real < 0))

    def riesz_bracket(self, coordinate_value: float):
        """Two-sided state-space bracket for a coordinate operator norm."""
        m1, M1 = self.riesz
        f = np.sqrt(M1 / m1)
        return coordinate_value / f, coordinate_value * f

    def _check_vec(self, x: SpectralVector):
        if x.dim != self.truncation:
            raise DimensionMismatch(
                f"vector has {x.dim} modes, generator retains {self.truncation}"
            )

    def __repr__(self):
        kind = self.model.to_config()["kind"]
        return (
            f"DiagonalGenerator({kind}, N={self.truncation}, "
            f"riesz={self.riesz})"
        )


# -- operator calculus -----------------------------------------------------


def semigroup_apply(gen: DiagonalGenerator, t: float, x: SpectralVector):
    """Coefficientwise e^(t lambda_n) x_n for t >= 0."""
    gen._check_vec(x)
    t = float(t)
    if t < 0:
        raise UsageError(f"semigroup time must be >= 0, got {t}")
    with np.errstate(under="ignore"):
        return SpectralVector(np.exp(t * gen.eigenvalues) * x.coeffs)


def generator_apply(gen: DiagonalGenerator, x: SpectralVector):
    """A x, coefficientwise lambda_n x_n (exact on the truncation)."""
    gen._check_vec(x)
    return SpectralVector(gen.eigenvalues * x.coeffs)


def resolvent_apply(gen: DiagonalGenerator, point, x: SpectralVector):
    """R(point, A) x = x_n / (point - lambda_n).

    Rejects points within relative tolerance SPECTRUM_RTOL of any retained
    eigenvalue, measured against |point| + |lambda_n|.
    """
    gen._check_vec(x)
    point = complex(point)
    dist = np.abs(point - gen.eigenvalues)
    floor = SPECTRUM_RTOL * (abs(point) + gen.abs_eigenvalues)
    hits = dist <= floor
    if np.any(hits):
        idx = int(np.argmax(hits))
        raise SpectrumHit(point, idx, complex(gen.eigenvalues[idx]))
    return SpectralVector(x.coeffs / (point - gen.eigenvalues))


def fractional_power_apply(gen: DiagonalGenerator, beta: float, x: SpectralVector):
    """(-A)^beta x via the principal branch of (-lambda_n)^beta.

    beta may be any real number; beta < 0 gives the inverse powers.
    """
    gen._check_vec(x)
    if not gen.is_sectorial:
        raise NotSectorial(
            "fractional powers need all eigenvalues strictly left of the axis"
        )
    beta = float(beta)
    if beta == 0.0:
        return SpectralVector(x.coeffs)
    weights = (-gen.eigenvalues) ** beta
    return SpectralVector(weights * x.coeffs)


def graph_norm(gen: DiagonalGenerator, x: SpectralVector) -> float:
    """||x|| + ||A x|| on the truncation."""
    gen._check_vec(x)
    return x.norm + float(np.linalg.norm(gen.eigenvalues * x.coeffs))


@dataclass(frozen=True)
class DecayNorm:
    """Coordinate value of ||T(t)(-A)^(-beta)|| with its Riesz bracket."""

    value: float
    lower: float
    upper: float
    t: float
    beta: float

    def __float__(self):
        return self.value


def operator_decay_norm(gen: DiagonalGenerator, beta: float, t: float) -> DecayNorm:
    """sup_n e^(t Re lambda_n) |lambda_n|^(-beta) plus the Riesz bracket."""
    beta = float(beta)
    t = float(t)
    if beta < 0:
        raise UsageError(f"beta must be >= 0, got {beta}")
    if t < 0:
        raise UsageError(f"t must be >= 0, got {t}")
    if not gen.is_sectorial:
        raise NotSectorial(
            "decay norms need all eigenvalues strictly left of the axis"
        )
    value = float(
        kernels.decay_sup_grid(
            gen.re, gen.abs_eigenvalues, beta, np.array([t])
        )[0]
    )
    lo, hi = gen.riesz_bracket(value)
    return DecayNorm(value=value, lower=lo, upper=hi, t=t, beta=beta)


def decay_norm_grid(gen: DiagonalGenerator, beta: float, ts) -> np.ndarray:
    """Vector of coordinate decay-norm values over a grid of times."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size and float(np.min(ts)) < 0:
        raise UsageError("grid times must be >= 0")
    if not gen.is_sectorial:
        raise NotSectorial(
            "decay norms need all eigenvalues strictly left of the axis"
        )
    if beta < 0:
        raise UsageError(f"beta must be >= 0, got {beta}")
    return kernels.decay_sup_grid(gen.re, gen.abs_eigenvalues, float(beta), ts)


def poly_weighted_sup(re_lam, weights, power) -> float:
    """Exact sup over t >= 0 and modes of w_n e^(t Re lambda_n) (t+1)^power.

    Per mode the maximizer is t* = power/|Re lambda_n| - 1; the sup is closed
    form, so constants built from it are certified rather than grid-sampled.
    Requires Re lambda_n < 0 for every mode.
    """
    re_lam = np.asarray(re_lam, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(re_lam >= 0):
        raise NotSectorial("per-mode decay sup needs Re lambda < 0")
    if power < 0:
        raise UsageError(f"power must be >= 0, got {power}")
    a = -re_lam
    per_mode = np.ones_like(a)
    mask = power > a
    if power > 0 and np.any(mask):
        am = a[mask]
        with np.errstate(under="ignore", over="ignore"):
            per_mode[mask] = np.maximum(
                1.0, np.exp(am - power) * (power / am) ** power
            )
    return float(np.max(weights * per_mode))
