"""Comparison functions, stability envelopes, and empirical attractivity
probes.

Envelopes bound trajectory norms three ways: uniform global stability
(state gain + input gain), semi-uniform ISS (a two-argument decay kappa in
the graph norm of the initial state plus an input gain), and integral ISS
(kappa plus theta of the running integral of mu).  ``verify_envelope``
checks an envelope against simulated runs with signed margins and simulator
-error slack; the attractivity probes sample initial states from graph-norm
balls and input families and report the earliest horizon that works --
explicitly labeled as sampling evidence, never a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .spectral_core import DiagonalGenerator, SpectralVector, graph_norm
from .trajectory_sim import (
    InputSignal,
    NonlinearTerm,
    Trajectory,
    make_grid,
    simulate_linear,
    simulate_semilinear,
)

PROBE_DISCLAIMER = "empirical evidence over samples, not a proof"

CLASS_K = "K"
CLASS_KINF = "Kinf"
CLASS_L = "L"
CLASS_ZERO = "zero"

#: sampling grid for K/K-infinity validation (0 plus a log ladder; the top
#: stays at 3e2 so exponential-family gains do not overflow)
_K_GRID = np.concatenate([[0.0], np.geomspace(1e-10, 300.0, 41)])

#: sampling grid for L validation (decay checked out to 1e12)
_L_GRID = np.concatenate([[0.0], np.geomspace(1e-6, 1e12, 37)])


# ---------------------------------------------------------------------------
# comparison-function families


class ComparisonFunction:
    """Scalar comparison function r >= 0 -> value >= 0 (vectorized)."""

    family = "abstract"
    declared_class = CLASS_K

    def __call__(self, r):  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": self.family, "class": self.declared_class}


@dataclass(frozen=True)
class PowerFn(ComparisonFunction):
    """coeff * r^exponent; class K-infinity for positive parameters."""

    coeff: float
    exponent: float = 1.0
    family = "power"
    declared_class = CLASS_KINF

    def __post_init__(self):
        if self.coeff <= 0 or self.exponent <= 0:
            raise UsageError("power gain needs coeff > 0 and exponent > 0")

    def __call__(self, r):
        return self.coeff * np.asarray(r, dtype=np.float64) ** self.exponent


@dataclass(frozen=True)
class Log1pFn(ComparisonFunction):
    """coeff * log(1 + r): unbounded but slowly growing."""

    coeff: float
    family = "log1p"
    declared_class = CLASS_KINF

    def __post_init__(self):
        if self.coeff <= 0:
            raise UsageError("log1p gain needs coeff > 0")

    def __call__(self, r):
        return self.coeff * np.log1p(np.asarray(r, dtype=np.float64))


@dataclass(frozen=True)
class ExpMinusOneFn(ComparisonFunction):
    """coeff * (e^r - 1)."""

    coeff: float
    family = "exp-minus-one"
    declared_class = CLASS_KINF

    def __post_init__(self):
        if self.coeff <= 0:
            raise UsageError("exp-minus-one gain needs coeff > 0")

    def __call__(self, r):
        return self.coeff * np.expm1(np.asarray(r, dtype=np.float64))


@dataclass(frozen=True)
class ZeroFn(ComparisonFunction):
    """Degenerate zero gain (for input-free or forcing-free bounds)."""

    family = "zero"
    declared_class = CLASS_ZERO

    def __call__(self, r):
        return np.zeros_like(np.asarray(r, dtype=np.float64))


def _combined_class(parts) -> str:
    classes = {p.declared_class for p in parts}
    if classes <= {CLASS_ZERO}:
        return CLASS_ZERO
    if CLASS_L in classes:
        raise UsageError("cannot combine class-L parts into a gain")
    if CLASS_KINF in classes:
        return CLASS_KINF
    return CLASS_K


class SumFn(ComparisonFunction):
    """Pointwise sum of gains."""

    family = "sum-of"

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise UsageError("sum-of needs at least one part")
        self.parts = parts
        self.declared_class = _combined_class(parts)

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        out = self.parts[0](r)
        for p in self.parts[1:]:
            out = out + p(r)
        return out


class MaxFn(ComparisonFunction):
    """Pointwise maximum of gains."""

    family = "max-of"

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise UsageError("max-of needs at least one part")
        self.parts = parts
        self.declared_class = _combined_class(parts)

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        out = self.parts[0](r)
        for p in self.parts[1:]:
            out = np.maximum(out, p(r))
        return out


class ScaledFn(ComparisonFunction):
    """factor * base(r) with factor >= 0 (factor 0 degenerates to zero)."""

    family = "scaled"

    def __init__(self, base: ComparisonFunction, factor: float):
        if factor < 0:
            raise UsageError(f"scale factor must be >= 0, got {factor}")
        self.base = base
        self.factor = float(factor)
        self.declared_class = (
            CLASS_ZERO if factor == 0.0 else base.declared_class
        )

    def __call__(self, r):
        if self.factor == 0.0:
            return np.zeros_like(np.asarray(r, dtype=np.float64))
        return self.factor * self.base(r)


class ComposedFn(ComparisonFunction):
    """outer(inner(r)); K-infinity exactly when both parts are."""

    family = "composed"

    def __init__(self, outer: ComparisonFunction, inner: ComparisonFunction):
        self.outer = outer
        self.inner = inner
        both_inf = {outer.declared_class, inner.declared_class} == {CLASS_KINF}
        if CLASS_ZERO in (outer.declared_class, inner.declared_class):
            self.declared_class = CLASS_ZERO
        else:
            self.declared_class = CLASS_KINF if both_inf else CLASS_K

    def __call__(self, r):
        return self.outer(self.inner(r))


@dataclass(frozen=True)
class PolyDecayL(ComparisonFunction):
    """scale / (1 + t)^exponent: the polynomial class-L factor."""

    scale: float
    exponent: float
    family = "poly-decay"
    declared_class = CLASS_L

    def __post_init__(self):
        if self.scale <= 0 or self.exponent <= 0:
            raise UsageError("poly decay needs scale > 0 and exponent > 0")

    def __call__(self, t):
        return self.scale * (1.0 + np.asarray(t, dtype=np.float64)) ** (
            -self.exponent
        )


def quartic_exp_gain() -> SumFn:
    """theta(r) = r^4 + 4 r^3 + 6 r^2 + 4 r + e^r - 1 (class K-infinity,
    dominates the identity)."""
    return SumFn(
        (
            PowerFn(1.0, 4.0),
            PowerFn(4.0, 3.0),
            PowerFn(6.0, 2.0),
            PowerFn(4.0, 1.0),
            ExpMinusOneFn(1.0),
        )
    )


# ---------------------------------------------------------------------------
# two-argument (KL) functions


class KLFunction:
    """kappa(r, t): class K in r for fixed t, class L in t for fixed r > 0."""

    def __call__(self, r, t):  # pragma: no cover - abstract
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": type(self).__name__}


@dataclass(frozen=True)
class SquaredPlusLinearKL(KLFunction):
    """kappa(r, t) = (m r / (t+1)^(1/alpha))^2 + 2 m r / (t+1)^(1/alpha)."""

    m: float
    alpha: float

    def __post_init__(self):
        if self.m <= 0 or self.alpha <= 0:
            raise UsageError("need m > 0 and alpha > 0")

    def __call__(self, r, t):
        y = self.m * np.asarray(r, dtype=np.float64) * (
            1.0 + np.asarray(t, dtype=np.float64)
        ) ** (-1.0 / self.alpha)
        return y * y + 2.0 * y


@dataclass(frozen=True)
class ProductKL(KLFunction):
    """kappa(r, t) = radial(r) * temporal(t) with radial in K, temporal in L."""

    radial: ComparisonFunction
    temporal: ComparisonFunction

    def __call__(self, r, t):
        return np.asarray(self.radial(r)) * np.asarray(self.temporal(t))


class FrozenTimeFn(ComparisonFunction):
    """r -> kappa(r, t_frozen): the class-K slice of a KL function."""

    family = "frozen-time"
    declared_class = CLASS_K

    def __init__(self, kl: KLFunction, t: float):
        if t < 0:
            raise UsageError(f"frozen time must be >= 0, got {t}")
        self.kl = kl
        self.t = float(t)

    def __call__(self, r):
        return self.kl(r, self.t)


class _FrozenRadiusFn(ComparisonFunction):
    """t -> kappa(r_frozen, t): the class-L slice used by the validator."""

    family = "frozen-radius"
    declared_class = CLASS_L

    def __init__(self, kl: KLFunction, r: float):
        self.kl = kl
        self.r = float(r)

    def __call__(self, t):
        return self.kl(self.r, t)


# ---------------------------------------------------------------------------
# sampled class validators


def is_class_K(fn, grid=None) -> bool:
    """f(0) = 0 exactly and strictly increasing on the sampled grid."""
    grid = _K_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    vals = np.asarray(fn(grid), dtype=np.float64)
    if vals[0] != 0.0 or not np.all(np.isfinite(vals)):
        return False
    return bool(np.all(np.diff(vals) > 0.0))


def is_class_Kinf(fn, grid=None) -> bool:
    """Class K plus sampled unboundedness: still growing by a factor of two
    between the top of the grid and two decades below it."""
    grid = _K_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    if not is_class_K(fn, grid):
        return False
    top = float(grid[-1])
    return bool(fn(top) >= 2.0 * fn(top / 100.0) > 0.0)


def is_class_L(fn, grid=None) -> bool:
    """Positive at 0, strictly decreasing, and decayed to under 1% of the
    initial value by the end of the sampled grid."""
    grid = _L_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    vals = np.asarray(fn(grid), dtype=np.float64)
    if vals[0] <= 0.0 or not np.all(np.isfinite(vals)):
        return False
    if not np.all(np.diff(vals) < 0.0):
        return False
    return bool(vals[-1] <= 0.01 * vals[0])


def is_class_KL(kl: KLFunction, r_grid=(0.5, 1.0, 10.0), t_grid=(0.0, 1.0, 100.0)) -> bool:
    """kappa(., t) in K for each sampled t; kappa(r, .) in L for each
    sampled r > 0."""
    for t in t_grid:
        if not is_class_K(FrozenTimeFn(kl, float(t))):
            return False
    for r in r_grid:
        if r <= 0:
            raise UsageError("KL radius grid must be positive")
        if not is_class_L(_FrozenRadiusFn(kl, float(r))):
            return False
    return True


def check_declared_class(fn: ComparisonFunction) -> bool:
    """Validate fn against the class it declares."""
    cls = fn.declared_class
    if cls == CLASS_ZERO:
        return bool(np.all(np.asarray(fn(_K_GRID)) == 0.0))
    if cls == CLASS_K:
        return is_class_K(fn)
    if cls == CLASS_KINF:
        return is_class_Kinf(fn)
    if cls == CLASS_L:
        return is_class_L(fn)
    raise UsageError(f"unknown comparison class {cls!r}")


# ---------------------------------------------------------------------------
# envelopes


KIND_UGS = "UGS"
KIND_SEMI_ISS = "semiISS"
KIND_IISS = "iISS"

#: relative tolerance on the fitted time-exponent for the polynomial tag
_ALPHA_TAG_RTOL = 0.1


@dataclass(frozen=True)
class Envelope:
    """A certified bound shape for trajectory norms.

    UGS:      ||x(t)|| <= gamma(||x0||) + mu(sup ||u||)
    semiISS:  ||x(t)|| <= kappa(||x0||_A, t) + mu(sup ||u||)
    iISS:     ||x(t)|| <= kappa(||x0||_A, t) + theta(int_0^t mu(||u(s)||) ds)

    ``alpha`` tags kappa's time factor as (t+1)^(-1/alpha); construction
    validates every component against its declared comparison class.
    """

    kind: str
    mu: ComparisonFunction
    gamma: ComparisonFunction | None = None
    kappa: KLFunction | None = None
    theta: ComparisonFunction | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in (KIND_UGS, KIND_SEMI_ISS, KIND_IISS):
            raise UsageError(f"unknown envelope kind {self.kind!r}")
        if self.mu.declared_class not in (CLASS_K, CLASS_KINF, CLASS_ZERO):
            raise UsageError("mu must be a gain (class K, Kinf, or zero)")
        if not check_declared_class(self.mu):
            raise UsageError("mu fails its declared class validator")
        if self.kind == KIND_UGS:
            if self.gamma is None:
                raise UsageError("UGS envelope needs gamma")
            if not (is_class_K(self.gamma) or self.gamma.declared_class == CLASS_ZERO):
                raise UsageError("gamma fails the class-K validator")
        else:
            if self.kappa is None:
                raise UsageError(f"{self.kind} envelope needs kappa")
            if not is_class_KL(self.kappa):
                raise UsageError("kappa fails the KL validator")
        if self.kind == KIND_IISS:
            if self.theta is None:
                raise UsageError("iISS envelope needs theta")
            if not is_class_Kinf(self.theta):
                raise UsageError("theta must validate as class K-infinity")
        if self.alpha is not None:
            if self.alpha <= 0:
                raise UsageError(f"alpha must be positive, got {self.alpha}")
            if self.kappa is None:
                raise UsageError("polynomial tag needs kappa")
            ts = np.geomspace(1e3, 1e7, 9)
            vals = np.asarray(self.kappa(1.0, ts), dtype=np.float64)
            slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
            if abs(slope * self.alpha + 1.0) > _ALPHA_TAG_RTOL:
                raise UsageError(
                    f"kappa's time factor decays with exponent {-slope:.3f}, "
                    f"inconsistent with 1/alpha = {1.0 / self.alpha:.3f}"
                )

    @classmethod
    def ugs(cls, gamma, mu) -> "Envelope":
        return cls(kind=KIND_UGS, mu=mu, gamma=gamma)

    @classmethod
    def semi_iss(cls, kappa, mu, alpha=None) -> "Envelope":
        return cls(kind=KIND_SEMI_ISS, mu=mu, kappa=kappa, alpha=alpha)

    @classmethod
    def iiss(cls, kappa, theta, mu, alpha=None) -> "Envelope":
        return cls(kind=KIND_IISS, mu=mu, kappa=kappa, theta=theta, alpha=alpha)


@dataclass(frozen=True)
class RunRecord:
    """One simulated trajectory with the data the envelope bound needs."""

    trajectory: Trajectory
    x0: SpectralVector
    u: InputSignal
    graph_norm: float | None = None
    label: str | None = None


def envelope_bound(env: Envelope, run: RunRecord) -> np.ndarray:
    """The envelope's right-hand side evaluated on the run's time grid."""
    times = run.trajectory.times
    if env.kind == KIND_UGS:
        level = float(env.gamma(run.x0.norm)) + float(env.mu(run.u.sup_norm))
        return np.full(times.shape, level)
    if run.graph_norm is None:
        raise UsageError(
            f"{env.kind} bound needs the graph norm of the initial state"
        )
    decay = np.asarray(env.kappa(run.graph_norm, times), dtype=np.float64)
    if env.kind == KIND_SEMI_ISS:
        return decay + float(env.mu(run.u.sup_norm))
    integrals = np.array(
        [run.u.integrate_scalar(env.mu, float(t)) for t in times]
    )
    return decay + np.asarray(env.theta(integrals), dtype=np.float64)


def envelope_margins(env: Envelope, run: RunRecord) -> np.ndarray:
    """Signed slack-adjusted margins bound - norm (>= 0 means satisfied)."""
    bound = envelope_bound(env, run)
    slack = run.trajectory.error_estimate + 1e-12 * (1.0 + np.abs(bound))
    return bound + slack - run.trajectory.norms


@dataclass(frozen=True)
class CertificationReport:
    kind: str
    passed: bool
    worst_margin: float
    witness: dict | None
    n_runs: int

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "n_runs": self.n_runs,
        }


def verify_envelope(env: Envelope, runs) -> CertificationReport:
    """Check the envelope on every run at every grid time.

    The margin at each point is bound + slack - norm with slack the
    simulator error estimate (plus a relative epsilon), so numerical noise
    cannot flip a true pass; the report carries the worst signed margin and
    a witness when violated.
    """
    runs = list(runs)
    if not runs:
        raise UsageError("verify_envelope needs at least one run")
    worst = np.inf
    worst_loc = None
    for i, run in enumerate(runs):
        margins = envelope_margins(env, run)
        j = int(np.argmin(margins))
        if margins[j] < worst:
            worst = float(margins[j])
            worst_loc = (i, run, j)
    i, run, j = worst_loc
    witness = None
    if worst < 0.0:
        witness = {
            "run_id": run.label if run.label is not None else i,
            "t": float(run.trajectory.times[j]),
            "norm": float(run.trajectory.norms[j]),
            "bound": float(envelope_bound(env, run)[j]),
        }
    return CertificationReport(
        kind=env.kind,
        passed=bool(worst >= 0.0),
        worst_margin=worst,
        witness=witness,
        n_runs=len(runs),
    )


def bilinear_iiss_envelope(
    m_const: float,
    k_const: float,
    norm_b: float,
    chi: ComparisonFunction | None,
    alpha: float,
) -> Envelope:
    """The explicit polynomial-iISS envelope for bilinear forcing.

    With ||T(t) x|| <= M ||x||_A / (t+1)^(1/alpha), forcing Lipschitz data
    (K, chi), and input operator norm ||B||, the certified components are

      kappa(r, t) = (M r / (t+1)^(1/alpha))^2 + 2 M r / (t+1)^(1/alpha)
      theta(r)    = r^4 + 4 r^3 + 6 r^2 + 4 r + e^r - 1
      mu(r)       = max(M ||B|| r, 4 K chi(r)).
    """
    if m_const < 1.0:
        raise UsageError(
            f"the envelope construction requires m >= 1, got {m_const}"
        )
    if k_const < 0 or norm_b < 0:
        raise UsageError("k and norm_b must be >= 0")
    if alpha <= 0:
        raise UsageError(f"alpha must be positive, got {alpha}")
    parts = []
    if m_const * norm_b > 0:
        parts.append(PowerFn(m_const * norm_b, 1.0))
    if k_const > 0:
        if chi is None:
            raise UsageError("k > 0 needs the Lipschitz gain chi")
        parts.append(ScaledFn(chi, 4.0 * k_const))
    mu = MaxFn(parts) if parts else ZeroFn()
    return Envelope.iiss(
        kappa=SquaredPlusLinearKL(m_const, alpha),
        theta=quartic_exp_gain(),
        mu=mu,
        alpha=alpha,
    )


# ---------------------------------------------------------------------------
# attractivity probes


@dataclass(frozen=True)
class AttractivityReport:
    property_name: str
    passed: bool
    tau_hat: float | None
    witness: dict | None
    eps: float
    radius: float
    n_samples: int
    horizon: float
    disclaimer: str = field(default=PROBE_DISCLAIMER)

    def to_json_dict(self) -> dict:
        return {
            "property": self.property_name,
            "pass": self.passed,
            "tau_hat": self.tau_hat,
            "witness": self.witness,
            "eps": self.eps,
            "radius": self.radius,
            "n_samples": self.n_samples,
            "horizon": self.horizon,
            "disclaimer": self.disclaimer,
        }


def _graph_ball_samples(gen, radius, n_directions, n_radii, rng):
    """Initial states with graph norm stratified over {r, r/2, ...}:
    the slowest mode direction plus random complex directions."""
    if radius == 0.0:
        return [(0.0, SpectralVector.zero(gen.n_modes))]
    dirs = [SpectralVector.basis(gen.n_modes, int(np.argmax(gen.re)))]
    for _ in range(max(0, n_directions - 1)):
        d = rng.standard_normal(gen.n_modes) + 1j * rng.standard_normal(
            gen.n_modes
        )
        dirs.append(SpectralVector(d))
    samples = []
    for j in range(n_radii):
        rho = radius * 0.5**j
        for d in dirs:
            samples.append((rho, d * (rho / graph_norm(gen, d))))
    return samples


def _probe_inputs(m, horizon, n_inputs, rng):
    sigs = [InputSignal.constant(np.zeros(m))]
    amps = [1.0, 0.5, 2.0, 0.25]
    for j in range(max(0, n_inputs - 1)):
        bp = np.linspace(0.0, 0.75 * horizon, 4)
        base = InputSignal.random_unit(bp, m=m, seed=int(rng.integers(2**31)))
        sigs.append(InputSignal(bp, base.values * amps[j % len(amps)]))
    return sigs


def _simulate_for_probe(gen, b_op, term, u, x0, grid, tol):
    if term is None or term.kind == "zero":
        return simulate_linear(gen, b_op, u, x0, grid, store_states=False)
    return simulate_semilinear(gen, b_op, term, u, x0, grid, tol=tol)


def _probe(
    gen,
    b_op,
    term,
    mu,
    eps,
    radius,
    property_name,
    horizon,
    grid_points,
    n_directions,
    n_radii,
    n_inputs,
    seed,
    tol,
):
    if eps <= 0:
        raise UsageError(f"eps must be positive, got {eps}")
    if radius < 0:
        raise UsageError(f"radius must be >= 0, got {radius}")
    if horizon is None:
        horizon = 10.0 * (1.0 + radius / eps)
    if horizon <= 0:
        raise UsageError(f"horizon must be positive, got {horizon}")
    rng = np.random.default_rng(seed)
    states = _graph_ball_samples(gen, radius, n_directions, n_radii, rng)
    m = b_op.rank if b_op is not None else (
        term.n_channels if term is not None and term.n_channels else 1
    )
    inputs = _probe_inputs(m, horizon, n_inputs, rng)
    tau_hat = 0.0
    n_samples = 0
    for rho, x0 in states:
        for k, u in enumerate(inputs):
            n_samples += 1
            grid = make_grid(u, horizon, horizon / grid_points)
            traj = _simulate_for_probe(gen, b_op, term, u, x0, grid, tol)
            target = eps + float(mu(u.sup_norm))
            ok = traj.norms <= target + traj.error_estimate + 1e-12
            if property_name == "limit":
                hits = np.flatnonzero(ok)
                if traj.blown_up or hits.size == 0:
                    witness = {
                        "radius": rho,
                        "input": k,
                        "min_norm": float(np.min(traj.norms)),
                        "target": target,
                    }
                    return AttractivityReport(
                        property_name, False, None, witness, eps, radius,
                        n_samples, horizon,
                    )
                tau_hat = max(tau_hat, float(traj.times[hits[0]]))
            else:
                bad = np.flatnonzero(~ok)
                if traj.blown_up or (bad.size and bad[-1] == ok.size - 1):
                    witness = {
                        "radius": rho,
                        "input": k,
                        "final_norm": float(traj.norms[-1]),
                        "target": target,
                    }
                    return AttractivityReport(
                        property_name, False, None, witness, eps, radius,
                        n_samples, horizon,
                    )
                if bad.size:
                    tau_hat = max(tau_hat, float(traj.times[bad[-1] + 1]))
    return AttractivityReport(
        property_name, True, tau_hat, None, eps, radius, n_samples, horizon
    )


def probe_limit_property(
    gen: DiagonalGenerator,
    b_op,
    term: NonlinearTerm | None,
    mu: ComparisonFunction,
    eps: float,
    radius: float,
    *,
    horizon: float | None = None,
    grid_points: int = 512,
    n_directions: int = 3,
    n_radii: int = 3,
    n_inputs: int = 3,
    seed: int = 0,
    tol: float = 1e-8,
) -> AttractivityReport:
    """Sampled check that every trajectory from the graph-norm ball dips
    below eps + mu(||u||) by some time <= tau-hat (existential in t)."""
    return _probe(
        gen, b_op, term, mu, eps, radius, "limit", horizon, grid_points,
        n_directions, n_radii, n_inputs, seed, tol,
    )


def probe_asymptotic_gain(
    gen: DiagonalGenerator,
    b_op,
    term: NonlinearTerm | None,
    mu: ComparisonFunction,
    eps: float,
    radius: float,
    *,
    horizon: float | None = None,
    grid_points: int = 512,
    n_directions: int = 3,
    n_radii: int = 3,
    n_inputs: int = 3,
    seed: int = 0,
    tol: float = 1e-8,
) -> AttractivityReport:
    """Sampled check that trajectories stay below eps + mu(||u||) for ALL
    grid times past tau-hat (universal in t)."""
    return _probe(
        gen, b_op, term, mu, eps, radius, "asymptotic-gain", horizon,
        grid_points, n_directions, n_radii, n_inputs, seed, tol,
    )


# ---------------------------------------------------------------------------
# converging-input behavior


@dataclass(frozen=True)
class ConvergingInputReport:
    hypothesis_met: bool
    passed: bool
    thresholds: tuple
    crossing_times: tuple
    last_crossed: float | None
    final_norm: float
    horizon: float

    def to_json_dict(self) -> dict:
        return {
            "hypothesis_met": self.hypothesis_met,
            "pass": self.passed,
            "thresholds": list(self.thresholds),
            "crossing_times": list(self.crossing_times),
            "last_crossed": self.last_crossed,
            "final_norm": self.final_norm,
            "horizon": self.horizon,
        }


def check_converging_input_decay(
    gen: DiagonalGenerator,
    b_op,
    term: NonlinearTerm | None,
    u: InputSignal,
    x0: SpectralVector,
    *,
    horizon: float | None = None,
    thresholds=None,
    grid_points: int = 768,
    tol: float = 1e-8,
) -> ConvergingInputReport:
    """Track the norm trace against a decreasing threshold ladder.

    The hypothesis (input tail vanishes) is decidable for piecewise inputs:
    the final piece must be exactly zero.  When it is not met the report
    never claims decay, whatever the trace does.  A threshold counts as
    crossed only when the trace stays below it for the rest of the horizon.
    """
    hypothesis_met = bool(np.linalg.norm(u.values[-1]) == 0.0)
    if horizon is None:
        horizon = max(20.0, 4.0 * float(u.breakpoints[-1]))
    grid = make_grid(u, horizon, horizon / grid_points)
    traj = _simulate_for_probe(gen, b_op, term, u, x0, grid, tol)
    if thresholds is None:
        scale = max(1.0, float(traj.norms[0]))
        thresholds = scale * np.geomspace(0.3, 1e-3, 6)
    thresholds = np.sort(np.asarray(thresholds, dtype=np.float64))[::-1]
    if np.any(thresholds <= 0):
        raise UsageError("thresholds must be positive")
    tail_sup = np.maximum.accumulate(traj.norms[::-1])[::-1]
    slack = traj.error_estimate
    crossings = []
    last_crossed = None
    for th in thresholds:
        idx = np.flatnonzero(tail_sup <= th + slack)
        if idx.size:
            crossings.append(float(traj.times[idx[0]]))
            last_crossed = float(th)
        else:
            crossings.append(None)
    passed = hypothesis_met and all(c is not None for c in crossings)
    return ConvergingInputReport(
        hypothesis_met=hypothesis_met,
        passed=passed,
        thresholds=tuple(float(t) for t in thresholds),
        crossing_times=tuple(crossings),
        last_crossed=last_crossed,
        final_norm=float(traj.norms[-1]),
        horizon=float(horizon),
    )
