"""Eigenvalue models: closed-form parametric families and explicit lists.

A closed-form family knows its asymptotic tail (does the real part approach
the imaginary axis? does |Im| escape to infinity along the way?), which lets
the analysis routines distinguish "holds on this truncation" from "holds with
a certified tail".  An explicit list is finite evidence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class TailBehavior:
    """What happens along the tail of a closed-form eigenvalue sequence."""

    re_approaches_axis: bool
    im_escapes: bool


def _powerlaw_values(n, params):
    alpha = params["alpha"]
    return -(n ** (-alpha)) + 1j * n


def _powerlaw_logim_values(n, params):
    alpha = params["alpha"]
    return -(n ** (-alpha)) + 1j * np.log(n)


def _dyadic_values(n, params):
    k = np.floor(np.log2(n))
    return -(2.0 ** (-k)) - 1j * (2.0 ** k)


def _uniform_values(n, params):
    lam = complex(params["re"], params.get("im", 0.0))
    return np.full(n.shape, lam, dtype=np.complex128)


_FAMILIES = {
    # name -> (value fn, tail fn, required params with validators)
    "powerlaw": (
        _powerlaw_values,
        lambda p: TailBehavior(re_approaches_axis=True, im_escapes=True),
        {"alpha": lambda a: a > 0},
    ),
    "powerlaw_logim": (
        _powerlaw_logim_values,
        lambda p: TailBehavior(re_approaches_axis=True, im_escapes=True),
        {"alpha": lambda a: a > 0},
    ),
    "dyadic": (
        _dyadic_values,
        lambda p: TailBehavior(re_approaches_axis=True, im_escapes=True),
        {},
    ),
    "uniform": (
        _uniform_values,
        lambda p: TailBehavior(
            re_approaches_axis=(p["re"] == 0), im_escapes=False
        ),
        {"re": lambda r: True},
    ),
}


@dataclass(frozen=True)
class ClosedFormModel:
    """Parametric eigenvalue sequence lambda_n for n = 1, 2, ...

    family is one of: powerlaw (lambda_n = -n^-alpha + i n),
    powerlaw_logim (-n^-alpha + i log n), dyadic (-2^-k - i 2^k on the k-th
    dyadic block of indices), uniform (constant).
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise UsageError(
                f"unknown eigenvalue family {self.family!r}; "
                f"known: {sorted(_FAMILIES)}"
            )
        _, _, required = _FAMILIES[self.family]
        for name, ok in required.items():
            if name not in self.params:
                raise UsageError(f"family {self.family!r} needs parameter {name!r}")
            if not ok(self.params[name]):
                raise UsageError(
                    f"parameter {name}={self.params[name]!r} out of range "
                    f"for family {self.family!r}"
                )

    @property
    def tail(self) -> TailBehavior:
        return _FAMILIES[self.family][1](self.params)

    @property
    def max_modes(self):
        return None

    def values(self, n_modes: int) -> np.ndarray:
        n = np.arange(1, n_modes + 1, dtype=np.float64)
        vals = _FAMILIES[self.family][0](n, self.params)
        return np.asarray(vals, dtype=np.complex128)

    def to_config(self) -> dict:
        return {
            "kind": "closed_form",
            "family": self.family,
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class ExplicitListModel:
    """A finite, explicitly stored eigenvalue list.  No tail claims."""

    eigenvalues: tuple

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.eigenvalues)
        if not vals:
            raise UsageError("explicit eigenvalue list must be nonempty")
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def tail(self):
        return None

    @property
    def max_modes(self):
        return len(self.eigenvalues)

    def values(self, n_modes: int) -> np.ndarray:
        if n_modes > len(self.eigenvalues):
            raise UsageError(
                f"requested {n_modes} modes but the explicit list has "
                f"{len(self.eigenvalues)}"
            )
        return np.asarray(self.eigenvalues[:n_modes], dtype=np.complex128)

    def to_config(self) -> dict:
        return {
            "kind": "list",
            "values": [[v.real, v.imag] for v in self.eigenvalues],
        }


def model_from_config(cfg: dict):
    """Inverse of .to_config() for both model kinds."""
    try:
        kind = cfg["kind"]
    except (TypeError, KeyError):
        raise UsageError("eigenvalue config must be a dict with a 'kind' key")
    if kind == "closed_form":
        return ClosedFormModel(cfg["family"], dict(cfg.get("params", {})))
    if kind == "list":
        vals = [complex(re, im) for re, im in cfg["values"]]
        return ExplicitListModel(tuple(vals))
    raise UsageError(f"unknown eigenvalue model kind {kind!r}")
