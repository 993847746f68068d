"""Model coefficients, nonlinearities and homogeneous equilibria.

The system integrated by the solvers is

    dm/dt = lap(m) + m(1 - m^(a-1)) - chi div(f(m) grad c)
    dc/dt = eps0 lap(c) + delta d - c + beta m
    dd/dt = g(m)(1 - d)

on a rectangle with homogeneous Neumann conditions, with a > 1 and
chi, eps0, delta, beta > 0. The saturating nonlinearity pair is

    f(m) = m / (1 + m),      g(m) = r m^2 / (1 + m),  r > 0,

and custom (f, g) callables are accepted for experiments. Nonlinearities and
the logistic term are always evaluated at m_+ = max(m, 0): solutions are
nonnegative in the continuum, so the clamp only guards transient numerical
undershoot and never activates on healthy runs.

Homogeneous equilibria: (1, beta + delta, 1) is the unique positive one.
When g(0) = 0 (saturating case) the m = 0 states form the one-parameter
family (0, delta*zeta, zeta), zeta >= 0; when g(0) != 0 only (0, delta, 1)
remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

__all__ = [
    "NonlinearitySpec",
    "ModelParams",
    "Equilibrium",
    "eval_f",
    "eval_g",
    "equilibria",
    "reaction_rhs",
]


@dataclass(frozen=True)
class NonlinearitySpec:
    """Selects the nonlinearity pair (f, g).

    kind is "saturating" (f = m/(1+m), g = r m^2/(1+m)) or "custom".
    Custom specs carry the two callables plus optional growth-exponent
    metadata (gamma, b, ell) that is recorded but never enforced, and a
    declared flag g_positive stating that g(y) > 0 for y > 0.
    """

    kind: str
    r: float = 1.0
    f: Callable[[np.ndarray], np.ndarray] | None = None
    g: Callable[[np.ndarray], np.ndarray] | None = None
    gamma: float | None = None
    b: float | None = None
    ell: float | None = None
    g_positive: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("saturating", "custom"):
            raise ValidationError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "saturating":
            if not self.r > 0:
                raise ValidationError("saturating rate r > 0 required")
        else:
            if self.f is None or self.g is None:
                raise ValidationError("custom nonlinearity needs both f and g")
            f0 = float(np.asarray(self.f(np.float64(0.0))))
            if abs(f0) > 1e-14:
                raise ValidationError(f"f(0) = 0 required, got f(0) = {f0!r}")

    @staticmethod
    def saturating(r: float = 1.0) -> "NonlinearitySpec":
        return NonlinearitySpec(kind="saturating", r=r)

    @staticmethod
    def custom(
        f: Callable,
        g: Callable,
        *,
        gamma: float | None = None,
        b: float | None = None,
        ell: float | None = None,
        g_positive: bool = True,
    ) -> "NonlinearitySpec":
        return NonlinearitySpec(
            kind="custom", f=f, g=g, gamma=gamma, b=b, ell=ell, g_positive=g_positive
        )


@dataclass(frozen=True)
class ModelParams:
    """All scalar coefficients of the system plus the nonlinearity choice."""

    a: float
    chi: float
    eps0: float
    delta: float
    beta: float
    nonlinearity: NonlinearitySpec = NonlinearitySpec.saturating(1.0)

    def __post_init__(self) -> None:
        if not self.a > 1:
            raise ValidationError("a > 1 required")
        if not self.chi > 0:
            raise ValidationError("chi > 0 required")
        if not self.eps0 > 0:
            raise ValidationError("eps0 > 0 required")
        if not self.delta > 0:
            raise ValidationError("delta > 0 required")
        if not self.beta > 0:
            raise ValidationError("beta > 0 required")


@dataclass(frozen=True)
class Equilibrium:
    """A homogeneous steady state (m, c, d).

    family=True marks the one-parameter family (0, delta*zeta, zeta),
    zeta >= 0, that exists when g(0) = 0; the stored values are the zeta = 1
    representative, which itself satisfies the equilibrium system.
    """

    m: float
    c: float
    d: float
    family: bool = False

    def residual(self, params: ModelParams) -> tuple[float, float, float]:
        """The three defining equations evaluated at this state."""
        r1 = self.m - self.m**params.a
        r2 = params.delta * self.d + params.beta * self.m - self.c
        r3 = eval_g(params, self.m) * (1.0 - self.d)
        return (r1, r2, r3)


def eval_f(params: ModelParams, m):
    """f(max(m, 0)); for the saturating pair the value lies in [0, 1)."""
    mp = np.maximum(m, 0.0)
    nl = params.nonlinearity
    if nl.kind == "saturating":
        out = mp / (1.0 + mp)
    else:
        out = nl.f(mp)
    return out if isinstance(out, np.ndarray) else float(out)


def eval_g(params: ModelParams, m):
    """g(max(m, 0)); g(0) = 0 for the saturating pair."""
    mp = np.maximum(m, 0.0)
    nl = params.nonlinearity
    if nl.kind == "saturating":
        out = nl.r * mp * mp / (1.0 + mp)
    else:
        out = nl.g(mp)
    return out if isinstance(out, np.ndarray) else float(out)


def equilibria(params: ModelParams) -> list[Equilibrium]:
    """All homogeneous equilibria; the positive one (1, beta+delta, 1) first."""
    out = [Equilibrium(1.0, params.beta + params.delta, 1.0)]
    g0 = eval_g(params, 0.0)
    if g0 == 0.0:
        out.append(Equilibrium(0.0, params.delta, 1.0, family=True))
    else:
        out.append(Equilibrium(0.0, params.delta, 1.0, family=False))
    return out


def reaction_rhs(params: ModelParams, point):
    """The non-diffusive, non-chemotactic right-hand side at one point.

    point is (m, c, d), scalars or broadcastable arrays. The logistic term is
    evaluated as m_+ (1 - m_+^(a-1)) so non-integer a is well defined for
    transiently negative m.
    """
    m, c, d = point
    mp = np.maximum(m, 0.0)
    dm = mp * (1.0 - mp ** (params.a - 1.0))
    dc = params.delta * d - c + params.beta * m
    dd = eval_g(params, m) * (1.0 - d)
    if isinstance(dm, np.ndarray) or isinstance(dc, np.ndarray):
        return (dm, dc, dd)
    return (float(dm), float(dc), float(dd))
