"""Linear stability of the positive equilibrium on a Neumann rectangle.

Linearizing around (1, beta+delta, 1) and expanding in the Neumann eigenmodes
cos(p pi x/Lx) cos(q pi y/Ly) with eigenvalue lam = (p pi/Lx)^2 + (q pi/Ly)^2
decouples d (its rate is -g(1)) and leaves the 2x2 block

    N(lam) = [[1 - a - lam,  chi f(1) lam],
              [beta,         -1 - eps0 lam]],

so the mode growth rates solve sigma^2 - Tr sigma + Det = 0 with

    Tr(lam) = -a - (1 + eps0) lam                          (< 0 always)
    Det(lam) = (a-1) + [1 + eps0(a-1) - chi f(1) beta] lam + eps0 lam^2.

A mode is unstable exactly when Det < 0; Det = 0 is marginal and counts as
stable. Solving Det = 0 for chi gives the per-eigenvalue marginal value

    chi(lam) = [(a-1)/lam + 1 + eps0(a-1) + eps0 lam] / (f(1) beta),

whose minimum over lam > 0 sits at lam* = sqrt((a-1)/eps0) with value

    chi_c0 = (2 sqrt(eps0(a-1)) + 1 + eps0(a-1)) / (f(1) beta),

and restricting to a rectangle's eigenvalues yields the domain threshold.
The sufficient nonlinear-stability bound is

    chi_subcrit = 4 sqrt(eps0(a-1)) / (beta f(1)) <= chi_c0,

with equality exactly when eps0 (a-1) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import ModelParams, eval_f, eval_g

__all__ = [
    "RectDomain",
    "ModeIndex",
    "DispersionPoint",
    "neumann_eigenvalues",
    "reduced_matrix",
    "growth_rates",
    "chi_marginal",
    "chi_c0",
    "chi_subcrit",
    "chi_c_domain",
    "unstable_band",
]


@dataclass(frozen=True)
class RectDomain:
    """The rectangle [0, Lx] x [0, Ly]."""

    Lx: float
    Ly: float

    def __post_init__(self) -> None:
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValidationError("domain side lengths must be positive")

    @property
    def area(self) -> float:
        return self.Lx * self.Ly


@dataclass(frozen=True)
class ModeIndex:
    """Neumann eigenmode (p, q) with Laplacian eigenvalue lam."""

    p: int
    q: int
    lam: float


@dataclass(frozen=True)
class DispersionPoint:
    """Growth-rate data of one eigenvalue lam.

    sigma_plus/sigma_minus are the two roots of the dispersion quadratic
    (complex-valued; real here since Tr < 0 and oscillatory onset cannot
    occur, but the full pair is exposed for property tests). g_branch is the
    decoupled third rate -g(1).
    """

    lam: float
    trace: float
    det: float
    sigma_plus: complex
    sigma_minus: complex
    g_branch: float


def _f1(params: ModelParams, *, reject_nonpositive: bool = True) -> float:
    f1 = float(eval_f(params, 1.0))
    if reject_nonpositive and not f1 > 0:
        raise ValidationError(f"f(1) > 0 required, got f(1) = {f1}")
    return f1


def neumann_eigenvalues(domain: RectDomain, pmax: int, qmax: int) -> list[ModeIndex]:
    """All modes with p <= pmax, q <= qmax, ascending in lam, ties by (p, q)."""
    if pmax < 0 or qmax < 0:
        raise ValidationError("pmax and qmax must be nonnegative")
    kx = (math.pi / domain.Lx) ** 2
    ky = (math.pi / domain.Ly) ** 2
    modes = [
        ModeIndex(p, q, kx * p * p + ky * q * q)
        for p in range(pmax + 1)
        for q in range(qmax + 1)
    ]
    modes.sort(key=lambda m: (m.lam, m.p, m.q))
    return modes


def reduced_matrix(params: ModelParams, lam: float) -> np.ndarray:
    """The 2x2 linearization block N(lam) acting on the (m, c) perturbation."""
    if lam < 0:
        raise ValidationError("lam >= 0 required")
    f1 = _f1(params)
    return np.array(
        [
            [1.0 - params.a - lam, params.chi * f1 * lam],
            [params.beta, -1.0 - params.eps0 * lam],
        ]
    )


def growth_rates(params: ModelParams, lam: float) -> DispersionPoint:
    """Both roots of sigma^2 - Tr sigma + Det = 0 at this lam, plus -g(1)."""
    if lam < 0:
        raise ValidationError("lam >= 0 required")
    a, eps0, beta = params.a, params.eps0, params.beta
    f1 = _f1(params, reject_nonpositive=False)
    trace = -a - (1.0 + eps0) * lam
    det = (a - 1.0) + (1.0 + eps0 * (a - 1.0) - params.chi * f1 * beta) * lam + eps0 * lam * lam
    disc = complex(trace * trace - 4.0 * det)
    root = np.sqrt(disc)
    sigma_plus = (trace + root) / 2.0
    sigma_minus = (trace - root) / 2.0
    if sigma_plus.real < sigma_minus.real:
        sigma_plus, sigma_minus = sigma_minus, sigma_plus
    return DispersionPoint(
        lam=lam,
        trace=trace,
        det=det,
        sigma_plus=complex(sigma_plus),
        sigma_minus=complex(sigma_minus),
        g_branch=-float(eval_g(params, 1.0)),
    )


def chi_marginal(params: ModelParams, lam: float) -> float:
    """The chi solving Det N(lam) = 0 for one eigenvalue lam > 0."""
    if not lam > 0:
        raise ValidationError("lam > 0 required (Det at lam = 0 is chi-independent)")
    a, eps0 = params.a, params.eps0
    f1 = _f1(params)
    return ((a - 1.0) / lam + 1.0 + eps0 * (a - 1.0) + eps0 * lam) / (f1 * params.beta)


def chi_c0(params: ModelParams) -> float:
    """Continuum Turing threshold: min over lam > 0 of chi_marginal."""
    f1 = _f1(params)
    s = params.eps0 * (params.a - 1.0)
    return (2.0 * math.sqrt(s) + 1.0 + s) / (f1 * params.beta)


def chi_subcrit(params: ModelParams) -> float:
    """Sufficient threshold for nonlinear exponential stability."""
    f1 = _f1(params)
    return 4.0 * math.sqrt(params.eps0 * (params.a - 1.0)) / (params.beta * f1)


def chi_c_domain(
    params: ModelParams, domain: RectDomain, pmax: int, qmax: int
) -> tuple[float, ModeIndex]:
    """Domain-restricted threshold: (min chi_marginal over modes, argmin mode).

    The lam = 0 mode is excluded (its Det equals a - 1 > 0 for every chi).
    chi_marginal(lam) -> inf as lam -> 0+ or inf, so a grid whose largest
    eigenvalue exceeds the continuum minimizer lam* = sqrt((a-1)/eps0)
    brackets the discrete minimum.
    """
    modes = [m for m in neumann_eigenvalues(domain, pmax, qmax) if m.lam > 0]
    if not modes:
        raise ValidationError("empty mode set: need at least one mode with lam > 0")
    best = min(modes, key=lambda m: (chi_marginal(params, m.lam), m.lam, m.p, m.q))
    return chi_marginal(params, best.lam), best


def unstable_band(
    params: ModelParams, domain: RectDomain, pmax: int, qmax: int
) -> list[ModeIndex]:
    """All modes with Det N(lam) < 0; marginal modes (Det = 0) count stable."""
    out = []
    for mode in neumann_eigenvalues(domain, pmax, qmax):
        if mode.lam == 0.0:
            continue
        if growth_rates(params, mode.lam).det < 0.0:
            out.append(mode)
    return out
