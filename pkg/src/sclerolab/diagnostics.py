"""A-priori invariants made measurable: masses, Lyapunov decay, stability of runs.

Three independent certificates from the analysis of the system are turned
into quantities a finished run can be checked against.

Mass bound. Integrating the m and c equations and using Neumann boundary
conditions gives d/dt (||m||_1 + ||c||_1) <= |Omega| (delta mu + k_a)
- (||m||_1 + ||c||_1) with mu = max(1, ||d0||_inf) and the logistic constant
k_a = max_{s>=0} [(beta+2)s - s^a], so the total mass never exceeds
K1* = max(|Omega| (delta mu + k_a), ||m0||_1 + ||c0||_1).

Lyapunov functional. For chi below the subcritical threshold one can pick
weights theta1, theta2 (and a splitting parameter alpha in (0,1)) such that

    phi(t) = 1/2 (||m-1||_2^2 + theta1 ||c-c*||_2^2 + theta2 ||d-1||_2^2)

decays to zero along solutions near (1, beta+delta, 1). The decay rate is
controlled by the smallest "gap" (minus the largest eigenvalue) of three
2x2 quadratic forms; all three gaps positive certifies local decay.

Two-run stability. Strong solutions depend continuously on the data:
the weighted distance E(t) = ||m1-m2||_2^2 + (chi^2 mu_f^2 / 2 eps0)
||c1-c2||_2^2 + ||d1-d2||_2^2 satisfies E(t) <= e^{G t} E(0) with an explicit
constant G built from sup-norm envelopes of the two runs. gronwall_check
measures the envelopes, assembles G and tests the inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transforms
from .errors import Infeasible, MismatchedRuns, NonPositiveGap, ValidationError
from .model import Equilibrium, ModelParams, eval_f, eval_g
from .stability import chi_subcrit

__all__ = [
    "LyapunovParams",
    "GronwallConstants",
    "GronwallReport",
    "k_a",
    "mass_l1",
    "mass_bound",
    "pick_thetas",
    "lyapunov_phi",
    "quadratic_form_gaps",
    "full_form_matrix",
    "mode_amplitude",
    "energy_fraction",
    "sup_norm_series",
    "gronwall_check",
]


@dataclass(frozen=True)
class LyapunovParams:
    """Weights of the decay functional and the splitting parameter alpha."""

    alpha: float
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if not (self.theta1 > 0 and self.theta2 > 0):
            raise ValidationError("theta1 and theta2 must be > 0")

    def satisfies_conditions(self, params: ModelParams) -> bool:
        """Strict admissibility of (alpha, theta1, theta2) for these parameters."""
        f1 = eval_f(params, 1.0)
        g1 = eval_g(params, 1.0)
        ok1 = (
            self.theta1 < 4.0 * self.alpha * (params.a - 1.0) / params.beta**2
            and params.chi < 2.0 * math.sqrt(self.theta1 * params.eps0) / f1
        )
        ok2 = self.theta2 > params.delta**2 * self.theta1 / (
            4.0 * g1 * (1.0 - self.alpha)
        )
        return ok1 and ok2


def k_a(params: ModelParams) -> float:
    """max over s >= 0 of (beta+2) s - s^a, attained at s* = ((beta+2)/a)^(1/(a-1))."""
    a, beta = params.a, params.beta
    s_star = ((beta + 2.0) / a) ** (1.0 / (a - 1.0))
    return s_star * (beta + 2.0) * (1.0 - 1.0 / a)


def mass_l1(state) -> tuple[float, float, float]:
    """Discrete L1 masses (||m||_1, ||c||_1, ||d||_1) of a state."""
    dom = state.grid.domain
    return (
        transforms.norm_l1(state.m, dom),
        transforms.norm_l1(state.c, dom),
        transforms.norm_l1(state.d, dom),
    )


def mass_bound(initial, params: ModelParams) -> float:
    """The a-priori ceiling K1* for ||m(t)||_1 + ||c(t)||_1 from the datum."""
    dom = initial.grid.domain
    mu = max(1.0, float(np.max(np.abs(initial.d))))
    source = dom.area * (params.delta * mu + k_a(params))
    start = transforms.norm_l1(initial.m, dom) + transforms.norm_l1(initial.c, dom)
    return max(source, start)


def pick_thetas(params: ModelParams) -> LyapunovParams:
    """Choose admissible (alpha, theta1, theta2), or raise Infeasible.

    Requires chi < chi_subcrit. alpha is placed halfway between (chi/chi_s)^2
    and 1, theta1 is the geometric mean of its admissible interval
    (chi^2 f(1)^2 / 4 eps0, 4 alpha (a-1) / beta^2), and theta2 sits 50%
    above its lower bound delta^2 theta1 / (4 g(1) (1-alpha)).
    """
    chi_s = chi_subcrit(params)
    if params.chi >= chi_s:
        raise Infeasible(
            f"no admissible weights: chi = {params.chi} >= chi_subcrit = {chi_s}"
        )
    f1 = eval_f(params, 1.0)
    g1 = eval_g(params, 1.0)
    if g1 <= 0:
        raise Infeasible("the theta2 condition needs g(1) > 0")
    ratio2 = (params.chi / chi_s) ** 2
    alpha = 0.5 * (ratio2 + 1.0)
    theta1 = (params.chi * f1 / params.beta) * math.sqrt(
        alpha * (params.a - 1.0) / params.eps0
    )
    theta2 = 1.5 * params.delta**2 * theta1 / (4.0 * g1 * (1.0 - alpha))
    return LyapunovParams(alpha=alpha, theta1=theta1, theta2=theta2)


def lyapunov_phi(state, equilibrium: Equilibrium, lyap: LyapunovParams) -> float:
    """Evaluate phi = 1/2 (||m~||^2 + theta1 ||c~||^2 + theta2 ||d~||^2)."""
    dom = state.grid.domain
    dm = state.m - equilibrium.m
    dc = state.c - equilibrium.c
    dd = state.d - equilibrium.d
    return 0.5 * (
        transforms.inner(dm, dm, dom)
        + lyap.theta1 * transforms.inner(dc, dc, dom)
        + lyap.theta2 * transforms.inner(dd, dd, dom)
    )


def _forms(params: ModelParams, lyap: LyapunovParams) -> list[np.ndarray]:
    f1 = eval_f(params, 1.0)
    g1 = eval_g(params, 1.0)
    a, b, ch, d, e0 = params.a, params.beta, params.chi, params.delta, params.eps0
    al, t1, t2 = lyap.alpha, lyap.theta1, lyap.theta2
    q1 = np.array([[-1.0, 0.5 * ch * f1], [0.5 * ch * f1, -t1 * e0]])
    q2 = np.array([[1.0 - a, 0.5 * b * t1], [0.5 * b * t1, -al * t1]])
    q3 = np.array([[-(1.0 - al) * t1, 0.5 * t1 * d], [0.5 * t1 * d, -t2 * g1]])
    return [q1, q2, q3]


def quadratic_form_gaps(
    params: ModelParams, lyap: LyapunovParams
) -> tuple[float, float, float]:
    """Spectral gaps of the three decay forms (gradient, reaction, repair).

    Each gap is minus the largest eigenvalue of the corresponding symmetric
    2x2 matrix; phi decays when all three are positive. Raises NonPositiveGap
    (with the computed triple attached as .gaps) if any gap is <= 0, so a
    caller probing the admissibility boundary still sees the numbers.
    """
    gaps = tuple(
        float(-np.linalg.eigvalsh(q)[-1]) for q in _forms(params, lyap)
    )
    if min(gaps) <= 0.0:
        raise NonPositiveGap(
            f"non-positive decay gap(s): {gaps}", gaps=gaps
        )
    return gaps


def full_form_matrix(params: ModelParams, lyap: LyapunovParams) -> np.ndarray:
    """The combined 3x3 form on (||m~||, ||c~||, ||d~||) before splitting.

    Its (c, c) entry -theta1 is shared by the second and third 2x2 blocks as
    -alpha theta1 and -(1-alpha) theta1. Positive gaps of the split forms
    imply this matrix is negative definite (the converse needs a suitable
    alpha and may fail for the given one).
    """
    f1 = eval_f(params, 1.0)
    g1 = eval_g(params, 1.0)
    t1, t2 = lyap.theta1, lyap.theta2
    return np.array(
        [
            [1.0 - params.a, 0.5 * params.beta * t1, 0.0],
            [0.5 * params.beta * t1, -t1, 0.5 * t1 * params.delta],
            [0.0, 0.5 * t1 * params.delta, -t2 * g1],
        ]
    )


def mode_amplitude(field: np.ndarray, p: int, q: int) -> float:
    """Coefficient of cos(p pi x/Lx) cos(q pi y/Ly) in the field."""
    nx, ny = field.shape
    if not (0 <= p < nx and 0 <= q < ny):
        raise ValidationError(f"mode ({p}, {q}) outside the {nx}x{ny} spectrum")
    return float(transforms.cos_forward(field)[p, q])


def energy_fraction(field: np.ndarray, p: int, q: int) -> float:
    """Share of the non-mean cosine energy held by mode (p, q); 0 for the mean."""
    if p == 0 and q == 0:
        return 0.0
    coeffs = transforms.cos_forward(field)
    total = float(np.sum(coeffs**2)) - float(coeffs[0, 0]) ** 2
    if total <= 0.0:
        return 0.0
    return float(coeffs[p, q]) ** 2 / total


def sup_norm_series(trajectory) -> np.ndarray:
    """Rows (t, ||m||_inf, ||c||_inf + ||grad c||_inf, ||d||_inf) per snapshot."""
    rows = []
    for snap in trajectory.snapshots:
        dom = snap.grid.domain
        cx, cy = transforms.gradient(snap.c, dom)
        grad_sup = float(np.max(np.hypot(cx, cy)))
        rows.append(
            [
                snap.t,
                float(np.max(np.abs(snap.m))),
                float(np.max(np.abs(snap.c))) + grad_sup,
                float(np.max(np.abs(snap.d))),
            ]
        )
    return np.asarray(rows)


@dataclass(frozen=True)
class GronwallConstants:
    """Measured sup-norm envelopes of two runs and the growth constant G."""

    mu: float
    mu_c: float
    mu_m: float
    mu_f: float
    mu_fp: float
    mu_gp: float
    G: float


@dataclass(frozen=True)
class GronwallReport:
    times: np.ndarray
    energy: np.ndarray
    bound: np.ndarray
    constants: GronwallConstants
    satisfied: bool


def _sup_envelopes(params: ModelParams, mu_m: float) -> tuple[float, float, float]:
    """sup of f, f' and g' over [0, mu_m]."""
    nl = params.nonlinearity
    if nl.kind == "saturating":
        # f = m/(1+m) increases, f' = 1/(1+m)^2 decreases,
        # g' = r (m^2+2m)/(1+m)^2 increases
        mu_f = mu_m / (1.0 + mu_m)
        mu_fp = 1.0
        mu_gp = nl.r * (mu_m**2 + 2.0 * mu_m) / (1.0 + mu_m) ** 2
        return mu_f, mu_fp, mu_gp
    s = np.linspace(0.0, mu_m, 4001)
    fs = np.array([eval_f(params, v) for v in s])
    gs = np.array([eval_g(params, v) for v in s])
    mu_f = float(np.max(np.abs(fs)))
    mu_fp = float(np.max(np.abs(np.gradient(fs, s))))
    mu_gp = float(np.max(np.abs(np.gradient(gs, s))))
    return mu_f, mu_fp, mu_gp


# Discretization slack on the continuum inequality E(t) <= e^{Gt} E(0): the
# measured envelopes enter G through finitely many snapshots and the spatial
# quadrature is inexact, so the certified bound carries 2% headroom.
GRONWALL_SLACK = 1.02


def gronwall_check(
    traj1,
    traj2,
    params: ModelParams | None = None,
    constants: GronwallConstants | None = None,
) -> GronwallReport:
    """Test E(t) <= e^{G t} E(0) (with 2% slack) between two finished runs.

    Both runs must share the model parameters, the grid and the snapshot
    times; otherwise MismatchedRuns is raised. When constants is omitted,
    every envelope entering G is measured from the snapshots themselves
    (run 2 supplies mu, run 1 supplies mu_c, both supply mu_m), matching the
    roles in the underlying estimate. A caller-supplied constants bundle is
    used as-is, e.g. to probe the bound with looser envelopes.
    """
    p1, p2 = traj1.config.params, traj2.config.params
    same = (
        (p1.a, p1.chi, p1.eps0, p1.delta, p1.beta) == (p2.a, p2.chi, p2.eps0, p2.delta, p2.beta)
        and p1.nonlinearity.kind == p2.nonlinearity.kind
        and p1.nonlinearity.r == p2.nonlinearity.r
    )
    if not same:
        raise MismatchedRuns("the two runs use different model parameters")
    g1, g2 = traj1.snapshots[0].grid, traj2.snapshots[0].grid
    if g1.shape != g2.shape or g1.domain != g2.domain:
        raise MismatchedRuns(f"grid mismatch: {g1} vs {g2}")
    t1 = np.array([s.t for s in traj1.snapshots])
    t2 = np.array([s.t for s in traj2.snapshots])
    if len(t1) != len(t2) or not np.allclose(t1, t2, rtol=0.0, atol=1e-12):
        raise MismatchedRuns("snapshot times differ between the runs")

    params = p1 if params is None else params
    dom = g1.domain
    if constants is None:
        mu = max(float(np.max(np.abs(s.d))) for s in traj2.snapshots)
        mu_c = 0.0
        for snap in traj1.snapshots:
            cx, cy = transforms.gradient(snap.c, dom)
            mu_c = max(mu_c, float(np.max(np.hypot(cx, cy))))
        mu_m = max(
            float(np.max(np.abs(s.m))) for s in (*traj1.snapshots, *traj2.snapshots)
        )
        mu_f, mu_fp, mu_gp = _sup_envelopes(params, mu_m)

        chi, eps0, beta, delta = params.chi, params.eps0, params.beta, params.delta
        G = max(
            2.0
            + chi**2 * mu_fp**2 * mu_c**2
            + chi**2 * beta * mu_f**2 / (2.0 * eps0)
            + mu_gp * (1.0 + mu),
            beta + delta,
            chi**2 * delta * mu_f**2 / (2.0 * eps0) + (1.0 + mu),
        )
        constants = GronwallConstants(
            mu=mu, mu_c=mu_c, mu_m=mu_m, mu_f=mu_f, mu_fp=mu_fp, mu_gp=mu_gp, G=G
        )
    mu_f = constants.mu_f
    G = constants.G

    weight = params.chi**2 * mu_f**2 / (2.0 * params.eps0)
    energy = np.array(
        [
            transforms.inner(s1.m - s2.m, s1.m - s2.m, dom)
            + weight * transforms.inner(s1.c - s2.c, s1.c - s2.c, dom)
            + transforms.inner(s1.d - s2.d, s1.d - s2.d, dom)
            for s1, s2 in zip(traj1.snapshots, traj2.snapshots)
        ]
    )
    bound = GRONWALL_SLACK * energy[0] * np.exp(G * t1)
    satisfied = bool(np.all(energy <= bound))
    return GronwallReport(
        times=t1, energy=energy, bound=bound, constants=constants, satisfied=satisfied
    )
