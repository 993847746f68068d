"""Cosine pseudo-spectral IMEX integrator for the chemotaxis system.

Time stepping is Strang-symmetric per step of size dt:

    1. half step of Crank-Nicolson on the stiff diffusion (lap m, eps0 lap c),
       done per mode in coefficient space (the factor for eigenvalue lam and
       diffusivity D is (1 - dt D lam/4)/(1 + dt D lam/4));
    2. one full explicit midpoint (RK2) step on everything else: the reaction
       triple plus the chemotaxis transport -chi div(f(m) grad c). The d field
       has no diffusion and advances only here;
    3. the second Crank-Nicolson half step.

Nonlinear products are formed at the nodes (pseudo-spectral); no dealiasing
is applied by default since the target runs are fully resolved, and a
2/3-rule truncation flag exists for experiments. Negative undershoot of m or
c is never clipped during stepping (the nonlinearities clamp internally at
max(m, 0)); the invariants monitor undershoot instead of hiding it.

The homogeneous equilibrium (1, beta+delta, 1) is a fixed point of the whole
composed step to rounding accuracy: the lam = 0 Crank-Nicolson factor is 1
and every stage term vanishes there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import diagnostics, kernels, transforms
from .errors import NonFinite, StepTooLarge, ValidationError
from .model import Equilibrium, ModelParams, equilibria, eval_f, eval_g
from .stability import RectDomain

__all__ = [
    "Grid",
    "State",
    "Monitors",
    "SimConfig",
    "InitialCondition",
    "EquilibriumPerturbation",
    "FarField",
    "Explicit",
    "Trajectory",
    "step",
    "simulate",
]

CLASS_CONVERGED = "converged to equilibrium"
CLASS_STATIONARY = "stationary pattern"
CLASS_NOT_CONVERGED = "not converged"

# ||m - m*||_inf below this at the final time counts as convergence to the
# homogeneous equilibrium; chosen to match the global-convergence acceptance
# tolerance.
EQUILIBRIUM_TOL = 1e-4


@dataclass(frozen=True)
class Grid:
    """Cosine-collocation grid: nx x ny half-sample nodes on the rectangle."""

    domain: RectDomain
    nx: int
    ny: int

    def __post_init__(self) -> None:
        for n, name in ((self.nx, "nx"), (self.ny, "ny")):
            if n < 4 or n % 2:
                raise ValidationError(f"{name} must be even and >= 4, got {n}")

    @property
    def hx(self) -> float:
        return self.domain.Lx / self.nx

    @property
    def hy(self) -> float:
        return self.domain.Ly / self.ny

    @property
    def x(self) -> np.ndarray:
        return transforms.nodes(self.nx, self.domain.Lx)

    @property
    def y(self) -> np.ndarray:
        return transforms.nodes(self.ny, self.domain.Ly)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


@dataclass
class State:
    """The field triple on a grid at one time; arrays are shape (nx, ny)."""

    m: np.ndarray
    c: np.ndarray
    d: np.ndarray
    t: float
    grid: Grid

    def copy(self) -> "State":
        return State(self.m.copy(), self.c.copy(), self.d.copy(), self.t, self.grid)

    def validate(self) -> "State":
        for arr, name in ((self.m, "m"), (self.c, "c"), (self.d, "d")):
            if arr.shape != self.grid.shape:
                raise ValidationError(
                    f"field {name} has shape {arr.shape}, grid wants {self.grid.shape}"
                )
            if not np.isfinite(arr).all():
                raise ValidationError(f"field {name} contains non-finite entries")
        return self


class InitialCondition:
    """Base for initial-condition builders; build() returns (m, c, d) arrays."""

    def build(self, params: ModelParams, grid: Grid, default_seed: int):
        raise NotImplementedError


@dataclass(frozen=True)
class EquilibriumPerturbation(InitialCondition):
    """(1, beta+delta, 1) plus i.i.d. uniform noise in [-amplitude, amplitude].

    The noise is drawn per node for all three fields from one seeded
    generator (field order m, c, d), so a run is reproducible from the seed.
    seed=None defers to the config seed.
    """

    amplitude: float = 1e-3
    seed: int | None = None

    def build(self, params, grid, default_seed):
        if self.amplitude < 0:
            raise ValidationError("perturbation amplitude must be >= 0")
        seed = self.seed if self.seed is not None else default_seed
        rng = np.random.default_rng(seed)
        noise = rng.uniform(-self.amplitude, self.amplitude, (3, grid.nx, grid.ny))
        return (
            1.0 + noise[0],
            params.beta + params.delta + noise[1],
            1.0 + noise[2],
        )


@dataclass(frozen=True)
class FarField(InitialCondition):
    """A smooth, Neumann-compatible datum far from (1, beta+delta, 1).

    m = 1 + m_amp cos(pi x/Lx) cos(pi y/Ly)
    c = beta + delta - c_amp cos(pi x/Lx)
    d = d_base + d_amp cos(2 pi x/Lx) cos(pi y/Ly)

    Defaults put an 80% modulation on m and keep d <= 1 (so its comparison
    bound stays mu = 1).
    """

    m_amp: float = 0.8
    c_amp: float = 1.2
    d_base: float = 0.5
    d_amp: float = 0.4

    def build(self, params, grid, default_seed):
        cx1 = np.cos(np.pi * grid.x / grid.domain.Lx)[:, None]
        cx2 = np.cos(2.0 * np.pi * grid.x / grid.domain.Lx)[:, None]
        cy1 = np.cos(np.pi * grid.y / grid.domain.Ly)[None, :]
        ones = np.ones(grid.shape)
        m = 1.0 + self.m_amp * cx1 * cy1
        c = (params.beta + params.delta) * ones - self.c_amp * cx1 * ones
        d = self.d_base * ones + self.d_amp * cx2 * cy1
        return m, c, d


@dataclass(frozen=True, eq=False)
class Explicit(InitialCondition):
    """User-supplied nodal fields."""

    m: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def build(self, params, grid, default_seed):
        out = []
        for arr, name in ((self.m, "m"), (self.c, "c"), (self.d, "d")):
            arr = np.ascontiguousarray(arr, dtype=np.float64)
            if arr.shape != grid.shape:
                raise ValidationError(
                    f"explicit field {name} has shape {arr.shape}, grid wants {grid.shape}"
                )
            out.append(arr.copy())
        return tuple(out)


@dataclass(frozen=True)
class Monitors:
    """Diagnostic toggles for a run.

    series_every: steps between time-series rows (also the stationarity probe
    cadence). modes: (p, q) pairs whose m-coefficients are recorded per row.
    track_phi: record the Lyapunov functional (needs chi < chi_subcrit).
    stop: "t_end" runs the full span; "stationary" additionally stops once the
    relative max-norm change per unit time falls below stationary_tol.
    """

    series_every: int = 1000
    modes: tuple[tuple[int, int], ...] = ()
    track_phi: bool = False
    stop: str = "t_end"
    stationary_tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.series_every < 1:
            raise ValidationError("series_every must be >= 1")
        if self.stop not in ("t_end", "stationary"):
            raise ValidationError('stop must be "t_end" or "stationary"')
        if not self.stationary_tol > 0:
            raise ValidationError("stationary_tol must be > 0")


@dataclass(frozen=True)
class SimConfig:
    """Everything one run needs; dt and t_end are in model time units."""

    params: ModelParams
    grid: Grid
    dt: float = 1e-3
    t_end: float = 10.0
    ic: InitialCondition = EquilibriumPerturbation()
    snapshot_every: int = 0
    seed: int = 42
    monitors: Monitors = Monitors()
    dealias: bool = False
    zero_reaction: bool = False  # test hook: drop reactions, keep transport

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValidationError("dt > 0 required")
        if not self.t_end > 0:
            raise ValidationError("t_end > 0 required")
        if self.snapshot_every < 0:
            raise ValidationError("snapshot_every must be >= 0 (0 = first/last only)")
        n = round(self.t_end / self.dt)
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValidationError("t_end must be an integer number of dt steps")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


@dataclass
class Trajectory:
    """Snapshots plus diagnostic time series of one run."""

    config: SimConfig
    solver: str
    times: np.ndarray
    snapshots: list[State]
    series_columns: list[str]
    series: dict[str, np.ndarray]
    classification: str
    stationary_time: float | None
    advisories: list[float]

    @property
    def final(self) -> State:
        return self.snapshots[-1]


class _Workspace:
    """Preallocated buffers, cached CN multipliers and the stage dispatch.

    The per-mode Crank-Nicolson factor for a half step of diffusivity D is
    (1 - dt D lam/4)/(1 + dt D lam/4); the stored "half" multiplier folds in
    the 1/(4 nx ny) round-trip normalization of the raw transforms, and the
    "full" multiplier is the squared factor used when two adjacent half
    steps of consecutive time steps are fused (an exact regrouping of the
    Strang composition).
    """

    def __init__(self, config: SimConfig):
        p = config.params
        grid = config.grid
        nx, ny = grid.shape
        lam = transforms._mode_eigenvalues(nx, ny, grid.domain.Lx, grid.domain.Ly)
        fm = (1.0 - 0.25 * config.dt * lam) / (1.0 + 0.25 * config.dt * lam)
        fc = (1.0 - 0.25 * config.dt * p.eps0 * lam) / (
            1.0 + 0.25 * config.dt * p.eps0 * lam
        )
        if config.dealias:
            keep = np.ones((nx, ny))
            keep[(2 * nx) // 3 :, :] = 0.0
            keep[:, (2 * ny) // 3 :] = 0.0
            fm = fm * keep
            fc = fc * keep
        scale = 0.25 / (nx * ny)
        self.half = (fm * scale, fc * scale)
        self.full = (fm * fm * scale, fc * fc * scale)
        self.domain = grid.domain
        self.chi = p.chi
        self.dt = config.dt
        alloc = lambda: np.empty((nx, ny))
        self.rm, self.rc, self.rd = alloc(), alloc(), alloc()
        self.fx, self.fy = alloc(), alloc()
        self.ms, self.cs, self.ds = alloc(), alloc(), alloc()
        self.mo, self.co = alloc(), alloc()

        nl = p.nonlinearity
        if nl.kind == "saturating" and not config.zero_reaction:
            def stage(m, c, d, cx, cy):
                kernels.saturating_stage(
                    m, c, d, cx, cy, p.a, p.delta, p.beta, nl.r,
                    self.rm, self.rc, self.rd, self.fx, self.fy,
                )
        else:
            def stage(m, c, d, cx, cy):
                mp = np.maximum(m, 0.0)
                if config.zero_reaction:
                    self.rm[...] = 0.0
                    self.rc[...] = 0.0
                    self.rd[...] = 0.0
                else:
                    self.rm[...] = mp * (1.0 - mp ** (p.a - 1.0))
                    self.rc[...] = p.delta * d - c + p.beta * m
                    self.rd[...] = eval_g(p, m) * (1.0 - d)
                fm_ = eval_f(p, m)
                self.fx[...] = fm_ * cx
                self.fy[...] = fm_ * cy
        self.stage = stage

    def cn(self, m, c, pair):
        """Apply per-mode multipliers (normalization included) to m and c."""
        return (
            transforms._idct2(transforms._dct2(m) * pair[0]),
            transforms._idct2(transforms._dct2(c) * pair[1]),
        )

    def rhs_stage(self, m, c, d):
        """Fill rm/rc/rd and return the chemotaxis divergence for this stage."""
        cx, cy = transforms.gradient(c, self.domain)
        self.stage(m, c, d, cx, cy)
        return transforms.divergence_of_flux(self.fx, self.fy, self.domain)

    def rk2(self, m, c, d):
        """Explicit midpoint step on reactions and transport from (m, c, d).

        Results for m and c land in the mo/co buffers; the advanced d is
        returned as a fresh array (it outlives the workspace reuse cycle).
        """
        dt = self.dt
        div = self.rhs_stage(m, c, d)
        kernels.combine_fields(
            m, c, d, self.rm, self.rc, self.rd, div, self.chi, 0.5 * dt,
            self.ms, self.cs, self.ds,
        )
        div = self.rhs_stage(self.ms, self.cs, self.ds)
        d_new = np.empty_like(d)
        kernels.combine_fields(
            m, c, d, self.rm, self.rc, self.rd, div, self.chi, dt,
            self.mo, self.co, d_new,
        )
        return d_new


def step(state: State, config: SimConfig) -> State:
    """Advance one composed step of size dt.

    Sequence: half Crank-Nicolson diffusion, explicit midpoint on reactions
    and transport, half Crank-Nicolson. Raises NonFinite (with the failing
    time attached) on blow-up; a >10x jump of max(m) within one step warns
    StepTooLarge. Prefer simulate() for long runs: it reuses buffers and
    fuses adjacent half steps.
    """
    ws = _Workspace(config)
    m, c = ws.cn(state.m, state.c, ws.half)
    d_new = ws.rk2(m, c, state.d)
    m_new, c_new = ws.cn(ws.mo, ws.co, ws.half)
    scan = kernels.field_minmax(m_new, c_new, d_new)
    if not scan[6]:
        raise NonFinite(
            f"non-finite field values after the step starting at t={state.t!r}",
            t=state.t,
        )
    if scan[1] > 10.0 * max(1.0, float(np.max(state.m))):
        warnings.warn(
            StepTooLarge(
                f"max(m) jumped to {scan[1]:.3g} within the step starting at t={state.t!r}"
            )
        )
    return State(m_new, c_new, d_new, state.t + config.dt, state.grid)


def initial_state(config: SimConfig) -> State:
    """Build and validate the configured initial condition at t = 0."""
    m, c, d = config.ic.build(config.params, config.grid, config.seed)
    m = np.ascontiguousarray(m, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    state = State(m, c, d, 0.0, config.grid).validate()
    low = min(float(m.min()), float(c.min()), float(d.min()))
    if low < 0:
        raise ValidationError(f"initial fields must be nonnegative, min = {low}")
    return state


class _Recorder:
    """Accumulates the diagnostic time series and detects stationarity."""

    def __init__(self, config: SimConfig, equilibrium: Equilibrium):
        self.domain = config.grid.domain
        self.monitors = config.monitors
        self.equilibrium = equilibrium
        self.lyap = None
        if config.monitors.track_phi:
            self.lyap = diagnostics.pick_thetas(config.params)
        self.columns = [
            "t",
            "min_m", "max_m", "min_c", "max_c", "min_d", "max_d",
            "mass_m", "mass_c", "mass_d",
        ]
        if self.lyap is not None:
            self.columns.append("phi")
        for (p, q) in config.monitors.modes:
            self.columns.append(f"amp_{p}_{q}")
        self.rows: list[list[float]] = []
        self.stationary_time: float | None = None
        self._prev: State | None = None

    def probe(self, state: State, scan=None) -> None:
        if scan is None:
            scan = kernels.field_minmax(state.m, state.c, state.d)
        dom = self.domain
        row = [state.t, *scan[:6]]
        row += [
            transforms.norm_l1(state.m, dom),
            transforms.norm_l1(state.c, dom),
            transforms.norm_l1(state.d, dom),
        ]
        if self.lyap is not None:
            row.append(diagnostics.lyapunov_phi(state, self.equilibrium, self.lyap))
        if self.monitors.modes:
            coeffs = transforms.cos_forward(state.m)
            row += [float(coeffs[p, q]) for (p, q) in self.monitors.modes]
        self.rows.append(row)

        prev = self._prev
        if prev is not None and state.t > prev.t and self.stationary_time is None:
            span = state.t - prev.t
            rate = 0.0
            for new, old in ((state.m, prev.m), (state.c, prev.c), (state.d, prev.d)):
                scale = max(float(np.max(np.abs(new))), 1e-300)
                rate = max(rate, float(np.max(np.abs(new - old))) / (span * scale))
            if rate < self.monitors.stationary_tol:
                self.stationary_time = state.t
        self._prev = state.copy()

    def series(self) -> dict[str, np.ndarray]:
        data = np.asarray(self.rows, dtype=np.float64).reshape(len(self.rows), len(self.columns))
        return {name: data[:, k].copy() for k, name in enumerate(self.columns)}


def _classify(final: State, equilibrium: Equilibrium, stationary: bool) -> str:
    if float(np.max(np.abs(final.m - equilibrium.m))) < EQUILIBRIUM_TOL:
        return CLASS_CONVERGED
    if stationary:
        return CLASS_STATIONARY
    return CLASS_NOT_CONVERGED


def simulate(config: SimConfig) -> Trajectory:
    """Run the configured integration; deterministic for a fixed seed.

    Snapshots are taken at t = 0, every snapshot_every steps (if nonzero)
    and at the final time. Internally the trailing and leading diffusion
    half steps of adjacent time steps are fused (identical composition);
    probes and snapshots always see the properly finalized state. On
    blow-up the NonFinite error carries everything recorded up to the last
    finalized state as its ``partial`` trajectory.
    """
    ws = _Workspace(config)
    state = initial_state(config)
    eq = equilibria(config.params)[0]
    rec = _Recorder(config, eq)

    snapshots = [state.copy()]
    advisories: list[float] = []
    rec.probe(state)
    prev_max_m = float(np.max(state.m))
    n = config.n_steps
    dt = config.dt
    every = config.monitors.series_every
    snap_every = config.snapshot_every
    stop_on_stationary = config.monitors.stop == "stationary"

    v_m, v_c = ws.cn(state.m, state.c, ws.half)
    d = state.d
    for k in range(1, n + 1):
        d_new = ws.rk2(v_m, v_c, d)
        scan = kernels.field_minmax(ws.mo, ws.co, d_new)
        if not scan[6]:
            err = NonFinite(
                f"non-finite field values after the step starting at t={(k - 1) * dt!r}",
                t=(k - 1) * dt,
            )
            err.partial = _assemble(
                config, snapshots, rec, CLASS_NOT_CONVERGED, None, advisories
            )
            raise err
        if scan[1] > 10.0 * max(1.0, prev_max_m):
            warnings.warn(
                StepTooLarge(
                    f"max(m) jumped to {scan[1]:.3g} within the step starting "
                    f"at t={(k - 1) * dt!r}"
                )
            )
            advisories.append((k - 1) * dt)
        prev_max_m = scan[1]

        is_last = k == n
        need_probe = is_last or k % every == 0
        need_snap = bool(snap_every) and k % snap_every == 0
        if need_probe or need_snap:
            m_t, c_t = ws.cn(ws.mo, ws.co, ws.half)
            state = State(m_t, c_t, d_new, k * dt, state.grid)
            if need_probe:
                rec.probe(state)
            if need_snap:
                snapshots.append(state.copy())
            if is_last or (stop_on_stationary and rec.stationary_time is not None):
                break
        v_m, v_c = ws.cn(ws.mo, ws.co, ws.full)
        d = d_new

    if snapshots[-1].t != state.t:
        snapshots.append(state.copy())
    if rec.rows and rec.rows[-1][0] != state.t:
        rec.probe(state)

    stationary = rec.stationary_time is not None
    classification = _classify(state, eq, stationary)
    return _assemble(
        config, snapshots, rec, classification, rec.stationary_time, advisories
    )


def _assemble(
    config, snapshots, rec, classification, stationary_time, advisories,
    solver: str = "spectral",
):
    return Trajectory(
        config=config,
        solver=solver,
        times=np.array([s.t for s in snapshots]),
        snapshots=snapshots,
        series_columns=list(rec.columns),
        series=rec.series(),
        classification=classification,
        stationary_time=stationary_time,
        advisories=advisories,
    )
