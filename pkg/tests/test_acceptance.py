"""End-to-end acceptance checks, one numbered criterion per test.

Each test evaluates its claim at the stated tolerance and records a
PASS/FAIL line that appears in the pytest terminal summary. The pattern
runs are session fixtures shared across criteria; the whole file takes a
few minutes of wall time.
"""

import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import sclerolab as sl
from sclerolab import transforms as tr

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

REF = sl.ModelParams(a=3.0, chi=1.0, eps0=0.03125, delta=1.0, beta=1.0)
SQUARE = sl.RectDomain(math.pi, math.pi)

# (chi, sigma_plus at lambda = 8) spanning stable / near-marginal / unstable.
RATE_CASES = (
    (1.0, -0.8145296488),
    (3.1, -0.0088959233),
    (3.18, 0.0195216804),
)


def _timed(config):
    t0 = time.perf_counter()
    traj = sl.simulate(config)
    return traj, time.perf_counter() - t0


@pytest.fixture(scope="session")
def turing_run():
    return _timed(sl.parse_config(CONFIG_DIR / "turing.cfg"))


@pytest.fixture(scope="session")
def damping_run():
    return _timed(sl.parse_config(CONFIG_DIR / "damping.cfg"))


@pytest.fixture(scope="session")
def farfield_run():
    return _timed(sl.parse_config(CONFIG_DIR / "farfield.cfg"))


@pytest.fixture(scope="session")
def lyapunov_run():
    return _timed(sl.parse_config(CONFIG_DIR / "lyapunov.cfg"))


@pytest.fixture(scope="session")
def rate_runs():
    """Single-mode (2,2) perturbations for the linearized-rate oracle."""
    grid = sl.Grid(SQUARE, 32, 32)
    x = tr.nodes(32, math.pi)
    mode = np.cos(2 * x)[:, None] * np.cos(2 * x)[None, :]
    runs = []
    for chi, sigma in RATE_CASES:
        config = sl.SimConfig(
            params=replace(REF, chi=chi),
            grid=grid,
            dt=2e-3,
            t_end=5.0,
            ic=sl.Explicit(
                m=1.0 + 1e-6 * mode,
                c=np.full((32, 32), 2.0),
                d=np.ones((32, 32)),
            ),
            monitors=sl.Monitors(series_every=10, modes=((2, 2),)),
        )
        runs.append((chi, sigma, sl.simulate(config)))
    return runs


@pytest.fixture(scope="session")
def all_pattern_runs(turing_run, damping_run, farfield_run, lyapunov_run, rate_runs):
    named = [
        ("turing", turing_run[0]),
        ("damping", damping_run[0]),
        ("farfield", farfield_run[0]),
        ("lyapunov", lyapunov_run[0]),
    ]
    named += [(f"rate chi={chi}", traj) for chi, _, traj in rate_runs]
    return named


def test_criterion_01_critical_thresholds(acceptance):
    t0 = time.perf_counter()
    c0 = sl.chi_c0(REF)
    crit, mode = sl.chi_c_domain(REF, SQUARE, 16, 16)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(c0 - 3.125) <= 1e-12
        and abs(crit - 3.125) <= 1e-12
        and (mode.p, mode.q) == (2, 2)
        and mode.lam == 8.0
        and elapsed < 1.0
    )
    acceptance(
        1,
        ok,
        f"chi_c0={c0:.15g}, chi_c_domain={crit:.15g}, mode=({mode.p},{mode.q}), "
        f"lam={mode.lam:g}, {elapsed * 1e3:.1f} ms",
    )
    assert ok


def test_criterion_02_subcritical_threshold(acceptance):
    sub = sl.chi_subcrit(REF)
    tuned = replace(REF, eps0=0.5)
    gap = abs(sl.chi_subcrit(tuned) - sl.chi_c0(tuned))
    ok = abs(sub - 2.0) <= 1e-12 and gap <= 1e-12
    acceptance(
        2,
        ok,
        f"chi_subcrit={sub:.15g}, |chi_subcrit - chi_c0|={gap:.2e} at eps0=1/(a-1)",
    )
    assert ok


def test_criterion_03_turing_pattern(acceptance, turing_run):
    traj, wall = turing_run
    frac = sl.energy_fraction(traj.final.m, 2, 2)
    ok_energy = frac >= 0.90
    ok_stationary = traj.classification == sl.CLASS_STATIONARY
    acceptance(
        3,
        ok_energy and ok_stationary,
        f"frac(2,2)={frac:.4f} (need >= 0.90), "
        f"classification={traj.classification!r} (need {sl.CLASS_STATIONARY!r}), "
        f"t_final={traj.final.t:g}, wall={wall:.0f} s",
    )
    assert ok_energy, f"(2,2) energy fraction {frac:.4f} < 0.90"
    assert ok_stationary, (
        f"classified {traj.classification!r} at the t=500 cap: the saturated "
        "pattern still exchanges energy with the (3,0)/(0,3) stripe modes at "
        "~1e-3 relative change per unit time, four orders above the 1e-7 "
        "stationarity tolerance (measured to relax at ~1e-3/unit even out to "
        "t=1500), so the tolerance/cap pair is dynamically unreachable"
    )


def test_criterion_04_subthreshold_damping(acceptance, damping_run):
    traj, wall = damping_run
    dist = float(np.max(np.abs(traj.final.m - 1.0)))
    ok = dist < 1e-6 and wall < 300.0
    acceptance(
        4, ok, f"||m-1||_inf={dist:.2e} at t={traj.final.t:g}, wall={wall:.0f} s"
    )
    assert ok


def test_criterion_05_global_convergence(acceptance, farfield_run):
    traj, wall = farfield_run
    final = traj.final
    dist_m = float(np.max(np.abs(final.m - 1.0)))
    dist_c = float(np.max(np.abs(final.c - 2.0)))
    dist_d = float(np.max(np.abs(final.d - 1.0)))
    ok = dist_m < 1e-4 and traj.classification == sl.CLASS_CONVERGED
    acceptance(
        5,
        ok,
        f"||m-1||_inf={dist_m:.2e}, ||c-2||_inf={dist_c:.2e}, "
        f"||d-1||_inf={dist_d:.2e}, {traj.classification}, wall={wall:.0f} s",
    )
    assert ok


def test_criterion_06_lyapunov_decay(acceptance, lyapunov_run):
    traj, _ = lyapunov_run
    t = traj.series["t"]
    phi = traj.series["phi"]
    after = phi[t >= 1.0]
    nonincreasing = bool(np.all(np.diff(after) <= 1e-16 * phi[0]))
    slope = float(np.polyfit(t[t >= 1.0], np.log(after), 1)[0])
    ok = nonincreasing and slope < -0.01
    acceptance(
        6,
        ok,
        f"phi: {phi[0]:.2e} -> {phi[-1]:.2e}, log-slope={slope:.4f}, "
        f"nonincreasing after t=1: {nonincreasing}",
    )
    assert ok


def test_criterion_07_linearized_rates(acceptance, rate_runs):
    details = []
    ok = True
    for chi, sigma, traj in rate_runs:
        t = traj.series["t"]
        amp = traj.series["amp_2_2"]
        mask = t >= 1.0
        slope = float(np.polyfit(t[mask], np.log(np.abs(amp[mask])), 1)[0])
        rel = abs(slope - sigma) / abs(sigma)
        ok = ok and rel <= 0.05
        details.append(f"chi={chi}: fit {slope:+.5f} vs {sigma:+.5f} ({rel:.1%})")
    acceptance(7, ok, "; ".join(details))
    assert ok


def test_criterion_08_invariant_suite(acceptance, all_pattern_runs, grid64):
    problems = []
    for name, traj in all_pattern_runs:
        series = traj.series
        mu = max(1.0, float(np.max(traj.snapshots[0].d)))
        if not (
            series["min_d"].min() >= -1e-8 and series["max_d"].max() <= mu + 1e-8
        ):
            problems.append(f"{name}: d left [{-1e-8}, mu+1e-8]")
        if series["min_m"].min() < -1e-6 or series["min_c"].min() < -1e-6:
            problems.append(f"{name}: negative overshoot in m or c")
        m = traj.final.m
        rt = float(np.max(np.abs(tr.cos_inverse(tr.cos_forward(m)) - m)))
        if rt > 1e-12:
            problems.append(f"{name}: transform round-trip {rt:.2e}")
        bound = sl.mass_bound(traj.snapshots[0], traj.config.params)
        if series["mass_m"].max() > 1.05 * bound:
            problems.append(
                f"{name}: mass {series['mass_m'].max():.4g} over bound {bound:.4g}"
            )

    steps = 100
    config = sl.SimConfig(
        params=REF,
        grid=grid64,
        dt=2e-3,
        t_end=steps * 2e-3,
        ic=sl.Explicit(
            m=np.ones((64, 64)), c=np.full((64, 64), 2.0), d=np.ones((64, 64))
        ),
        monitors=sl.Monitors(series_every=steps),
    )
    final = sl.simulate(config).final
    drift = max(
        float(np.max(np.abs(final.m - 1.0))),
        float(np.max(np.abs(final.c - 2.0))),
        float(np.max(np.abs(final.d - 1.0))),
    ) / steps
    if drift > 1e-13:
        problems.append(f"fixed point drift {drift:.2e}/step")

    ok = not problems
    acceptance(
        8,
        ok,
        f"{len(all_pattern_runs)} runs checked, drift={drift:.1e}/step"
        + ("" if ok else "; " + "; ".join(problems)),
    )
    assert ok, problems


def test_criterion_09_cross_solver(acceptance):
    ic = sl.FarField(m_amp=0.8, c_amp=1.2, d_base=0.5, d_amp=0.4)
    spectral_config = sl.SimConfig(
        params=REF,
        grid=sl.Grid(SQUARE, 64, 64),
        dt=2e-3,
        t_end=1.0,
        ic=ic,
        monitors=sl.Monitors(series_every=500),
    )
    fd_config = replace(spectral_config, grid=sl.Grid(SQUARE, 128, 128))
    m_spec = sl.simulate(spectral_config).final.m
    m_fd = sl.fd_simulate(fd_config).final.m
    diff = tr.resample(m_spec, (128, 128)) - m_fd
    rel = tr.norm_l2(diff, SQUARE) / tr.norm_l2(m_fd, SQUARE)
    ok = rel <= 1e-3
    acceptance(9, ok, f"rel L2 diff of m = {rel:.2e} (spectral 64^2 vs fd 128^2)")
    assert ok


def test_criterion_10_gronwall_stability(acceptance):
    base = sl.SimConfig(
        params=REF,
        grid=sl.Grid(SQUARE, 32, 32),
        dt=1e-2,
        t_end=1.0,
        ic=sl.FarField(m_amp=0.8, c_amp=1.2, d_base=0.5, d_amp=0.4),
        snapshot_every=10,
        monitors=sl.Monitors(series_every=10),
    )
    start = sl.initial_state(base)
    shifted = replace(
        base, ic=sl.Explicit(m=start.m + 1e-4, c=start.c, d=start.d)
    )
    report = sl.gronwall_check(sl.simulate(base), sl.simulate(shifted))
    margin = float(np.max(report.energy / report.bound))
    ok = report.satisfied
    acceptance(
        10,
        ok,
        f"E(t) <= 1.02 e^(Gt) E(0) at {len(report.times)} snapshots, "
        f"G={report.constants.G:.3g}, max E/bound={margin:.3f}",
    )
    assert ok


def test_criterion_11_temporal_order(acceptance):
    grid = sl.Grid(SQUARE, 16, 16)
    ic = sl.FarField(m_amp=0.8, c_amp=1.2, d_base=0.5, d_amp=0.4)

    def final_m(dt):
        config = sl.SimConfig(
            params=REF,
            grid=grid,
            dt=dt,
            t_end=1.0,
            ic=ic,
            monitors=sl.Monitors(series_every=int(round(1.0 / dt))),
        )
        return sl.simulate(config).final.m

    reference = final_m(1.0 / 320.0)
    errors = [
        float(np.linalg.norm(final_m(dt) - reference)) for dt in (1 / 40, 1 / 80)
    ]
    order = math.log2(errors[0] / errors[1])
    ok = 1.8 <= order <= 2.2
    acceptance(
        11, ok, f"errors {errors[0]:.3e} -> {errors[1]:.3e}, order={order:.3f}"
    )
    assert ok
