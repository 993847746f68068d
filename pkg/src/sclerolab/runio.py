"""Config files, run directories and bit-stable output formats.

Configs are flat INI files (sections domain, grid, params, time, ic, output,
optionally sweep). Parsing materializes every default, and the
canonical echo (fixed section and key order, floats at 17 significant
digits) is what gets hashed, so two configs that parse the same hash the
same on any platform.

A run directory holds the canonical echo, one text file per field per
snapshot time, a tab-separated time series and a JSON manifest listing the
sha256 of every emitted file. verify_run() recomputes those hashes.

Sweeps evaluate a per-point task (closed-form thresholds or a full
simulation) over a one-parameter axis, in parallel across points, writing
one table row per point. Reruns skip rows already present in the table, so
an interrupted sweep resumes where it stopped; per-point failures land in
the row's error column and the sweep keeps going.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import Infeasible, NonFinite, ParseError, ValidationError
from .fdsolver import fd_simulate
from .model import ModelParams, NonlinearitySpec, equilibria
from .spectral import (
    EquilibriumPerturbation,
    FarField,
    Grid,
    Monitors,
    SimConfig,
    Trajectory,
    simulate,
)
from .stability import (
    RectDomain,
    chi_c0,
    chi_c_domain,
    chi_subcrit,
    growth_rates,
    neumann_eigenvalues,
    unstable_band,
)

__all__ = [
    "SweepSpec",
    "parse_config",
    "canonical_echo",
    "config_sha256",
    "write_snapshot",
    "load_snapshot",
    "run_simulation",
    "stability_report",
    "run_sweep",
    "verify_run",
]

_G = "%.17g"


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep around a base config."""

    base: SimConfig
    param: str
    values: tuple[float, ...]
    task: str
    table: str = "sweep.tsv"
    pmax: int = 16

    def __post_init__(self) -> None:
        if not self.values:
            raise ValidationError("sweep grid must be nonempty")
        if self.task not in ("thresholds", "simulate"):
            raise ValidationError('sweep task must be "thresholds" or "simulate"')
        if self.param not in _SWEEPABLE:
            raise ValidationError(
                f"cannot sweep {self.param!r}; known axes: {sorted(_SWEEPABLE)}"
            )


_SWEEPABLE = ("a", "chi", "eps0", "delta", "beta", "r")

_SECTIONS = ("domain", "grid", "params", "time", "ic", "output", "sweep")

_KEYS = {
    "domain": ("Lx", "Ly"),
    "grid": ("nx", "ny"),
    "params": ("a", "chi", "eps0", "delta", "beta", "r"),
    "time": ("dt", "t_end"),
    "ic": ("kind", "amplitude", "seed", "m_amp", "c_amp", "d_base", "d_amp"),
    "output": (
        "snapshot_every",
        "series_every",
        "stop",
        "stationary_tol",
        "track_phi",
        "modes",
    ),
    "sweep": ("param", "values", "task", "table", "pmax"),
}


def _fail(section: str, key: str, raw: str, want: str):
    raise ParseError(f"[{section}] {key} = {raw!r}: expected {want}")


def _get_float(cp, section, key, default):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        _fail(section, key, raw, "a number")


def _get_int(cp, section, key, default):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        _fail(section, key, raw, "an integer")


def _get_bool(cp, section, key, default):
    raw = cp.get(section, key, fallback=None)
    if raw is None:
        return default
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    _fail(section, key, raw, "a boolean")


def _parse_modes(raw: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for token in raw.replace(";", " ").split():
        bits = token.split(",")
        if len(bits) != 2:
            _fail("output", "modes", token, 'pairs like "2,2 3,0"')
        try:
            pairs.append((int(bits[0]), int(bits[1])))
        except ValueError:
            _fail("output", "modes", token, 'pairs like "2,2 3,0"')
    return tuple(pairs)


def _parse_values(raw: str) -> tuple[float, ...]:
    raw = raw.strip()
    if ":" in raw:
        bits = raw.split(":")
        if len(bits) != 3:
            _fail("sweep", "values", raw, '"start:stop:step" or a list')
        try:
            start, stop, step = (float(b) for b in bits)
        except ValueError:
            _fail("sweep", "values", raw, '"start:stop:step" or a list')
        if step <= 0 or stop < start:
            _fail("sweep", "values", raw, "stop >= start and step > 0")
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(start + k * step for k in range(n + 1))
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        _fail("sweep", "values", raw, "a list of numbers")


def parse_config(path: str | os.PathLike) -> SimConfig | SweepSpec:
    """Read an INI config; returns a SweepSpec when a [sweep] section exists.

    Every default is materialized, so canonical_echo() of the result is
    complete. Unknown sections or keys are ParseErrors (typo protection);
    invariant violations surface as ValidationErrors from the domain types.
    """
    import configparser

    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r") as fh:
            cp.read_file(fh, source=str(path))
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}")
    except configparser.Error as err:
        raise ParseError(str(err))

    for section in cp.sections():
        if section not in _SECTIONS:
            raise ParseError(f"unknown section [{section}]")
        for key in cp.options(section):
            if key not in [k.lower() for k in _KEYS[section]]:
                raise ParseError(f"unknown key {key!r} in [{section}]")

    domain = RectDomain(
        Lx=_get_float(cp, "domain", "Lx", math.pi),
        Ly=_get_float(cp, "domain", "Ly", math.pi),
    )
    grid = Grid(
        domain,
        nx=_get_int(cp, "grid", "nx", 64),
        ny=_get_int(cp, "grid", "ny", 64),
    )
    params = ModelParams(
        a=_get_float(cp, "params", "a", 3.0),
        chi=_get_float(cp, "params", "chi", 1.0),
        eps0=_get_float(cp, "params", "eps0", 0.03125),
        delta=_get_float(cp, "params", "delta", 1.0),
        beta=_get_float(cp, "params", "beta", 1.0),
        nonlinearity=NonlinearitySpec.saturating(
            r=_get_float(cp, "params", "r", 1.0)
        ),
    )

    kind = cp.get("ic", "kind", fallback="perturbation").strip().lower()
    if kind == "perturbation":
        ic = EquilibriumPerturbation(
            amplitude=_get_float(cp, "ic", "amplitude", 1e-3)
        )
    elif kind == "farfield":
        ic = FarField(
            m_amp=_get_float(cp, "ic", "m_amp", 0.8),
            c_amp=_get_float(cp, "ic", "c_amp", 1.2),
            d_base=_get_float(cp, "ic", "d_base", 0.5),
            d_amp=_get_float(cp, "ic", "d_amp", 0.4),
        )
    else:
        _fail("ic", "kind", kind, '"perturbation" or "farfield"')

    stop = cp.get("output", "stop", fallback="t_end").strip()
    monitors = Monitors(
        series_every=_get_int(cp, "output", "series_every", 1000),
        modes=_parse_modes(cp.get("output", "modes", fallback="")),
        track_phi=_get_bool(cp, "output", "track_phi", False),
        stop=stop,
        stationary_tol=_get_float(cp, "output", "stationary_tol", 1e-7),
    )
    config = SimConfig(
        params=params,
        grid=grid,
        dt=_get_float(cp, "time", "dt", 1e-3),
        t_end=_get_float(cp, "time", "t_end", 10.0),
        ic=ic,
        snapshot_every=_get_int(cp, "output", "snapshot_every", 0),
        seed=_get_int(cp, "ic", "seed", 42),
        monitors=monitors,
    )

    if cp.has_section("sweep"):
        if not cp.has_option("sweep", "param") or not cp.has_option("sweep", "values"):
            raise ParseError("[sweep] needs both param and values")
        return SweepSpec(
            base=config,
            param=cp.get("sweep", "param").strip(),
            values=_parse_values(cp.get("sweep", "values")),
            task=cp.get("sweep", "task", fallback="thresholds").strip(),
            table=cp.get("sweep", "table", fallback="sweep.tsv").strip(),
            pmax=_get_int(cp, "sweep", "pmax", 16),
        )
    return config


def canonical_echo(config: SimConfig) -> str:
    """Render a config in the fixed canonical form used for hashing."""
    g = config.grid
    p = config.params
    mon = config.monitors
    lines = [
        "[domain]",
        f"Lx = {g.domain.Lx:.17g}",
        f"Ly = {g.domain.Ly:.17g}",
        "",
        "[grid]",
        f"nx = {g.nx}",
        f"ny = {g.ny}",
        "",
        "[params]",
        f"a = {p.a:.17g}",
        f"chi = {p.chi:.17g}",
        f"eps0 = {p.eps0:.17g}",
        f"delta = {p.delta:.17g}",
        f"beta = {p.beta:.17g}",
        f"r = {p.nonlinearity.r:.17g}",
        "",
        "[time]",
        f"dt = {config.dt:.17g}",
        f"t_end = {config.t_end:.17g}",
        "",
        "[ic]",
    ]
    if isinstance(config.ic, EquilibriumPerturbation):
        lines += [
            "kind = perturbation",
            f"amplitude = {config.ic.amplitude:.17g}",
        ]
    elif isinstance(config.ic, FarField):
        lines += [
            "kind = farfield",
            f"m_amp = {config.ic.m_amp:.17g}",
            f"c_amp = {config.ic.c_amp:.17g}",
            f"d_base = {config.ic.d_base:.17g}",
            f"d_amp = {config.ic.d_amp:.17g}",
        ]
    else:
        raise ValidationError(
            f"{type(config.ic).__name__} initial data cannot be written to a config file"
        )
    modes = " ".join(f"{p_},{q_}" for p_, q_ in mon.modes)
    lines += [
        f"seed = {config.seed}",
        "",
        "[output]",
        f"snapshot_every = {config.snapshot_every}",
        f"series_every = {mon.series_every}",
        f"stop = {mon.stop}",
        f"stationary_tol = {mon.stationary_tol:.17g}",
        f"track_phi = {'true' if mon.track_phi else 'false'}",
        f"modes = {modes}",
        "",
    ]
    return "\n".join(lines)


def config_sha256(config: SimConfig) -> str:
    return hashlib.sha256(canonical_echo(config).encode("ascii")).hexdigest()


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_snapshot(
    outdir: Path, index: int, state, config_hash: str
) -> list[Path]:
    """One text file per field: '#' header lines, then nx rows of ny values."""
    paths = []
    g = state.grid
    for name, arr in (("m", state.m), ("c", state.c), ("d", state.d)):
        path = outdir / f"snap_{index:04d}_{name}.dat"
        with open(path, "w") as fh:
            fh.write(f"# time = {state.t:.17g}\n")
            fh.write(f"# nx = {g.nx}\n")
            fh.write(f"# ny = {g.ny}\n")
            fh.write(f"# Lx = {g.domain.Lx:.17g}\n")
            fh.write(f"# Ly = {g.domain.Ly:.17g}\n")
            fh.write(f"# field = {name}\n")
            fh.write(f"# config = {config_hash}\n")
            np.savetxt(fh, arr, fmt=_G)
        paths.append(path)
    return paths


def load_snapshot(path: str | os.PathLike) -> tuple[np.ndarray, dict]:
    """Read one snapshot field file back; returns (array, header dict)."""
    meta = {}
    with open(path, "r") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            if "=" in line:
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
    arr = np.loadtxt(path)
    nx = int(meta.get("nx", arr.shape[0]))
    ny = int(meta.get("ny", arr.shape[1] if arr.ndim > 1 else arr.size))
    if arr.shape != (nx, ny):
        raise ParseError(f"{path}: data shape {arr.shape} does not match header")
    return arr, meta


def _write_series(path: Path, traj: Trajectory) -> None:
    cols = traj.series_columns
    data = np.column_stack([traj.series[c] for c in cols])
    with open(path, "w") as fh:
        fh.write("# " + "\t".join(cols) + "\n")
        np.savetxt(fh, data, fmt=_G, delimiter="\t")


def run_simulation(
    config: SimConfig, outdir: str | os.PathLike, solver: str = "spectral"
) -> tuple[Trajectory | None, dict]:
    """Execute one run and populate the run directory.

    Produces config_echo.cfg, snap_NNNN_{m,c,d}.dat, series.tsv and
    manifest.json. A NonFinite failure still writes whatever the run
    produced before dying (its partial trajectory, when available) and is
    then re-raised for the caller to turn into an exit code.
    """
    if solver not in ("spectral", "fd"):
        raise ValidationError(f"unknown solver {solver!r}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    sha = config_sha256(config)
    started = datetime.now(timezone.utc)

    failure = None
    try:
        traj = simulate(config) if solver == "spectral" else fd_simulate(config)
    except NonFinite as err:
        traj = getattr(err, "partial", None)
        failure = err

    echo_path = out / "config_echo.cfg"
    echo_path.write_text(canonical_echo(config))
    files = [echo_path]
    if traj is not None:
        for idx, snap in enumerate(traj.snapshots):
            files += write_snapshot(out, idx, snap, sha)
        series_path = out / "series.tsv"
        _write_series(series_path, traj)
        files.append(series_path)

    manifest = {
        "config_sha256": sha,
        "seed": config.seed,
        "version": __version__,
        "solver": solver,
        "started_utc": started.isoformat(),
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "classification": traj.classification if traj is not None else "failed",
        "files": [
            {
                "path": p.name,
                "sha256": _sha256_file(p),
                "bytes": p.stat().st_size,
            }
            for p in files
        ],
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if failure is not None:
        raise failure
    return traj, manifest


def verify_run(outdir: str | os.PathLike) -> list[str]:
    """Recompute the hashes in a run directory; returns a list of problems."""
    out = Path(outdir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        return [f"missing manifest: {manifest_path}"]
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    problems = []
    listed = set()
    for entry in manifest.get("files", []):
        path = out / entry["path"]
        listed.add(entry["path"])
        if not path.exists():
            problems.append(f"missing file: {entry['path']}")
            continue
        actual = _sha256_file(path)
        if actual != entry["sha256"]:
            problems.append(
                f"hash mismatch: {entry['path']} (manifest {entry['sha256'][:12]}, "
                f"actual {actual[:12]})"
            )
    for path in sorted(out.iterdir()):
        if path.name not in listed and path.name != "manifest.json":
            problems.append(f"file not in manifest: {path.name}")
    return problems


def stability_report(
    config: SimConfig, pmax: int = 16, qmax: int | None = None
) -> tuple[str, str]:
    """Threshold summary plus the full dispersion table, as text.

    Returns (summary, table). The table has one row per mode (p, q) up to
    pmax/qmax: lambda, trace, determinant, both growth rates (real and
    imaginary parts) and an unstable flag; values come from the same
    closed-form code paths the unit-level API exposes.
    """
    params = config.params
    domain = config.grid.domain
    qmax = pmax if qmax is None else qmax
    chi_crit, mode = chi_c_domain(params, domain, pmax, qmax)
    band = unstable_band(params, domain, pmax, qmax)
    summary_lines = [
        f"chi_subcrit   = {chi_subcrit(params):.17g}",
        f"chi_c0        = {chi_c0(params):.17g}",
        f"chi_c_domain  = {chi_crit:.17g}  at mode ({mode.p}, {mode.q}), "
        f"lambda = {mode.lam:.17g}",
        f"chi           = {params.chi:.17g}",
        f"unstable modes at chi: {len(band)}",
    ]
    rows = ["# p\tq\tlambda\ttrace\tdet\tsigma+_re\tsigma+_im\tsigma-_re\tsigma-_im\tg_branch\tunstable"]
    for mode in neumann_eigenvalues(domain, pmax, qmax):
        point = growth_rates(params, mode.lam)
        unstable = mode.lam > 0 and point.det < 0
        rows.append(
            "\t".join(
                [
                    str(mode.p),
                    str(mode.q),
                    _G % mode.lam,
                    _G % point.trace,
                    _G % point.det,
                    _G % point.sigma_plus.real,
                    _G % point.sigma_plus.imag,
                    _G % point.sigma_minus.real,
                    _G % point.sigma_minus.imag,
                    _G % point.g_branch,
                    "1" if unstable else "0",
                ]
            )
        )
    return "\n".join(summary_lines) + "\n", "\n".join(rows) + "\n"


def _with_param(config: SimConfig, name: str, value: float) -> SimConfig:
    p = config.params
    if name == "r":
        params = replace(p, nonlinearity=NonlinearitySpec.saturating(r=value))
    else:
        params = replace(p, **{name: value})
    return replace(config, params=params)


def _sweep_point(args) -> list[str]:
    spec, value = args
    row = [_G % value]
    try:
        config = _with_param(spec.base, spec.param, value)
        if spec.task == "thresholds":
            params = config.params
            domain = config.grid.domain
            chi_crit, mode = chi_c_domain(params, domain, spec.pmax, spec.pmax)
            band = unstable_band(params, domain, spec.pmax, spec.pmax)
            row += [
                _G % chi_subcrit(params),
                _G % chi_c0(params),
                _G % chi_crit,
                str(mode.p),
                str(mode.q),
                str(len(band)),
                "",
            ]
        else:
            traj = simulate(config)
            eq = equilibria(config.params)[0]
            final = traj.final
            dist = float(np.max(np.abs(final.m - eq.m)))
            row += [traj.classification, _G % final.t, _G % dist, ""]
    except Exception as err:  # per-point isolation: the sweep must go on
        filler = 6 if spec.task == "thresholds" else 3
        row += ["nan"] * filler
        row.append(f"{type(err).__name__}: {err}".replace("\t", " ").replace("\n", " "))
    return row


_TABLE_HEADERS = {
    "thresholds": "# value\tchi_subcrit\tchi_c0\tchi_c_domain\tmode_p\tmode_q\tband_size\terror",
    "simulate": "# value\tclassification\tt_final\tdist_inf\terror",
}


def run_sweep(
    spec: SweepSpec, outdir: str | os.PathLike = ".", jobs: int | None = None
) -> Path:
    """Evaluate the sweep, resuming from any rows already in the table."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    table = out / spec.table

    done = set()
    if table.exists():
        with open(table) as fh:
            for line in fh:
                if line.startswith("#") or not line.strip():
                    continue
                done.add(line.split("\t", 1)[0])
    todo = [v for v in spec.values if (_G % v) not in done]

    mode = "a" if table.exists() and done else "w"
    with open(table, mode) as fh:
        if mode == "w":
            fh.write(_TABLE_HEADERS[spec.task] + "\n")
        if todo:
            work = [(spec, v) for v in todo]
            if jobs is None:
                jobs = min(len(todo), os.cpu_count() or 1)
            if jobs <= 1:
                rows = map(_sweep_point, work)
            else:
                pool = ProcessPoolExecutor(max_workers=jobs)
                rows = pool.map(_sweep_point, work)
            for row in rows:
                fh.write("\t".join(row) + "\n")
                fh.flush()
            if jobs > 1:
                pool.shutdown()
    return table
