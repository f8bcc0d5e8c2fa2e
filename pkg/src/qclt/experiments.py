"""Experiment drivers behind the CLI subcommands.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`Table`, which the CLI serialises to CSV or JSON.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .cascade import (
    capacity_error_terms,
    classical_capacity_thermal,
    diamond_distance_bound,
    quantum_capacity_band,
)
from .charfun import (
    cascade_environment_charfun,
    charfun_gaussian,
    derivatives_at_zero,
    self_convolution_power,
    verify_decay_bound,
)
from .fock import (
    PreconditionError,
    mean_and_second_moments,
    relative_entropy_vs_gaussification,
    thermal_state,
)
from .grid import PhaseGrid
from .phase import (
    MAX_RECONSTRUCT_DIM,
    hs_distance_plancherel,
    rate_fit,
    reconstruct_density,
    trace_distance,
)
from .states import NamedState, resolve_state

__all__ = [
    "ExperimentConfig",
    "Table",
    "run_rates",
    "run_cascade",
    "run_capacity",
    "run_counterexample",
    "run_decay",
    "DEFAULT_N_LIST",
]

DEFAULT_N_LIST = (4, 8, 16, 32, 64, 128, 256)
DEFAULT_CASCADE_N = (2, 4, 8, 16, 32, 64)
DEFAULT_COUNTER_N = (10, 100, 1000, 10000)
DECAY_DELTAS = tuple(round(0.1 * k, 1) for k in range(1, 10))
DECAY_RADII = tuple(np.linspace(0.1, 5.0, 50))
DECAY_STATES = "vacuum,fock1,thermal:1,squeezed:0.1"
PROBES = (1j, 2j, 1 + 1j)
LN2 = math.log(2.0)

log = logging.getLogger("qclt")


@dataclass
class ExperimentConfig:
    subcommand: str = "rates"
    state_id: str | None = None
    n_list: tuple = ()
    lam: float = 0.5
    N: float | None = None
    E: float = 1.0
    grid: tuple = (12.0, 384)
    dim: int = 64
    out_format: str = "csv"
    log_base: str = "nats"
    seed: int = 0
    threads: int = 1
    with_trace: bool = True

    def __post_init__(self):
        self.n_list = tuple(int(n) for n in self.n_list)
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly increasing")
        if any(n < 1 for n in self.n_list):
            raise ValueError("n values must be positive")
        if not 1 <= self.dim <= MAX_RECONSTRUCT_DIM:
            raise ValueError(f"dim must be in [1, {MAX_RECONSTRUCT_DIM}]")
        if self.out_format not in ("csv", "json"):
            raise ValueError("out_format must be csv or json")
        if self.log_base not in ("nats", "bits"):
            raise ValueError("log_base must be nats or bits")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        PhaseGrid(*self.grid)  # validates extent and resolution

    @property
    def phase_grid(self) -> PhaseGrid:
        return PhaseGrid(float(self.grid[0]), int(self.grid[1]))

    def echo(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["grid"] = list(self.grid)
        return d


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, key: str) -> list:
        i = self.columns.index(key)
        return [r[i] for r in self.rows]


def _pmap(fn, items, threads: int) -> list:
    # numpy releases the GIL in the heavy kernels; order of results is preserved
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _base_meta(config: ExperimentConfig) -> dict:
    return {"version": __version__, "config": config.echo()}


def _entropy_scale(config: ExperimentConfig) -> float:
    return 1.0 / LN2 if config.log_base == "bits" else 1.0


def _gauss_fock(state: NamedState, dim: int, grid: PhaseGrid):
    if state.gauss.thermal_N is not None:
        return thermal_state(state.gauss.thermal_N, dim)
    return reconstruct_density(charfun_gaussian(state.gauss), dim, grid)


def _fit_meta(points) -> dict:
    if len(points) < 4 or any(d <= 0 for _, d in points):
        return {"fit": None}
    fit = rate_fit(points)
    return {"fit": {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}}


def run_rates(config: ExperimentConfig) -> Table:
    """Distances of ``rho^{boxplus n}`` from the Gaussification, with a log-log fit."""
    state = resolve_state(config.state_id or "fock1", config.dim)
    if not state.finite_moments:
        raise PreconditionError(f"state {state.name} is not centred with finite second moments")
    grid = config.phase_grid
    n_list = config.n_list or DEFAULT_N_LIST
    chi_g = charfun_gaussian(state.gauss)
    scale = _entropy_scale(config)
    g_fock = _gauss_fock(state, config.dim, grid) if config.with_trace else None

    def row(n):
        chi_n = self_convolution_power(state.chi, n)
        hs = hs_distance_plancherel(chi_n, chi_g, grid)
        trace = relent = tol = None
        if config.with_trace:
            rec = reconstruct_density(chi_n, config.dim, grid)
            tol = rec.trunc_tol
            trace = trace_distance(rec, g_fock)
            if state.gauss.thermal_N is not None:
                try:
                    relent = relative_entropy_vs_gaussification(rec, state.gauss) * scale
                except PreconditionError as exc:
                    # truncation shifted the moments; the identity no longer applies
                    log.warning("n=%d: relative entropy skipped (%s)", n, exc)
        return [n, hs, trace, relent, grid.half_extent, grid.points_per_axis, config.dim, tol]

    rows = _pmap(row, list(n_list), config.threads)
    points = [(r[0], r[1]) for r in rows]
    meta = _base_meta(config)
    meta.update(_fit_meta(points))
    d3 = derivatives_at_zero(state.chi, 3)
    meta["max_abs_third_derivative_at_0"] = max(abs(v) for (a, b), v in d3.items() if a + b == 3)
    return Table(
        "rates",
        ["n", "hs", "trace", "relent", "grid_R", "grid_K", "dim", "trunc_tol"],
        rows,
        meta,
    )


def run_cascade(config: ExperimentConfig) -> Table:
    """Distance of the effective cascade environment from the Gaussification."""
    state = resolve_state(config.state_id or "fock1", config.dim)
    if not state.finite_moments or state.gauss.thermal_N is None:
        raise PreconditionError("cascade environment must be centred with a thermal Gaussification")
    grid = config.phase_grid
    n_list = config.n_list or DEFAULT_CASCADE_N
    chi_g = charfun_gaussian(state.gauss)
    g_fock = thermal_state(state.gauss.thermal_N, config.dim)

    def row(n):
        env_n = cascade_environment_charfun(state.chi, config.lam, n)
        hs = hs_distance_plancherel(env_n, chi_g, grid)
        rec = reconstruct_density(env_n, config.dim, grid)
        tr = trace_distance(rec, g_fock)
        diamond = diamond_distance_bound(rec, g_fock)
        return [n, hs, tr, diamond, config.lam, grid.half_extent, grid.points_per_axis, config.dim, rec.trunc_tol]

    rows = _pmap(row, list(n_list), config.threads)
    points = [(r[0], r[1]) for r in rows]
    meta = _base_meta(config)
    meta.update(_fit_meta(points))
    return Table(
        "cascade",
        ["n", "hs", "trace", "diamond_bound", "lambda", "grid_R", "grid_K", "dim", "trunc_tol"],
        rows,
        meta,
    )


def cascade_eps(state: NamedState, lam: float, n: int, dim: int, grid: PhaseGrid) -> tuple[float, float]:
    """``(eps, N_eff)``: half the trace-distance bound to the thermal limit and the
    photon number of the reconstructed effective environment."""
    if state.gauss is None or state.gauss.thermal_N is None:
        raise PreconditionError("environment needs a thermal Gaussification")
    N = state.gauss.thermal_N
    if lam == 1.0:
        # the environment never reaches the output
        return 0.0, N
    env = state.chi if lam == 0.0 else cascade_environment_charfun(state.chi, lam, n)
    rec = reconstruct_density(env, dim, grid)
    eps = 0.5 * diamond_distance_bound(rec, thermal_state(N, dim))
    return eps, mean_and_second_moments(rec).nbar


def run_capacity(config: ExperimentConfig) -> Table:
    if config.state_id is None:
        state = resolve_state(f"thermal:{config.N}" if config.N is not None else "fock1", config.dim)
    else:
        state = resolve_state(config.state_id, config.dim)
    if state.gauss is None or state.gauss.thermal_N is None:
        raise PreconditionError("capacity needs an environment with a thermal Gaussification")
    N = state.gauss.thermal_N
    if config.N is not None and abs(config.N - N) > 1e-9:
        raise ValueError(f"--photon-N {config.N} disagrees with environment photon number {N}")
    n = (config.n_list or (16,))[-1]
    grid = config.phase_grid
    lam, E = config.lam, config.E
    eps, n_eff = cascade_eps(state, lam, n, config.dim, grid)
    eps = min(eps, 1.0)
    classical = classical_capacity_thermal(lam, N, E)
    q_lo, q_hi, flags = quantum_capacity_band(lam, N, E)
    d_c, d_q = capacity_error_terms(eps, lam, N, E)
    # informational: thermal formula evaluated at the effective environment's photon number
    surrogate_gap = abs(classical_capacity_thermal(lam, max(n_eff, 0.0), E) - classical)
    if surrogate_gap > d_c:
        flags.append("surrogate_gap_exceeds_delta_c")
    scale = _entropy_scale(config)
    rep = {
        "lambda": lam,
        "N": N,
        "E": E,
        "n": n,
        "classical": classical * scale,
        "q_lower": q_lo * scale,
        "q_upper": q_hi * scale,
        "eps": eps,
        "delta_c": d_c * scale,
        "delta_q": d_q * scale,
        "N_eff": n_eff,
        "surrogate_gap": surrogate_gap * scale,
        "flags": ";".join(flags),
    }
    meta = _base_meta(config)
    meta["units"] = config.log_base
    meta.update({"grid_R": grid.half_extent, "grid_K": grid.points_per_axis, "dim": config.dim})
    return Table("capacity", list(rep), [list(rep.values())], meta)


def run_counterexample(config: ExperimentConfig) -> Table:
    """``|chi(z0/sqrt n)^n|`` at fixed probes for states without second moments."""
    sid = config.state_id or "cauchy"
    if sid not in ("cauchy", "heavy_tail"):
        raise ValueError("counterexample state must be 'cauchy' or 'heavy_tail'")
    state = resolve_state(sid)
    n_list = config.n_list or DEFAULT_COUNTER_N
    rows = []
    for z0 in PROBES:
        for n in n_list:
            chi_n = self_convolution_power(state.chi, n)
            val = chi_n(complex(z0))
            at0 = chi_n(0j)
            rows.append([n, repr(complex(z0)), abs(val), at0.real])
    meta = _base_meta(config)
    return Table("counterexample", ["n", "z0", "abs_chi_n", "chi_n_at_0"], rows, meta)


def run_decay(config: ExperimentConfig) -> Table:
    """Scan of the energy decay bound over radii and ``delta``."""
    ids = (config.state_id or DECAY_STATES).split(",")
    rows = []
    for sid in ids:
        st = resolve_state(sid, config.dim)
        if st.energy is None:
            raise PreconditionError(f"state {sid} has no finite energy")
        margin = verify_decay_bound(st.chi, st.energy, DECAY_RADII, DECAY_DELTAS)
        rows.append([sid, st.energy, margin, margin >= -1e-9])
    meta = _base_meta(config)
    meta.update({"deltas": list(DECAY_DELTAS), "radii": [DECAY_RADII[0], DECAY_RADII[-1], len(DECAY_RADII)]})
    return Table("decay", ["state", "energy", "min_margin", "pass"], rows, meta)
