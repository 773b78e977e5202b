"""Time integration: per-zone theta-scheme steps, iterative inter-zone
coupling, and the direct whole-building solve used as its oracle.

The scheme solves ``(C/dt - theta*A) T+ = (C/dt + (1-theta)*A) T + B`` with
``B`` held constant over the step.  Rows with zero capacity (mean-radiant
node, window nodes) are replaced by their algebraic constraint ``-A T+ = B``,
which keeps them exact for any theta in (0, 1].

Zones are coupled with Gauss-Seidel sweeps in declaration order: each zone is
re-solved with the latest estimates of its neighbours' air and radiant
temperatures until these coupling variables move less than the configured
tolerance between sweeps.  The converged result reproduces the single
whole-building step because the shared surface rows carry the exact same
equation in both owning zones.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .assembly import (
    BoundaryInputs,
    ElementaryMatrices,
    FilmCoefficients,
    ZoneStateSystem,
    assemble_connex,
    assemble_global,
    assemble_zone_parts,
    compose_state_system,
)
from .building import BuildingDescription, validate
from .nodes import EXTERIOR, GROUND, NodalStructure, generate_nodes
from .weather import WeatherSeries, solicitation_for_step

__all__ = [
    "IntegratorConfig",
    "SolverError",
    "CoupleResult",
    "SimulationResult",
    "step_zone",
    "couple_step",
    "direct_global_solve",
    "steady_state",
    "simulate",
    "boundary_flows",
]

DENSE_LU = "dense-lu"
BANDED = "banded"


class SolverError(RuntimeError):
    """Linear solve failed or a state system is ill-posed."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 600.0  # s
    theta: float = 1.0
    coupling_tolerance: float = 1e-3  # K, on zone air/radiant temperatures
    max_coupling_iterations: int = 100
    linear_solver: str = DENSE_LU  # "dense-lu" | "banded"

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt {self.dt} must be > 0")
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0.5, 1]")
        if not self.coupling_tolerance > 0:
            raise ValueError("coupling_tolerance must be > 0")
        if self.max_coupling_iterations < 1:
            raise ValueError("max_coupling_iterations must be >= 1")
        if self.linear_solver not in (DENSE_LU, BANDED):
            raise ValueError(f"unknown linear solver '{self.linear_solver}'")

    @classmethod
    def from_description(cls, b: BuildingDescription, **overrides) -> "IntegratorConfig":
        sim = b.simulation
        values = {
            "dt": sim.dt,
            "theta": sim.theta,
            "coupling_tolerance": sim.tolerance,
            "max_coupling_iterations": sim.max_coupling_iterations,
        }
        values.update(overrides)
        return cls(**values)


def _solve(m: np.ndarray, rhs: np.ndarray, method: str, context: str) -> np.ndarray:
    try:
        if method == BANDED:
            return scipy.sparse.linalg.spsolve(scipy.sparse.csc_matrix(m), rhs)
        return np.linalg.solve(m, rhs)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        raise SolverError(f"singular system in {context}: {exc}") from exc


def _theta_step(
    c_diag: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    t_prev: np.ndarray,
    cfg: IntegratorConfig,
    context: str,
) -> np.ndarray:
    theta = cfg.theta
    m = np.diag(c_diag / cfg.dt) - theta * a
    rhs = (c_diag / cfg.dt) * t_prev + b
    if theta < 1.0:
        rhs += (1.0 - theta) * (a @ t_prev)
    algebraic = c_diag == 0.0
    if algebraic.any():
        m[algebraic, :] = -a[algebraic, :]
        rhs[algebraic] = b[algebraic]
    return _solve(m, rhs, cfg.linear_solver, context)


def step_zone(sys: ZoneStateSystem, t_prev: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    """Advance one zone by one step of the theta scheme."""
    context = f"zone '{sys.zone}' (rows map to nodes {sys.row_map})"
    return _theta_step(sys.C, sys.A, sys.B, np.asarray(t_prev, dtype=float), cfg, context)


@dataclass(eq=False)
class CoupleResult:
    temps: dict[str, np.ndarray]  # per-zone next-step temperatures
    iterations: int
    residual: float  # last max change of any zone's (T_ai, T_rm) between sweeps
    converged: bool


def _air_rm_rows(s: NodalStructure, zone: str) -> tuple[int, int]:
    n = s.zone_dims[zone]
    return n - 2, n - 1


def _neighbor_map(
    s: NodalStructure, temps: dict[str, np.ndarray]
) -> dict[str, tuple[float, float]]:
    out = {}
    for zone, vec in temps.items():
        i_air, i_rm = _air_rm_rows(s, zone)
        out[zone] = (float(vec[i_air]), float(vec[i_rm]))
    return out


def couple_step(
    s: NodalStructure,
    films: FilmCoefficients,
    inputs: BoundaryInputs,
    prev: dict[str, np.ndarray],
    cfg: IntegratorConfig,
) -> CoupleResult:
    """One coupled time step: Gauss-Seidel over the zones until the exchanged
    air/radiant temperatures settle.

    The coupling source of each zone is theta-blended between the latest
    estimate of the neighbours' next-step temperatures and their previous-step
    values, which reproduces the direct whole-building theta step at the
    fixed point.  Non-convergence is reported, not raised; the last iterate
    is kept.
    """
    prev_neighbors = _neighbor_map(s, prev)
    inputs_prev = replace(inputs, neighbor_temperatures=prev_neighbors)

    base: dict[str, ZoneStateSystem] = {}
    b_connex_prev: dict[str, np.ndarray] = {}
    has_coupling = False
    for zone in s.zone_order:
        parts = assemble_zone_parts(zone, s, films, inputs, connexion=False)
        a_connex, b_prev = assemble_connex(zone, s, films, inputs_prev)
        sys = compose_state_system(parts, s, zone)
        base[zone] = replace(sys, A=sys.A + a_connex)
        b_connex_prev[zone] = b_prev
        if a_connex.any():
            has_coupling = True

    if not has_coupling:
        temps = {
            zone: step_zone(base[zone], prev[zone], cfg) for zone in s.zone_order
        }
        return CoupleResult(temps=temps, iterations=1, residual=0.0, converged=True)

    latest = {zone: prev[zone].copy() for zone in s.zone_order}
    theta = cfg.theta
    residual = np.inf
    for sweep in range(1, cfg.max_coupling_iterations + 1):
        residual = 0.0
        for zone in s.zone_order:
            inputs_latest = replace(
                inputs, neighbor_temperatures=_neighbor_map(s, latest)
            )
            _, b_latest = assemble_connex(zone, s, films, inputs_latest)
            b_connex = theta * b_latest + (1.0 - theta) * b_connex_prev[zone]
            # zero-capacity rows are solved as algebraic constraints at t+dt,
            # so their coupling source must be the latest estimate alone
            algebraic = base[zone].C == 0.0
            b_connex[algebraic] = b_latest[algebraic]
            sys = replace(base[zone], B=base[zone].B + b_connex)
            t_new = step_zone(sys, prev[zone], cfg)
            i_air, i_rm = _air_rm_rows(s, zone)
            delta = max(
                abs(t_new[i_air] - latest[zone][i_air]),
                abs(t_new[i_rm] - latest[zone][i_rm]),
            )
            residual = max(residual, float(delta))
            latest[zone] = t_new
        if residual < cfg.coupling_tolerance:
            return CoupleResult(
                temps=latest, iterations=sweep, residual=residual, converged=True
            )
    return CoupleResult(
        temps=latest,
        iterations=cfg.max_coupling_iterations,
        residual=residual,
        converged=False,
    )


def direct_global_solve(
    s: NodalStructure,
    inputs: BoundaryInputs,
    cfg: IntegratorConfig,
    t_prev: np.ndarray,
) -> np.ndarray:
    """One theta step of the full coupled building system (unique numbering).

    The brute-force reference for :func:`couple_step`.
    """
    films = FilmCoefficients.from_structure(s)
    c_glob, a_glob, b_glob = assemble_global(s, films, inputs)
    return _theta_step(
        c_glob, a_glob, b_glob, np.asarray(t_prev, dtype=float), cfg, "global system"
    )


def steady_state(
    s: NodalStructure, inputs: BoundaryInputs, cfg: IntegratorConfig | None = None
) -> np.ndarray:
    """Solve the global algebraic system ``A T + B = 0`` for constant inputs."""
    films = FilmCoefficients.from_structure(s)
    _, a_glob, b_glob = assemble_global(s, films, inputs)
    method = cfg.linear_solver if cfg is not None else DENSE_LU
    return _solve(a_glob, -b_glob, method, "steady-state system")


def global_from_zones(s: NodalStructure, temps: dict[str, np.ndarray]) -> np.ndarray:
    """Collect the per-zone vectors into one global vector (owner-zone copies)."""
    out = np.empty(len(s.nodes))
    for rec in s.nodes:
        zone = s.owner_zone(rec)
        out[rec.abs_number - 1] = temps[zone][rec.relative_numbers[zone] - 1]
    return out


def shared_node_gap(s: NodalStructure, temps: dict[str, np.ndarray]) -> float:
    """Largest disagreement between the two zone copies of any shared node."""
    gap = 0.0
    for rec in s.nodes:
        if len(rec.zones) != 2:
            continue
        za, zb = rec.zones
        va = temps[za][rec.relative_numbers[za] - 1]
        vb = temps[zb][rec.relative_numbers[zb] - 1]
        gap = max(gap, abs(float(va) - float(vb)))
    return gap


@dataclass(eq=False)
class SimulationResult:
    structure: NodalStructure
    times: np.ndarray  # (steps + 1,)
    temperatures: np.ndarray  # (steps + 1, n_nodes), global numbering
    iterations: np.ndarray  # (steps,)
    residuals: np.ndarray  # (steps,)
    converged: np.ndarray  # (steps,), bool
    shared_gap: np.ndarray  # (steps,)
    extrapolated: np.ndarray  # (steps,), bool
    oracle_diff: np.ndarray | None = None  # (steps,), max |iterative - direct|

    @property
    def nonconverged_steps(self) -> int:
        return int((~self.converged).sum())


def simulate(
    b: BuildingDescription,
    weather: WeatherSeries,
    cfg: IntegratorConfig | None = None,
    merges: list[tuple[str, ...]] | None = None,
    initial_temperature: float | None = None,
    compute_oracle: bool = False,
) -> SimulationResult:
    """Run a full simulation over the weather horizon.

    The nodal structure and all temperature-independent matrices are built
    once; boundary-dependent vectors are refreshed each step (and the
    coupling source each sweep).  With ``compute_oracle`` every coupled step
    is compared against a direct whole-building step from the same state.
    """
    violations = validate(b)
    if violations:
        raise ValueError("description is invalid: " + "; ".join(map(str, violations[:5])))
    s = generate_nodes(b, zoning=merges)
    films = FilmCoefficients.from_structure(s)
    if cfg is None:
        cfg = IntegratorConfig.from_description(b)

    t0 = initial_temperature if initial_temperature is not None else weather.records[0].t_out
    temps = {zone: np.full(s.zone_dims[zone], float(t0)) for zone in s.zone_order}

    n_steps = int(np.floor(weather.end_time / cfg.dt + 1e-9))
    n_nodes = len(s.nodes)
    times = np.arange(n_steps + 1) * cfg.dt
    temperatures = np.empty((n_steps + 1, n_nodes))
    temperatures[0] = global_from_zones(s, temps)
    iterations = np.zeros(n_steps, dtype=int)
    residuals = np.zeros(n_steps)
    converged = np.ones(n_steps, dtype=bool)
    shared = np.zeros(n_steps)
    extrapolated = np.zeros(n_steps, dtype=bool)
    oracle = np.zeros(n_steps) if compute_oracle else None

    for k in range(n_steps):
        t_next = times[k + 1]
        inputs = solicitation_for_step(weather, float(t_next), s)
        if compute_oracle:
            direct = direct_global_solve(s, inputs, cfg, temperatures[k])
        outcome = couple_step(s, films, inputs, temps, cfg)
        temps = outcome.temps
        temperatures[k + 1] = global_from_zones(s, temps)
        iterations[k] = outcome.iterations
        residuals[k] = outcome.residual
        converged[k] = outcome.converged
        shared[k] = shared_node_gap(s, temps)
        extrapolated[k] = inputs.extrapolated
        if compute_oracle:
            oracle[k] = float(np.max(np.abs(temperatures[k + 1] - direct)))

    return SimulationResult(
        structure=s,
        times=times,
        temperatures=temperatures,
        iterations=iterations,
        residuals=residuals,
        converged=converged,
        shared_gap=shared,
        extrapolated=extrapolated,
        oracle_diff=oracle,
    )


def boundary_flows(
    s: NodalStructure,
    films: FilmCoefficients,
    inputs: BoundaryInputs,
    t_global: np.ndarray,
) -> dict[str, float]:
    """Heat flows (W) crossing the model boundary, positive into the building.

    At steady state these sum to zero: everything the films, ground links,
    ventilation and sources push in must leave again.
    """
    flows: dict[str, float] = {}
    for rec in s.nodes:
        t_node = float(t_global[rec.abs_number - 1])
        if rec.faces == EXTERIOR:
            flows[f"convective:{rec.abs_number}"] = films.h_ce * rec.area * (inputs.t_out - t_node)
            flows[f"longwave:{rec.abs_number}"] = films.h_re * rec.area * (inputs.t_sky - t_node)
            sw = inputs.sw_exterior.get(rec.parent, 0.0) * rec.area
            if sw:
                flows[f"shortwave:{rec.abs_number}"] = sw
        if rec.ground_conductance:
            flows[f"ground:{rec.abs_number}"] = rec.ground_conductance * (
                inputs.t_ground - t_node
            )
    for zone in s.zone_order:
        i_air = s.air_abs(zone) - 1
        flow = inputs.airflow.get(zone, 0.0) * films.air_specific_heat
        if flow:
            flows[f"ventilation:{zone}"] = flow * (inputs.t_out - float(t_global[i_air]))
        for name, value in (
            ("gains", inputs.gains_convective.get(zone, 0.0) + inputs.gains_radiant.get(zone, 0.0)),
            ("shortwave-interior", inputs.sw_interior.get(zone, 0.0)),
        ):
            if value:
                flows[f"{name}:{zone}"] = value
    return flows
