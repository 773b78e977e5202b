"""Zone state-system assembly: fill C, A, B from the nodal structure.

Each zone's evolution equation ``C dT/dt = A T + B`` is built as a sum of
named elementary matrices and vectors, one per physical phenomenon:

===========  ================================================================
``A_cond``   heat conduction along wall/window chains (plus the diagonal
             leak of ground links, whose source lands in ``B_ground``)
``A_cvi``    interior convection, surface rows and the air-node row
``A_cve``    exterior convection diagonal (source in ``B_cve``)
``A_lwi``    interior long-wave exchange, surface rows toward the radiant node
``A_lwe``    exterior long-wave diagonal (source in ``B_lwe``)
``A_air``    outdoor-air exchange on the air row (source in ``B_air``)
``A_rm``     algebraic balance of the mean-radiant node (zero capacity row)
``A_connex`` diagonal of surfaces facing an adjacent zone; the matching
             source ``B_connex`` carries that zone's air/radiant temperatures
===========  ================================================================

plus source vectors ``B_swi`` (interior short-wave, distributed over the
surfaces facing each zone proportionally to area), ``B_swe`` (absorbed
exterior short-wave), ``B_cvi_src`` (reserved for imposed interior
convective sources; zero here), ``B_gains`` (internal gains: convective
share on the air row, radiant share on the radiant row) and ``B_ground``.

Sign convention: off-diagonal entries of A are nonnegative, diagonals
nonpositive, sources enter B with their driving temperature or power.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .nodes import EXTERIOR, GROUND, NodalStructure, NodeRecord

__all__ = [
    "FilmCoefficients",
    "BoundaryInputs",
    "ElementaryMatrices",
    "ZoneStateSystem",
    "assemble_A_cond",
    "assemble_interior_exchange",
    "assemble_exterior_exchange",
    "assemble_air_balance",
    "assemble_connex",
    "assemble_interior_sources",
    "assemble_zone_parts",
    "compose_state_system",
    "assemble_global",
]

MATRIX_NAMES = ("A_cond", "A_cvi", "A_cve", "A_lwi", "A_lwe", "A_air", "A_rm", "A_connex")
VECTOR_NAMES = (
    "B_swi",
    "B_swe",
    "B_cvi_src",
    "B_cve",
    "B_lwe",
    "B_air",
    "B_gains",
    "B_ground",
    "B_connex",
)


@dataclass(frozen=True)
class FilmCoefficients:
    """Surface film coefficients and air properties used by the assembly."""

    h_ce: float  # W/(m2 K)
    h_re: float  # W/(m2 K)
    air_specific_heat: float  # J/(kg K)
    air_density: float  # kg/m3
    zone_h: Mapping[str, tuple[float, float, Mapping[str, float]]]  # zone -> (h_ci, h_ri, overrides)

    @classmethod
    def from_structure(cls, s: NodalStructure) -> "FilmCoefficients":
        return cls(
            h_ce=s.h_ce,
            h_re=s.h_re,
            air_specific_heat=s.air_specific_heat,
            air_density=s.air_density,
            zone_h={
                z: (p.h_ci, p.h_ri, dict(p.h_ci_overrides)) for z, p in s.zone_params.items()
            },
        )

    def h_ci(self, zone: str, surface_class: str | None = None) -> float:
        base, _, overrides = self.zone_h[zone]
        if surface_class is not None and surface_class in overrides:
            return overrides[surface_class]
        return base

    def h_ri(self, zone: str) -> float:
        return self.zone_h[zone][1]


@dataclass(frozen=True)
class BoundaryInputs:
    """Boundary drivers for one time step, already averaged over the step."""

    t_out: float  # °C, outdoor dry-bulb
    t_sky: float  # °C
    t_ground: float  # °C
    sw_exterior: Mapping[str, float] = field(default_factory=dict)  # entity -> W/m2
    sw_interior: Mapping[str, float] = field(default_factory=dict)  # zone -> W
    gains_convective: Mapping[str, float] = field(default_factory=dict)  # zone -> W
    gains_radiant: Mapping[str, float] = field(default_factory=dict)  # zone -> W
    airflow: Mapping[str, float] = field(default_factory=dict)  # zone -> kg/s
    neighbor_temperatures: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    extrapolated: bool = False

    @classmethod
    def uniform(cls, t: float) -> "BoundaryInputs":
        """All boundary temperatures at ``t``, no fluxes, no airflow."""
        return cls(t_out=t, t_sky=t, t_ground=t)


@dataclass(eq=False)
class ElementaryMatrices:
    """The named additive parts of one zone's A matrix and B vector."""

    zone: str
    dim: int
    A_cond: np.ndarray
    A_cvi: np.ndarray
    A_cve: np.ndarray
    A_lwi: np.ndarray
    A_lwe: np.ndarray
    A_air: np.ndarray
    A_rm: np.ndarray
    A_connex: np.ndarray
    B_swi: np.ndarray
    B_swe: np.ndarray
    B_cvi_src: np.ndarray
    B_cve: np.ndarray
    B_lwe: np.ndarray
    B_air: np.ndarray
    B_gains: np.ndarray
    B_ground: np.ndarray
    B_connex: np.ndarray

    @classmethod
    def zeros(cls, zone: str, dim: int) -> "ElementaryMatrices":
        parts = {name: np.zeros((dim, dim)) for name in MATRIX_NAMES}
        parts.update({name: np.zeros(dim) for name in VECTOR_NAMES})
        return cls(zone=zone, dim=dim, **parts)

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in MATRIX_NAMES}

    def vectors(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in VECTOR_NAMES}

    def a_sum(self, connexion: bool = True) -> np.ndarray:
        total = np.zeros((self.dim, self.dim))
        for name, m in self.matrices().items():
            if not connexion and name == "A_connex":
                continue
            total += m
        return total

    def b_sum(self, connexion: bool = True) -> np.ndarray:
        # summing in declaration order keeps results bit-reproducible
        total = np.zeros(self.dim)
        for name, v in self.vectors().items():
            if not connexion and name == "B_connex":
                continue
            total += v
        return total


@dataclass(frozen=True, eq=False)
class ZoneStateSystem:
    """Composed state system of one zone: ``C dT/dt = A T + B``."""

    zone: str
    C: np.ndarray  # (n,) diagonal capacities, J/K
    A: np.ndarray  # (n, n), W/K
    B: np.ndarray  # (n,), W
    row_map: tuple[int, ...]  # row index -> absolute node number


def _zone_rows(s: NodalStructure, zone: str) -> dict[int, int]:
    return {abs_n: i for i, abs_n in enumerate(s.zone_index[zone])}


def assemble_A_cond(zone: str, s: NodalStructure) -> np.ndarray:
    """Conduction matrix: stamp every link from both endpoints' sweeps.

    Ground links (to the imposed ground temperature, not a state) contribute
    only their diagonal leak here; the matching source is in ``B_ground``.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    a = np.zeros((n, n))
    for rec in s.zone_nodes(zone):
        i = rows[rec.abs_number]
        for neighbor, k in rec.links:
            j = rows[neighbor]
            a[i, j] += k
            a[i, i] -= k
        if rec.ground_conductance:
            a[i, i] -= rec.ground_conductance
    return a


def assemble_interior_exchange(
    zone: str, s: NodalStructure, f: FilmCoefficients
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Convective and long-wave exchange of the zone's own interior surfaces.

    Returns ``(A_cvi, A_lwi, A_rm)``.  The radiant row is algebraic (zero
    capacity): it solves to the area-and-h weighted mean surface temperature.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    a_cvi = np.zeros((n, n))
    a_lwi = np.zeros((n, n))
    a_rm = np.zeros((n, n))
    i_air = rows[s.air_abs(zone)]
    i_rm = rows[s.radiant_abs(zone)]
    for rec in s.zone_nodes(zone):
        if rec.faces != zone:
            continue
        i = rows[rec.abs_number]
        h_c = f.h_ci(zone, rec.surface_class) * rec.area
        h_r = f.h_ri(zone) * rec.area
        a_cvi[i, i] -= h_c
        a_cvi[i, i_air] += h_c
        a_cvi[i_air, i] += h_c
        a_cvi[i_air, i_air] -= h_c
        a_lwi[i, i] -= h_r
        a_lwi[i, i_rm] += h_r
        a_rm[i_rm, i] += h_r
        a_rm[i_rm, i_rm] -= h_r
    return a_cvi, a_lwi, a_rm


def assemble_exterior_exchange(
    zone: str, s: NodalStructure, f: FilmCoefficients, inputs: BoundaryInputs
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Outdoor-surface exchanges: returns ``(A_cve, A_lwe, B_cve, B_lwe, B_swe)``.

    Absorptivity is folded into the provided short-wave flux densities.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    a_cve = np.zeros((n, n))
    a_lwe = np.zeros((n, n))
    b_cve = np.zeros(n)
    b_lwe = np.zeros(n)
    b_swe = np.zeros(n)
    for rec in s.zone_nodes(zone):
        if rec.faces != EXTERIOR:
            continue
        i = rows[rec.abs_number]
        a_cve[i, i] -= f.h_ce * rec.area
        a_lwe[i, i] -= f.h_re * rec.area
        b_cve[i] = f.h_ce * rec.area * inputs.t_out
        b_lwe[i] = f.h_re * rec.area * inputs.t_sky
        b_swe[i] = inputs.sw_exterior.get(rec.parent, 0.0) * rec.area
    return a_cve, a_lwe, b_cve, b_lwe, b_swe


def assemble_air_balance(
    zone: str, s: NodalStructure, f: FilmCoefficients, inputs: BoundaryInputs
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outdoor-air exchange and internal gains: ``(A_air, B_air, B_gains)``.

    The convective surface coupling of the air node is already in ``A_cvi``.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    a_air = np.zeros((n, n))
    b_air = np.zeros(n)
    b_gains = np.zeros(n)
    i_air = rows[s.air_abs(zone)]
    i_rm = rows[s.radiant_abs(zone)]
    flow = inputs.airflow.get(zone, 0.0) * f.air_specific_heat  # W/K
    a_air[i_air, i_air] -= flow
    b_air[i_air] = flow * inputs.t_out
    b_gains[i_air] += inputs.gains_convective.get(zone, 0.0)
    b_gains[i_rm] += inputs.gains_radiant.get(zone, 0.0)
    return a_air, b_air, b_gains


def assemble_connex(
    zone: str, s: NodalStructure, f: FilmCoefficients, inputs: BoundaryInputs
) -> tuple[np.ndarray, np.ndarray]:
    """Coupling rows for surfaces of this zone that face an adjacent zone.

    Their balance uses the adjacent zone's air and radiant temperatures, read
    from ``inputs.neighbor_temperatures``; the film coefficients are those of
    the faced zone, so the row matches the equation that zone assembles for
    the same node.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    a_connex = np.zeros((n, n))
    b_connex = np.zeros(n)
    for rec in s.zone_nodes(zone):
        if not rec.connexion.get(zone):
            continue
        neighbor = rec.faces
        if neighbor not in inputs.neighbor_temperatures:
            raise ValueError(
                f"zone '{zone}': missing adjacent-zone temperatures for '{neighbor}'"
            )
        t_air, t_rm = inputs.neighbor_temperatures[neighbor]
        i = rows[rec.abs_number]
        h_c = f.h_ci(neighbor, rec.surface_class) * rec.area
        h_r = f.h_ri(neighbor) * rec.area
        a_connex[i, i] = -(h_c + h_r)
        b_connex[i] = h_c * t_air + h_r * t_rm
    return a_connex, b_connex


def assemble_interior_sources(
    zone: str, s: NodalStructure, inputs: BoundaryInputs
) -> tuple[np.ndarray, np.ndarray]:
    """Interior short-wave distribution and ground sources: ``(B_swi, B_ground)``.

    Each faced zone's interior short-wave power is spread over the surfaces
    facing it proportionally to area; rows of surfaces facing an adjacent
    zone therefore receive that zone's share, keeping the shared nodes'
    equations identical in both owning zones.
    """
    rows = _zone_rows(s, zone)
    n = s.zone_dims[zone]
    b_swi = np.zeros(n)
    b_ground = np.zeros(n)
    area_facing: dict[str, float] = {}
    for faced, power in inputs.sw_interior.items():
        if power:
            area_facing[faced] = sum(r.area for r in s.surfaces_facing(faced))
    for rec in s.zone_nodes(zone):
        i = rows[rec.abs_number]
        faced = rec.faces
        if faced in area_facing and area_facing[faced] > 0:
            b_swi[i] += inputs.sw_interior[faced] * rec.area / area_facing[faced]
        if rec.ground_conductance:
            b_ground[i] = rec.ground_conductance * inputs.t_ground
    return b_swi, b_ground


def assemble_zone_parts(
    zone: str,
    s: NodalStructure,
    f: FilmCoefficients,
    inputs: BoundaryInputs,
    connexion: bool = True,
) -> ElementaryMatrices:
    """Fill every elementary part of one zone for the given step inputs.

    With ``connexion=False`` the coupling rows stay zero (used by the direct
    whole-building assembly, where inter-zone coupling is genuine matrix
    entries instead).
    """
    n = s.zone_dims[zone]
    parts = ElementaryMatrices.zeros(zone, n)
    parts.A_cond = assemble_A_cond(zone, s)
    parts.A_cvi, parts.A_lwi, parts.A_rm = assemble_interior_exchange(zone, s, f)
    (parts.A_cve, parts.A_lwe, parts.B_cve, parts.B_lwe, parts.B_swe) = (
        assemble_exterior_exchange(zone, s, f, inputs)
    )
    parts.A_air, parts.B_air, parts.B_gains = assemble_air_balance(zone, s, f, inputs)
    parts.B_swi, parts.B_ground = assemble_interior_sources(zone, s, inputs)
    if connexion:
        parts.A_connex, parts.B_connex = assemble_connex(zone, s, f, inputs)
    return parts


def compose_state_system(
    parts: ElementaryMatrices, s: NodalStructure, zone: str
) -> ZoneStateSystem:
    """Sum the elementary parts into the zone's ``C dT/dt = A T + B`` system."""
    n = s.zone_dims[zone]
    for name, m in parts.matrices().items():
        if m.shape != (n, n):
            raise ValueError(f"{name}: dimension {m.shape} != zone dimension {n}")
    for name, v in parts.vectors().items():
        if v.shape != (n,):
            raise ValueError(f"{name}: dimension {v.shape} != zone dimension {n}")
    capacities = np.array([s.node(a).capacity for a in s.zone_index[zone]])
    return ZoneStateSystem(
        zone=zone,
        C=capacities,
        A=parts.a_sum(),
        B=parts.b_sum(),
        row_map=s.zone_index[zone],
    )


def assemble_global(
    s: NodalStructure, f: FilmCoefficients, inputs: BoundaryInputs
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-building ``(C, A, B)`` over the unique global numbering.

    Every node's genuine balance row is taken from the zone that owns it (the
    faced zone for shared surfaces), with inter-zone coupling appearing as
    real matrix entries; no connexion terms are involved.
    """
    n = len(s.nodes)
    c_glob = np.array([rec.capacity for rec in s.nodes])
    a_glob = np.zeros((n, n))
    b_glob = np.zeros(n)
    for zone in s.zone_order:
        parts = assemble_zone_parts(zone, s, f, inputs, connexion=False)
        a_zone = parts.a_sum(connexion=False)
        b_zone = parts.b_sum(connexion=False)
        cols = np.array([abs_n - 1 for abs_n in s.zone_index[zone]])
        for i, abs_n in enumerate(s.zone_index[zone]):
            rec = s.node(abs_n)
            if s.owner_zone(rec) != zone:
                continue
            a_glob[abs_n - 1, cols] = a_zone[i, :]
            b_glob[abs_n - 1] = b_zone[i]
    return c_glob, a_glob, b_glob
