"""Nodal structure generation: from a building description to a typed RC network.

Every wall and window is discretised into a chain of temperature nodes linked
by conductances (W/K), each node carrying a lumped capacity (J/K).  Nodes are
numbered incrementally: walls in description order (side-1 end first), then
windows, then per zone one dry-air node and one mean-radiant node.

Nodes of entities separating two zones belong to both zones (the shared part
through which the iterative coupling exchanges information).  The surface of
such an entity facing zone B is a *connexion node* for zone A: its balance
equation inside zone A's system references zone B's air and radiant
temperatures.
"""
from __future__ import annotations

import enum
import io
from dataclasses import dataclass, replace

from .building import (
    HORIZONTAL_CEILING,
    HORIZONTAL_FLOOR,
    VERTICAL,
    BuildingDescription,
    WallSpec,
    WindowSpec,
    validate,
    wall_rc_parameters,
)

__all__ = [
    "NodeType",
    "WallChain",
    "NodeRecord",
    "ZoneParams",
    "NodalStructure",
    "discretize_wall",
    "generate_nodes",
    "merge_zones",
    "structure_to_csv",
]

EXTERIOR = "exterior"
GROUND = "ground"


class NodeType(enum.IntEnum):
    """The absolute node types; the value is the reference number."""

    EXT_WALL_OUTDOOR_SURFACE = 1
    EXT_WALL_INDOOR_SURFACE = 2
    EXT_WALL_INTERNAL = 3
    WINDOW_OUTDOOR_SURFACE = 4
    WINDOW_INDOOR_SURFACE = 5
    INTERNAL_WALL_SURFACE = 6
    INTERNAL_WALL_INTERNAL = 7
    INTERZONE_WALL_SURFACE = 8
    INTERZONE_WALL_INTERNAL = 9
    GROUND_WALL_SURFACE = 10
    GROUND_WALL_INTERNAL = 11
    GROUND_WALL_TERMINAL = 12
    INTERZONE_HORIZONTAL_LOWER_SURFACE = 13  # face seen by the zone below the slab
    INTERZONE_HORIZONTAL_UPPER_SURFACE = 14  # face seen by the zone above the slab
    INTERZONE_WINDOW_SURFACE = 15
    ZONE_AIR = 16
    ZONE_RADIANT = 17


INTERZONE_SURFACE_TYPES = frozenset(
    {
        NodeType.INTERZONE_WALL_SURFACE,
        NodeType.INTERZONE_HORIZONTAL_LOWER_SURFACE,
        NodeType.INTERZONE_HORIZONTAL_UPPER_SURFACE,
        NodeType.INTERZONE_WINDOW_SURFACE,
    }
)

SURFACE_TYPES = INTERZONE_SURFACE_TYPES | frozenset(
    {
        NodeType.EXT_WALL_OUTDOOR_SURFACE,
        NodeType.EXT_WALL_INDOOR_SURFACE,
        NodeType.WINDOW_OUTDOOR_SURFACE,
        NodeType.WINDOW_INDOOR_SURFACE,
        NodeType.INTERNAL_WALL_SURFACE,
        NodeType.GROUND_WALL_SURFACE,
        NodeType.GROUND_WALL_TERMINAL,
    }
)


@dataclass(frozen=True)
class WallChain:
    """Capacities and link conductances of one discretised entity, side-1 first."""

    capacities: tuple[float, ...]  # J/K, one per node
    conductances: tuple[float, ...]  # W/K, one per consecutive node pair

    def __len__(self) -> int:
        return len(self.capacities)


def _stations(w: WallSpec, slices: int) -> tuple[list[float], list[float]]:
    """Cut the wall into ``slices`` equal-resistance slabs across its layers.

    Returns the cumulative (resistance, capacity) at each cut.  The cuts are
    sampled as fractions of the total so the per-slice resistances telescope
    exactly to the layer sum, and the capacities to the total capacity.
    """
    cum_r = [0.0]
    cum_c = [0.0]
    for layer in w.layers:
        cum_r.append(cum_r[-1] + layer.thickness / (layer.material.conductivity * w.area))
        cum_c.append(
            cum_c[-1]
            + layer.material.density * layer.material.specific_heat * layer.thickness * w.area
        )
    r_total, c_total = cum_r[-1], cum_c[-1]

    station_r: list[float] = []
    station_c: list[float] = []
    for k in range(slices + 1):
        if k == 0:
            station_r.append(0.0)
            station_c.append(0.0)
            continue
        if k == slices:
            station_r.append(r_total)
            station_c.append(c_total)
            continue
        target = r_total * (k / slices)
        layer_idx = 0
        while cum_r[layer_idx + 1] < target and layer_idx < len(w.layers) - 1:
            layer_idx += 1
        layer_r = cum_r[layer_idx + 1] - cum_r[layer_idx]
        layer_c = cum_c[layer_idx + 1] - cum_c[layer_idx]
        frac = (target - cum_r[layer_idx]) / layer_r
        station_r.append(target)
        station_c.append(cum_c[layer_idx] + frac * layer_c)
    return station_r, station_c


def discretize_wall(w: WallSpec | WindowSpec) -> WallChain:
    """Discretise a wall (or window) into its node chain.

    R2C walls yield two surface nodes carrying half the wall capacity each and
    one conductance ``1/R_total``.  ``nodes(m)`` walls yield ``m`` internal
    nodes between the two surfaces; the wall is cut into ``m + 1``
    equal-resistance slices and each node lumps the half-slices around it.
    Windows yield a two-node, zero-capacity chain with ``K = U * area``.
    """
    if isinstance(w, WindowSpec):
        k = w.conductance_per_area * w.area
        return WallChain(capacities=(0.0, 0.0), conductances=(k,))

    model = w.conduction_model
    if model.kind == "r2c":
        r_total, c_total = wall_rc_parameters(w)
        half = c_total / 2.0
        return WallChain(capacities=(half, half), conductances=(1.0 / r_total,))

    m = model.internal_nodes
    if m < 1:
        raise ValueError(f"wall '{w.name}': nodes(m) needs m >= 1 internal nodes; use R2C")
    slices = m + 1
    station_r, station_c = _stations(w, slices)
    slice_c = [station_c[k + 1] - station_c[k] for k in range(slices)]
    capacities = [slice_c[0] / 2.0]
    for k in range(m):
        capacities.append(slice_c[k] / 2.0 + slice_c[k + 1] / 2.0)
    capacities.append(slice_c[-1] / 2.0)
    # every slice has the same resistance by construction
    conductances = (slices / station_r[-1],) * slices
    return WallChain(capacities=tuple(capacities), conductances=conductances)


@dataclass(frozen=True)
class NodeRecord:
    """One temperature node and everything needed to stamp its balance equation."""

    abs_number: int  # global incremental number, 1-based
    abs_type: NodeType
    zones: tuple[str, ...]  # owning zone(s); two for shared interzone nodes
    relative_numbers: dict[str, int]  # zone id -> 1-based equation row in that zone
    connexion: dict[str, int]  # zone id -> 1 if connexion node for that zone
    capacity: float  # J/K
    links: tuple[tuple[int, float], ...]  # (neighbour abs_number, conductance W/K)
    parent: str  # wall / window / zone identifier
    area: float  # m2 (entity area; 0 for zone nodes)
    faces: str | None  # "exterior" | "ground" | zone id, surfacic nodes only
    surface_class: str | None  # "vertical" | "floor" | "ceiling"
    ground_conductance: float = 0.0  # W/K toward the imposed ground temperature

    def is_surface(self) -> bool:
        return self.abs_type in SURFACE_TYPES


@dataclass(frozen=True)
class ZoneParams:
    """Per-zone constants the assembly and solicitation mapping need."""

    zone: str
    volume: float  # m3
    air_change_rate: float  # 1/h
    mass_flow: float  # kg/s of outdoor air exchange
    h_ci: float  # W/(m2 K)
    h_ri: float  # W/(m2 K)
    h_ci_overrides: dict[str, float]
    gain_channels: tuple[str, ...]  # weather gain channel suffixes feeding this zone
    swi_channels: tuple[str, ...]  # zone ids whose interior short-wave feeds this zone


@dataclass(frozen=True, eq=False)
class NodalStructure:
    """Ordered node records plus per-zone indexing; topology source of truth."""

    nodes: tuple[NodeRecord, ...]
    zone_order: tuple[str, ...]
    zone_index: dict[str, tuple[int, ...]]  # zone id -> abs numbers, air/radiant last
    zone_dims: dict[str, int]
    zone_params: dict[str, ZoneParams]
    h_ce: float
    h_re: float
    air_specific_heat: float
    air_density: float
    air_capacity_multiplier: float

    def node(self, abs_number: int) -> NodeRecord:
        return self.nodes[abs_number - 1]

    def row(self, zone: str, abs_number: int) -> int:
        """0-based row of a node inside a zone's state system."""
        return self.node(abs_number).relative_numbers[zone] - 1

    def zone_nodes(self, zone: str) -> tuple[NodeRecord, ...]:
        return tuple(self.node(n) for n in self.zone_index[zone])

    def air_abs(self, zone: str) -> int:
        return self.zone_index[zone][-2]

    def radiant_abs(self, zone: str) -> int:
        return self.zone_index[zone][-1]

    def owner_zone(self, rec: NodeRecord) -> str:
        """The zone whose system carries this node's genuine balance equation.

        Shared surface nodes are owned by the zone they face; shared internal
        nodes (pure conduction) by the first listed zone.
        """
        if len(rec.zones) == 1:
            return rec.zones[0]
        if rec.faces in rec.zones:
            return rec.faces
        return rec.zones[0]

    def surfaces_facing(self, zone: str) -> tuple[NodeRecord, ...]:
        return tuple(r for r in self.nodes if r.faces == zone)


def _surface_class(orientation: str, faced_is_side1: bool) -> str:
    """How the faced zone experiences this surface (drives h_ci overrides).

    ``horizontal-floor`` declares the wall a floor of side-1's zone (that zone
    sits above the slab); ``horizontal-ceiling`` the reverse.
    """
    if orientation == VERTICAL:
        return "vertical"
    side1_above = orientation == HORIZONTAL_FLOOR
    faced_above = side1_above if faced_is_side1 else not side1_above
    return "floor" if faced_above else "ceiling"


def _wall_node_types(w: WallSpec) -> tuple[NodeType, NodeType, NodeType]:
    """(side-1 surface, internal, side-2 surface) types from the attachments."""
    kinds = (w.side1.kind, w.side2.kind)
    if EXTERIOR in kinds:
        out_first = w.side1.kind == EXTERIOR
        surf = (
            NodeType.EXT_WALL_OUTDOOR_SURFACE if out_first else NodeType.EXT_WALL_INDOOR_SURFACE,
            NodeType.EXT_WALL_INDOOR_SURFACE if out_first else NodeType.EXT_WALL_OUTDOOR_SURFACE,
        )
        return surf[0], NodeType.EXT_WALL_INTERNAL, surf[1]
    if GROUND in kinds:
        ground_first = w.side1.kind == GROUND
        surf = (
            NodeType.GROUND_WALL_TERMINAL if ground_first else NodeType.GROUND_WALL_SURFACE,
            NodeType.GROUND_WALL_SURFACE if ground_first else NodeType.GROUND_WALL_TERMINAL,
        )
        return surf[0], NodeType.GROUND_WALL_INTERNAL, surf[1]
    # zone | zone
    if w.side1.zone == w.side2.zone:
        return (
            NodeType.INTERNAL_WALL_SURFACE,
            NodeType.INTERNAL_WALL_INTERNAL,
            NodeType.INTERNAL_WALL_SURFACE,
        )
    if w.orientation == VERTICAL:
        return (
            NodeType.INTERZONE_WALL_SURFACE,
            NodeType.INTERZONE_WALL_INTERNAL,
            NodeType.INTERZONE_WALL_SURFACE,
        )
    side1_above = w.orientation == HORIZONTAL_FLOOR
    t1 = (
        NodeType.INTERZONE_HORIZONTAL_UPPER_SURFACE
        if side1_above
        else NodeType.INTERZONE_HORIZONTAL_LOWER_SURFACE
    )
    t2 = (
        NodeType.INTERZONE_HORIZONTAL_LOWER_SURFACE
        if side1_above
        else NodeType.INTERZONE_HORIZONTAL_UPPER_SURFACE
    )
    return t1, NodeType.INTERZONE_WALL_INTERNAL, t2


def _boundary_name(ref) -> str:
    return ref.zone if ref.is_zone() else ref.kind


def generate_nodes(
    b: BuildingDescription, zoning: list[tuple[str, ...]] | None = None
) -> NodalStructure:
    """Build the nodal structure of a (valid) building description.

    ``zoning`` optionally partitions the declared zones into groups that are
    merged into single model zones (every declared zone must appear exactly
    once; singleton groups may be omitted).
    """
    violations = validate(b)
    if violations:
        raise ValueError(
            "description is invalid: " + "; ".join(str(v) for v in violations[:5])
        )

    records: list[NodeRecord] = []
    counter = 0

    def chain_records(
        entity: WallSpec | WindowSpec, chain: WallChain, types: tuple[NodeType, ...]
    ) -> None:
        nonlocal counter
        n = len(chain)
        first = counter + 1
        zones = tuple(dict.fromkeys(entity.zone_sides()))  # keep side order, drop dupes
        for i in range(n):
            counter += 1
            links = []
            if i > 0:
                links.append((first + i - 1, chain.conductances[i - 1]))
            if i < n - 1:
                links.append((first + i + 1, chain.conductances[i]))
            faces = None
            surface_class = None
            ground_k = 0.0
            if i == 0 or i == n - 1:
                side = entity.side1 if i == 0 else entity.side2
                faces = _boundary_name(side)
                if side.is_zone():
                    orientation = getattr(entity, "orientation", VERTICAL)
                    surface_class = _surface_class(orientation, faced_is_side1=(i == 0))
                if side.kind == GROUND:
                    # imposed ground temperature one half-slice beyond the face
                    ground_k = 2.0 * (chain.conductances[0] if i == 0 else chain.conductances[-1])
            records.append(
                NodeRecord(
                    abs_number=counter,
                    abs_type=types[i],
                    zones=zones,
                    relative_numbers={},
                    connexion={},
                    capacity=chain.capacities[i],
                    links=tuple(links),
                    parent=entity.name,
                    area=entity.area,
                    faces=faces,
                    surface_class=surface_class,
                    ground_conductance=ground_k,
                )
            )

    for w in b.walls:
        chain = discretize_wall(w)
        t_first, t_internal, t_last = _wall_node_types(w)
        types = (t_first, *([t_internal] * (len(chain) - 2)), t_last)
        chain_records(w, chain, types)

    for w in b.windows:
        chain = discretize_wall(w)
        if len(w.zone_sides()) == 2:
            types = (NodeType.INTERZONE_WINDOW_SURFACE, NodeType.INTERZONE_WINDOW_SURFACE)
        else:
            out_first = w.side1.kind == EXTERIOR
            types = (
                NodeType.WINDOW_OUTDOOR_SURFACE if out_first else NodeType.WINDOW_INDOOR_SURFACE,
                NodeType.WINDOW_INDOOR_SURFACE if out_first else NodeType.WINDOW_OUTDOOR_SURFACE,
            )
        chain_records(w, chain, types)

    sim = b.simulation
    for z in b.zones:
        air_capacity = sim.air_density * sim.air_specific_heat * z.air_volume
        air_capacity *= sim.air_capacity_multiplier
        for node_type, capacity in (
            (NodeType.ZONE_AIR, air_capacity),
            (NodeType.ZONE_RADIANT, 0.0),
        ):
            counter += 1
            records.append(
                NodeRecord(
                    abs_number=counter,
                    abs_type=node_type,
                    zones=(z.id,),
                    relative_numbers={},
                    connexion={},
                    capacity=capacity,
                    links=(),
                    parent=z.id,
                    area=0.0,
                    faces=None,
                    surface_class=None,
                )
            )

    zone_params = {
        z.id: ZoneParams(
            zone=z.id,
            volume=z.air_volume,
            air_change_rate=z.air_change_rate,
            mass_flow=z.air_volume * z.air_change_rate / 3600.0 * sim.air_density,
            h_ci=z.h_ci,
            h_ri=z.h_ri,
            h_ci_overrides=dict(z.h_ci_overrides),
            gain_channels=(z.internal_gain_schedule or z.id,),
            swi_channels=(z.id,),
        )
        for z in b.zones
    }

    structure = _index_structure(
        records,
        zone_order=tuple(z.id for z in b.zones),
        zone_params=zone_params,
        h_ce=b.exterior_film.h_ce,
        h_re=b.exterior_film.h_re,
        air_specific_heat=sim.air_specific_heat,
        air_density=sim.air_density,
        air_capacity_multiplier=sim.air_capacity_multiplier,
    )

    if zoning:
        seen: list[str] = [z for group in zoning for z in group]
        if sorted(seen) != sorted(set(seen)):
            raise ValueError("zoning groups must not repeat a zone")
        unknown = set(seen) - set(structure.zone_order)
        if unknown:
            raise ValueError(f"zoning references unknown zone(s) {sorted(unknown)}")
        for group in zoning:
            merged = group[0]
            for other in group[1:]:
                structure = merge_zones(structure, merged, other)
                merged = _merged_id(merged, other)
    return structure


def _index_structure(records: list[NodeRecord], zone_order, zone_params, **consts) -> NodalStructure:
    """Assign relative numbers and connexion flags, build the zone index."""
    zone_index: dict[str, tuple[int, ...]] = {}
    for zone in zone_order:
        members = [r.abs_number for r in records if zone in r.zones and r.abs_type not in
                   (NodeType.ZONE_AIR, NodeType.ZONE_RADIANT)]
        members += [
            r.abs_number
            for r in records
            if r.zones == (zone,) and r.abs_type == NodeType.ZONE_AIR
        ]
        members += [
            r.abs_number
            for r in records
            if r.zones == (zone,) and r.abs_type == NodeType.ZONE_RADIANT
        ]
        zone_index[zone] = tuple(members)

    relative: dict[int, dict[str, int]] = {r.abs_number: {} for r in records}
    for zone, members in zone_index.items():
        for row, abs_number in enumerate(members, start=1):
            relative[abs_number][zone] = row

    indexed: list[NodeRecord] = []
    for r in records:
        connexion = {}
        for zone in r.zones:
            is_connexion = (
                r.abs_type in INTERZONE_SURFACE_TYPES and len(r.zones) == 2 and r.faces != zone
            )
            connexion[zone] = 1 if is_connexion else 0
        indexed.append(
            replace(r, relative_numbers=relative[r.abs_number], connexion=connexion)
        )

    return NodalStructure(
        nodes=tuple(indexed),
        zone_order=tuple(zone_order),
        zone_index=zone_index,
        zone_dims={z: len(m) for z, m in zone_index.items()},
        zone_params=zone_params,
        **consts,
    )


def _merged_id(a: str, b: str) -> str:
    parts = sorted(set(a.split("+")) | set(b.split("+")))
    return "+".join(parts)


_RETYPE_ON_MERGE = {
    NodeType.INTERZONE_WALL_SURFACE: NodeType.INTERNAL_WALL_SURFACE,
    NodeType.INTERZONE_HORIZONTAL_LOWER_SURFACE: NodeType.INTERNAL_WALL_SURFACE,
    NodeType.INTERZONE_HORIZONTAL_UPPER_SURFACE: NodeType.INTERNAL_WALL_SURFACE,
    NodeType.INTERZONE_WINDOW_SURFACE: NodeType.INTERNAL_WALL_SURFACE,
    NodeType.INTERZONE_WALL_INTERNAL: NodeType.INTERNAL_WALL_INTERNAL,
}


def merge_zones(s: NodalStructure, a: str, b: str) -> NodalStructure:
    """Collapse zones ``a`` and ``b`` into one model zone.

    Air nodes are merged (capacities summed), radiant nodes merged, entities
    between the two zones retyped to internal-wall nodes, and the structure is
    canonically renumbered.  The merged zone id is the sorted ``+``-join of
    the constituent ids, so merge order does not affect the result.
    """
    if a == b:
        raise ValueError("cannot merge a zone with itself")
    for zone in (a, b):
        if zone not in s.zone_order:
            raise ValueError(f"unknown zone '{zone}'")

    merged = _merged_id(a, b)
    both = {a, b}

    def map_zone(z: str) -> str:
        return merged if z in both else z

    air_capacity = s.node(s.air_abs(a)).capacity + s.node(s.air_abs(b)).capacity
    old_air_capacity = {z: s.node(s.air_abs(z)).capacity for z in s.zone_order}
    # every zone node is re-created below so the merged zone keeps the
    # walls-then-zone-pairs numbering invariant
    drop = {
        r.abs_number
        for r in s.nodes
        if r.abs_type in (NodeType.ZONE_AIR, NodeType.ZONE_RADIANT)
    }

    renum: dict[int, int] = {}
    counter = 0
    for r in s.nodes:
        if r.abs_number in drop:
            continue
        counter += 1
        renum[r.abs_number] = counter

    new_records: list[NodeRecord] = []
    for r in s.nodes:
        if r.abs_number in drop:
            continue
        zones = tuple(dict.fromkeys(map_zone(z) for z in r.zones))
        abs_type = r.abs_type
        if set(r.zones) == both and abs_type in _RETYPE_ON_MERGE:
            abs_type = _RETYPE_ON_MERGE[abs_type]
        new_records.append(
            replace(
                r,
                abs_number=renum[r.abs_number],
                abs_type=abs_type,
                zones=zones,
                relative_numbers={},
                connexion={},
                links=tuple((renum[n], k) for n, k in r.links),
                faces=map_zone(r.faces) if r.faces not in (None, EXTERIOR, GROUND) else r.faces,
            )
        )

    # merged zone replaces the first of (a, b) in the declaration order
    zone_order: list[str] = []
    for z in s.zone_order:
        mz = map_zone(z)
        if mz not in zone_order:
            zone_order.append(mz)

    for z in zone_order:
        counter += 1
        air_rec = NodeRecord(
            abs_number=counter,
            abs_type=NodeType.ZONE_AIR,
            zones=(z,),
            relative_numbers={},
            connexion={},
            capacity=air_capacity if z == merged else old_air_capacity[z],
            links=(),
            parent=z,
            area=0.0,
            faces=None,
            surface_class=None,
        )
        counter += 1
        radiant_rec = replace(
            air_rec, abs_number=counter, abs_type=NodeType.ZONE_RADIANT, capacity=0.0
        )
        new_records.extend([air_rec, radiant_rec])

    pa, pb = s.zone_params[a], s.zone_params[b]
    volume = pa.volume + pb.volume

    def weighted(fa: float, fb: float) -> float:
        return (fa * pa.volume + fb * pb.volume) / volume

    merged_params = ZoneParams(
        zone=merged,
        volume=volume,
        air_change_rate=weighted(pa.air_change_rate, pb.air_change_rate),
        mass_flow=pa.mass_flow + pb.mass_flow,
        h_ci=weighted(pa.h_ci, pb.h_ci),
        h_ri=weighted(pa.h_ri, pb.h_ri),
        h_ci_overrides={
            cls: weighted(
                pa.h_ci_overrides.get(cls, pa.h_ci), pb.h_ci_overrides.get(cls, pb.h_ci)
            )
            for cls in set(pa.h_ci_overrides) | set(pb.h_ci_overrides)
        },
        gain_channels=tuple(dict.fromkeys(pa.gain_channels + pb.gain_channels)),
        swi_channels=tuple(dict.fromkeys(pa.swi_channels + pb.swi_channels)),
    )
    zone_params = {
        z: (merged_params if z == merged else s.zone_params[z]) for z in zone_order
    }

    return _index_structure(
        new_records,
        zone_order=tuple(zone_order),
        zone_params=zone_params,
        h_ce=s.h_ce,
        h_re=s.h_re,
        air_specific_heat=s.air_specific_heat,
        air_density=s.air_density,
        air_capacity_multiplier=s.air_capacity_multiplier,
    )


def structure_to_csv(s: NodalStructure) -> str:
    """Tabular debug dump, one row per node."""
    out = io.StringIO()
    out.write(
        "abs_number,type_ref,zones,relative_numbers,connexion_flags,"
        "capacity,area,links,ground_conductance\n"
    )
    for r in s.nodes:
        zones = "|".join(r.zones)
        rel = "|".join(str(r.relative_numbers[z]) for z in r.zones)
        cnx = "|".join(str(r.connexion[z]) for z in r.zones)
        links = ";".join(f"{n}:{k!r}" for n, k in r.links)
        out.write(
            f"{r.abs_number},{int(r.abs_type)},{zones},{rel},{cnx},"
            f"{r.capacity!r},{r.area!r},{links},{r.ground_conductance!r}\n"
        )
    return out.getvalue()
