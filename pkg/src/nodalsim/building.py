"""Building description: the input document every downstream model is generated from.

A building is described in a single JSON document with top-level sections
``materials``, ``zones``, ``walls``, ``windows``, ``exterior`` and
``simulation``.  All quantities are SI (m, m², m³, W, J, K, seconds); air
change rates are in 1/h.  Temperatures throughout the package are °C.

Parsing resolves every cross reference (layer materials, wall/window sides)
and rejects unknown keys, duplicate identifiers and malformed values.
Physical invariants (positive thicknesses, film coefficients, ...) are
checked separately by :func:`validate`, which returns violations as data
instead of raising.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

__all__ = [
    "Material",
    "Layer",
    "BoundaryRef",
    "ConductionModel",
    "WallSpec",
    "WindowSpec",
    "ZoneSpec",
    "ExteriorFilm",
    "SimulationDefaults",
    "BuildingDescription",
    "ParseError",
    "Violation",
    "parse_building",
    "serialize_building",
    "validate",
    "wall_rc_parameters",
]

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

VERTICAL = "vertical"
HORIZONTAL_FLOOR = "horizontal-floor"
HORIZONTAL_CEILING = "horizontal-ceiling"
ORIENTATIONS = (VERTICAL, HORIZONTAL_FLOOR, HORIZONTAL_CEILING)

# surface classes used by the per-zone convective override table
SURFACE_CLASSES = ("vertical", "floor", "ceiling")


class ParseError(ValueError):
    """Building document is syntactically or referentially broken."""


@dataclass(frozen=True)
class Material:
    name: str
    conductivity: float  # W/(m K)
    density: float  # kg/m3
    specific_heat: float  # J/(kg K)


@dataclass(frozen=True)
class Layer:
    """One physical layer of a wall, side-1 to side-2 order."""

    material: Material
    thickness: float  # m


@dataclass(frozen=True)
class BoundaryRef:
    """What one face of a wall or window is attached to."""

    kind: str  # "zone" | "exterior" | "ground"
    zone: str | None = None

    @classmethod
    def to_zone(cls, zone_id: str) -> "BoundaryRef":
        return cls("zone", zone_id)

    @classmethod
    def exterior(cls) -> "BoundaryRef":
        return cls("exterior")

    @classmethod
    def ground(cls) -> "BoundaryRef":
        return cls("ground")

    def is_zone(self) -> bool:
        return self.kind == "zone"


@dataclass(frozen=True)
class ConductionModel:
    """Wall conduction discretisation: two-capacitor (``r2c``) or an
    ``m``-internal-node chain (``nodes``)."""

    kind: str  # "r2c" | "nodes"
    internal_nodes: int = 0


R2C = ConductionModel("r2c")


def nodes_model(m: int) -> ConductionModel:
    return ConductionModel("nodes", m)


@dataclass(frozen=True)
class WallSpec:
    name: str
    area: float  # m2
    layers: tuple[Layer, ...]
    side1: BoundaryRef
    side2: BoundaryRef
    orientation: str = VERTICAL
    conduction_model: ConductionModel = R2C

    def zone_sides(self) -> tuple[str, ...]:
        return tuple(s.zone for s in (self.side1, self.side2) if s.is_zone())

    def has_side(self, kind: str) -> bool:
        return self.side1.kind == kind or self.side2.kind == kind


@dataclass(frozen=True)
class WindowSpec:
    name: str
    area: float  # m2
    conductance_per_area: float  # W/(m2 K)
    side1: BoundaryRef
    side2: BoundaryRef

    def zone_sides(self) -> tuple[str, ...]:
        return tuple(s.zone for s in (self.side1, self.side2) if s.is_zone())

    def has_side(self, kind: str) -> bool:
        return self.side1.kind == kind or self.side2.kind == kind


@dataclass(frozen=True)
class ZoneSpec:
    id: str
    air_volume: float  # m3
    h_ci: float  # W/(m2 K), interior convective film
    h_ri: float  # W/(m2 K), linearised interior long-wave film
    air_change_rate: float = 0.0  # 1/h, exchange with outdoor air
    internal_gain_schedule: str | None = None  # weather channel suffix, default: zone id
    h_ci_overrides: dict[str, float] = field(default_factory=dict)  # per surface class


@dataclass(frozen=True)
class ExteriorFilm:
    h_ce: float = 17.0  # W/(m2 K), exterior convective film
    h_re: float = 5.0  # W/(m2 K), linearised exterior long-wave film


@dataclass(frozen=True)
class SimulationDefaults:
    dt: float = 600.0  # s
    theta: float = 1.0  # time scheme blend, in [0.5, 1]
    tolerance: float = 1e-3  # K, inter-zone coupling tolerance
    max_coupling_iterations: int = 100
    air_specific_heat: float = 1004.0  # J/(kg K)
    air_density: float = 1.2  # kg/m3
    air_capacity_multiplier: float = 1.0  # furniture inertia factor on zone air capacity


@dataclass(frozen=True)
class BuildingDescription:
    materials: tuple[Material, ...]
    zones: tuple[ZoneSpec, ...]
    walls: tuple[WallSpec, ...]
    windows: tuple[WindowSpec, ...] = ()
    exterior_film: ExteriorFilm = ExteriorFilm()
    simulation: SimulationDefaults = SimulationDefaults()

    def zone(self, zone_id: str) -> ZoneSpec:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise KeyError(zone_id)

    def zone_ids(self) -> tuple[str, ...]:
        return tuple(z.id for z in self.zones)


@dataclass(frozen=True)
class Violation:
    """One broken invariant; entity names the offending object."""

    entity: str
    rule: str
    message: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.entity}: [{self.rule}] {self.message}"


# ---------------------------------------------------------------------------
# parsing


def _require_obj(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected an object")
    return value


def _require_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list")
    return value


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown key(s) {sorted(unknown)}")


def _number(obj: dict, key: str, where: str, default=None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise ParseError(f"{where}: missing required key '{key}'")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}.{key}: expected a number")
    return float(v)


def _integer(obj: dict, key: str, where: str, default: int | None = None) -> int:
    if key not in obj:
        if default is not None:
            return default
        raise ParseError(f"{where}: missing required key '{key}'")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}.{key}: expected an integer")
    return v


def _identifier(obj: dict, key: str, where: str) -> str:
    if key not in obj:
        raise ParseError(f"{where}: missing required key '{key}'")
    v = obj[key]
    if not isinstance(v, str) or not _IDENT.match(v):
        raise ParseError(f"{where}.{key}: expected an identifier ([A-Za-z][A-Za-z0-9_-]*)")
    return v


def _boundary(obj: dict, key: str, where: str, zone_ids: set[str]) -> BoundaryRef:
    if key not in obj:
        raise ParseError(f"{where}: missing required key '{key}'")
    raw = _require_obj(obj[key], f"{where}.{key}")
    _reject_unknown(raw, {"kind", "zone"}, f"{where}.{key}")
    kind = raw.get("kind")
    if kind not in ("zone", "exterior", "ground"):
        raise ParseError(f"{where}.{key}: kind must be one of zone/exterior/ground")
    if kind == "zone":
        zid = raw.get("zone")
        if not isinstance(zid, str):
            raise ParseError(f"{where}.{key}: zone reference requires a 'zone' id")
        if zid not in zone_ids:
            raise ParseError(f"{where}.{key}: unresolved reference to zone '{zid}'")
        return BoundaryRef.to_zone(zid)
    if "zone" in raw:
        raise ParseError(f"{where}.{key}: 'zone' only applies to kind=zone")
    return BoundaryRef(kind)


def _conduction_model(obj: dict, where: str) -> ConductionModel:
    if "conduction_model" not in obj:
        return R2C
    raw = obj["conduction_model"]
    if raw == "R2C":
        return R2C
    if isinstance(raw, dict):
        _reject_unknown(raw, {"nodes"}, f"{where}.conduction_model")
        m = _integer(raw, "nodes", f"{where}.conduction_model")
        if m < 1:
            raise ParseError(f"{where}.conduction_model: nodes(m) requires m >= 1")
        return nodes_model(m)
    raise ParseError(f"{where}.conduction_model: expected \"R2C\" or {{\"nodes\": m}}")


def parse_building(text: str) -> BuildingDescription:
    """Parse a JSON building document into a fully resolved description.

    Raises :class:`ParseError` on syntax errors (with position), unresolved
    references, duplicate identifiers or unknown keys.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    doc = _require_obj(doc, "document")
    _reject_unknown(
        doc, {"materials", "zones", "walls", "windows", "exterior", "simulation"}, "document"
    )
    for key in ("materials", "zones", "walls"):
        if key not in doc:
            raise ParseError(f"document: missing required section '{key}'")

    materials: list[Material] = []
    by_name: dict[str, Material] = {}
    for idx, raw in enumerate(_require_list(doc["materials"], "materials")):
        where = f"materials[{idx}]"
        raw = _require_obj(raw, where)
        _reject_unknown(raw, {"name", "conductivity", "density", "specific_heat"}, where)
        name = _identifier(raw, "name", where)
        if name in by_name:
            raise ParseError(f"{where}: duplicate material identifier '{name}'")
        mat = Material(
            name=name,
            conductivity=_number(raw, "conductivity", where),
            density=_number(raw, "density", where),
            specific_heat=_number(raw, "specific_heat", where),
        )
        by_name[name] = mat
        materials.append(mat)

    zones: list[ZoneSpec] = []
    zone_ids: set[str] = set()
    for idx, raw in enumerate(_require_list(doc["zones"], "zones")):
        where = f"zones[{idx}]"
        raw = _require_obj(raw, where)
        _reject_unknown(
            raw,
            {
                "id",
                "air_volume",
                "air_change_rate",
                "h_ci",
                "h_ri",
                "internal_gain_schedule",
                "h_ci_overrides",
            },
            where,
        )
        zid = _identifier(raw, "id", where)
        if zid in zone_ids:
            raise ParseError(f"{where}: duplicate zone identifier '{zid}'")
        zone_ids.add(zid)
        schedule = None
        if "internal_gain_schedule" in raw:
            schedule = raw["internal_gain_schedule"]
            if schedule is not None and (
                not isinstance(schedule, str) or not _IDENT.match(schedule)
            ):
                raise ParseError(f"{where}.internal_gain_schedule: expected an identifier")
        overrides: dict[str, float] = {}
        if "h_ci_overrides" in raw:
            raw_ov = _require_obj(raw["h_ci_overrides"], f"{where}.h_ci_overrides")
            _reject_unknown(raw_ov, set(SURFACE_CLASSES), f"{where}.h_ci_overrides")
            for cls in SURFACE_CLASSES:
                if cls in raw_ov:
                    overrides[cls] = _number(raw_ov, cls, f"{where}.h_ci_overrides")
        zones.append(
            ZoneSpec(
                id=zid,
                air_volume=_number(raw, "air_volume", where),
                h_ci=_number(raw, "h_ci", where),
                h_ri=_number(raw, "h_ri", where),
                air_change_rate=_number(raw, "air_change_rate", where, default=0.0),
                internal_gain_schedule=schedule,
                h_ci_overrides=overrides,
            )
        )
    if not zones:
        raise ParseError("zones: no zones declared")

    entity_names: set[str] = set()
    walls: list[WallSpec] = []
    for idx, raw in enumerate(_require_list(doc["walls"], "walls")):
        where = f"walls[{idx}]"
        raw = _require_obj(raw, where)
        _reject_unknown(
            raw,
            {"name", "area", "layers", "side1", "side2", "orientation", "conduction_model"},
            where,
        )
        name = _identifier(raw, "name", where)
        if name in entity_names:
            raise ParseError(f"{where}: duplicate wall/window identifier '{name}'")
        entity_names.add(name)
        layers: list[Layer] = []
        for j, lraw in enumerate(_require_list(raw.get("layers", []), f"{where}.layers")):
            lwhere = f"{where}.layers[{j}]"
            lraw = _require_obj(lraw, lwhere)
            _reject_unknown(lraw, {"material", "thickness"}, lwhere)
            mname = _identifier(lraw, "material", lwhere)
            if mname not in by_name:
                raise ParseError(f"{lwhere}: unresolved reference to material '{mname}'")
            layers.append(Layer(material=by_name[mname], thickness=_number(lraw, "thickness", lwhere)))
        orientation = raw.get("orientation", VERTICAL)
        if orientation not in ORIENTATIONS:
            raise ParseError(f"{where}.orientation: expected one of {ORIENTATIONS}")
        walls.append(
            WallSpec(
                name=name,
                area=_number(raw, "area", where),
                layers=tuple(layers),
                side1=_boundary(raw, "side1", where, zone_ids),
                side2=_boundary(raw, "side2", where, zone_ids),
                orientation=orientation,
                conduction_model=_conduction_model(raw, where),
            )
        )

    windows: list[WindowSpec] = []
    for idx, raw in enumerate(_require_list(doc.get("windows", []), "windows")):
        where = f"windows[{idx}]"
        raw = _require_obj(raw, where)
        _reject_unknown(raw, {"name", "area", "conductance_per_area", "side1", "side2"}, where)
        name = _identifier(raw, "name", where)
        if name in entity_names:
            raise ParseError(f"{where}: duplicate wall/window identifier '{name}'")
        entity_names.add(name)
        windows.append(
            WindowSpec(
                name=name,
                area=_number(raw, "area", where),
                conductance_per_area=_number(raw, "conductance_per_area", where),
                side1=_boundary(raw, "side1", where, zone_ids),
                side2=_boundary(raw, "side2", where, zone_ids),
            )
        )

    exterior = ExteriorFilm()
    if "exterior" in doc:
        raw = _require_obj(doc["exterior"], "exterior")
        _reject_unknown(raw, {"h_ce", "h_re"}, "exterior")
        exterior = ExteriorFilm(
            h_ce=_number(raw, "h_ce", "exterior", default=ExteriorFilm.h_ce),
            h_re=_number(raw, "h_re", "exterior", default=ExteriorFilm.h_re),
        )

    simulation = SimulationDefaults()
    if "simulation" in doc:
        raw = _require_obj(doc["simulation"], "simulation")
        _reject_unknown(
            raw,
            {
                "dt",
                "theta",
                "tolerance",
                "max_coupling_iterations",
                "air_specific_heat",
                "air_density",
                "air_capacity_multiplier",
            },
            "simulation",
        )
        d = SimulationDefaults()
        simulation = SimulationDefaults(
            dt=_number(raw, "dt", "simulation", default=d.dt),
            theta=_number(raw, "theta", "simulation", default=d.theta),
            tolerance=_number(raw, "tolerance", "simulation", default=d.tolerance),
            max_coupling_iterations=_integer(
                raw, "max_coupling_iterations", "simulation", default=d.max_coupling_iterations
            ),
            air_specific_heat=_number(raw, "air_specific_heat", "simulation", default=d.air_specific_heat),
            air_density=_number(raw, "air_density", "simulation", default=d.air_density),
            air_capacity_multiplier=_number(
                raw, "air_capacity_multiplier", "simulation", default=d.air_capacity_multiplier
            ),
        )

    return BuildingDescription(
        materials=tuple(materials),
        zones=tuple(zones),
        walls=tuple(walls),
        windows=tuple(windows),
        exterior_film=exterior,
        simulation=simulation,
    )


def _boundary_to_json(ref: BoundaryRef) -> dict:
    if ref.is_zone():
        return {"kind": "zone", "zone": ref.zone}
    return {"kind": ref.kind}


def serialize_building(b: BuildingDescription) -> str:
    """Inverse of :func:`parse_building`: ``parse(serialize(b)) == b``."""
    doc = {
        "materials": [
            {
                "name": m.name,
                "conductivity": m.conductivity,
                "density": m.density,
                "specific_heat": m.specific_heat,
            }
            for m in b.materials
        ],
        "zones": [
            {
                "id": z.id,
                "air_volume": z.air_volume,
                "air_change_rate": z.air_change_rate,
                "h_ci": z.h_ci,
                "h_ri": z.h_ri,
                **(
                    {"internal_gain_schedule": z.internal_gain_schedule}
                    if z.internal_gain_schedule is not None
                    else {}
                ),
                **({"h_ci_overrides": dict(z.h_ci_overrides)} if z.h_ci_overrides else {}),
            }
            for z in b.zones
        ],
        "walls": [
            {
                "name": w.name,
                "area": w.area,
                "layers": [
                    {"material": layer.material.name, "thickness": layer.thickness}
                    for layer in w.layers
                ],
                "side1": _boundary_to_json(w.side1),
                "side2": _boundary_to_json(w.side2),
                "orientation": w.orientation,
                "conduction_model": (
                    "R2C"
                    if w.conduction_model.kind == "r2c"
                    else {"nodes": w.conduction_model.internal_nodes}
                ),
            }
            for w in b.walls
        ],
        "windows": [
            {
                "name": w.name,
                "area": w.area,
                "conductance_per_area": w.conductance_per_area,
                "side1": _boundary_to_json(w.side1),
                "side2": _boundary_to_json(w.side2),
            }
            for w in b.windows
        ],
        "exterior": {"h_ce": b.exterior_film.h_ce, "h_re": b.exterior_film.h_re},
        "simulation": {
            "dt": b.simulation.dt,
            "theta": b.simulation.theta,
            "tolerance": b.simulation.tolerance,
            "max_coupling_iterations": b.simulation.max_coupling_iterations,
            "air_specific_heat": b.simulation.air_specific_heat,
            "air_density": b.simulation.air_density,
            "air_capacity_multiplier": b.simulation.air_capacity_multiplier,
        },
    }
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# validation


def validate(b: BuildingDescription) -> list[Violation]:
    """Check every physical invariant; an empty list means the description is sound."""
    out: list[Violation] = []

    def bad(entity: str, rule: str, message: str) -> None:
        out.append(Violation(entity, rule, message))

    for m in b.materials:
        if not m.conductivity > 0:
            bad(m.name, "conductivity>0", f"conductivity {m.conductivity} must be > 0")
        if not m.density > 0:
            bad(m.name, "density>0", f"density {m.density} must be > 0")
        if not m.specific_heat > 0:
            bad(m.name, "specific_heat>0", f"specific heat {m.specific_heat} must be > 0")

    for z in b.zones:
        if not z.air_volume > 0:
            bad(z.id, "air_volume>0", f"air volume {z.air_volume} must be > 0")
        if z.air_change_rate < 0:
            bad(z.id, "air_change_rate>=0", f"air change rate {z.air_change_rate} must be >= 0")
        if not z.h_ci > 0:
            bad(z.id, "h_ci>0", f"h_ci {z.h_ci} must be > 0")
        if not z.h_ri > 0:
            bad(z.id, "h_ri>0", f"h_ri {z.h_ri} must be > 0")
        for cls, h in z.h_ci_overrides.items():
            if not h > 0:
                bad(z.id, "h_ci>0", f"h_ci override for {cls} must be > 0")

    for w in b.walls:
        if not w.area > 0:
            bad(w.name, "area>0", f"area {w.area} must be > 0")
        if not w.layers:
            bad(w.name, "at-least-one-layer", "wall needs at least one layer")
        for i, layer in enumerate(w.layers):
            if not layer.thickness > 0:
                bad(w.name, "thickness>0", f"layer {i} thickness {layer.thickness} must be > 0")
        if w.side1 == w.side2:
            bad(w.name, "sides-distinct", "side1 and side2 must attach to different boundaries")
        if w.has_side("ground") and len(w.zone_sides()) != 1:
            bad(
                w.name,
                "ground wall single zone side",
                "a ground-attached wall must face exactly one zone",
            )

    for w in b.windows:
        if not w.area > 0:
            bad(w.name, "area>0", f"area {w.area} must be > 0")
        if not w.conductance_per_area > 0:
            bad(
                w.name,
                "conductance_per_area>0",
                f"conductance per area {w.conductance_per_area} must be > 0",
            )
        if w.side1 == w.side2:
            bad(w.name, "sides-distinct", "side1 and side2 must attach to different boundaries")
        if w.has_side("ground"):
            bad(w.name, "window-no-ground-side", "windows cannot attach to the ground")
        elif not w.zone_sides():
            bad(w.name, "window-faces-zone", "a window must face at least one zone")

    touched: set[str] = set()
    for w in (*b.walls, *b.windows):
        touched.update(w.zone_sides())
    for z in b.zones:
        if z.id not in touched:
            bad(z.id, "zone-reachable", "zone has no wall or window")

    sim = b.simulation
    if not sim.dt > 0:
        bad("simulation", "dt>0", f"dt {sim.dt} must be > 0")
    if not 0.5 <= sim.theta <= 1.0:
        bad("simulation", "theta-in-[0.5,1]", f"theta {sim.theta} outside [0.5, 1]")
    if not sim.tolerance > 0:
        bad("simulation", "tolerance>0", f"tolerance {sim.tolerance} must be > 0")
    if sim.max_coupling_iterations < 1:
        bad("simulation", "max_iterations>=1", "max_coupling_iterations must be >= 1")
    for key, value in (
        ("air_specific_heat", sim.air_specific_heat),
        ("air_density", sim.air_density),
        ("air_capacity_multiplier", sim.air_capacity_multiplier),
    ):
        if not value > 0:
            bad("simulation", f"{key}>0", f"{key} {value} must be > 0")
    ext = b.exterior_film
    if not ext.h_ce > 0:
        bad("exterior", "h_ce>0", f"h_ce {ext.h_ce} must be > 0")
    if not ext.h_re > 0:
        bad("exterior", "h_re>0", f"h_re {ext.h_re} must be > 0")

    return out


# ---------------------------------------------------------------------------
# lumped wall parameters


def wall_rc_parameters(w: WallSpec) -> tuple[float, float]:
    """Total thermal resistance (K/W) and capacity (J/K) of a wall.

    Both are plain sums over the layers, so they are exactly additive under
    layer concatenation and exactly linear in a uniform thickness scaling.
    """
    r_total = 0.0
    c_total = 0.0
    for layer in w.layers:
        r_total += layer.thickness / (layer.material.conductivity * w.area)
        c_total += layer.material.density * layer.material.specific_heat * layer.thickness * w.area
    return r_total, c_total
