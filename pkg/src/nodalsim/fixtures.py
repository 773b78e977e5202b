"""Bundled example buildings and weather generators.

These small, fully validated descriptions are used by the test suite, the
demo scripts and the documentation.  ``two_zone_building`` is the reference
case: two rooms behind one shared partition, all wall conductances equal and
all areas 1 m², which makes the assembled matrices easy to check by hand.
"""
from __future__ import annotations

import io
import math

from .building import (
    BoundaryRef,
    BuildingDescription,
    Layer,
    Material,
    WallSpec,
    WindowSpec,
    ZoneSpec,
    nodes_model,
)

__all__ = [
    "single_zone_building",
    "two_zone_building",
    "three_zone_chain",
    "ground_coupled_building",
    "stacked_two_zone_building",
    "all_fixture_buildings",
    "constant_weather_csv",
    "sinusoidal_weather_csv",
]

_CONCRETE = Material(name="concrete", conductivity=1.0, density=2000.0, specific_heat=1000.0)
_BRICK = Material(name="brick", conductivity=0.5, density=1600.0, specific_heat=900.0)
_INSULATION = Material(name="insulation", conductivity=0.04, density=30.0, specific_heat=1400.0)

_EXT = BoundaryRef.exterior()
_GND = BoundaryRef.ground()


def _zone(zid: str, volume: float = 50.0, h_ci: float = 3.0, h_ri: float = 5.0, ach: float = 0.5,
          **kw) -> ZoneSpec:
    return ZoneSpec(id=zid, air_volume=volume, h_ci=h_ci, h_ri=h_ri, air_change_rate=ach, **kw)


def single_zone_building() -> BuildingDescription:
    """One room with a single exterior wall: the smallest usable model (4 nodes)."""
    wall = WallSpec(
        name="w1",
        area=10.0,
        layers=(Layer(material=_CONCRETE, thickness=0.2),),
        side1=_EXT,
        side2=BoundaryRef.to_zone("z1"),
    )
    return BuildingDescription(
        materials=(_CONCRETE,),
        zones=(_zone("z1"),),
        walls=(wall,),
    )


def two_zone_building() -> BuildingDescription:
    """Two identical rooms coupled through one vertical partition (18 nodes).

    Three exterior walls per zone plus the shared wall; every wall is a
    single 0.1 m concrete layer of 1 m², so every conductance is 10 W/K.
    """
    layer = (Layer(material=_CONCRETE, thickness=0.1),)

    def ext_wall(name: str, zone: str) -> WallSpec:
        return WallSpec(
            name=name, area=1.0, layers=layer, side1=_EXT, side2=BoundaryRef.to_zone(zone)
        )

    partition = WallSpec(
        name="w4",
        area=1.0,
        layers=layer,
        side1=BoundaryRef.to_zone("z1"),
        side2=BoundaryRef.to_zone("z2"),
    )
    return BuildingDescription(
        materials=(_CONCRETE,),
        zones=(_zone("z1"), _zone("z2")),
        walls=(
            ext_wall("w1", "z1"),
            ext_wall("w2", "z1"),
            ext_wall("w3", "z1"),
            partition,
            ext_wall("w5", "z2"),
            ext_wall("w6", "z2"),
            ext_wall("w7", "z2"),
        ),
    )


def three_zone_chain() -> BuildingDescription:
    """Three rooms in a row, two partitions, mixed conduction models and films."""
    concrete = (Layer(material=_CONCRETE, thickness=0.15),)
    insulated = (
        Layer(material=_BRICK, thickness=0.1),
        Layer(material=_INSULATION, thickness=0.08),
        Layer(material=_BRICK, thickness=0.1),
    )

    def ext_wall(name: str, zone: str, layers=insulated, area: float = 8.0) -> WallSpec:
        return WallSpec(
            name=name, area=area, layers=layers, side1=_EXT, side2=BoundaryRef.to_zone(zone)
        )

    return BuildingDescription(
        materials=(_CONCRETE, _BRICK, _INSULATION),
        zones=(
            _zone("za", volume=40.0, h_ci=3.0),
            _zone("zb", volume=60.0, h_ci=3.5, ach=0.8),
            _zone("zc", volume=50.0, h_ci=4.0),
        ),
        walls=(
            ext_wall("ext_a1", "za"),
            ext_wall("ext_a2", "za", layers=concrete, area=6.0),
            WallSpec(
                name="wall_ab",
                area=9.0,
                layers=concrete,
                side1=BoundaryRef.to_zone("za"),
                side2=BoundaryRef.to_zone("zb"),
                conduction_model=nodes_model(2),
            ),
            ext_wall("ext_b1", "zb"),
            WallSpec(
                name="wall_bc",
                area=9.0,
                layers=concrete,
                side1=BoundaryRef.to_zone("zb"),
                side2=BoundaryRef.to_zone("zc"),
            ),
            ext_wall("ext_c1", "zc"),
            ext_wall("ext_c2", "zc", layers=concrete, area=6.0),
        ),
        windows=(
            WindowSpec(
                name="win_a",
                area=2.0,
                conductance_per_area=3.0,
                side1=_EXT,
                side2=BoundaryRef.to_zone("za"),
            ),
        ),
    )


def ground_coupled_building() -> BuildingDescription:
    """One room over a ground slab, with an exterior window."""
    return BuildingDescription(
        materials=(_CONCRETE, _BRICK),
        zones=(_zone("cave", volume=60.0),),
        walls=(
            WallSpec(
                name="ext_n",
                area=12.0,
                layers=(Layer(material=_BRICK, thickness=0.2),),
                side1=_EXT,
                side2=BoundaryRef.to_zone("cave"),
            ),
            WallSpec(
                name="ext_s",
                area=12.0,
                layers=(Layer(material=_BRICK, thickness=0.2),),
                side1=_EXT,
                side2=BoundaryRef.to_zone("cave"),
            ),
            WallSpec(
                name="slab",
                area=25.0,
                layers=(Layer(material=_CONCRETE, thickness=0.25),),
                side1=BoundaryRef.to_zone("cave"),
                side2=_GND,
                orientation="horizontal-floor",
                conduction_model=nodes_model(1),
            ),
        ),
        windows=(
            WindowSpec(
                name="win_s",
                area=3.0,
                conductance_per_area=2.8,
                side1=_EXT,
                side2=BoundaryRef.to_zone("cave"),
            ),
        ),
    )


def stacked_two_zone_building() -> BuildingDescription:
    """Two rooms stacked vertically with a horizontal slab between them."""
    layer = (Layer(material=_CONCRETE, thickness=0.12),)

    def ext_wall(name: str, zone: str) -> WallSpec:
        return WallSpec(
            name=name, area=10.0, layers=layer, side1=_EXT, side2=BoundaryRef.to_zone(zone)
        )

    slab = WallSpec(
        name="slab",
        area=20.0,
        layers=layer,
        side1=BoundaryRef.to_zone("upper"),
        side2=BoundaryRef.to_zone("lower"),
        orientation="horizontal-floor",  # the slab is the upper zone's floor
    )
    return BuildingDescription(
        materials=(_CONCRETE,),
        zones=(
            _zone("upper", h_ci_overrides={"floor": 1.5, "ceiling": 4.5}),
            _zone("lower"),
        ),
        walls=(ext_wall("up_w", "upper"), slab, ext_wall("lo_w", "lower")),
    )


def all_fixture_buildings() -> dict[str, BuildingDescription]:
    return {
        "single_zone": single_zone_building(),
        "two_zone": two_zone_building(),
        "three_zone_chain": three_zone_chain(),
        "ground_coupled": ground_coupled_building(),
    }


def constant_weather_csv(
    hours: float,
    dt: float = 3600.0,
    t_out: float = 10.0,
    t_sky: float | None = None,
    t_ground: float | None = None,
    gains: dict[str, float] | None = None,
) -> str:
    """CSV text with constant drivers sampled every ``dt`` seconds."""
    t_sky = t_out if t_sky is None else t_sky
    out = io.StringIO()
    header = "t,T_ae,T_sky"
    if t_ground is not None:
        header += ",T_ground"
    for key in sorted(gains or {}):
        header += f",gain_{key}"
    out.write(header + "\n")
    n = max(1, int(round(hours * 3600.0 / dt)))
    for k in range(n + 1):
        row = f"{k * dt:g},{t_out:g},{t_sky:g}"
        if t_ground is not None:
            row += f",{t_ground:g}"
        for key in sorted(gains or {}):
            row += f",{gains[key]:g}"
        out.write(row + "\n")
    return out.getvalue()


def sinusoidal_weather_csv(
    hours: float,
    dt: float = 3600.0,
    mean: float = 15.0,
    amplitude: float = 8.0,
    period_hours: float = 24.0,
    t_ground: float | None = None,
) -> str:
    """Sinusoidal outdoor/sky temperatures around ``mean``, period in hours."""
    out = io.StringIO()
    out.write("t,T_ae,T_sky" + (",T_ground" if t_ground is not None else "") + "\n")
    n = max(1, int(round(hours * 3600.0 / dt)))
    for k in range(n + 1):
        t = k * dt
        value = mean + amplitude * math.sin(2.0 * math.pi * t / (period_hours * 3600.0))
        row = f"{t:g},{value!r},{value!r}"
        if t_ground is not None:
            row += f",{t_ground:g}"
        out.write(row + "\n")
    return out.getvalue()
