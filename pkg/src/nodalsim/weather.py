"""Weather and solicitation ingestion.

The driver file is a plain CSV (decimal point, comma separator) with header

    t,T_ae,T_sky[,T_ground][,sw_<name>...][,swi_<zone>...][,gain_<x>...]

where ``t`` is seconds from simulation start, temperatures are °C,
``sw_<name>`` an exterior short-wave flux density (W/m²) on a declared wall
or window, ``swi_<zone>`` the short-wave power (W) entering a zone and
``gain_<x>`` a convective internal-gain power (W) keyed by zone id or by a
zone's declared gain schedule name.  If ``T_ground`` is absent it defaults to
the series mean of ``T_ae``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .assembly import BoundaryInputs
from .building import BuildingDescription
from .nodes import EXTERIOR, NodalStructure

__all__ = ["WeatherError", "WeatherRecord", "WeatherSeries", "parse_weather", "solicitation_for_step"]

HOLD = "hold"
LINEAR = "linear"


class WeatherError(ValueError):
    """Weather document is malformed or references unknown entities."""


@dataclass(frozen=True)
class WeatherRecord:
    timestamp: float  # s from simulation start
    t_out: float  # °C
    t_sky: float  # °C
    t_ground: float  # °C
    channels: dict[str, float]  # column name -> value (sw_/swi_/gain_)


@dataclass(frozen=True)
class WeatherSeries:
    records: tuple[WeatherRecord, ...]
    interpolation: str = LINEAR  # "hold" | "linear"

    @property
    def end_time(self) -> float:
        return self.records[-1].timestamp

    def sample(self, t: float) -> tuple[WeatherRecord, bool]:
        """Record interpolated at ``t``; the flag marks hold-extrapolation."""
        records = self.records
        if t <= records[0].timestamp:
            return records[0], t < records[0].timestamp
        if t >= records[-1].timestamp:
            return records[-1], t > records[-1].timestamp
        lo = 0
        hi = len(records) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if records[mid].timestamp <= t:
                lo = mid
            else:
                hi = mid
        first, second = records[lo], records[hi]
        if self.interpolation == HOLD or second.timestamp == first.timestamp:
            return first, False
        w = (t - first.timestamp) / (second.timestamp - first.timestamp)

        def lerp(a: float, b: float) -> float:
            return a + w * (b - a)

        return (
            WeatherRecord(
                timestamp=t,
                t_out=lerp(first.t_out, second.t_out),
                t_sky=lerp(first.t_sky, second.t_sky),
                t_ground=lerp(first.t_ground, second.t_ground),
                channels={
                    name: lerp(first.channels[name], second.channels[name])
                    for name in first.channels
                },
            ),
            False,
        )


def parse_weather(
    text: str, b: BuildingDescription, interpolation: str = LINEAR
) -> WeatherSeries:
    """Parse and validate a weather CSV against the declared building."""
    if interpolation not in (HOLD, LINEAR):
        raise WeatherError(f"unknown interpolation mode '{interpolation}'")

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise WeatherError("empty weather document") from None
    header = [h.strip() for h in header]

    for required in ("t", "T_ae", "T_sky"):
        if required not in header:
            raise WeatherError(f"missing required column '{required}'")
    if len(set(header)) != len(header):
        raise WeatherError("duplicate column in header")

    exterior_entities = {
        w.name for w in (*b.walls, *b.windows) if w.has_side(EXTERIOR)
    }
    zone_ids = set(b.zone_ids())
    gain_keys = zone_ids | {
        z.internal_gain_schedule for z in b.zones if z.internal_gain_schedule
    }
    channel_columns: list[str] = []
    for name in header:
        if name in ("t", "T_ae", "T_sky", "T_ground"):
            continue
        if name.startswith("sw_"):
            entity = name[3:]
            declared = {w.name for w in (*b.walls, *b.windows)}
            if entity not in declared:
                raise WeatherError(f"column '{name}': unresolved surface name '{entity}'")
            if entity not in exterior_entities:
                raise WeatherError(f"column '{name}': '{entity}' has no exterior surface")
        elif name.startswith("swi_"):
            zone = name[4:]
            if zone not in zone_ids:
                raise WeatherError(f"column '{name}': unresolved zone '{zone}'")
        elif name.startswith("gain_"):
            key = name[5:]
            if key not in gain_keys:
                raise WeatherError(f"column '{name}': unresolved zone or schedule '{key}'")
        else:
            raise WeatherError(f"unknown column '{name}'")
        channel_columns.append(name)

    col = {name: i for i, name in enumerate(header)}
    rows: list[list[float]] = []
    for line_no, raw in enumerate(reader, start=2):
        if not raw or (len(raw) == 1 and not raw[0].strip()):
            continue
        if len(raw) != len(header):
            raise WeatherError(f"line {line_no}: expected {len(header)} fields, got {len(raw)}")
        try:
            rows.append([float(v) for v in raw])
        except ValueError as exc:
            raise WeatherError(f"line {line_no}: {exc}") from None
    if not rows:
        raise WeatherError("weather document has no records")

    times = [r[col["t"]] for r in rows]
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            raise WeatherError(
                f"timestamps must be strictly increasing (t={times[i]} after t={times[i - 1]})"
            )

    if "T_ground" in col:
        grounds = [r[col["T_ground"]] for r in rows]
    else:
        mean_t_out = sum(r[col["T_ae"]] for r in rows) / len(rows)
        grounds = [mean_t_out] * len(rows)

    records = tuple(
        WeatherRecord(
            timestamp=r[col["t"]],
            t_out=r[col["T_ae"]],
            t_sky=r[col["T_sky"]],
            t_ground=grounds[i],
            channels={name: r[col[name]] for name in channel_columns},
        )
        for i, r in enumerate(rows)
    )
    return WeatherSeries(records=records, interpolation=interpolation)


def solicitation_for_step(
    ws: WeatherSeries, t: float, s: NodalStructure
) -> BoundaryInputs:
    """Map the weather sample at ``t`` onto per-surface and per-zone inputs.

    The mapping is total: every exterior surface and every zone receives a
    defined value (0 for channels the file does not provide).  Merged zones
    collect the channels of all their constituent zones.
    """
    rec, extrapolated = ws.sample(t)

    sw_exterior = {
        node.parent: rec.channels.get(f"sw_{node.parent}", 0.0)
        for node in s.nodes
        if node.faces == EXTERIOR
    }
    sw_interior: dict[str, float] = {}
    gains: dict[str, float] = {}
    airflow: dict[str, float] = {}
    for zone, params in s.zone_params.items():
        sw_interior[zone] = sum(rec.channels.get(f"swi_{z}", 0.0) for z in params.swi_channels)
        gains[zone] = sum(rec.channels.get(f"gain_{g}", 0.0) for g in params.gain_channels)
        airflow[zone] = params.mass_flow

    return BoundaryInputs(
        t_out=rec.t_out,
        t_sky=rec.t_sky,
        t_ground=rec.t_ground,
        sw_exterior=sw_exterior,
        sw_interior=sw_interior,
        gains_convective=gains,
        gains_radiant={zone: 0.0 for zone in s.zone_params},
        airflow=airflow,
        extrapolated=extrapolated,
    )
