#!/usr/bin/env python3
"""Materialize the bundled fixture buildings and weather files for CLI use.

    python scripts/write_inputs.py --out inputs/

writes one <name>.json per fixture plus constant and sinusoidal weather CSVs.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from nodalsim import fixtures
from nodalsim.building import serialize_building


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("inputs"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    buildings = dict(fixtures.all_fixture_buildings())
    buildings["stacked_two_zone"] = fixtures.stacked_two_zone_building()
    for name, b in buildings.items():
        path = args.out / f"{name}.json"
        path.write_text(serialize_building(b), encoding="utf-8")
        print(f"wrote {path}")

    weather = {
        "weather_constant.csv": fixtures.constant_weather_csv(48, t_out=10.0),
        "weather_sine_48h.csv": fixtures.sinusoidal_weather_csv(
            48, dt=600.0, mean=15.0, amplitude=8.0
        ),
    }
    for name, text in weather.items():
        path = args.out / name
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
