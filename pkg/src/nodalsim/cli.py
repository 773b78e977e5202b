"""Command-line front door.

Subcommands::

    nodalsim validate <building.json>
    nodalsim nodes <building.json> [--merge a,b]...
    nodalsim run <building.json> <weather.csv> [options] --out <dir>

``run`` writes ``temperatures.csv`` (one column per node, ``n<abs>_<type>``),
``convergence.csv`` and, with ``--oracle``, ``oracle_diff.csv`` comparing
every coupled step against the direct whole-building solve.  Exit codes:
0 ok, 1 domain error (invalid description, bad override, non-convergence),
2 unreadable input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .assembly import FilmCoefficients, assemble_zone_parts, compose_state_system
from .building import BuildingDescription, ParseError, parse_building, validate
from .nodes import generate_nodes, structure_to_csv
from .solver import IntegratorConfig, SimulationResult, SolverError, simulate
from .weather import WeatherError, parse_weather, solicitation_for_step

__all__ = ["RunManifest", "cmd_validate", "cmd_nodes", "cmd_run", "main"]

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


@dataclass(frozen=True)
class RunManifest:
    building: Path
    weather: Path
    out_dir: Path
    dt: float | None = None
    theta: float | None = None
    tolerance: float | None = None
    max_iterations: int | None = None
    merges: tuple[tuple[str, ...], ...] = ()
    oracle: bool = False
    dump_nodes: bool = False
    dump_matrices: bool = False
    allow_nonconverged: bool = False


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from exc


class _IOFailure(Exception):
    pass


class _DomainFailure(Exception):
    pass


def _load_building(path: Path) -> BuildingDescription:
    try:
        return parse_building(_read_text(path))
    except ParseError as exc:
        raise _DomainFailure(f"{path}: {exc}") from exc


def cmd_validate(building_path: Path, out=None) -> int:
    """Print violations; exit 0 iff the description is sound."""
    out = out or sys.stdout
    b = _load_building(building_path)
    violations = validate(b)
    print(f"{len(violations)} violations", file=out)
    for v in violations:
        print(f"  {v}", file=out)
    return EXIT_OK if not violations else EXIT_DOMAIN


def _parse_merges(raw: list[str]) -> tuple[tuple[str, ...], ...]:
    merges = []
    for item in raw:
        group = tuple(z.strip() for z in item.split(",") if z.strip())
        if len(group) < 2:
            raise _DomainFailure(f"--merge needs at least two zone ids, got '{item}'")
        merges.append(group)
    return tuple(merges)


def cmd_nodes(
    building_path: Path, merges: tuple[tuple[str, ...], ...] = (), out=None
) -> int:
    """Emit the generated node structure as CSV on standard output."""
    out = out or sys.stdout
    b = _load_building(building_path)
    violations = validate(b)
    if violations:
        for v in violations:
            print(f"invalid description: {v}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        s = generate_nodes(b, zoning=list(merges) or None)
    except ValueError as exc:
        raise _DomainFailure(str(exc)) from exc
    out.write(structure_to_csv(s))
    return EXIT_OK


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_results(manifest: RunManifest, result: SimulationResult) -> None:
    out_dir = manifest.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    s = result.structure

    header = "t," + ",".join(f"n{r.abs_number}_{int(r.abs_type)}" for r in s.nodes)
    lines = [header]
    for k, t in enumerate(result.times):
        row = [_fmt(t)] + [_fmt(v) for v in result.temperatures[k]]
        lines.append(",".join(row))
    (out_dir / "temperatures.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["t,iterations,residual,converged"]
    for k in range(len(result.iterations)):
        lines.append(
            f"{_fmt(result.times[k + 1])},{int(result.iterations[k])},"
            f"{_fmt(result.residuals[k])},{int(result.converged[k])}"
        )
    (out_dir / "convergence.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    if result.oracle_diff is not None:
        lines = ["t,max_abs_diff"]
        for k in range(len(result.oracle_diff)):
            lines.append(f"{_fmt(result.times[k + 1])},{_fmt(result.oracle_diff[k])}")
        (out_dir / "oracle_diff.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _dump_matrices(manifest: RunManifest, b: BuildingDescription) -> None:
    s = generate_nodes(b, zoning=list(manifest.merges) or None)
    films = FilmCoefficients.from_structure(s)
    weather = parse_weather(_read_text(manifest.weather), b)
    inputs = solicitation_for_step(weather, weather.records[0].timestamp, s)
    # dump the coupling source with every neighbour at the initial temperature
    t0 = weather.records[0].t_out
    inputs = replace(
        inputs, neighbor_temperatures={zone: (t0, t0) for zone in s.zone_order}
    )
    mat_dir = manifest.out_dir / "matrices"
    mat_dir.mkdir(parents=True, exist_ok=True)
    for zone in s.zone_order:
        parts = assemble_zone_parts(zone, s, films, inputs)
        for name, m in parts.matrices().items():
            text = "\n".join(",".join(_fmt(v) for v in row) for row in m)
            (mat_dir / f"{zone}_{name}.csv").write_text(text + "\n", encoding="utf-8")
        for name, v in parts.vectors().items():
            text = "\n".join(_fmt(x) for x in v)
            (mat_dir / f"{zone}_{name}.csv").write_text(text + "\n", encoding="utf-8")


def cmd_run(manifest: RunManifest, out=None) -> int:
    """Run a simulation per the manifest and write result files."""
    out = out or sys.stdout
    b = _load_building(manifest.building)
    violations = validate(b)
    if violations:
        for v in violations:
            print(f"invalid description: {v}", file=sys.stderr)
        return EXIT_DOMAIN

    try:
        weather = parse_weather(_read_text(manifest.weather), b)
    except WeatherError as exc:
        raise _DomainFailure(f"{manifest.weather}: {exc}") from exc

    overrides = {}
    if manifest.dt is not None:
        overrides["dt"] = manifest.dt
    if manifest.theta is not None:
        overrides["theta"] = manifest.theta
    if manifest.tolerance is not None:
        overrides["coupling_tolerance"] = manifest.tolerance
    if manifest.max_iterations is not None:
        overrides["max_coupling_iterations"] = manifest.max_iterations
    try:
        cfg = IntegratorConfig.from_description(b, **overrides)
    except ValueError as exc:
        raise _DomainFailure(str(exc)) from exc

    try:
        result = simulate(
            b,
            weather,
            cfg=cfg,
            merges=list(manifest.merges) or None,
            compute_oracle=manifest.oracle,
        )
    except (ValueError, SolverError) as exc:
        raise _DomainFailure(str(exc)) from exc

    _write_results(manifest, result)
    if manifest.dump_nodes:
        (manifest.out_dir / "nodes.csv").write_text(
            structure_to_csv(result.structure), encoding="utf-8"
        )
    if manifest.dump_matrices:
        _dump_matrices(manifest, b)

    steps = len(result.iterations)
    print(f"steps: {steps}", file=out)
    print(f"non-converged steps: {result.nonconverged_steps}", file=out)
    if steps:
        print(f"max coupling iterations used: {int(result.iterations.max())}", file=out)
    if result.oracle_diff is not None and steps:
        print(f"max oracle difference: {result.oracle_diff.max():.3e} K", file=out)
    if result.nonconverged_steps and not manifest.allow_nonconverged:
        print("error: some steps did not converge", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodalsim", description="Multizone RC-network building thermal simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a building description")
    p_validate.add_argument("building", type=Path)

    p_nodes = sub.add_parser("nodes", help="print the generated node structure as CSV")
    p_nodes.add_argument("building", type=Path)
    p_nodes.add_argument("--merge", action="append", default=[], metavar="a,b")

    p_run = sub.add_parser("run", help="run a simulation")
    p_run.add_argument("building", type=Path)
    p_run.add_argument("weather", type=Path)
    p_run.add_argument("--out", type=Path, default=Path("out"))
    p_run.add_argument("--dt", type=float, default=None)
    p_run.add_argument("--theta", type=float, default=None)
    p_run.add_argument("--tol", type=float, default=None)
    p_run.add_argument("--max-iter", type=int, default=None)
    p_run.add_argument("--merge", action="append", default=[], metavar="a,b")
    p_run.add_argument("--oracle", action="store_true")
    p_run.add_argument("--dump-nodes", action="store_true")
    p_run.add_argument("--dump-matrices", action="store_true")
    p_run.add_argument("--allow-nonconverged", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.building)
        if args.command == "nodes":
            return cmd_nodes(args.building, merges=_parse_merges(args.merge))
        manifest = RunManifest(
            building=args.building,
            weather=args.weather,
            out_dir=args.out,
            dt=args.dt,
            theta=args.theta,
            tolerance=args.tol,
            max_iterations=args.max_iter,
            merges=_parse_merges(args.merge),
            oracle=args.oracle,
            dump_nodes=args.dump_nodes,
            dump_matrices=args.dump_matrices,
            allow_nonconverged=args.allow_nonconverged,
        )
        return cmd_run(manifest)
    except _DomainFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
