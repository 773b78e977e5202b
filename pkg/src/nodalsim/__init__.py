"""Multizone building thermal simulation on automatically generated RC nodal networks.

The pipeline: a JSON building description is parsed and validated
(:mod:`nodalsim.building`), turned into a typed node network
(:mod:`nodalsim.nodes`), assembled into per-zone state systems
``C dT/dt = A T + B`` from named elementary matrices
(:mod:`nodalsim.assembly`) and integrated in time with an iterative
inter-zone coupling scheme checked against a direct whole-building solve
(:mod:`nodalsim.solver`).  Boundary drivers come from a CSV weather series
(:mod:`nodalsim.weather`).
"""
from .assembly import (
    BoundaryInputs,
    ElementaryMatrices,
    FilmCoefficients,
    ZoneStateSystem,
    assemble_A_cond,
    assemble_air_balance,
    assemble_connex,
    assemble_exterior_exchange,
    assemble_global,
    assemble_interior_exchange,
    assemble_interior_sources,
    assemble_zone_parts,
    compose_state_system,
)
from .building import (
    BoundaryRef,
    BuildingDescription,
    ConductionModel,
    ExteriorFilm,
    Layer,
    Material,
    ParseError,
    SimulationDefaults,
    Violation,
    WallSpec,
    WindowSpec,
    ZoneSpec,
    parse_building,
    serialize_building,
    validate,
    wall_rc_parameters,
)
from .nodes import (
    NodalStructure,
    NodeRecord,
    NodeType,
    WallChain,
    discretize_wall,
    generate_nodes,
    merge_zones,
    structure_to_csv,
)
from .solver import (
    CoupleResult,
    IntegratorConfig,
    SimulationResult,
    SolverError,
    boundary_flows,
    couple_step,
    direct_global_solve,
    simulate,
    steady_state,
    step_zone,
)
from .weather import WeatherError, WeatherRecord, WeatherSeries, parse_weather, solicitation_for_step

__version__ = "0.1.0"
