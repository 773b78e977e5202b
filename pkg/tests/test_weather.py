"""Weather CSV ingestion and solicitation mapping."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodalsim import fixtures
from nodalsim.nodes import generate_nodes
from nodalsim.weather import (
    WeatherError,
    WeatherSeries,
    parse_weather,
    solicitation_for_step,
)

MINIMAL = "t,T_ae,T_sky\n0,10,5\n3600,12,7\n"


class TestParse:
    def test_minimal_columns(self):
        b = fixtures.single_zone_building()
        ws = parse_weather(MINIMAL, b)
        assert len(ws.records) == 2
        assert ws.records[0].t_out == 10.0
        assert ws.records[0].channels == {}

    def test_ground_defaults_to_mean_outdoor(self):
        b = fixtures.single_zone_building()
        ws = parse_weather(MINIMAL, b)
        assert ws.records[0].t_ground == 11.0  # mean of 10 and 12

    def test_explicit_ground_column(self):
        b = fixtures.single_zone_building()
        ws = parse_weather("t,T_ae,T_sky,T_ground\n0,10,5,14\n", b)
        assert ws.records[0].t_ground == 14.0

    def test_missing_required_column(self):
        b = fixtures.single_zone_building()
        with pytest.raises(WeatherError, match="T_sky"):
            parse_weather("t,T_ae\n0,10\n", b)

    def test_unknown_surface_name(self):
        b = fixtures.single_zone_building()
        with pytest.raises(WeatherError, match="wallN"):
            parse_weather("t,T_ae,T_sky,sw_wallN\n0,10,5,100\n", b)

    def test_interior_wall_flux_rejected(self):
        b = fixtures.two_zone_building()
        with pytest.raises(WeatherError, match="w4"):
            parse_weather("t,T_ae,T_sky,sw_w4\n0,10,5,100\n", b)

    def test_unknown_zone_in_gain(self):
        b = fixtures.single_zone_building()
        with pytest.raises(WeatherError, match="z9"):
            parse_weather("t,T_ae,T_sky,gain_z9\n0,10,5,100\n", b)

    def test_unknown_column_rejected(self):
        b = fixtures.single_zone_building()
        with pytest.raises(WeatherError, match="humidity"):
            parse_weather("t,T_ae,T_sky,humidity\n0,10,5,0.5\n", b)

    def test_non_monotone_time(self):
        b = fixtures.single_zone_building()
        with pytest.raises(WeatherError, match="strictly increasing"):
            parse_weather("t,T_ae,T_sky\n0,10,5\n0,11,6\n", b)

    def test_gain_schedule_name_resolves(self):
        from dataclasses import replace

        b = fixtures.single_zone_building()
        zone = replace(b.zones[0], internal_gain_schedule="office")
        b2 = replace(b, zones=(zone,))
        ws = parse_weather("t,T_ae,T_sky,gain_office\n0,10,5,250\n", b2)
        assert ws.records[0].channels["gain_office"] == 250.0

    def test_window_flux_channel(self):
        b = fixtures.ground_coupled_building()
        ws = parse_weather("t,T_ae,T_sky,sw_win_s\n0,10,5,80\n", b)
        assert ws.records[0].channels["sw_win_s"] == 80.0


class TestInterpolation:
    def test_linear_midpoint_is_mean(self):
        b = fixtures.single_zone_building()
        ws = parse_weather(MINIMAL, b, interpolation="linear")
        rec, flagged = ws.sample(1800.0)
        assert not flagged
        assert rec.t_out == pytest.approx(11.0)
        assert rec.t_sky == pytest.approx(6.0)

    def test_hold_is_piecewise_constant(self):
        b = fixtures.single_zone_building()
        ws = parse_weather(MINIMAL, b, interpolation="hold")
        rec, _ = ws.sample(3599.0)
        assert rec.t_out == 10.0

    def test_extrapolation_flagged(self):
        b = fixtures.single_zone_building()
        ws = parse_weather(MINIMAL, b)
        rec, flagged = ws.sample(7200.0)
        assert flagged
        assert rec.t_out == 12.0  # hold at the end

    @given(
        t=st.floats(0.0, 3600.0),
        mode=st.sampled_from(["hold", "linear"]),
        lo=st.floats(-20.0, 40.0),
        hi=st.floats(-20.0, 40.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_interpolation_bounded_by_samples(self, t, mode, lo, hi):
        b = fixtures.single_zone_building()
        ws = parse_weather(f"t,T_ae,T_sky\n0,{lo!r},0\n3600,{hi!r},0\n", b, interpolation=mode)
        rec, _ = ws.sample(t)
        assert min(lo, hi) <= rec.t_out <= max(lo, hi)


class TestSolicitation:
    def test_uniform_zero_fluxes(self):
        b = fixtures.single_zone_building()
        s = generate_nodes(b)
        ws = parse_weather("t,T_ae,T_sky,T_ground\n0,9,9,9\n3600,9,9,9\n", b)
        inputs = solicitation_for_step(ws, 1800.0, s)
        assert inputs.t_out == inputs.t_sky == inputs.t_ground == 9.0
        assert all(v == 0.0 for v in inputs.sw_exterior.values())
        assert inputs.gains_convective == {"z1": 0.0}

    def test_mapping_is_total(self):
        b = fixtures.three_zone_chain()
        s = generate_nodes(b)
        ws = parse_weather(MINIMAL, b)
        inputs = solicitation_for_step(ws, 0.0, s)
        exterior_parents = {r.parent for r in s.nodes if r.faces == "exterior"}
        assert set(inputs.sw_exterior) == exterior_parents
        assert set(inputs.airflow) == set(s.zone_order)
        assert set(inputs.sw_interior) == set(s.zone_order)

    def test_airflow_from_air_change_rate(self):
        b = fixtures.single_zone_building()
        s = generate_nodes(b)
        ws = parse_weather(MINIMAL, b)
        inputs = solicitation_for_step(ws, 0.0, s)
        assert inputs.airflow["z1"] == pytest.approx(50.0 * 0.5 * 1.2 / 3600.0)

    def test_merged_zone_collects_channels(self):
        b = fixtures.two_zone_building()
        s = generate_nodes(b, zoning=[("z1", "z2")])
        text = "t,T_ae,T_sky,gain_z1,gain_z2,swi_z1,swi_z2\n0,10,5,100,150,20,30\n"
        ws = parse_weather(text, b)
        inputs = solicitation_for_step(ws, 0.0, s)
        assert inputs.gains_convective["z1+z2"] == 250.0
        assert inputs.sw_interior["z1+z2"] == 50.0

    def test_flux_channels_reach_surfaces(self):
        b = fixtures.ground_coupled_building()
        s = generate_nodes(b)
        text = "t,T_ae,T_sky,sw_ext_n,swi_cave\n0,10,5,120,60\n"
        ws = parse_weather(text, b)
        inputs = solicitation_for_step(ws, 0.0, s)
        assert inputs.sw_exterior["ext_n"] == 120.0
        assert inputs.sw_exterior["ext_s"] == 0.0
        assert inputs.sw_interior["cave"] == 60.0
