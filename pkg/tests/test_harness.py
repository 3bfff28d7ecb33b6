import json
import math

import numpy as np
import pytest

from complementarity.device import PRESETS, US, DeviceParams
from complementarity.errors import ArgumentError, ConfigurationError, ConsistencyError
from complementarity.harness import (
    CSV_COLUMNS,
    Scenario,
    SweepRow,
    _check_noise_off,
    emit_results,
    parse_results,
    rounded,
    run_beta_sweep,
    run_delay_sweep,
    run_ideal_sweep_rows,
    run_scenario,
    scenario_from_mapping,
    theta_grid,
    tomo_demo,
)

BETAS = (math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)


@pytest.fixture(scope="module")
def exact_noise_off():
    return run_beta_sweep(Scenario("beta_sweep", noise=False, shots=None))


@pytest.fixture(scope="module")
def exact_noise_on():
    return run_beta_sweep(Scenario("beta_sweep", noise=True, shots=None))


class TestScenario:
    def test_defaults(self):
        s = Scenario("beta_sweep")
        assert len(s.thetas) == 21 and s.thetas[-1] == pytest.approx(2 * math.pi)
        assert s.controls == pytest.approx(BETAS)
        assert s.shots == 100_000

    @pytest.mark.parametrize(
        "kw",
        [
            {"kind": "fig5"},
            {"kind": "beta_sweep", "thetas": tuple(np.linspace(0, 2 * math.pi, 7))},
            {"kind": "beta_sweep", "thetas": tuple(np.linspace(0, math.pi, 21))},
            {"kind": "beta_sweep", "controls": (0.0,)},
            {"kind": "beta_sweep", "controls": ()},
            {"kind": "delay_sweep", "controls": (-1e-6,)},
            {"kind": "beta_sweep", "shots": 0},
            {"kind": "ideal_sweep", "c0": 1.5},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ConfigurationError):
            Scenario(**kw)

    def test_from_mapping(self):
        s = scenario_from_mapping(
            "delay_sweep",
            {"theta_points": 11, "shots": "exact", "seed": 5, "noise": "off", "delay_list_us": [0, 1], "beta_pi": 0.25},
            DeviceParams(),
        )
        assert len(s.thetas) == 11 and s.exact and s.seed == 5 and not s.noise
        assert s.controls == pytest.approx((0.0, 1 * US))
        assert s.beta == pytest.approx(math.pi / 4)

    def test_ideal_default_grid(self):
        s = scenario_from_mapping("ideal_sweep", {}, DeviceParams())
        assert len(s.controls) == 17 and s.controls[-1] == pytest.approx(math.pi)

    @pytest.mark.parametrize("m", [{"bogus": 1}, {"shots": "many"}, {"shots": 2.5}, {"noise": "maybe"}, {"theta_points": 4}])
    def test_bad_mapping(self, m):
        with pytest.raises(ConfigurationError):
            scenario_from_mapping("beta_sweep", m, DeviceParams())

    def test_theta_grid_minimum(self):
        with pytest.raises(ConfigurationError):
            theta_grid(7)


class TestBetaSweep:
    def test_full_which_path_row(self, exact_noise_off):
        r = exact_noise_off[-1]
        assert r.visibility <= 1e-6
        assert r.concurrence >= 1 - 1e-6 and r.distinguishability >= 1 - 1e-6
        assert abs(r.residual) <= 1e-5

    def test_quarter_row(self, exact_noise_off):
        r = exact_noise_off[0]
        assert r.visibility == pytest.approx(math.cos(math.pi / 8), abs=1e-6)
        assert r.concurrence == pytest.approx(math.sin(math.pi / 8), abs=1e-6)
        assert (r.visibility, r.concurrence) == pytest.approx((0.92388, 0.38268), abs=1e-5)

    def test_noise_off_invariants(self, exact_noise_off):
        for r in exact_noise_off:
            assert abs(r.residual) <= 1e-6
            assert r.distinguishability == pytest.approx(math.sin(r.control / 2), abs=1e-6)

    def test_noise_on_trends(self, exact_noise_on):
        v = [r.visibility for r in exact_noise_on]
        e = [r.concurrence for r in exact_noise_on]
        assert all(b < a for a, b in zip(v, v[1:]))
        assert all(b > a for a, b in zip(e, e[1:]))
        for r in exact_noise_on:
            assert abs(r.quadrature_sum - r.c0) <= 0.05

    def test_order_preserved(self):
        rows = run_beta_sweep(Scenario("beta_sweep", controls=(math.pi, math.pi / 4, math.pi / 2), noise=False, shots=None))
        assert [r.control for r in rows] == pytest.approx([math.pi, math.pi / 4, math.pi / 2])

    def test_exact_and_million_shots_agree(self, exact_noise_on):
        sampled = run_beta_sweep(Scenario("beta_sweep", noise=True, shots=1_000_000, seed=21))
        for a, b in zip(exact_noise_on, sampled):
            for name in ("visibility", "concurrence", "distinguishability", "c0"):
                assert abs(getattr(a, name) - getattr(b, name)) <= 0.01

    def test_rows_within_range(self):
        for r in run_beta_sweep(Scenario("beta_sweep", noise=True, shots=2000, seed=3)):
            for v in r.values()[1:5]:
                assert 0 <= v <= 1.05


class TestDelaySweep:
    def test_zero_delay_matches_beta_row(self, exact_noise_on):
        rows = run_delay_sweep(Scenario("delay_sweep", controls=(0.0,), shots=None))
        assert rows[0].values()[1:] == pytest.approx(exact_noise_on[1].values()[1:], abs=1e-12)

    def test_decay_and_constant_distinguishability(self):
        dev = PRESETS["headline"]
        rows = run_delay_sweep(Scenario("delay_sweep", controls=(0.0, 1 * US, 2 * US), shots=None, device=dev))
        ref = rows[0].c0
        for r in rows:
            t = r.control * US
            law = math.exp(-t / (2 * dev.t1_q1) - t / dev.t2star_q1)
            assert r.c0 / ref == pytest.approx(law, rel=0.02)
        one = rows[1]
        assert one.c0 == pytest.approx(0.7356, rel=0.02)
        assert one.visibility == pytest.approx(0.520, abs=0.02)
        assert abs(one.concurrence - one.c0 * math.sin(math.pi / 4)) <= 0.05
        d = [r.distinguishability for r in rows]
        assert max(d) - min(d) <= 0.02

    def test_noise_off_is_flat(self):
        rows = run_delay_sweep(Scenario("delay_sweep", controls=(0.0, 2 * US), noise=False, shots=None))
        assert rows[0].values()[1:] == pytest.approx(rows[1].values()[1:], abs=1e-12)


class TestIdealSweep:
    def test_equality_everywhere(self):
        rows = run_ideal_sweep_rows(scenario_from_mapping("ideal_sweep", {"c0": 0.7}, DeviceParams()))
        assert all(abs(r.residual) <= 1e-9 for r in rows)
        assert rows[0].visibility == pytest.approx(0.7)


class TestConsistency:
    def test_breach_raises(self):
        s = Scenario("beta_sweep", noise=False, shots=None)
        with pytest.raises(ConsistencyError):
            _check_noise_off([SweepRow(math.pi / 2, 0.5, 0.5, 0.70710678, 1.0)], s)

    def test_range_check(self):
        with pytest.raises(ConsistencyError):
            SweepRow(0.0, 1.2, 0.0, 0.0, 1.0).check_range()

    def test_noisy_rows_are_not_held_to_equality(self):
        s = Scenario("beta_sweep", noise=True, shots=None)
        _check_noise_off([SweepRow(math.pi / 2, 0.5, 0.5, 0.70710678, 1.0)], s)


class TestEmit:
    def test_single_row(self):
        rows = run_ideal_sweep_rows(Scenario("ideal_sweep", controls=(math.pi,), noise=False))
        lines = emit_results(rows).splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1].split(",")[5] == "0.000000000000"

    def test_line_count(self, exact_noise_off):
        assert len(emit_results(exact_noise_off).splitlines()) == 5

    def test_csv_roundtrip(self, exact_noise_on):
        text = emit_results(exact_noise_on)
        parsed = parse_results(text)
        assert parsed == [SweepRow(*rounded(r).values()[:5]) for r in exact_noise_on]
        # derived columns are recomputed from 12-digit values, so allow the last digit
        for a, b in zip(emit_results(parsed).splitlines(), text.splitlines()):
            assert np.allclose([float(x) for x in a.split(",")], [float(x) for x in b.split(",")], atol=2e-12) if a[0] != "c" else a == b

    def test_kv_roundtrip_with_fringes(self, exact_noise_on):
        s = Scenario("beta_sweep", noise=True, shots=None)
        text = emit_results(exact_noise_on, "kv", s)
        doc = json.loads(text)
        assert doc["control_unit"] == "rad" and doc["shots"] == "exact"
        assert len(doc["rows"][0]["p0"]) == len(s.thetas)
        assert np.allclose(np.add(doc["rows"][0]["p0"], doc["rows"][0]["p1"]), 1, atol=1e-11)
        assert parse_results(text, "kv") == [rounded(r) for r in exact_noise_on]

    def test_empty(self):
        with pytest.raises(ArgumentError):
            emit_results([])

    def test_unknown_format(self, exact_noise_off):
        with pytest.raises(ArgumentError):
            emit_results(exact_noise_off, "xml")

    def test_deterministic_output(self):
        s = Scenario("beta_sweep", shots=5000, seed=11)
        a = emit_results(run_scenario(s), "kv", s)
        b = emit_results(run_scenario(s), "kv", s)
        assert a == b
        c = emit_results(run_scenario(Scenario("beta_sweep", shots=5000, seed=12)), "kv", s)
        assert c != a


class TestTomoDemo:
    def test_finite_shots(self):
        out = tomo_demo(Scenario("tomo_demo", controls=(math.pi / 2,), shots=100_000, seed=1))
        assert out["trace_distance"] <= 0.02
        assert out["record"].shots == 100_000
        assert out["concurrence"] == pytest.approx(out["true_concurrence"], abs=0.02)

    def test_exact(self):
        out = tomo_demo(Scenario("tomo_demo", controls=(math.pi,), noise=False, shots=None))
        assert out["record"] is None
        assert out["concurrence"] == pytest.approx(1.0, abs=1e-6)
