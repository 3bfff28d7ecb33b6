"""Scenario runner: sweeps, result rows and their serialization."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field, replace
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .device import US, DeviceParams, params_to_mapping
from .errors import ArgumentError, ConfigurationError, ConsistencyError
from .fringe import FringeRecord
from .interferometer import ideal_triplet, reference_config, run_ideal_sweep
from .measures import concurrence, distinguishability, l1_coherence
from .pulses import (
    coherence_sequence,
    entanglement_sequence,
    q1_state,
    qubit_pair_state,
    ramsey_sequence,
    simulate_sequence,
)
from .quantum_core import fidelity, trace_distance
from .tomography import (
    ReadoutMatrix,
    acquire_record,
    apply_readout_error,
    correct_readout,
    exact_frequencies,
    reconstruct_state,
    reconstruct_two_qubit,
    sample_counts,
)

KINDS = ("ideal_sweep", "beta_sweep", "delay_sweep", "tomo_demo")
CSV_COLUMNS = ("control", "visibility", "concurrence", "distinguishability", "c0", "residual", "quadrature_sum")
DEFAULT_THETA_POINTS = 21
DEFAULT_SHOTS = 100_000
DEFAULT_BETAS = tuple(k * math.pi / 4 for k in (1, 2, 3, 4))
DEFAULT_DELAYS = tuple(t * US for t in (0.0, 0.5, 1.0, 1.5, 2.0))
ROW_CEILING = 1.05
INVARIANT_TOL = 1e-6


def theta_grid(points: int = DEFAULT_THETA_POINTS) -> tuple:
    if int(points) != points or points < 8:
        raise ConfigurationError(f"theta grid needs at least 8 points, got {points}")
    return tuple(float(t) for t in np.linspace(0.0, 2 * math.pi, int(points)))


@dataclass(frozen=True)
class Scenario:
    """One runnable sweep.

    ``controls`` holds beta values (rad) for ideal/beta sweeps and tomo-demo,
    and delays (s) for the delay sweep. ``shots=None`` means exact probabilities.
    """

    kind: str
    thetas: tuple = field(default_factory=theta_grid)
    controls: tuple = DEFAULT_BETAS
    c0: float = 1.0
    beta: float = math.pi / 2
    noise: bool = True
    shots: Optional[int] = DEFAULT_SHOTS
    seed: int = 0
    device: DeviceParams = field(default_factory=DeviceParams)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown scenario kind {self.kind!r}")
        th = np.asarray(self.thetas, dtype=float)
        if th.size < 8 or np.ptp(th) * th.size / (th.size - 1) < 2 * math.pi - 1e-9:
            raise ConfigurationError("theta grid must have >= 8 points spanning a full period")
        if not self.controls:
            raise ConfigurationError("scenario has no control values")
        if self.kind == "delay_sweep":
            if min(self.controls) < 0:
                raise ConfigurationError("delays must be non-negative")
        elif self.kind != "ideal_sweep" and not all(0 < b <= math.pi for b in self.controls):
            raise ConfigurationError("beta values must lie in (0, pi]")
        if self.shots is not None and (int(self.shots) != self.shots or self.shots < 1):
            raise ConfigurationError(f"shots must be a positive integer or exact, got {self.shots}")
        if not 0.0 <= self.c0 <= 1.0:
            raise ConfigurationError(f"c0 must lie in [0, 1], got {self.c0}")
        if not 0 < self.beta <= math.pi:
            raise ConfigurationError(f"beta must lie in (0, pi], got {self.beta}")

    @property
    def exact(self) -> bool:
        return self.shots is None

    def readout(self) -> list[ReadoutMatrix] | None:
        """Readout model for Q1 and Q2; only active when noise is on."""
        if not self.noise:
            return None
        try:
            return [
                ReadoutMatrix.from_fidelities(*self.device.readout_q1),
                ReadoutMatrix.from_fidelities(*self.device.readout_q2),
            ]
        except ArgumentError as exc:
            raise ConfigurationError(str(exc)) from exc


def _parse_shots(value) -> Optional[int]:
    if value is None or (isinstance(value, str) and value.lower() == "exact"):
        return None
    try:
        n = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"shots must be an integer or 'exact', got {value!r}") from exc
    if n != float(value):
        raise ConfigurationError(f"shots must be an integer, got {value!r}")
    return n


def _parse_noise(value) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("on", "true", "1"):
        return True
    if str(value).lower() in ("off", "false", "0"):
        return False
    raise ConfigurationError(f"noise must be on/off, got {value!r}")


SCENARIO_KEYS = ("theta_points", "shots", "seed", "c0", "beta_pi", "beta_list_pi", "delay_list_us", "noise")


def scenario_from_mapping(kind: str, mapping: Mapping[str, Any] | None, device: DeviceParams) -> Scenario:
    """Build a ``Scenario`` from the ``scenario`` table of a config document."""
    m = dict(mapping or {})
    unknown = set(m) - set(SCENARIO_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown scenario keys {sorted(unknown)}")
    try:
        kw: dict[str, Any] = {"kind": kind, "device": device}
        if "theta_points" in m:
            kw["thetas"] = theta_grid(m["theta_points"])
        if "shots" in m:
            kw["shots"] = _parse_shots(m["shots"])
        if "seed" in m:
            kw["seed"] = int(m["seed"])
        if "c0" in m:
            kw["c0"] = float(m["c0"])
        if "beta_pi" in m:
            kw["beta"] = float(m["beta_pi"]) * math.pi
        if "noise" in m:
            kw["noise"] = _parse_noise(m["noise"])
        if kind == "delay_sweep":
            if "delay_list_us" in m:
                kw["controls"] = tuple(float(t) * US for t in m["delay_list_us"])
            else:
                kw["controls"] = DEFAULT_DELAYS
        elif kind == "tomo_demo":
            kw["controls"] = (kw.get("beta", math.pi / 2),)
        elif "beta_list_pi" in m:
            kw["controls"] = tuple(float(b) * math.pi for b in m["beta_list_pi"])
        elif kind == "ideal_sweep":
            kw["controls"] = tuple(k * math.pi / 16 for k in range(17))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid scenario value: {exc}") from exc
    return Scenario(**kw)


@dataclass(frozen=True)
class SweepRow:
    control: float
    visibility: float
    concurrence: float
    distinguishability: float
    c0: float
    p1: tuple = ()

    @property
    def residual(self) -> float:
        return self.concurrence**2 + self.visibility**2 - self.c0**2

    @property
    def quadrature_sum(self) -> float:
        return math.sqrt(self.concurrence**2 + self.visibility**2)

    @property
    def p0(self) -> tuple:
        return tuple(1.0 - p for p in self.p1)

    def values(self) -> tuple:
        return (
            self.control,
            self.visibility,
            self.concurrence,
            self.distinguishability,
            self.c0,
            self.residual,
            self.quadrature_sum,
        )

    def check_range(self) -> None:
        for name, v in zip(CSV_COLUMNS[1:5], self.values()[1:5]):
            if not (0.0 <= v <= ROW_CEILING) or not math.isfinite(v):
                raise ConsistencyError(f"{name}={v} outside [0, {ROW_CEILING}] at control={self.control}")


# --- measurement helpers -------------------------------------------------

def _measure_p1(rho_q1, scenario: Scenario, rng) -> float:
    p = np.clip(np.real(np.diag(rho_q1.matrix)), 0.0, None)
    p = p / p.sum()
    readout = scenario.readout()
    if readout is not None:
        p = apply_readout_error(p, readout[:1])
    if not scenario.exact:
        p = sample_counts(p, scenario.shots, rng) / scenario.shots
    if readout is not None:
        p = correct_readout(p, readout[:1])
    return float(p[1])


def _tomography(rho, scenario: Scenario, rng, qubits: slice):
    readout = scenario.readout()
    ro = readout[qubits] if readout is not None else None
    if scenario.exact:
        return reconstruct_state(exact_frequencies(rho, ro), ro)
    seed = int(rng.integers(2**63 - 1))
    return reconstruct_state(acquire_record(rho, scenario.shots, seed, ro).frequencies(), ro)


def device_row(scenario: Scenario, beta: float, delay: float, control: float, seed_seq) -> SweepRow:
    """Visibility, concurrence, distinguishability and C0 at one device setting."""
    params, noise = scenario.device, scenario.noise
    rngs = [np.random.default_rng(s) for s in seed_seq.spawn(3)]
    p1 = [
        _measure_p1(q1_state(simulate_sequence(ramsey_sequence(params, t, beta, delay, noise), params)), scenario, rngs[0])
        for t in scenario.thetas
    ]
    fringe = FringeRecord.from_samples(scenario.thetas, p1)
    pair = qubit_pair_state(simulate_sequence(entanglement_sequence(params, beta, 0.0, delay, noise), params))
    pair_est = _tomography(pair, scenario, rngs[1], slice(0, 2))
    q1 = q1_state(simulate_sequence(coherence_sequence(params, 0.0, delay, noise), params))
    q1_est = _tomography(q1, scenario, rngs[2], slice(0, 1))
    return SweepRow(
        control=control,
        visibility=fringe.fitted_visibility,
        concurrence=concurrence(pair_est.matrix),
        distinguishability=distinguishability(pair_est, 0),
        c0=l1_coherence(q1_est.matrix),
        p1=fringe.p1,
    )


def _run_rows(scenario: Scenario, jobs: Sequence[tuple]) -> list[SweepRow]:
    seeds = np.random.SeedSequence(scenario.seed).spawn(len(jobs))
    with ThreadPoolExecutor() as pool:
        futures = [pool.submit(device_row, scenario, b, d, c, s) for (b, d, c), s in zip(jobs, seeds)]
        rows = [f.result() for f in futures]
    for r in rows:
        r.check_range()
    return rows


def run_ideal_sweep_rows(scenario: Scenario) -> list[SweepRow]:
    """Ideal-engine rows over the scenario's beta list at fixed ``c0``."""
    rows = []
    for beta in scenario.controls:
        cfg = reference_config(scenario.c0, beta)
        t = ideal_triplet(cfg, scenario.thetas)
        fr = run_ideal_sweep(cfg, scenario.thetas)
        rows.append(
            SweepRow(beta, t.visibility_v, t.concurrence_e, t.distinguishability_d, t.coherence_c0, fr.p1)
        )
    _check_noise_off(rows, scenario, exact=True)
    return rows


def run_beta_sweep(scenario: Scenario) -> list[SweepRow]:
    rows = _run_rows(scenario, [(b, 0.0, b) for b in scenario.controls])
    _check_noise_off(rows, scenario)
    return rows


def run_delay_sweep(scenario: Scenario) -> list[SweepRow]:
    """Rows over delays; the control column is reported in microseconds."""
    rows = _run_rows(scenario, [(scenario.beta, t, t / US) for t in scenario.controls])
    _check_noise_off(rows, scenario)
    return rows


def _check_noise_off(rows: Sequence[SweepRow], scenario: Scenario, exact: bool | None = None) -> None:
    """Equality and distinguishability invariants of exact, noise-free runs."""
    if scenario.noise and scenario.kind != "ideal_sweep":
        return
    if not (scenario.exact if exact is None else exact):
        return
    for r in rows:
        beta = scenario.beta if scenario.kind == "delay_sweep" else r.control
        if abs(r.residual) > INVARIANT_TOL:
            raise ConsistencyError(f"equality residual {r.residual:.3e} at control={r.control}")
        if abs(r.distinguishability - abs(math.sin(beta / 2))) > INVARIANT_TOL:
            raise ConsistencyError(f"distinguishability {r.distinguishability} off sin(beta/2) at control={r.control}")


def tomo_demo(scenario: Scenario) -> dict[str, Any]:
    """Sample and reconstruct the Q1-Q2 state of one entanglement run."""
    params = scenario.device
    beta = scenario.controls[0]
    pair = qubit_pair_state(simulate_sequence(entanglement_sequence(params, beta, noise=scenario.noise), params))
    readout = scenario.readout()
    if scenario.exact:
        est = reconstruct_state(exact_frequencies(pair, readout), readout)
        record = None
    else:
        record = acquire_record(pair, scenario.shots, scenario.seed, readout)
        est = reconstruct_two_qubit(record, readout)
    return {
        "beta": beta,
        "true_concurrence": concurrence(pair.matrix),
        "concurrence": concurrence(est.matrix),
        "distinguishability": distinguishability(est, 0),
        "fidelity": fidelity(pair.matrix, est.matrix),
        "trace_distance": trace_distance(pair.matrix, est.matrix),
        "record": record,
    }


def run_scenario(scenario: Scenario):
    if scenario.kind == "ideal_sweep":
        return run_ideal_sweep_rows(scenario)
    if scenario.kind == "beta_sweep":
        return run_beta_sweep(scenario)
    if scenario.kind == "delay_sweep":
        return run_delay_sweep(scenario)
    return tomo_demo(scenario)


# --- serialization -------------------------------------------------------

def _fmt(x: float) -> str:
    s = f"{x:.12f}"
    return "0.000000000000" if s == "-0.000000000000" else s


def emit_results(rows: Sequence[SweepRow], fmt: str = "csv", scenario: Scenario | None = None) -> str:
    """Render rows as CSV (fixed 12 decimals) or as a sorted-key JSON document."""
    if not rows:
        raise ArgumentError("no rows to emit")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(v) for v in r.values()])
        return buf.getvalue()
    if fmt == "kv":
        doc: dict[str, Any] = {
            "rows": [
                {
                    **{k: float(_fmt(v)) for k, v in zip(CSV_COLUMNS, r.values())},
                    "p0": [float(_fmt(p)) for p in r.p0],
                    "p1": [float(_fmt(p)) for p in r.p1],
                }
                for r in rows
            ]
        }
        if scenario is not None:
            doc.update(
                kind=scenario.kind,
                noise=scenario.noise,
                shots="exact" if scenario.exact else scenario.shots,
                seed=scenario.seed,
                thetas=[float(_fmt(t)) for t in scenario.thetas],
                control_unit="us" if scenario.kind == "delay_sweep" else "rad",
                device=params_to_mapping(scenario.device),
            )
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    raise ArgumentError(f"unknown output format {fmt!r}")


def parse_results(text: str, fmt: str = "csv") -> list[SweepRow]:
    """Inverse of ``emit_results`` (fringes are recovered from the kv form only)."""
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ArgumentError("unexpected CSV header")
        return [
            SweepRow(*(float(rec[k]) for k in CSV_COLUMNS[:5]))
            for rec in reader
        ]
    if fmt == "kv":
        doc = json.loads(text)
        return [
            SweepRow(*(float(rec[k]) for k in CSV_COLUMNS[:5]), p1=tuple(rec["p1"]))
            for rec in doc["rows"]
        ]
    raise ArgumentError(f"unknown output format {fmt!r}")


def rounded(row: SweepRow) -> SweepRow:
    """Row with the emitted fields rounded as they appear in the CSV."""
    return replace(
        row,
        **{k: float(_fmt(getattr(row, k))) for k in ("control", "visibility", "concurrence", "distinguishability", "c0")},
        p1=tuple(float(_fmt(p)) for p in row.p1),
    )


def write_text(text: str, path: str | Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
