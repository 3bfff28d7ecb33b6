"""Pulse segments, sequences and the device-level simulator.

Rotations are instantaneous unitaries. When noise is enabled a rotation's
finite length is accounted for by idles of half a pulse on either side; the
sequence builders insert those idles explicitly, so a ``Rotation`` segment
itself never takes time. Simulations start from ``|0>|0>|0_r>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Union

import numpy as np

from .device import DeviceParams
from .dynamics import (
    Q1,
    Q2,
    conditional_phase,
    delta_for_beta,
    noisy_propagator,
    rotation_operator,
    segment_generator,
    unitary,
)
from .errors import ArgumentError
from .quantum_core import DensityOperator, embed_operator, partial_trace


@dataclass(frozen=True)
class Rotation:
    """Instantaneous rotation of qubit ``target`` (0 = Q1, 1 = Q2) within its 0-1 levels."""

    target: int
    polar: float
    azimuth: float
    angle: float

    def __post_init__(self):
        if self.target not in (Q1, Q2):
            raise ArgumentError("rotation target must be 0 (Q1) or 1 (Q2)")
        if not all(math.isfinite(x) for x in (self.polar, self.azimuth, self.angle)):
            raise ArgumentError("rotation angles must be finite")


@dataclass(frozen=True)
class Swap:
    """Resonant Q2-resonator exchange; ``duration=None`` means a full transfer ``pi/(2 g2)``."""

    duration: Optional[float] = None


@dataclass(frozen=True)
class ConditionalCoupling:
    """Q1(1<->2)-resonator exchange at detuning ``delta``; ``None`` means ``pi/Omega``."""

    delta: float
    duration: Optional[float] = None


@dataclass(frozen=True)
class Idle:
    duration: float


Segment = Union[Rotation, Swap, ConditionalCoupling, Idle]


@dataclass(frozen=True)
class PulseSequence:
    segments: tuple = field(default_factory=tuple)
    noise_enabled: bool = False


def _duration(seg: Segment, params: DeviceParams) -> float:
    if isinstance(seg, Swap):
        d = params.swap_duration() if seg.duration is None else seg.duration
    elif isinstance(seg, ConditionalCoupling):
        d = conditional_phase(seg.delta, params.g1)[2] if seg.duration is None else seg.duration
    elif isinstance(seg, Idle):
        d = seg.duration
    else:
        d = 0.0
    if d < 0:
        raise ArgumentError(f"negative segment duration in {seg!r}")
    return d


def _kind(seg: Segment) -> tuple[str, float]:
    if isinstance(seg, Swap):
        return "swap", 0.0
    if isinstance(seg, ConditionalCoupling):
        return "coupling", seg.delta
    return "idle", 0.0


def rotation_unitary(seg: Rotation, params: DeviceParams) -> np.ndarray:
    r = rotation_operator(seg.polar, seg.azimuth, seg.angle)
    dim = params.dims[seg.target]
    local = np.eye(dim, dtype=complex)
    local[:2, :2] = r
    return embed_operator(local, seg.target, params.dims)


def ground_state(params: DeviceParams) -> DensityOperator:
    d = int(np.prod(params.dims))
    m = np.zeros((d, d), dtype=complex)
    m[0, 0] = 1.0
    return DensityOperator(m, params.dims)


def apply_segment(rho: DensityOperator, seg: Segment, params: DeviceParams, noise: bool) -> DensityOperator:
    if isinstance(seg, Rotation):
        u = rotation_unitary(seg, params)
        return DensityOperator(u @ rho.matrix @ u.conj().T, rho.dims, validate=False)
    duration = _duration(seg, params)
    if duration == 0:
        return rho
    kind, key = _kind(seg)
    if noise:
        prop = noisy_propagator(kind, key, duration, params)
        d = rho.dim
        m = (prop @ rho.matrix.reshape(-1, order="F")).reshape(d, d, order="F")
        m = (m + m.conj().T) / 2
        return DensityOperator(m / np.trace(m).real, rho.dims, validate=False)
    if kind == "idle":
        return rho
    u = unitary(segment_generator(kind, key, params), duration)
    return DensityOperator(u @ rho.matrix @ u.conj().T, rho.dims, validate=False)


def simulate_sequence(
    seq: PulseSequence,
    params: DeviceParams,
    rho0: DensityOperator | None = None,
    monitor: Callable[[Segment, DensityOperator], None] | None = None,
) -> DensityOperator:
    """Run a pulse sequence and return the final joint Q1 x Q2 x resonator state."""
    if not seq.segments:
        raise ArgumentError("pulse sequence has no segments")
    rho = ground_state(params) if rho0 is None else rho0
    for seg in seq.segments:
        rho = apply_segment(rho, seg, params, seq.noise_enabled)
        if monitor is not None:
            monitor(seg, rho)
    return rho


def sequence_duration(seq: PulseSequence, params: DeviceParams) -> float:
    return sum(_duration(s, params) for s in seq.segments)


# --- sequence builders ---------------------------------------------------

def _preparation(params: DeviceParams, theta: float, delay: float) -> list[Segment]:
    """Ramsey pulse on Q1, optional delay, then the detector superposition in the resonator."""
    half = params.pulse_duration / 2
    return [
        Idle(half),
        Rotation(Q1, math.pi / 2, theta, math.pi / 2),
        Idle(delay),
        Rotation(Q2, math.pi / 2, 0.0, math.pi / 2),
        Idle(half),
        Swap(),
    ]


def ramsey_sequence(params: DeviceParams, theta: float, beta: float, delay: float = 0.0, noise: bool = False) -> PulseSequence:
    """Interference run: the second pi/2 pulse closes the Ramsey loop on Q1."""
    half = params.pulse_duration / 2
    segs = _preparation(params, theta, delay) + [
        ConditionalCoupling(delta_for_beta(beta, params.g1)),
        Idle(half),
        Rotation(Q1, math.pi / 2, 0.0, math.pi / 2),
    ]
    return PulseSequence(tuple(segs), noise)


def entanglement_sequence(params: DeviceParams, beta: float, theta: float = 0.0, delay: float = 0.0, noise: bool = False) -> PulseSequence:
    """Entanglement run: the resonator state is mapped back onto Q2 before joint tomography."""
    segs = _preparation(params, theta, delay) + [
        ConditionalCoupling(delta_for_beta(beta, params.g1)),
        Swap(),
    ]
    return PulseSequence(tuple(segs), noise)


def coherence_sequence(params: DeviceParams, theta: float = 0.0, delay: float = 0.0, noise: bool = False) -> PulseSequence:
    """Source-coherence run: only the first pi/2 pulse on Q1 (and the optional delay)."""
    half = params.pulse_duration / 2
    segs = [Idle(half), Rotation(Q1, math.pi / 2, theta, math.pi / 2), Idle(half), Idle(delay)]
    return PulseSequence(tuple(segs), noise)


# --- state extraction ----------------------------------------------------

def _truncate_q1(m: np.ndarray, q2_dim: int) -> np.ndarray:
    """Drop Q1's |2> level from a Q1 x (rest) matrix and renormalize."""
    keep = np.arange(2 * q2_dim)
    sub = m[np.ix_(keep, keep)]
    return sub / np.trace(sub).real


def qubit_pair_state(rho: DensityOperator) -> DensityOperator:
    """Q1-Q2 state on the computational levels (resonator traced, Q1's |2> dropped)."""
    pair = partial_trace(rho, [Q1, Q2])
    return DensityOperator(_truncate_q1(pair.matrix, 2), (2, 2), validate=False)


def q1_state(rho: DensityOperator) -> DensityOperator:
    q = partial_trace(rho, [Q1])
    return DensityOperator(_truncate_q1(q.matrix, 1), (2,), validate=False)


def q1_leaked_population(rho: DensityOperator) -> float:
    return float(partial_trace(rho, [Q1]).matrix[2, 2].real)
