"""Hamiltonians and time evolution for the Q1 x Q2 x resonator device.

Everything runs in the frame rotating with the bare qubit and resonator
frequencies, so idle qubits have a zero Hamiltonian and the conditional phase
acquired by ``|1>|1_r>`` is ``beta = pi [1 - delta/(2 Omega)]`` with no carrier
phases. ``lab_frame_photon_phase`` keeps the lab-frame bookkeeping as a check.

Density matrices are vectorized column-major (``vec(A X B) = (B^T x A) vec X``).
"""

from __future__ import annotations

from functools import lru_cache
import math
from typing import Sequence

import numpy as np

from .device import DeviceParams
from .errors import ArgumentError, ConfigurationError, ConsistencyError
from .quantum_core import DensityOperator, embed_operator, is_hermitian

Q1, Q2, RES = 0, 1, 2


def rotation_operator(polar: float, azimuth: float, angle: float) -> np.ndarray:
    """Rotation by ``angle`` about the Bloch axis with the given polar and azimuthal angles."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array(
        [
            [c - 1j * s * math.cos(polar), -1j * s * math.sin(polar) * np.exp(-1j * azimuth)],
            [-1j * s * math.sin(polar) * np.exp(1j * azimuth), c + 1j * s * math.cos(polar)],
        ],
        dtype=complex,
    )


def conditional_phase(delta: float, g1: float) -> tuple[float, float, float]:
    """``(beta, Omega, tau)`` for one full |1>|1_r> <-> |2>|0_r> cycle at detuning ``delta``."""
    if delta < 0:
        raise ArgumentError("only non-negative detunings are supported")
    omega = math.sqrt(2 * g1**2 + delta**2 / 4)
    return math.pi * (1 - delta / (2 * omega)), omega, math.pi / omega


def delta_for_beta(beta: float, g1: float) -> float:
    """Detuning giving conditional phase ``beta`` in (0, pi]."""
    if not 0 < beta <= math.pi:
        raise ArgumentError(f"beta must lie in (0, pi], got {beta}")
    c = 1 - beta / math.pi
    return 2 * math.sqrt(2) * g1 * c / math.sqrt(1 - c * c)


def _lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def local_operators(params: DeviceParams) -> dict[str, np.ndarray]:
    """Full-space ladder/number operators keyed by name."""
    dims = params.dims
    b1 = embed_operator(_lowering(3), Q1, dims)
    b2 = embed_operator(_lowering(2), Q2, dims)
    a = embed_operator(_lowering(dims[RES]), RES, dims)
    s12 = np.zeros((3, 3), dtype=complex)
    s12[1, 2] = 1.0
    return {
        "b1": b1,
        "b2": b2,
        "a": a,
        "n1": b1.conj().T @ b1,
        "n2": b2.conj().T @ b2,
        "na": a.conj().T @ a,
        "s12": embed_operator(s12, Q1, dims),
        "p2": embed_operator(np.diag([0, 0, 1]).astype(complex), Q1, dims),
    }


def jc_generator(params: DeviceParams, delta: float | None = None) -> np.ndarray:
    """Rotating-frame Q1(1<->2)-resonator exchange Hamiltonian (rad/s).

    ``delta |2><2| + sqrt2 g1 (a^dag |1><2| + a |2><1|)``.
    """
    delta = params.delta if delta is None else delta
    ops = local_operators(params)
    a, s12 = ops["a"], ops["s12"]
    coupling = a.conj().T @ s12
    return delta * ops["p2"] + math.sqrt(2) * params.g1 * (coupling + coupling.conj().T)


def swap_generator(params: DeviceParams) -> np.ndarray:
    """Resonant Q2-resonator exchange ``g2 (a^dag b2 + a b2^dag)``."""
    ops = local_operators(params)
    x = ops["a"].conj().T @ ops["b2"]
    return params.g2 * (x + x.conj().T)


def lab_frame_generator(params: DeviceParams, delta: float) -> np.ndarray:
    """Q1-resonator Hamiltonian including the bare level energies.

    Q1's 1<->2 transition sits at ``omega_r + delta`` and its 0<->1 transition
    one anharmonicity above that.
    """
    ops = local_operators(params)
    w12 = params.omega_r + delta
    w1 = w12 + params.anharmonicity_q1
    w2 = w1 + w12
    p1 = ops["n1"] - 2 * ops["p2"]
    coupling = ops["a"].conj().T @ ops["s12"]
    return (
        w1 * p1
        + w2 * ops["p2"]
        + params.omega_r * ops["na"]
        + math.sqrt(2) * params.g1 * (coupling + coupling.conj().T)
    )


def unitary(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` by eigendecomposition."""
    if not is_hermitian(h, tol=1e-9 * max(1.0, np.abs(h).max())):
        raise ArgumentError("generator is not Hermitian")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_closed(rho0: DensityOperator, h: np.ndarray, t: float) -> DensityOperator:
    u = unitary(h, t)
    return DensityOperator(u @ rho0.matrix @ u.conj().T, rho0.dims, validate=False)


def lab_frame_photon_phase(params: DeviceParams, delta: float) -> tuple[float, float]:
    """Phase of ``|1>|1_r>`` after ``tau = pi/Omega`` of lab-frame evolution.

    Returns ``(raw, rotating)``: the raw lab-frame phase and the phase after
    removing the frame rotation ``exp(-i (omega_1 + omega_r) tau)``; both are
    wrapped to (-pi, pi].
    """
    _, _, tau = conditional_phase(delta, params.g1)
    dims = params.dims
    idx = np.ravel_multi_index((1, 0, 1), dims)
    psi = unitary(lab_frame_generator(params, delta), tau)[:, idx]
    raw = float(np.angle(psi[idx]))
    w1 = params.omega_r + delta + params.anharmonicity_q1
    frame = (w1 + params.omega_r) * tau
    return raw, float(np.angle(psi[idx] * np.exp(1j * frame)))


def collapse_operators(params: DeviceParams) -> list[tuple[np.ndarray, float]]:
    """Relaxation and dephasing channels for both qubits and the resonator."""
    ops = local_operators(params)
    return [
        (ops["b1"], 1.0 / params.t1_q1),
        (ops["n1"], params.dephasing_channel_rate(1)),
        (ops["b2"], 1.0 / params.t1_q2),
        (ops["n2"], params.dephasing_channel_rate(2)),
        (ops["a"], 1.0 / params.t_r),
    ]


def _check_rates(collapse_ops) -> None:
    for _, rate in collapse_ops:
        if rate < 0:
            raise ArgumentError(f"collapse rate must be non-negative, got {rate}")


def dissipator(o: np.ndarray, rho: np.ndarray) -> np.ndarray:
    oo = o.conj().T @ o
    return o @ rho @ o.conj().T - 0.5 * (oo @ rho + rho @ oo)


def lindblad_rhs(rho, h: np.ndarray, collapse_ops: Sequence[tuple[np.ndarray, float]]) -> np.ndarray:
    """``-i[H, rho] + sum_k rate_k D[O_k] rho``."""
    _check_rates(collapse_ops)
    r = np.asarray(rho, dtype=complex)
    out = -1j * (h @ r - r @ h)
    for o, rate in collapse_ops:
        if rate:
            out = out + rate * dissipator(o, r)
    return out


def liouvillian(h: np.ndarray, collapse_ops: Sequence[tuple[np.ndarray, float]]) -> np.ndarray:
    """Superoperator matrix of ``lindblad_rhs`` acting on column-major ``vec(rho)``."""
    _check_rates(collapse_ops)
    d = h.shape[0]
    eye = np.eye(d)
    sup = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for o, rate in collapse_ops:
        if rate:
            oo = o.conj().T @ o
            sup += rate * (np.kron(o.conj(), o) - 0.5 * np.kron(eye, oo) - 0.5 * np.kron(oo.T, eye))
    return sup


def rk4_step(rho: np.ndarray, h: np.ndarray, collapse_ops, step: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of the master equation."""
    k1 = lindblad_rhs(rho, h, collapse_ops)
    k2 = lindblad_rhs(rho + 0.5 * step * k1, h, collapse_ops)
    k3 = lindblad_rhs(rho + 0.5 * step * k2, h, collapse_ops)
    k4 = lindblad_rhs(rho + step * k3, h, collapse_ops)
    return rho + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_step_matrix(sup: np.ndarray, step: float) -> np.ndarray:
    """Matrix of one RK4 step for ``d vec/dt = L vec``: ``sum_{k<=4} (step L)^k / k!``."""
    x = step * sup
    out = np.eye(sup.shape[0], dtype=complex)
    term = out
    for k in range(1, 5):
        term = term @ x / k
        out = out + term
    return out


def _split(duration: float, dt: float) -> tuple[int, float]:
    n = int(math.floor(duration / dt + 1e-9))
    rest = duration - n * dt
    return n, (rest if rest > 1e-9 * dt else 0.0)


def check_step(h: np.ndarray, dt: float) -> None:
    if dt <= 0:
        raise ConfigurationError("integration step must be positive")
    norm = np.linalg.norm(h, 2)
    if norm > 0 and dt > 0.05 / norm:
        raise ConfigurationError(f"dt={dt:.3e} s exceeds the stability guard 0.05/||H|| = {0.05 / norm:.3e} s")


def rk4_propagator(h: np.ndarray, collapse_ops, duration: float, dt: float) -> np.ndarray:
    """Superoperator equal to ``duration/dt`` RK4 steps (plus one short final step).

    For a piecewise-constant generator the RK4 update is a fixed linear map,
    so repeated stepping is the matrix power of the one-step map.
    """
    check_step(h, dt)
    n, rest = _split(duration, dt)
    sup = liouvillian(h, collapse_ops)
    prop = np.linalg.matrix_power(rk4_step_matrix(sup, dt), n)
    if rest:
        prop = rk4_step_matrix(sup, rest) @ prop
    return prop


def finalize(vec_or_matrix: np.ndarray, dims, drift_tol: float = 1e-8) -> DensityOperator:
    """Re-Hermitize and trace-normalize after integration, guarding the trace drift."""
    d = int(np.prod(dims))
    m = np.asarray(vec_or_matrix).reshape(d, d, order="F") if vec_or_matrix.ndim == 1 else vec_or_matrix
    tr = np.trace(m).real
    if abs(tr - 1.0) > drift_tol:
        raise ConsistencyError(f"trace drifted to {tr!r} during integration")
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real, dims, validate=False)


def integrate_master_equation(
    rho0: DensityOperator,
    schedule,
    collapse_ops: Sequence[tuple[np.ndarray, float]],
    dt: float = 1e-11,
    t_end: float | None = None,
    method: str = "power",
) -> DensityOperator:
    """Fixed-step RK4 integration of the Lindblad equation.

    ``schedule`` is either a single Hamiltonian (then ``t_end`` is required)
    or a list of ``(duration, H)`` pieces. ``method="loop"`` steps the density
    matrix explicitly; ``"power"`` applies the identical RK4 map via matrix
    powers, which is much faster for long windows.
    """
    if isinstance(schedule, np.ndarray):
        if t_end is None:
            raise ArgumentError("t_end is required for a constant Hamiltonian")
        pieces = [(t_end, schedule)]
    else:
        pieces = list(schedule)
        if t_end is not None and abs(sum(p[0] for p in pieces) - t_end) > 1e-15:
            raise ArgumentError("t_end disagrees with the schedule's total duration")
    if method not in ("power", "loop"):
        raise ArgumentError(f"unknown integration method {method!r}")
    _check_rates(collapse_ops)
    vec = np.asarray(rho0.matrix).reshape(-1, order="F").copy()
    m = np.array(rho0.matrix)
    for duration, h in pieces:
        if duration < 0:
            raise ArgumentError("segment durations must be non-negative")
        if method == "power":
            vec = rk4_propagator(h, collapse_ops, duration, dt) @ vec
        else:
            check_step(h, dt)
            n, rest = _split(duration, dt)
            for _ in range(n):
                m = rk4_step(m, h, collapse_ops, dt)
            if rest:
                m = rk4_step(m, h, collapse_ops, rest)
    if method == "loop":
        vec = m.reshape(-1, order="F")
    return finalize(vec, rho0.dims)


def segment_generator(kind: str, key: float, params: DeviceParams) -> np.ndarray:
    """Rotating-frame Hamiltonian of a ``swap``, ``coupling`` (key = delta) or ``idle`` segment."""
    if kind == "swap":
        return swap_generator(params)
    if kind == "coupling":
        return jc_generator(params, key)
    if kind == "idle":
        d = int(np.prod(params.dims))
        return np.zeros((d, d), dtype=complex)
    raise ArgumentError(f"unknown segment kind {kind!r}")


@lru_cache(maxsize=256)
def _noisy_propagator(kind: str, key: float, duration: float, params: DeviceParams) -> np.ndarray:
    prop = rk4_propagator(segment_generator(kind, key, params), collapse_operators(params), duration, params.dt)
    prop.setflags(write=False)
    return prop


def noisy_propagator(kind: str, key: float, duration: float, params: DeviceParams) -> np.ndarray:
    """Cached RK4 superoperator of one segment with all decoherence channels on."""
    return _noisy_propagator(kind, float(key), float(duration), params)


def leakage(rho: DensityOperator, params: DeviceParams) -> float:
    """Population with more than one excitation shared by Q2 and the resonator."""
    ops = local_operators(params)
    n = np.real(np.diag(ops["n2"] + ops["na"]))
    return float(np.real(np.diag(rho.matrix))[n > 1.5].sum())
