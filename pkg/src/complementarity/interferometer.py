"""Ideal two-path interferometer with a which-path detector (WPD).

The interfering system is a qubit whose basis states label the two paths.
A beam splitter is the pi/2 x-rotation ``|0> -> (|0> - i|1>)/sqrt2``,
``|1> -> (|1> - i|0>)/sqrt2`` (not the textbook Hadamard). The tunable phase
theta is folded into the prepared input state, and the detector undergoes
``U`` only when the qubit is on path 1.

Joint states use the layout ``(2, d_w)``: qubit first, detector second.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence, Union

import numpy as np

from .errors import ArgumentError, DegenerateComplementError
from .fringe import FringeRecord
from .measures import (
    ComplementarityTriplet,
    any_orthogonal,
    concurrence,
    distinguishability,
    embed_effective_two_qubit,
    l1_coherence,
    wpd_orthonormal_complement,
    wpd_overlap,
)
from .quantum_core import (
    DensityOperator,
    StateVector,
    embed_operator,
    is_unitary,
    partial_trace,
)

BALANCED = math.pi / 4
DEFAULT_THETAS = tuple(np.linspace(0.0, 2 * math.pi, 21))

WpdState = Union[StateVector, DensityOperator, np.ndarray]


def hadamard_gate() -> np.ndarray:
    return np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)


def resonator_superposition(dim: int = 2) -> StateVector:
    """``(|0_r> - |1_r>)/sqrt2`` embedded in a resonator space of size ``dim``."""
    v = np.zeros(dim, dtype=complex)
    v[0], v[1] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    return StateVector(v)


def photon_phase_gate(beta: float, dim: int = 2) -> np.ndarray:
    """``exp(i beta |1_r><1_r|)`` on a resonator space of size ``dim``."""
    u = np.eye(dim, dtype=complex)
    u[1, 1] = np.exp(1j * beta)
    return u


def prepare_input(c0: float, theta: float, alpha: float = BALANCED) -> DensityOperator:
    """Partially coherent qubit state entering the detector stage.

    ``cos^2(alpha)|0><0| + sin^2(alpha)|1><1| + (i c0 / 2)(e^{-i theta}|0><1| - h.c.)``;
    alpha = pi/4 is the balanced interferometer.
    """
    if not 0.0 <= c0 <= 1.0:
        raise ArgumentError(f"c0 must lie in [0, 1], got {c0}")
    if c0 > math.sin(2 * alpha) + 1e-12:
        raise ArgumentError(f"c0={c0} is unphysical for population angle alpha={alpha}")
    off = 0.5j * c0 * np.exp(-1j * theta)
    m = np.array(
        [[math.cos(alpha) ** 2, off], [np.conj(off), math.sin(alpha) ** 2]],
        dtype=complex,
    )
    return DensityOperator(m)


def _detector_density(w0: WpdState) -> DensityOperator:
    if isinstance(w0, DensityOperator):
        return w0
    if isinstance(w0, StateVector):
        return w0.density()
    return StateVector(w0).density()


def controlled_unitary(u: np.ndarray) -> np.ndarray:
    """``|0><0| x I + |1><1| x U``."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = u
    return out


def couple_wpd(rho_q: DensityOperator, w0: WpdState, u: np.ndarray) -> DensityOperator:
    """Joint qubit-detector state after the path-conditional detector evolution."""
    if rho_q.dim != 2:
        raise ArgumentError("the interfering system must be a qubit")
    rho_w = _detector_density(w0)
    u = np.asarray(u, dtype=complex)
    if u.shape != (rho_w.dim, rho_w.dim):
        raise ArgumentError(f"unitary shape {u.shape} does not match detector dimension {rho_w.dim}")
    if not is_unitary(u):
        raise ArgumentError("detector evolution is not unitary within 1e-10")
    cu = controlled_unitary(u)
    joint = np.kron(rho_q.matrix, rho_w.matrix)
    return DensityOperator(cu @ joint @ cu.conj().T, (2, rho_w.dim), validate=False)


def detection_probability(rho_joint: DensityOperator) -> float:
    """Probability of finding the qubit in |1> after the second beam splitter."""
    h = embed_operator(hadamard_gate(), 0, rho_joint.dims)
    out = DensityOperator(h @ rho_joint.matrix @ h.conj().T, rho_joint.dims, validate=False)
    q = partial_trace(out, [0]).matrix
    return float(np.clip(q[1, 1].real, 0.0, 1.0))


def purify_wpd(rho_w: DensityOperator, tol: float = 1e-12) -> StateVector:
    """Purification ``sum_k sqrt(P_k)|phi_k>|u_k>`` on the layout (detector, environment).

    The environment dimension equals the rank of ``rho_w``.
    """
    m = np.asarray(rho_w.matrix if isinstance(rho_w, DensityOperator) else rho_w, dtype=complex)
    try:
        rho_w = DensityOperator(m)
    except ArgumentError as exc:
        raise ArgumentError(f"cannot purify an invalid detector state: {exc}") from exc
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    keep = w > tol
    p, phis = w[keep], v[:, keep]
    rank = int(keep.sum())
    psi = sum(math.sqrt(pk) * np.kron(phis[:, k], np.eye(rank)[k]) for k, pk in enumerate(p))
    return StateVector(psi, (m.shape[0], rank), normalize=True)


@dataclass(frozen=True)
class InterferometerConfig:
    """Input coherence, population angle and detector set-up of an ideal run."""

    c0: float
    wpd_initial: WpdState
    wpd_unitary: np.ndarray
    alpha: float = BALANCED
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.c0 <= 1.0:
            raise ArgumentError(f"c0 must lie in [0, 1], got {self.c0}")
        if self.c0 > 2 * math.cos(self.alpha) * math.sin(self.alpha) + 1e-12:
            raise ArgumentError(f"c0={self.c0} exceeds sin(2 alpha) for alpha={self.alpha}")

    def extended(self) -> tuple[StateVector, np.ndarray]:
        """Pure detector state and unitary, purifying a mixed detector if needed."""
        u = np.asarray(self.wpd_unitary, dtype=complex)
        if isinstance(self.wpd_initial, DensityOperator):
            psi = purify_wpd(self.wpd_initial)
            env = psi.dims[1]
            return StateVector(psi.amplitudes), np.kron(u, np.eye(env))
        if isinstance(self.wpd_initial, StateVector):
            return self.wpd_initial, u
        return StateVector(self.wpd_initial), u


def reference_config(c0: float, beta: float, alpha: float = BALANCED) -> InterferometerConfig:
    """The experiment's detector: a resonator superposition with a photon phase ``beta``."""
    return InterferometerConfig(
        c0=c0, wpd_initial=resonator_superposition(), wpd_unitary=photon_phase_gate(beta), alpha=alpha
    )


def run_ideal_sweep(config: InterferometerConfig, thetas: Sequence[float] = DEFAULT_THETAS) -> FringeRecord:
    p1 = [
        detection_probability(
            couple_wpd(prepare_input(config.c0, t, config.alpha), config.wpd_initial, config.wpd_unitary)
        )
        for t in thetas
    ]
    return FringeRecord.from_samples(thetas, p1)


def effective_basis(w0: StateVector, u: np.ndarray) -> tuple[StateVector, StateVector]:
    """``(W0, W1)``; W1 is arbitrary when the detector is untouched (V0 = 1)."""
    try:
        w1 = wpd_orthonormal_complement(w0, u)
    except DegenerateComplementError:
        w1 = any_orthogonal(w0)
    return w0, w1


def ideal_triplet(config: InterferometerConfig, thetas: Sequence[float] = DEFAULT_THETAS) -> ComplementarityTriplet:
    """(C0, V, E, D) computed through the full matrix pipeline.

    V comes from a fitted theta scan, E from the Wootters concurrence of the
    joint state in the effective two-qubit basis (the purified detector when
    the detector starts mixed), and D from the path-conditioned detector states.
    """
    fringe = run_ideal_sweep(config, thetas)
    rho_q = prepare_input(config.c0, config.theta, config.alpha)
    w0, u = config.extended()
    joint = couple_wpd(rho_q, w0, u)
    basis = effective_basis(w0, u)
    e = concurrence(embed_effective_two_qubit(joint, *basis).matrix)
    d = distinguishability(couple_wpd(rho_q, config.wpd_initial, config.wpd_unitary))
    return ComplementarityTriplet(
        coherence_c0=l1_coherence(rho_q.matrix),
        visibility_v=fringe.fitted_visibility,
        concurrence_e=e,
        distinguishability_d=d,
    )


def overlap_v0(config: InterferometerConfig) -> float:
    w0, u = config.extended()
    return wpd_overlap(w0, u).v0
