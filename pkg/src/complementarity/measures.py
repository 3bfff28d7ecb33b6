"""Coherence, visibility, entanglement and path-information measures.

Everything here is a pure function of small dense matrices. The two-qubit
routines use the basis order ``|0 W0>, |0 W1>, |1 W0>, |1 W1>`` for the
effective qubit-detector system.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    ArgumentError,
    ConsistencyError,
    DegenerateComplementError,
    DegeneratePathError,
    DegenerateProjectionError,
    EmbeddingError,
)
from .quantum_core import (
    SIGMA_Y,
    DensityOperator,
    StateVector,
    is_unitary,
    project_subsystem,
    real_spectrum,
    trace_norm,
)

_YY = np.kron(SIGMA_Y, SIGMA_Y)
# negative rho-tilde eigenvalues down to this size are treated as round-off
EIGEN_CLAMP = 1e-9


@dataclass(frozen=True)
class WpdOverlap:
    """Modulus and argument of ``<W0|U|W0>``."""

    v0: float
    phi: float


@dataclass(frozen=True)
class ComplementarityTriplet:
    coherence_c0: float
    visibility_v: float
    concurrence_e: float
    distinguishability_d: float

    @property
    def equality_residual(self) -> float:
        return self.concurrence_e**2 + self.visibility_v**2 - self.coherence_c0**2

    @property
    def quadrature_sum(self) -> float:
        return math.sqrt(self.concurrence_e**2 + self.visibility_v**2)


def _as_vector(w) -> np.ndarray:
    v = np.asarray(w.amplitudes if isinstance(w, StateVector) else w, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ArgumentError("detector state must be normalized")
    return v


def l1_coherence(rho) -> float:
    """Sum of the moduli of the off-diagonal elements of a qubit state."""
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise ArgumentError(f"l1 coherence is defined here for a single qubit, got shape {m.shape}")
    return float(abs(m[0, 1]) + abs(m[1, 0]))


def wpd_overlap(w0, u) -> WpdOverlap:
    """Overlap between the detector's initial state and its conditionally evolved copy.

    The phase is reported as 0 when the overlap vanishes (it is undefined there).
    """
    w = _as_vector(w0)
    u = np.asarray(u, dtype=complex)
    if u.shape != (w.size, w.size):
        raise ArgumentError(f"unitary shape {u.shape} does not match detector dimension {w.size}")
    if not is_unitary(u):
        raise ArgumentError("detector evolution is not unitary within 1e-10")
    amp = w.conj() @ u @ w
    v0 = float(abs(amp))
    phi = float(np.angle(amp)) if v0 > 1e-12 else 0.0
    return WpdOverlap(v0=min(v0, 1.0), phi=phi)


def wpd_orthonormal_complement(w0, u) -> StateVector:
    """Unit vector ``|W1>`` orthogonal to ``|W0>`` spanning ``U|W0>`` together with it."""
    w = _as_vector(w0)
    ov = wpd_overlap(w, u)
    if ov.v0 > 1 - 1e-9:
        raise DegenerateComplementError("U|W0> is parallel to |W0>; the complement is undefined")
    uw = np.asarray(u, dtype=complex) @ w
    w1 = (uw - ov.v0 * np.exp(1j * ov.phi) * w) / math.sqrt(1 - ov.v0**2)
    # re-orthogonalize against round-off
    w1 = w1 - (w.conj() @ w1) * w
    return StateVector(w1, normalize=True)


def any_orthogonal(w0) -> StateVector:
    """Some unit vector orthogonal to ``w0`` (used when the complement is degenerate)."""
    w = _as_vector(w0)
    if w.size < 2:
        raise ArgumentError("a one-dimensional detector has no orthogonal state")
    k = int(np.argmin(np.abs(w)))
    e = np.zeros_like(w)
    e[k] = 1.0
    e = e - (w.conj() @ e) * w
    return StateVector(e, normalize=True)


def embed_effective_two_qubit(rho: DensityOperator, w0, w1, tol: float = 1e-9) -> DensityOperator:
    """Express a qubit-detector state in the basis ``{|q>|W_k>}`` as a 4x4 matrix."""
    a, b = _as_vector(w0), _as_vector(w1)
    if abs(a.conj() @ b) > 1e-9:
        raise ArgumentError("detector basis vectors are not orthogonal")
    m = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho, dtype=complex)
    d = a.size
    if m.shape != (2 * d, 2 * d):
        raise ArgumentError(f"joint state shape {m.shape} does not match qubit x detector({d})")
    iso = np.kron(np.eye(2), np.column_stack([a, b]))
    small = iso.conj().T @ m @ iso
    leak = 1.0 - np.trace(small).real
    if leak > tol:
        raise EmbeddingError(f"{leak:.3e} of the population lies outside span{{W0, W1}}")
    return DensityOperator(small, (2, 2), validate=False)


def rho_tilde(rho) -> np.ndarray:
    """Spin-flipped product ``rho (sy x sy) rho* (sy x sy)``."""
    m = np.asarray(rho, dtype=complex)
    return m @ _YY @ m.conj() @ _YY


def _two_qubit(rho) -> np.ndarray:
    m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ArgumentError(f"concurrence needs a 4x4 two-qubit state, got shape {m.shape}")
    return m


def rho_tilde_eigenvalues(rho) -> np.ndarray:
    """Eigenvalues of ``rho_tilde`` (descending) from the general eigenvalue routine.

    Imaginary parts above 1e-9 and negative values below -1e-9 are treated as
    internal inconsistencies; smaller negative values are clamped to zero.
    """
    lam = real_spectrum(rho_tilde(_two_qubit(rho)))
    if lam[-1] < -EIGEN_CLAMP:
        raise ConsistencyError(f"rho-tilde has a negative eigenvalue {lam[-1]:.3e}")
    return np.clip(lam, 0.0, None)


def concurrence_from_eigenvalues(rho) -> float:
    """Concurrence straight from the spectrum of ``rho_tilde``.

    Exact eigenvalues that vanish come back as ~1e-17 and their square roots
    as ~1e-9, so this route is only good to about 1e-8.
    """
    s = np.sqrt(rho_tilde_eigenvalues(rho))
    return float(max(s[0] - s[1] - s[2] - s[3], 0.0))


def rho_tilde_sqrt_spectrum(rho, cutoff: float = 1e-12) -> np.ndarray:
    """Square roots of the ``rho_tilde`` eigenvalues, descending, length 4.

    With ``rho = A A^dagger`` the matrix ``rho_tilde`` is similar to
    ``(A^T Y A)(A^T Y A)^dagger`` (``Y = sy x sy``), so the square roots are the
    singular values of ``A^T Y A``. Eigenvalues of rho below ``cutoff`` are
    dropped from ``A``.
    """
    m = _two_qubit(rho)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    keep = w > cutoff
    a = v[:, keep] * np.sqrt(w[keep])
    s = np.zeros(4)
    if a.shape[1]:
        sv = np.linalg.svd(a.T @ _YY @ a, compute_uv=False)
        s[: sv.size] = sv
    return np.sort(s)[::-1]


def concurrence(rho) -> float:
    """Wootters concurrence ``max(0, s1 - s2 - s3 - s4)`` of a two-qubit state."""
    s = rho_tilde_sqrt_spectrum(rho)
    return float(max(s[0] - s[1] - s[2] - s[3], 0.0))


def conditional_detector_states(rho_joint: DensityOperator, qubit: int = 0):
    """Detector states ``rho_w0, rho_w1`` conditioned on the qubit's basis states."""
    try:
        r0, p0 = project_subsystem(rho_joint, qubit, 0)
        r1, p1 = project_subsystem(rho_joint, qubit, 1)
    except DegenerateProjectionError as exc:
        raise DegeneratePathError(str(exc)) from exc
    return r0, r1


def distinguishability(rho_joint: DensityOperator, qubit: int = 0) -> float:
    """Half the trace norm between the two path-conditioned detector states."""
    r0, r1 = conditional_detector_states(rho_joint, qubit)
    return 0.5 * trace_norm(r0.matrix - r1.matrix)


def predict_triplet(c0: float, v0: float) -> ComplementarityTriplet:
    """Closed-form (C0, V, E, D) for input coherence ``c0`` and detector overlap ``v0``."""
    for name, x in (("c0", c0), ("v0", v0)):
        if not 0.0 <= x <= 1.0:
            raise ArgumentError(f"{name} must lie in [0, 1], got {x}")
    d = math.sqrt(max(1.0 - v0 * v0, 0.0))
    return ComplementarityTriplet(
        coherence_c0=c0, visibility_v=c0 * v0, concurrence_e=c0 * d, distinguishability_d=d
    )
