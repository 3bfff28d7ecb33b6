"""Simulated measurement chain: basis rotations, shots, readout error, reconstruction.

Outcome vectors are indexed with the first qubit as the most significant bit,
matching ``np.kron`` ordering: for two qubits the order is ``00, 01, 10, 11``.
Outcome bit 0 corresponds to the +1 eigenvalue of the measured Pauli.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
import itertools
import logging
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamics import rotation_operator
from .errors import ArgumentError, ConfigurationError
from .quantum_core import IDENTITY_2, PAULIS, DensityOperator

log = logging.getLogger(__name__)

AXES = ("X", "Y", "Z")
TWO_QUBIT_BASES = tuple("".join(p) for p in itertools.product(AXES, repeat=2))
SINGULAR_TOL = 1e-6
RECORD_HEADER = "# measurement-record v1"
RECORD_COLUMNS = "# columns: basis outcome count"


def tomography_rotation(axis: str) -> np.ndarray:
    """Pulse that maps the eigenbasis of ``axis`` onto z, so ``p0 - p1 = <sigma_axis>``.

    x uses a -pi/2 rotation about y and y a +pi/2 rotation about x.
    """
    a = str(axis).upper()
    if a == "X":
        return rotation_operator(math.pi / 2, -math.pi / 2, math.pi / 2)
    if a == "Y":
        return rotation_operator(math.pi / 2, 0.0, math.pi / 2)
    if a == "Z":
        return IDENTITY_2.copy()
    raise ArgumentError(f"unknown tomography axis {axis!r}")


def _check_basis(basis: str, n: int) -> str:
    b = str(basis).upper()
    if len(b) != n or any(c not in AXES for c in b):
        raise ArgumentError(f"basis {basis!r} is not a {n}-letter word over X, Y, Z")
    return b


def _nqubits(m: np.ndarray) -> int:
    n = int(round(math.log2(m.shape[0])))
    if m.shape != (2**n, 2**n) or n < 1:
        raise ArgumentError(f"state of shape {m.shape} is not an n-qubit operator")
    return n


def measure_probabilities(rho, basis: str) -> np.ndarray:
    """Outcome distribution of an n-qubit state measured in the Pauli setting ``basis``."""
    m = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho, dtype=complex)
    n = _nqubits(m)
    b = _check_basis(basis, n)
    r = reduce(np.kron, [tomography_rotation(c) for c in b])
    p = np.real(np.diag(r @ m @ r.conj().T))
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_counts(probs, shots: int, seed) -> np.ndarray:
    """Multinomial draw of ``shots`` outcomes; ``seed`` is an int or a ``Generator``."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
        raise ArgumentError("probabilities must be a finite 1-D vector")
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise ArgumentError("probabilities must be nonnegative and sum to 1 within 1e-9")
    if int(shots) != shots or shots < 1:
        raise ArgumentError(f"shots must be a positive integer, got {shots}")
    p = np.clip(p, 0.0, None)
    return _as_rng(seed).multinomial(int(shots), p / p.sum())


@dataclass(frozen=True)
class ReadoutMatrix:
    """Single-qubit assignment matrix, ``matrix[j, k] = P(read j | prepared k)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f"readout matrix must be square, got shape {m.shape}")
        if m.min() < 0 or m.max() > 1:
            raise ArgumentError("readout matrix entries must lie in [0, 1]")
        if np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-12:
            raise ArgumentError("readout matrix columns must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_fidelities(cls, f0: float, f1: float, *_ignored) -> "ReadoutMatrix":
        """Binary confusion ``[[F0, 1-F1], [1-F0, F1]]`` (a third, |2> fidelity is unused)."""
        return cls(np.array([[f0, 1.0 - f1], [1.0 - f0, f1]]))

    @classmethod
    def identity(cls, dim: int = 2) -> "ReadoutMatrix":
        return cls(np.eye(dim))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    def inverse(self) -> np.ndarray:
        if abs(self.determinant) <= SINGULAR_TOL:
            raise ConfigurationError(f"readout matrix is singular (|det| = {abs(self.determinant):.3e})")
        return np.linalg.inv(self.matrix)


def _joint(mats: Sequence, size: int, inverse: bool) -> np.ndarray:
    if isinstance(mats, ReadoutMatrix):
        mats = [mats]
    parts = [m.inverse() if inverse else m.matrix for m in mats]
    full = reduce(np.kron, parts)
    if full.shape[0] != size:
        raise ArgumentError(f"readout matrices act on {full.shape[0]} outcomes, vector has {size}")
    return full


def apply_readout_error(true_probs, readout: Sequence[ReadoutMatrix]) -> np.ndarray:
    """``(F_1 x F_2 x ...) p``."""
    p = np.asarray(true_probs, dtype=float)
    return _joint(readout, p.size, inverse=False) @ p


def correct_readout(measured_probs, readout: Sequence[ReadoutMatrix]) -> np.ndarray:
    """Invert the readout model, then clamp negatives to zero and renormalize."""
    p = np.asarray(measured_probs, dtype=float)
    corrected = _joint(readout, p.size, inverse=True) @ p
    if corrected.min() < 0:
        deviation = float(-corrected[corrected < 0].sum())
        log.info("readout correction clamped negative mass %.3e", deviation)
        corrected = np.clip(corrected, 0.0, None)
    total = corrected.sum()
    if total <= 0:
        raise ArgumentError("corrected probabilities vanish")
    return corrected / total


@dataclass(frozen=True)
class MeasurementRecord:
    """Per-basis outcome counts of a tomography run.

    Text form::

        # measurement-record v1 seed=<int> shots=<int>
        # columns: basis outcome count
        XZ 01 1234
    """

    basis_labels: tuple
    outcome_counts: Mapping[str, tuple]
    shots: int
    seed: int

    def __post_init__(self):
        labels = tuple(str(b) for b in self.basis_labels)
        counts = {}
        for b in labels:
            if b not in self.outcome_counts:
                raise ArgumentError(f"no counts for basis {b}")
            c = tuple(int(x) for x in self.outcome_counts[b])
            if len(c) != 2 ** len(b) or min(c) < 0:
                raise ArgumentError(f"basis {b} needs {2 ** len(b)} nonnegative counts")
            if sum(c) != self.shots:
                raise ArgumentError(f"counts for basis {b} sum to {sum(c)}, not {self.shots}")
            counts[b] = c
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "outcome_counts", counts)

    def frequencies(self) -> dict[str, np.ndarray]:
        return {b: np.asarray(c, dtype=float) / self.shots for b, c in self.outcome_counts.items()}

    def to_text(self) -> str:
        lines = [f"{RECORD_HEADER} seed={self.seed} shots={self.shots}", RECORD_COLUMNS]
        for b in self.basis_labels:
            n = len(b)
            for k, c in enumerate(self.outcome_counts[b]):
                lines.append(f"{b} {k:0{n}b} {c}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MeasurementRecord":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith(RECORD_HEADER):
            raise ArgumentError("missing measurement-record header")
        meta = dict(tok.split("=", 1) for tok in lines[0][len(RECORD_HEADER):].split())
        try:
            seed, shots = int(meta["seed"]), int(meta["shots"])
        except (KeyError, ValueError) as exc:
            raise ArgumentError("header must carry integer seed= and shots=") from exc
        counts: dict[str, list] = {}
        for ln in lines[1:]:
            if ln.startswith("#"):
                continue
            parts = ln.split()
            if len(parts) != 3:
                raise ArgumentError(f"malformed record line {ln!r}")
            b, outcome, c = parts
            row = counts.setdefault(b, [0] * 2 ** len(b))
            row[int(outcome, 2)] = int(c)
        return cls(tuple(counts), counts, shots, seed)


def acquire_record(
    rho, shots: int, seed: int, readout: Sequence[ReadoutMatrix] | None = None, bases: Iterable[str] | None = None
) -> MeasurementRecord:
    """Sample every Pauli setting of ``rho`` (through the readout model if given)."""
    m = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho, dtype=complex)
    n = _nqubits(m)
    labels = tuple(bases) if bases is not None else tuple("".join(p) for p in itertools.product(AXES, repeat=n))
    rng = np.random.default_rng(seed)
    counts = {}
    for b in labels:
        p = measure_probabilities(m, b)
        if readout is not None:
            p = apply_readout_error(p, readout)
        counts[b] = tuple(sample_counts(p, shots, rng))
    return MeasurementRecord(labels, counts, int(shots), int(seed))


def exact_frequencies(rho, readout: Sequence[ReadoutMatrix] | None = None) -> dict[str, np.ndarray]:
    """Infinite-shot outcome distributions for every Pauli setting."""
    m = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho, dtype=complex)
    n = _nqubits(m)
    out = {}
    for p in itertools.product(AXES, repeat=n):
        b = "".join(p)
        probs = measure_probabilities(m, b)
        out[b] = apply_readout_error(probs, readout) if readout is not None else probs
    return out


def project_to_density(m: np.ndarray) -> np.ndarray:
    """Nearest-PSD, unit-trace operator by clipping negative eigenvalues."""
    h = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise ArgumentError("reconstruction has no positive spectrum")
    w = w / w.sum()
    out = (v * w) @ v.conj().T
    return (out + out.conj().T) / 2


def pauli_expectations(frequencies: Mapping[str, np.ndarray], n: int) -> dict[str, float]:
    """Expectations of every Pauli string, averaged over the compatible settings."""
    settings = {b: np.asarray(f, dtype=float) for b, f in frequencies.items()}
    for b in settings:
        _check_basis(b, n)
    missing = ["".join(p) for p in itertools.product(AXES, repeat=n) if "".join(p) not in settings]
    if missing:
        raise ArgumentError(f"missing tomography bases {missing}")
    bits = np.array(list(itertools.product((0, 1), repeat=n)))
    out: dict[str, float] = {}
    for word in itertools.product("I" + "".join(AXES), repeat=n):
        s = "".join(word)
        support = [i for i, c in enumerate(s) if c != "I"]
        signs = (-1.0) ** bits[:, support].sum(axis=1) if support else np.ones(len(bits))
        vals = [
            float(signs @ f)
            for b, f in settings.items()
            if all(s[i] == b[i] for i in support)
        ]
        out[s] = float(np.mean(vals))
    return out


def reconstruct_state(frequencies: Mapping[str, np.ndarray], readout: Sequence[ReadoutMatrix] | None = None) -> DensityOperator:
    """Linear inversion from per-setting outcome frequencies, then PSD projection."""
    if not frequencies:
        raise ArgumentError("no tomography data")
    n = len(next(iter(frequencies)))
    freqs = {
        b: correct_readout(f, readout) if readout is not None else np.asarray(f, dtype=float)
        for b, f in frequencies.items()
    }
    ev = pauli_expectations(freqs, n)
    m = np.zeros((2**n, 2**n), dtype=complex)
    for s, e in ev.items():
        m += e * reduce(np.kron, [IDENTITY_2 if c == "I" else PAULIS[c] for c in s])
    m /= 2**n
    return DensityOperator(project_to_density(m), (2,) * n)


def reconstruct_two_qubit(record: MeasurementRecord, readout: Sequence[ReadoutMatrix] | None = None) -> DensityOperator:
    if any(len(b) != 2 for b in record.basis_labels):
        raise ArgumentError("two-qubit reconstruction needs two-letter basis labels")
    return reconstruct_state(record.frequencies(), readout)
