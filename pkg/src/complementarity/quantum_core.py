"""Dense linear algebra for small multi-partite quantum systems.

States are dense ``complex128`` arrays tagged with a layout, the ordered tuple
of subsystem dimensions. Kronecker products put the first subsystem outermost,
so for the device layout ``(3, 2, 3)`` the basis index of ``|q1, q2, n>`` is
``(q1 * 2 + q2) * 3 + n``. Every simulator in the package uses the subsystem
order Q1 (interfering qubit) -> Q2 (ancilla) -> resonator.
"""

from __future__ import annotations

from math import prod
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ArgumentError, ConsistencyError, DegenerateProjectionError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULIS = {"I": IDENTITY_2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}

Dims = tuple


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _check_dims(dims, size: int) -> tuple:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ArgumentError(f"subsystem dimensions must be positive, got {dims}")
    if prod(dims) != size:
        raise ArgumentError(f"layout {dims} does not match dimension {size}")
    return dims


class StateVector:
    """A normalized ket over a subsystem layout."""

    def __init__(self, amplitudes, dims: Sequence[int] | None = None, *, normalize: bool = False):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            n = np.linalg.norm(amps)
            if n == 0:
                raise ArgumentError("cannot normalize the zero vector")
            amps = amps / n
        elif abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ArgumentError(f"state vector norm {np.linalg.norm(amps):.3e} != 1")
        self.amplitudes = _frozen(amps)
        self.dims = _check_dims(dims if dims is not None else (amps.size,), amps.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self) -> str:
        return f"StateVector(dims={self.dims}, amplitudes={np.round(self.amplitudes, 6)!r})"


class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix over a layout.

    Construction validates the invariants unless ``validate=False`` is passed;
    internal code uses the unchecked path only for intermediate results whose
    validity follows from the inputs.
    """

    def __init__(self, matrix, dims: Sequence[int] | None = None, *, validate: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError(f"density operator must be square, got shape {m.shape}")
        self.matrix = _frozen(m)
        self.dims = _check_dims(dims if dims is not None else (m.shape[0],), m.shape[0])
        if validate:
            self.validate()

    def validate(self) -> None:
        m = self.matrix
        herm_err = np.abs(m - m.conj().T).max()
        if herm_err > HERMITIAN_TOL:
            raise ArgumentError(f"density operator not Hermitian (max deviation {herm_err:.2e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ArgumentError(f"density operator trace {tr!r} != 1")
        lam_min = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
        if lam_min < -PSD_TOL:
            raise ArgumentError(f"density operator not PSD (min eigenvalue {lam_min:.3e})")

    @classmethod
    def from_state(cls, state) -> "DensityOperator":
        if isinstance(state, DensityOperator):
            return state
        if isinstance(state, StateVector):
            return state.density()
        return StateVector(state).density()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self.dims})"


Operand = Union[np.ndarray, StateVector, DensityOperator]


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(index: int, dim: int) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    p[index, index] = 1.0
    return p


def tensor(*items: Operand):
    """Kronecker product with the first argument outermost.

    Plain arrays give a plain array. If every argument is a ``DensityOperator``
    (or every one a ``StateVector``) the result carries the concatenated layout.
    """
    if not items:
        raise ArgumentError("tensor needs at least one operand")
    if all(isinstance(x, DensityOperator) for x in items):
        out = items[0].matrix
        for x in items[1:]:
            out = np.kron(out, x.matrix)
        return DensityOperator(out, sum((x.dims for x in items), ()), validate=False)
    if all(isinstance(x, StateVector) for x in items):
        out = items[0].amplitudes
        for x in items[1:]:
            out = np.kron(out, x.amplitudes)
        return StateVector(out, sum((x.dims for x in items), ()))
    out = np.asarray(items[0], dtype=complex)
    for x in items[1:]:
        out = np.kron(out, np.asarray(x, dtype=complex))
    return out


def embed_operator(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    """Lift an operator on subsystem ``index`` to the full layout."""
    dims = tuple(dims)
    if not 0 <= index < len(dims):
        raise ArgumentError(f"subsystem index {index} out of range for layout {dims}")
    op = np.asarray(op, dtype=complex)
    if op.shape != (dims[index], dims[index]):
        raise ArgumentError(f"operator shape {op.shape} does not fit subsystem {index} of {dims}")
    left = np.eye(prod(dims[:index]), dtype=complex)
    right = np.eye(prod(dims[index + 1:]), dtype=complex)
    return np.kron(np.kron(left, op), right)


def _check_subsystems(indices: Iterable[int], dims: tuple) -> list[int]:
    out = sorted(set(int(i) for i in indices))
    for i in out:
        if not 0 <= i < len(dims):
            raise ArgumentError(f"subsystem index {i} invalid for layout {dims}")
    return out


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the subsystems in ``keep`` (returned in layout order)."""
    dims = rho.dims
    keep = _check_subsystems(keep, dims)
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    live = n
    for i in reversed(range(n)):
        if i in keep:
            continue
        t = np.trace(t, axis1=i, axis2=i + live)
        live -= 1
    kept = tuple(dims[i] for i in keep)
    d = prod(kept)
    return DensityOperator(t.reshape(d, d), kept, validate=False)


def project_subsystem(rho: DensityOperator, subsystem: int, basis_state: int):
    """Condition on subsystem ``subsystem`` being found in ``basis_state``.

    Returns ``(conditional_state, probability)`` where the conditional state
    lives on the remaining subsystems.
    """
    dims = rho.dims
    (subsystem,) = _check_subsystems([subsystem], dims)
    if not 0 <= basis_state < dims[subsystem]:
        raise ArgumentError(f"basis state {basis_state} outside subsystem of dimension {dims[subsystem]}")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    index = [slice(None)] * (2 * n)
    index[subsystem] = basis_state
    index[subsystem + n] = basis_state
    rest = tuple(d for i, d in enumerate(dims) if i != subsystem)
    d = prod(rest)
    block = t[tuple(index)].reshape(d, d)
    p = float(np.trace(block).real)
    if p < 1e-14:
        raise DegenerateProjectionError(
            f"projection of subsystem {subsystem} onto |{basis_state}> has probability {p:.3e}"
        )
    return DensityOperator(block / p, rest or (1,), validate=False), p


def is_hermitian(m, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.abs(m - m.conj().T).max(initial=0.0) <= tol


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching orthonormal eigenvectors (columns)."""
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ArgumentError("matrix is not Hermitian within 1e-9")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = hermitian_eigensystem(m)
    return float(np.abs(w).sum())


def general_eigenvalues(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"square matrix required, got shape {m.shape}")
    return np.linalg.eigvals(m)


def real_spectrum(m, imag_tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues of a matrix known to have a real spectrum, sorted descending.

    Raises ``ConsistencyError`` if any imaginary part exceeds ``imag_tol``.
    """
    ev = general_eigenvalues(m)
    worst = np.abs(ev.imag).max(initial=0.0)
    if worst > imag_tol:
        raise ConsistencyError(f"expected a real spectrum, found imaginary part {worst:.3e}")
    return np.sort(ev.real)[::-1]


def apply_unitary(rho: DensityOperator, u: np.ndarray) -> DensityOperator:
    u = np.asarray(u, dtype=complex)
    return DensityOperator(u @ rho.matrix @ u.conj().T, rho.dims, validate=False)


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(np.asarray(m, dtype=complex)))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    a = np.asarray(rho, dtype=complex)
    b = np.asarray(sigma, dtype=complex)
    for x, y in ((a, b), (b, a)):
        w, v = np.linalg.eigh(hermitize(x))
        if w[-1] > 1 - 1e-10:
            psi = v[:, -1]
            return float(np.real(psi.conj() @ y @ psi))
    s = psd_sqrt(a)
    w = np.linalg.eigvalsh(hermitize(s @ b @ s))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def trace_distance(rho, sigma) -> float:
    return 0.5 * trace_norm(np.asarray(rho) - np.asarray(sigma))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random density matrix (rank ``dim`` by default)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
