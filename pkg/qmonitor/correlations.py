"""Pairwise correlations of two monitored qubits.

Two copies of the measured system (s1, s2), each with its potential source
(r) and detector (d), start in the entangled state a|00> + b|11>. Only one
excitation travels through each s-r-d chain, so each chain evolves as

    |1>_s |0>_r |0>_d  ->  xi |1,0,0> + eta |0,1,0> + chi |0,0,1>

and every pairwise cut (s1s2, r1r2, d1d2) is an X-state built from the
same template with the corresponding amplitude.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Tuple, Union

import numpy as np

from qmonitor import dynamics
from qmonitor.config import (
    ENTROPY_EIGEN_FLOOR,
    PSD_TOLERANCE,
    SQRT_CLAMP,
    STATE_TOLERANCE,
)
from qmonitor.exceptions import DomainViolation, InvalidDensityMatrix

logger = logging.getLogger(__name__)

__all__ = [
    "TriAmplitudes",
    "InitialPair",
    "TwoQubitDensity",
    "X_STATE_ZEROS",
    "tripartite_amplitudes",
    "reduced_density",
    "concurrence_closed_form",
    "wootters_concurrence_general",
    "binary_entropy",
    "quantum_correlation_closed_form",
    "von_neumann_entropy",
    "partial_trace",
    "entropies_and_mutual_information",
    "validate_density",
    "correlations_for_cut",
]

Cut = Literal["s", "r", "d"]

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

# Entradas (fila, columna), base 0, que son cero en un X-state.
X_STATE_ZEROS: Tuple[Tuple[int, int], ...] = (
    (0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2),
)


# ============================================================================
# Tipos
# ============================================================================


@dataclass(frozen=True)
class TriAmplitudes:
    """Amplitudes of system (xi), source (eta) and detector (chi) excitation."""

    xi: complex
    eta: complex
    chi: complex

    def for_cut(self, cut: Cut) -> complex:
        try:
            return {"s": self.xi, "r": self.eta, "d": self.chi}[cut]
        except KeyError:
            raise DomainViolation(f"unknown cut {cut!r}; expected one of s, r, d") from None

    @property
    def norm(self) -> float:
        return abs(self.xi) ** 2 + abs(self.eta) ** 2 + abs(self.chi) ** 2


@dataclass(frozen=True)
class InitialPair:
    """Initial two-qubit state a|00> + b|11>."""

    a: complex
    b: complex

    def __post_init__(self) -> None:
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > STATE_TOLERANCE:
            raise DomainViolation(f"initial pair is not normalised: |a|^2 + |b|^2 = {norm!r}")

    @classmethod
    def from_b(cls, b: float, *, a_phase: float = 0.0, b_phase: float = 0.0) -> "InitialPair":
        """Pair with real magnitude ``b`` and a = sqrt(1 - b^2), plus optional phases."""

        if not 0.0 <= b <= 1.0:
            raise DomainViolation(f"b must lie in [0, 1], got {b!r}")
        a_mag = math.sqrt(1.0 - b * b)
        return cls(a=a_mag * np.exp(1j * a_phase), b=b * np.exp(1j * b_phase))


@dataclass(frozen=True)
class TwoQubitDensity:
    """4x4 density matrix in the basis |00>, |01>, |10>, |11>."""

    m: np.ndarray = field(repr=False)
    cut: Optional[str] = None

    def __post_init__(self) -> None:
        matrix = np.array(self.m, dtype=complex)
        if matrix.shape != (4, 4):
            raise InvalidDensityMatrix(f"expected a 4x4 matrix, got shape {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "m", matrix)

    def is_x_state(self, atol: float = 0.0) -> bool:
        return all(abs(self.m[i, j]) <= atol for i, j in X_STATE_ZEROS)


DensityLike = Union[TwoQubitDensity, np.ndarray]


# ============================================================================
# Evolucion tripartita
# ============================================================================


def tripartite_amplitudes(
    rates: dynamics.MeasurementRates, v0: float, t: float
) -> TriAmplitudes:
    """(xi, eta, chi) at time ``t`` for a chain that starts with the system excited.

    xi and eta come from the closed forms (resonance required); chi collects
    the probability lost to the detector and is taken real non-negative.
    """

    xi, eta = dynamics.resonant_amplitudes(rates, v0, t)
    residue = 1.0 - abs(xi) ** 2 - abs(eta) ** 2
    if residue < 0.0:
        if residue < -STATE_TOLERANCE:
            logger.warning("negative detector population %.3e clamped to 0 (t=%g)", residue, t)
        residue = 0.0
    return TriAmplitudes(xi=xi, eta=eta, chi=complex(math.sqrt(residue)))


# ============================================================================
# Matriz densidad reducida
# ============================================================================


def _population(amp: complex) -> float:
    p = abs(amp) ** 2
    if p > 1.0 + STATE_TOLERANCE:
        raise DomainViolation(f"amplitude modulus exceeds 1: |amp|^2 = {p!r}")
    return min(p, 1.0)


def reduced_density(pair: InitialPair, amp: complex, which: Optional[Cut] = None) -> TwoQubitDensity:
    """X-state of one pairwise cut; ``amp`` is xi, eta or chi for ``which`` = s, r or d."""

    amp = complex(amp)
    p = _population(amp)
    a, b = complex(pair.a), complex(pair.b)
    b2 = abs(b) ** 2

    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = abs(a) ** 2 + b2 * (1.0 - p) ** 2
    m[1, 1] = m[2, 2] = b2 * p * (1.0 - p)
    m[3, 3] = b2 * p * p
    m[0, 3] = a * b.conjugate() * amp.conjugate() ** 2
    m[3, 0] = a.conjugate() * b * amp ** 2
    return TwoQubitDensity(m, cut=which)


def validate_density(rho: DensityLike) -> TwoQubitDensity:
    """Check Hermiticity, unit trace and positivity; raise InvalidDensityMatrix."""

    state = rho if isinstance(rho, TwoQubitDensity) else TwoQubitDensity(rho)
    m = state.m
    if not np.all(np.isfinite(m)):
        raise InvalidDensityMatrix("density matrix contains non-finite entries")

    herm_error = float(np.max(np.abs(m - m.conj().T)))
    if herm_error > STATE_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix is not Hermitian (max |m - m^dag| = {herm_error:.3e})")

    trace = complex(np.trace(m))
    if abs(trace - 1.0) > STATE_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix trace is {trace!r}, expected 1")

    min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
    if min_eig < -PSD_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return state


# ============================================================================
# Concurrencia
# ============================================================================


def concurrence_closed_form(pair: InitialPair, amp: complex, *, raw: bool = False) -> float:
    """max{0, 2|b| |amp|^2 (|a| - |b| (1 - |amp|^2))}.

    With ``raw=True`` the value before the clamp at 0 is returned.
    """

    p = _population(amp)
    value = 2.0 * abs(pair.b) * p * (abs(pair.a) - abs(pair.b) * (1.0 - p))
    return value if raw else max(0.0, value)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.where(w > ENTROPY_EIGEN_FLOOR, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def wootters_concurrence_general(rho: DensityLike) -> float:
    """Spin-flip concurrence for an arbitrary two-qubit state.

    The square roots of the eigenvalues of rho (YY rho* YY) are obtained as
    the singular values of sqrt(rho~) sqrt(rho), so small ones keep their
    absolute accuracy instead of going through a square root of round-off.
    """

    m = validate_density(rho).m
    root = _psd_sqrt(m)
    root_tilde = SPIN_FLIP @ root.conj() @ SPIN_FLIP
    roots = np.linalg.svd(root_tilde @ root, compute_uv=False)
    return max(0.0, float(roots[0] - roots[1:].sum()))


# ============================================================================
# Entropias y correlacion cuantica
# ============================================================================


def binary_entropy(x: float) -> float:
    """Shannon entropy in bits with H(0) = H(1) = 0."""

    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def quantum_correlation_closed_form(pair: InitialPair, amp: complex) -> float:
    """Q = H(|b|^2 |amp|^2) - H((1 + sqrt(1 - 4 |b|^2 |amp|^2 (1 - |amp|^2))) / 2).

    Every (1 - amp^2) factor is read as the population 1 - |amp|^2.
    """

    p = _population(amp)
    weight = abs(pair.b) ** 2 * p
    arg = 1.0 - 4.0 * weight * (1.0 - p)
    if arg < 0.0:
        if arg < -SQRT_CLAMP:
            logger.warning("square-root argument %.3e clamped to 0", arg)
        arg = 0.0
    q = binary_entropy(weight) - binary_entropy(0.5 * (1.0 + math.sqrt(arg)))
    return min(max(q, 0.0), 1.0)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -tr(rho log2 rho); eigenvalues below the floor count as zero."""

    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    eigs = eigs[eigs > ENTROPY_EIGEN_FLOOR]
    return float(-np.sum(eigs * np.log2(eigs)))


def partial_trace(rho: DensityLike, keep: int) -> np.ndarray:
    """Reduced 2x2 state of qubit ``keep`` (0 = left, 1 = right)."""

    m = rho.m if isinstance(rho, TwoQubitDensity) else np.asarray(rho, dtype=complex)
    tensor = m.reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", tensor)
    if keep == 1:
        return np.einsum("ijil->jl", tensor)
    raise ValueError(f"keep must be 0 or 1, got {keep!r}")


def entropies_and_mutual_information(rho: DensityLike) -> Tuple[float, float, float, float]:
    """(S(rho12), S(rho1), S(rho2), I) with I = S(rho1) + S(rho2) - S(rho12)."""

    state = validate_density(rho)
    s_joint = von_neumann_entropy(state.m)
    s_left = von_neumann_entropy(partial_trace(state, 0))
    s_right = von_neumann_entropy(partial_trace(state, 1))
    return s_joint, s_left, s_right, s_left + s_right - s_joint


def correlations_for_cut(pair: InitialPair, amps: TriAmplitudes, cut: Cut) -> Tuple[float, float]:
    """(Q, C) for the s1s2, r1r2 or d1d2 cut."""

    amp = amps.for_cut(cut)
    return quantum_correlation_closed_form(pair, amp), concurrence_closed_form(pair, amp)
