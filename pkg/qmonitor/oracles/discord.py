"""Classical correlation and discord by explicit measurement optimisation."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from qmonitor.config import ENTROPY_EIGEN_FLOOR
from qmonitor.correlations import (
    DensityLike,
    entropies_and_mutual_information,
    validate_density,
)

logger = logging.getLogger(__name__)

__all__ = ["DiscordResult", "discord_brute_force"]

DEFAULT_GRID = 64
ANGLE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DiscordResult:
    classical_corr: float
    quantum_corr: float
    mutual_information: float
    theta: float
    phi: float

    def __iter__(self):
        # (C, Q) para desempaquetar como tupla
        yield self.classical_corr
        yield self.quantum_corr


def _projectors(theta, phi):
    """Rank-1 projectors (I +/- n.sigma)/2 for n(theta, phi), stacked on leading axes."""

    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    nx = np.sin(theta) * np.cos(phi)
    ny = np.sin(theta) * np.sin(phi)
    nz = np.cos(theta)

    n_sigma = np.empty(theta.shape + (2, 2), dtype=complex)
    n_sigma[..., 0, 0] = nz
    n_sigma[..., 0, 1] = nx - 1j * ny
    n_sigma[..., 1, 0] = nx + 1j * ny
    n_sigma[..., 1, 1] = -nz
    identity = np.eye(2, dtype=complex)
    return 0.5 * (identity + n_sigma), 0.5 * (identity - n_sigma)


def _weighted_entropy(unnormalised: np.ndarray) -> np.ndarray:
    """p S(sigma / p) for a stack of unnormalised 2x2 conditional states, in bits."""

    herm = 0.5 * (unnormalised + np.conj(np.swapaxes(unnormalised, -1, -2)))
    eigs = np.clip(np.linalg.eigvalsh(herm), 0.0, None)
    prob = eigs.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(eigs > ENTROPY_EIGEN_FLOOR, eigs / np.where(prob > 0, prob, 1.0), 1.0)
        terms = np.where(eigs > ENTROPY_EIGEN_FLOOR, -eigs * np.log2(ratio), 0.0)
    return terms.sum(axis=-1)


def _conditional_entropy(tensor: np.ndarray, theta, phi) -> np.ndarray:
    """Sum_j p_j S(rho_1|j) after measuring qubit 2 along n(theta, phi)."""

    plus, minus = _projectors(theta, phi)
    # Tr_2[(I x P) rho]_{ik} = sum_{a,b} P_{ab} rho_{(i b),(k a)}
    cond_plus = np.einsum("...ab,ibka->...ik", plus, tensor)
    cond_minus = np.einsum("...ab,ibka->...ik", minus, tensor)
    return _weighted_entropy(cond_plus) + _weighted_entropy(cond_minus)


def discord_brute_force(
    rho: DensityLike, *, grid: int = DEFAULT_GRID, xatol: float = ANGLE_TOLERANCE
) -> DiscordResult:
    """Maximise the classical correlation over projective measurements on qubit 2.

    C = S(rho_1) - min_n sum_j p_j S(rho_1|j) and Q = I - C. A ``grid`` x
    ``grid`` scan over the polar and azimuthal angles seeds a Nelder-Mead
    refinement to ``xatol`` in the angles.
    """

    state = validate_density(rho)
    tensor = state.m.reshape(2, 2, 2, 2)
    _, s_left, _, mutual = entropies_and_mutual_information(state)

    thetas = np.linspace(0.0, np.pi, grid)
    phis = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    theta_grid, phi_grid = np.meshgrid(thetas, phis, indexing="ij")
    costs = _conditional_entropy(tensor, theta_grid, phi_grid)
    best = np.unravel_index(int(np.argmin(costs)), costs.shape)
    x0 = np.array([theta_grid[best], phi_grid[best]])

    result = minimize(
        lambda x: float(_conditional_entropy(tensor, x[0], x[1])),
        x0,
        method="Nelder-Mead",
        options={"xatol": xatol, "fatol": 1e-14, "maxiter": 4000},
    )
    min_cost = min(float(result.fun), float(costs[best]))
    theta, phi = (result.x if result.fun <= costs[best] else x0)

    classical = max(s_left - min_cost, 0.0)
    quantum = max(mutual - classical, 0.0)
    logger.debug(
        "discord: C=%.9f Q=%.9f I=%.9f at theta=%.6f phi=%.6f (nit=%d)",
        classical, quantum, mutual, theta, phi, result.nit,
    )
    return DiscordResult(
        classical_corr=classical,
        quantum_corr=quantum,
        mutual_information=mutual,
        theta=float(theta),
        phi=float(phi),
    )
