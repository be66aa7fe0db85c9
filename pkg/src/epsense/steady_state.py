"""Classical mean fields and optically induced damping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NoConvergence
from .params import DerivedParams, SystemParams

DETUNING_MODES = ("bare", "sideband")


@dataclass(frozen=True)
class SteadyState:
    alpha_1: complex
    alpha_2: complex
    beta_1: complex
    beta_2: complex
    Delta_eff_1: float
    Delta_eff_2: float
    G_1: float
    G_2: float
    Gamma_1: float
    Gamma_2: float
    Gamma: float
    Gamma_eff_1: float
    Gamma_eff_2: float
    sideband_mismatch: float
    on_sideband: bool
    iterations: int = 0


def cavity_amplitude(kappa: float, alpha_in: float, detuning: float) -> complex:
    return math.sqrt(kappa) * alpha_in / complex(kappa / 2.0, detuning)


def mechanical_mean_fields(derived: DerivedParams, n_photons: tuple[float, float]) -> tuple[complex, complex]:
    """Stationary beta_j of the coupled mechanical mean-field equations."""
    a = np.array([
        [1j * derived.Delta_m_1 + derived.gamma_1 / 2, -1j * derived.J_tilde],
        [-1j * derived.J_tilde, 1j * derived.Delta_m_2 + derived.gamma_2 / 2],
    ])
    rhs = 1j * np.array([derived.g_tilde_1 * n_photons[0], derived.g_tilde_2 * n_photons[1]])
    b1, b2 = np.linalg.solve(a, rhs)
    return complex(b1), complex(b2)


def _sideband_detunings(derived: DerivedParams) -> tuple[float, float]:
    return -derived.Delta_m_1, derived.Delta_m_2


def _assemble(params, derived, alphas, betas, detunings, iterations=0) -> SteadyState:
    # G_j is |g alpha_j|: the intracavity amplitude is taken real and its phase dropped
    g1 = derived.g_tilde_1 * abs(alphas[0])
    g2 = derived.g_tilde_2 * abs(alphas[1])
    kappa = params.kappa
    gam1 = 4.0 * g1 * g1 / kappa
    gam2 = 4.0 * g2 * g2 / kappa
    gam = 0.5 * (gam1 + gam2)
    sb = _sideband_detunings(derived)
    mismatch = max(abs(detunings[0] - sb[0]), abs(detunings[1] - sb[1]))
    return SteadyState(
        alpha_1=alphas[0],
        alpha_2=alphas[1],
        beta_1=betas[0],
        beta_2=betas[1],
        Delta_eff_1=detunings[0],
        Delta_eff_2=detunings[1],
        G_1=g1,
        G_2=g2,
        Gamma_1=gam1,
        Gamma_2=gam2,
        Gamma=gam,
        Gamma_eff_1=derived.gamma_1 + gam,
        Gamma_eff_2=derived.gamma_2 - gam,
        sideband_mismatch=mismatch,
        on_sideband=mismatch <= kappa / 2.0,
        iterations=iterations,
    )


def solve_ideal(params: SystemParams, derived: DerivedParams, detuning: str = "bare") -> SteadyState:
    """Mean fields with the detunings pinned, no mechanical back-action.

    ``detuning="bare"`` uses the laser detunings Delta_j as given;
    ``"sideband"`` pins cavity 1 (2) exactly on the red (blue) sideband of
    the squeezed mechanical mode.
    """
    if detuning == "bare":
        dets = (params.Delta_1, params.Delta_2)
    elif detuning == "sideband":
        dets = _sideband_detunings(derived)
    else:
        raise InvalidParams(f"unknown detuning mode {detuning!r}; expected one of {DETUNING_MODES}")
    alphas = tuple(cavity_amplitude(params.kappa, params.alpha_in, d) for d in dets)
    betas = mechanical_mean_fields(derived, (abs(alphas[0]) ** 2, abs(alphas[1]) ** 2))
    return _assemble(params, derived, alphas, betas, dets)


def solve_self_consistent(params: SystemParams, derived: DerivedParams, tol: float = 1e-12,
                          max_iter: int = 10000, relaxation: float = 0.5) -> SteadyState:
    """Fixed point of the coupled alpha/beta/detuning mean-field problem.

    Under-relaxed iteration on the effective detunings
    Delta_eff_j = Delta_j + 2 g_j Re(beta_j). Converged when the relative
    change of the detunings drops below ``tol``.
    """
    if not tol > 0:
        raise InvalidParams("tol must be > 0")
    if max_iter < 1:
        raise InvalidParams("max_iter must be >= 1")
    bare = np.array([params.Delta_1, params.Delta_2])
    gt = np.array([derived.g_tilde_1, derived.g_tilde_2])
    scale = max(float(np.max(np.abs(bare))), params.kappa)
    dets = bare.copy()
    residual = math.inf
    for it in range(1, max_iter + 1):
        alphas = [cavity_amplitude(params.kappa, params.alpha_in, d) for d in dets]
        betas = mechanical_mean_fields(derived, (abs(alphas[0]) ** 2, abs(alphas[1]) ** 2))
        target = bare + 2.0 * gt * np.array([betas[0].real, betas[1].real])
        residual = float(np.max(np.abs(target - dets))) / scale
        if residual < tol:
            break
        dets = (1.0 - relaxation) * dets + relaxation * target
    else:
        raise NoConvergence(max_iter, residual)
    return _assemble(params, derived, tuple(alphas), betas, (float(dets[0]), float(dets[1])), it)
