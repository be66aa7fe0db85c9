"""Input-output scattering coefficients, cavity transmissions and output spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import InvalidParams, PoleHit
from .params import DerivedParams, SystemParams, derive
from .steady_state import SteadyState, solve_ideal

POLE_TOL = 1e-300
DEFAULT_POINTS = 2001
DEFAULT_HALF_WIDTH = 0.1


@dataclass(frozen=True)
class ScatteringMatrix:
    s11: complex
    s12: complex
    s13: complex
    s14: complex
    s21: complex
    s22: complex
    s23: complex
    s24: complex


@dataclass(frozen=True)
class SpectrumGrid:
    omega: np.ndarray
    s11_sq: np.ndarray
    s22_sq: np.ndarray
    s_out_1: np.ndarray
    s_out_2: np.ndarray

    def columns(self) -> dict[str, np.ndarray]:
        return {"omega": self.omega, "s11_sq": self.s11_sq, "s22_sq": self.s22_sq,
                "s_out_1": self.s_out_1, "s_out_2": self.s_out_2}


def default_grid(derived: DerivedParams, points: int = DEFAULT_POINTS,
                 half_width: float = DEFAULT_HALF_WIDTH) -> np.ndarray:
    centre = 0.5 * (derived.Delta_m_1 + derived.Delta_m_2)
    return np.linspace(centre - half_width, centre + half_width, points)


def _check_grid(omega: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size < 1:
        raise InvalidParams("frequency grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(omega)):
        raise InvalidParams("frequency grid must be finite")
    if omega.size > 1 and not np.all(np.diff(omega) > 0):
        raise InvalidParams("frequency grid must be strictly increasing")
    return omega


def _coefficients(params: SystemParams, derived: DerivedParams, steady: SteadyState, omega):
    """All eight coefficients, vectorised over ``omega`` (array in, arrays out)."""
    if derived.gamma_1 < 0 or derived.gamma_2 < 0:
        raise InvalidParams("mechanical noise injection needs non-negative damping rates")
    omega = np.asarray(omega, dtype=float)
    j = derived.J_tilde
    xi1 = steady.Gamma_eff_1 / 2 + 1j * (derived.Delta_m_1 - omega)
    xi2 = steady.Gamma_eff_2 / 2 + 1j * (derived.Delta_m_2 - omega)
    xi_eff = xi1 * xi2 + j * j
    bad = np.abs(xi_eff) < POLE_TOL
    if np.any(bad):
        raise PoleHit(float(np.atleast_1d(omega)[np.argmax(np.atleast_1d(bad))]))

    pre = 2.0 / (math.sqrt(params.kappa) * xi_eff)
    g1, g2 = steady.G_1, steady.G_2
    sq_gam1, sq_gam2 = math.sqrt(steady.Gamma_1), math.sqrt(steady.Gamma_2)
    sq_g1, sq_g2 = math.sqrt(derived.gamma_1), math.sqrt(derived.gamma_2)
    return (
        1.0 - pre * g1 * xi2 * sq_gam1,
        -1j * pre * g1 * j * sq_gam2,
        1j * pre * g1 * xi2 * sq_g1,
        pre * g1 * j * sq_g2,
        1j * pre * g2 * j * sq_gam1,
        1.0 + pre * g2 * xi1 * sq_gam2,
        pre * g2 * j * sq_g1,
        -1j * pre * g2 * xi1 * sq_g2,
    )


def smatrix(params: SystemParams, derived: DerivedParams, steady: SteadyState, omega: float) -> ScatteringMatrix:
    return ScatteringMatrix(*(complex(c) for c in _coefficients(params, derived, steady, float(omega))))


def _prepare(params: SystemParams, grid, detuning: str):
    derived = derive(params)
    steady = solve_ideal(params, derived, detuning)
    omega = default_grid(derived) if grid is None else _check_grid(grid)
    return derived, steady, omega


def transmission_spectrum(params: SystemParams, grid=None, detuning: str = "bare") -> SpectrumGrid:
    """|S11|^2 and |S22|^2 on ``grid`` (default: 2001 points, +-0.1 around Dm)."""
    return output_spectrum(params, grid, detuning)


def output_spectrum(params: SystemParams, grid=None, detuning: str = "bare") -> SpectrumGrid:
    """Transmissions plus symmetrized output spectra of both cavities.

    Mechanical inputs are weighted by (2 N_s + 1); the cross moments M_s are
    not part of these spectra.
    """
    derived, steady, omega = _prepare(params, grid, detuning)
    s11, s12, s13, s14, s21, s22, s23, s24 = (np.abs(c) ** 2 for c in _coefficients(params, derived, steady, omega))
    w1 = 2.0 * derived.N_s_1 + 1.0
    w2 = 2.0 * derived.N_s_2 + 1.0
    return SpectrumGrid(
        omega=omega,
        s11_sq=s11,
        s22_sq=s22,
        s_out_1=s11 + s12 + w1 * s13 + w2 * s14,
        s_out_2=s21 + s22 + w1 * s23 + w2 * s24,
    )


def peak_indices(values: np.ndarray) -> np.ndarray:
    """Indices of interior local maxima."""
    return signal.find_peaks(np.asarray(values, dtype=float))[0]
