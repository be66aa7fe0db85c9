"""Physical inputs and the squeeze-dressed ("tilded") quantities.

All rates and frequencies are in units of the mechanical frequency, drive
amplitudes in units of its square root. The defaults reproduce the Fig.-1
operating point of the two-cavity sensor (red-detuned cavity 1, blue-detuned
cavity 2, no parametric drive, drive strength near the exceptional point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import InvalidParams, NonPositiveRate, SqueezeDiverges


@dataclass(frozen=True)
class Perturbation:
    """Sensing perturbations; all zero means the unperturbed reference.

    ``delta_omega`` shifts resonator 2 (mass deposition), ``delta_gamma`` is
    added to the damping of resonator 1, ``delta_chi_j`` are fluctuations of
    the parametric drives.
    """

    delta_omega: float = 0.0
    delta_gamma: float = 0.0
    delta_chi_1: float = 0.0
    delta_chi_2: float = 0.0

    def is_zero(self) -> bool:
        return not any((self.delta_omega, self.delta_gamma, self.delta_chi_1, self.delta_chi_2))


@dataclass(frozen=True)
class SystemParams:
    omega_1: float = 1.0
    omega_2: float = 1.0
    omega_d: float = 0.0
    chi_1: float = 0.0
    chi_2: float = 0.0
    phi_d: float = 0.0
    g: float = 2.5e-4
    J_m: float = 2.2e-2
    kappa: float = 0.1
    gamma_m: float = 1e-3
    Delta_1: float = -1.0
    Delta_2: float = 1.0
    alpha_in: float = 420.0
    n_th_1: float = 0.0
    n_th_2: float = 0.0
    perturbation: Perturbation = field(default_factory=Perturbation)

    # Perturbations are folded exactly here, so every consumer sees the
    # perturbed system through the same three accessors.
    def omega_tilde(self) -> tuple[float, float]:
        return (self.omega_1 - self.omega_d,
                self.omega_2 + self.perturbation.delta_omega - self.omega_d)

    def chis(self) -> tuple[float, float]:
        p = self.perturbation
        return self.chi_1 + p.delta_chi_1, self.chi_2 + p.delta_chi_2

    def gammas(self) -> tuple[float, float]:
        return self.gamma_m + self.perturbation.delta_gamma, self.gamma_m

    def with_chi(self, chi: float) -> SystemParams:
        """Set both parametric drives to the same amplitude."""
        return replace(self, chi_1=chi, chi_2=chi)

    def perturbed(self, perturbation: Perturbation) -> SystemParams:
        return replace(self, perturbation=perturbation)

    def unperturbed(self) -> SystemParams:
        return replace(self, perturbation=Perturbation())


@dataclass(frozen=True)
class DerivedParams:
    r_1: float
    r_2: float
    g_tilde_1: float
    g_tilde_2: float
    Delta_m_1: float
    Delta_m_2: float
    J_tilde: float
    N_s_1: float
    N_s_2: float
    M_s_1: float
    M_s_2: float
    # folded inputs, kept so downstream code never re-reads the perturbation
    omega_tilde_1: float
    omega_tilde_2: float
    chi_1: float
    chi_2: float
    gamma_1: float
    gamma_2: float

    @property
    def r_mean(self) -> float:
        return 0.5 * (self.r_1 + self.r_2)

    @property
    def g_tilde(self) -> float:
        return 0.5 * (self.g_tilde_1 + self.g_tilde_2)


def squeeze_parameter(omega_tilde: float, chi: float) -> float:
    """r = (1/4) ln((w + chi)/(w - chi)); raises when |chi| >= w."""
    if omega_tilde <= 0:
        raise InvalidParams(f"shifted mechanical frequency must be positive, got {omega_tilde!r}")
    if abs(chi) >= omega_tilde:
        raise SqueezeDiverges(f"|chi|={abs(chi)!r} >= omega_tilde={omega_tilde!r}")
    # atanh form avoids the log-ratio cancellation for small chi
    return 0.5 * math.atanh(chi / omega_tilde)


def squeezed_frequency(omega_tilde: float, chi: float) -> float:
    if abs(chi) >= omega_tilde:
        raise SqueezeDiverges(f"|chi|={abs(chi)!r} >= omega_tilde={omega_tilde!r}")
    return math.sqrt((omega_tilde - chi) * (omega_tilde + chi))


def squeeze_moments(n_th: float, r: float) -> tuple[float, float]:
    """Squeezed thermal moments (N_s, M_s) of a bath with occupation ``n_th``."""
    sh, ch = math.sinh(r), math.cosh(r)
    return (n_th + 1.0) * sh * sh + n_th * ch * ch, (2.0 * n_th + 1.0) * sh * ch


def validate(params: SystemParams) -> None:
    if not params.kappa > 0:
        raise NonPositiveRate(f"kappa must be > 0, got {params.kappa!r}")
    if params.gamma_m < 0:
        raise InvalidParams(f"gamma_m must be >= 0, got {params.gamma_m!r}")
    if params.J_m < 0:
        raise InvalidParams(f"J_m must be >= 0, got {params.J_m!r}")
    if params.n_th_1 < 0 or params.n_th_2 < 0:
        raise InvalidParams("thermal occupations must be >= 0")
    if params.phi_d != 0:
        raise InvalidParams("only phi_d = 0 is supported")


def derive(params: SystemParams) -> DerivedParams:
    validate(params)
    w1, w2 = params.omega_tilde()
    c1, c2 = params.chis()
    r1 = squeeze_parameter(w1, c1)
    r2 = squeeze_parameter(w2, c2)
    ns1, ms1 = squeeze_moments(params.n_th_1, r1)
    ns2, ms2 = squeeze_moments(params.n_th_2, r2)
    gam1, gam2 = params.gammas()
    return DerivedParams(
        r_1=r1,
        r_2=r2,
        g_tilde_1=params.g * math.exp(-r1),
        g_tilde_2=params.g * math.exp(-r2),
        Delta_m_1=squeezed_frequency(w1, c1),
        Delta_m_2=squeezed_frequency(w2, c2),
        J_tilde=params.J_m * math.cosh(r1 + r2),
        N_s_1=ns1,
        N_s_2=ns2,
        M_s_1=ms1,
        M_s_2=ms2,
        omega_tilde_1=w1,
        omega_tilde_2=w2,
        chi_1=c1,
        chi_2=c2,
        gamma_1=gam1,
        gamma_2=gam2,
    )
