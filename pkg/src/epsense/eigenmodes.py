"""Effective two-mode non-Hermitian Hamiltonian, its exceptional point and
the sensitivity of the eigenvalues to perturbations.

The effective Hamiltonian acts on the mechanical fluctuations after the
cavities are eliminated::

    H = [[Dm1 - i Geff1/2,      -J        ],
         [      -J,        Dm2 - i Geff2/2]]

and the dynamics matrix is M = -i H.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np
from scipy import optimize

from .errors import NoEPInBracket, NonPositiveMass, ZeroPerturbation
from .params import DerivedParams, Perturbation, SystemParams, derive
from .steady_state import SteadyState, solve_ideal

# a drive value counts as an EP when the eigenvalue gap is below this [omega_m]
EP_GAP_TOL = 1e-6
DEFAULT_BRACKET = (1.0, 5000.0)
SCHEMES = ("splitting", "shifting")


@dataclass(frozen=True)
class EffectiveHamiltonian:
    h11: complex
    h12: complex
    h21: complex
    h22: complex

    def matrix(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h21, self.h22]], dtype=complex)

    def dynamics_matrix(self) -> np.ndarray:
        return -1j * self.matrix()

    @property
    def trace(self) -> complex:
        return self.h11 + self.h22

    @property
    def det(self) -> complex:
        return self.h11 * self.h22 - self.h12 * self.h21


@dataclass(frozen=True)
class EigenPair:
    lambda_plus: complex
    lambda_minus: complex
    branch_rule: str = "real-desc"

    @property
    def gap(self) -> float:
        return abs(self.lambda_plus - self.lambda_minus)

    def swapped(self, rule: str) -> EigenPair:
        return EigenPair(self.lambda_minus, self.lambda_plus, rule)


@dataclass(frozen=True)
class EPResult:
    alpha_in_ep: float
    lambda_ep: complex
    gap: float
    Gamma_ep: float
    delta_Gamma_eff: float
    method: str
    params: SystemParams


def build_heff(params: SystemParams, derived: DerivedParams, steady: SteadyState) -> EffectiveHamiltonian:
    hop = -derived.J_tilde
    return EffectiveHamiltonian(
        h11=complex(derived.Delta_m_1, -steady.Gamma_eff_1 / 2),
        h12=complex(hop),
        h21=complex(hop),
        h22=complex(derived.Delta_m_2, -steady.Gamma_eff_2 / 2),
    )


def effective_hamiltonian(params: SystemParams, detuning: str = "bare") -> EffectiveHamiltonian:
    """derive -> ideal steady state -> H_eff in one call."""
    derived = derive(params)
    return build_heff(params, derived, solve_ideal(params, derived, detuning))


def half_discriminant(h: EffectiveHamiltonian) -> complex:
    """sigma/4, i.e. sqrt(((h11-h22)/2)^2 + h12 h21).

    Evaluated as a product of two factors so that the cancellation at the
    exceptional point happens in one subtraction instead of between squares.
    """
    half_diff = 0.5 * (h.h11 - h.h22)
    q = cmath.sqrt(h.h12 * h.h21)
    return cmath.sqrt((half_diff + 1j * q) * (half_diff - 1j * q))


def sigma(h: EffectiveHamiltonian) -> complex:
    return 4.0 * half_discriminant(h)


def order_pair(a: complex, b: complex) -> tuple[complex, complex]:
    tie = 1e-12 * max(1.0, abs(a.real), abs(b.real))
    if abs(a.real - b.real) <= tie:
        return (a, b) if a.imag >= b.imag else (b, a)
    return (a, b) if a.real > b.real else (b, a)


def eigenvalues(h: EffectiveHamiltonian) -> EigenPair:
    """Closed-form roots, ordered by descending real part (ties: imaginary)."""
    mean = 0.5 * h.trace
    s = half_discriminant(h)
    lp, lm = order_pair(mean + s, mean - s)
    return EigenPair(lp, lm, "real-desc")


def eigenvector(h: EffectiveHamiltonian, lam: complex) -> np.ndarray:
    a = np.array([h.h12, lam - h.h11])
    b = np.array([lam - h.h22, h.h21])
    v = a if np.linalg.norm(a) >= np.linalg.norm(b) else b
    n = np.linalg.norm(v)
    if n == 0.0:
        # diagonal and degenerate: any basis works
        v = np.array([1.0, 0.0], dtype=complex) if abs(lam - h.h11) <= abs(lam - h.h22) else np.array([0.0, 1.0], dtype=complex)
        n = 1.0
    return v / n


def _overlap(u: np.ndarray, v: np.ndarray) -> float:
    return abs(np.vdot(u, v))


def match_to(reference: tuple[np.ndarray, np.ndarray], h: EffectiveHamiltonian, pair: EigenPair) -> EigenPair:
    """Reorder ``pair`` so each branch keeps the eigenvector closest to ``reference``."""
    vp, vm = eigenvector(h, pair.lambda_plus), eigenvector(h, pair.lambda_minus)
    keep = _overlap(reference[0], vp) + _overlap(reference[1], vm)
    swap = _overlap(reference[0], vm) + _overlap(reference[1], vp)
    if swap > keep:
        return pair.swapped("overlap")
    return EigenPair(pair.lambda_plus, pair.lambda_minus, "overlap")


def track_branches(hams: Iterable[EffectiveHamiltonian]) -> list[EigenPair]:
    """Eigenvalues along a sweep with branch continuity by eigenvector overlap.

    The first point is ordered by descending real part; later points keep
    the labelling that maximises overlap with the previous eigenvectors.
    """
    out: list[EigenPair] = []
    ref = None
    for h in hams:
        pair = eigenvalues(h)
        if ref is not None:
            pair = match_to(ref, h, pair)
        # at an exact coalescence both vectors coincide; keep the old reference
        if ref is None or pair.gap > EP_GAP_TOL:
            ref = (eigenvector(h, pair.lambda_plus), eigenvector(h, pair.lambda_minus))
        out.append(pair)
    return out


def _gap_at(params: SystemParams, alpha_in: float, detuning: str) -> float:
    return eigenvalues(effective_hamiltonian(replace(params, alpha_in=alpha_in), detuning)).gap


def _golden_min(f, lo: float, hi: float, n_scan: int = 65) -> float:
    xs = np.linspace(lo, hi, n_scan)
    fs = [f(x) for x in xs]
    i = int(np.argmin(fs))
    if i == 0 or i == n_scan - 1:
        return float(xs[i])
    res = optimize.minimize_scalar(f, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden",
                                   options={"xtol": 1e-14, "maxiter": 500})
    return float(res.x)


def locate_ep(params: SystemParams, bracket: tuple[float, float] = DEFAULT_BRACKET,
              method: str = "auto", detuning: str = "bare") -> EPResult:
    """Drive strength alpha_in at which the two eigenvalues coalesce.

    With equal squeezed frequencies the coalescence condition is linear in
    the damping imbalance, Geff1 - Geff2 = 4 J, which is solved by bisection
    to machine precision. Otherwise the eigenvalue gap is minimised by
    golden-section search. ``method`` forces one or the other.
    """
    lo, hi = map(float, bracket)
    if not 0 <= lo < hi:
        raise NoEPInBracket(f"invalid bracket {bracket!r}")
    derived0 = derive(replace(params, alpha_in=lo))
    if derived0.J_tilde == 0.0:
        raise NoEPInBracket("uncoupled resonators (J_m = 0) have no exceptional point")
    if method == "auto":
        method = "bisect" if derived0.Delta_m_1 == derived0.Delta_m_2 else "golden"

    if method == "bisect":
        four_j = 4.0 * derived0.J_tilde

        def imbalance(a: float) -> float:
            p = replace(params, alpha_in=a)
            d = derive(p)
            s = solve_ideal(p, d, detuning)
            return (s.Gamma_eff_1 - s.Gamma_eff_2) - four_j

        f_lo, f_hi = imbalance(lo), imbalance(hi)
        if f_lo == 0.0:
            alpha = lo
        elif f_hi == 0.0:
            alpha = hi
        elif f_lo * f_hi > 0:
            raise NoEPInBracket(f"no sign change of the damping imbalance in {bracket!r}")
        else:
            alpha = optimize.bisect(imbalance, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
    elif method == "golden":
        alpha = _golden_min(lambda a: _gap_at(params, a, detuning), lo, hi)
    else:
        raise ValueError(f"unknown method {method!r}")

    pinned = replace(params, alpha_in=float(alpha))
    derived = derive(pinned)
    steady = solve_ideal(pinned, derived, detuning)
    h = build_heff(pinned, derived, steady)
    gap = eigenvalues(h).gap
    if gap >= EP_GAP_TOL:
        raise NoEPInBracket(f"smallest eigenvalue gap {gap:.3e} in {bracket!r} exceeds {EP_GAP_TOL:g}")
    return EPResult(
        alpha_in_ep=float(alpha),
        lambda_ep=0.5 * h.trace,
        gap=gap,
        Gamma_ep=steady.Gamma,
        delta_Gamma_eff=steady.Gamma_eff_1 - steady.Gamma_eff_2,
        method=method,
        params=pinned,
    )


def _pinned(params: SystemParams, ep: EPResult | None, detuning: str) -> EPResult:
    if ep is None:
        ep = locate_ep(params.unperturbed(), detuning=detuning)
    return ep


def delta_lambda_numeric(params: SystemParams, perturbation: Perturbation, ep: EPResult | None = None,
                         detuning: str = "bare") -> tuple[complex, complex]:
    """Exact eigenvalue response lambda^eps - lambda at the unperturbed EP drive."""
    if perturbation.is_zero():
        return 0j, 0j
    ep = _pinned(params, ep, detuning)
    base = ep.params.unperturbed()
    h0 = effective_hamiltonian(base, detuning)
    h1 = effective_hamiltonian(base.perturbed(perturbation), detuning)
    pair1 = eigenvalues(h1)
    pair0 = eigenvalues(h0)
    if pair0.gap < EP_GAP_TOL:
        return pair1.lambda_plus - ep.lambda_ep, pair1.lambda_minus - ep.lambda_ep
    ref = (eigenvector(h0, pair0.lambda_plus), eigenvector(h0, pair0.lambda_minus))
    pair1 = match_to(ref, h1, pair1)
    return pair1.lambda_plus - pair0.lambda_plus, pair1.lambda_minus - pair0.lambda_minus


@dataclass(frozen=True)
class AnalyticShift:
    """First-order eigenvalue response at the EP and its building blocks."""

    delta_omega_eps: float
    nu: float
    mu: complex
    sigma_ep: complex
    lambda_plus: complex
    lambda_minus: complex


def analytic_terms(params: SystemParams, perturbation: Perturbation, ep: EPResult | None = None,
                   detuning: str = "bare") -> AnalyticShift:
    ep = _pinned(params, ep, detuning)
    d = derive(ep.params.unperturbed())
    w1, w2 = d.omega_tilde_1, d.omega_tilde_2
    c1, c2 = d.chi_1, d.chi_2
    dm1, dm2 = d.Delta_m_1, d.Delta_m_2
    dw = perturbation.delta_omega
    dc1, dc2 = perturbation.delta_chi_1, perturbation.delta_chi_2
    dg = abs(perturbation.delta_gamma)
    dgam = ep.delta_Gamma_eff

    d_omega = 0.5 * (w2 * dw / dm2 - c2 * dc2 / dm2 - c1 * dc1 / dm1 - 0.5 * (c1 ** 2 / w1 + c2 ** 2 / w2))
    nu = 0.5 * (c2 ** 2 / w2 - c1 ** 2 / w1) + c2 * dc2 / dm2 - w2 * dw / dm2 - c1 * dc1 / dm1
    mu = 2.0 * (w1 - w2) - 1j * dgam
    sig = cmath.sqrt((8.0 * params.J_m * d.r_mean) ** 2 + 4 * nu ** 2 - 4j * nu * dg
                     + 4 * nu * mu - 2j * mu * dg)
    common = d_omega - 0.25j * dg
    return AnalyticShift(d_omega, nu, mu, sig, common + sig / 4, common - sig / 4)


def delta_lambda_analytic(params: SystemParams, perturbation: Perturbation, ep: EPResult | None = None,
                          detuning: str = "bare") -> tuple[complex, complex]:
    t = analytic_terms(params, perturbation, ep, detuning)
    return t.lambda_plus, t.lambda_minus


def _strength(perturbation: Perturbation, scheme: str) -> float:
    if scheme == "splitting":
        eps = perturbation.delta_omega
    elif scheme == "shifting":
        eps = perturbation.delta_gamma
    else:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if eps == 0.0:
        raise ZeroPerturbation(f"{scheme} scheme needs a non-zero perturbation strength")
    return abs(eps)


def enhancement_factor(params: SystemParams, perturbation: Perturbation, scheme: str = "splitting",
                       ep: EPResult | None = None, detuning: str = "bare") -> tuple[float, float]:
    """(eta_numeric, eta_analytic) for the splitting or shifting readout.

    The numeric factor is the half-splitting |Re(dl+ - dl-)| / 2 over the
    perturbation strength, which removes the common frequency pull of the
    perturbation. The analytic factor is sqrt(w2 dGeff / (8 Dm2 eps)) for
    splitting and sqrt(dGeff / (8 |dgamma|)) for shifting.
    """
    eps = _strength(perturbation, scheme)
    ep = _pinned(params, ep, detuning)
    dp, dm = delta_lambda_numeric(params, perturbation, ep, detuning)
    eta_num = abs((dp - dm).real) / (2.0 * eps)
    if scheme == "splitting":
        d = derive(ep.params.unperturbed())
        eta_an = math.sqrt(d.omega_tilde_2 / d.Delta_m_2 * ep.delta_Gamma_eff / (8.0 * eps))
    else:
        eta_an = math.sqrt(ep.delta_Gamma_eff / (8.0 * eps))
    return eta_num, eta_an


def mass_equivalent(delta_omega: float, m: float, omega_m: float = 1.0) -> float:
    """Deposited mass producing the frequency shift ``delta_omega`` (responsivity omega_m / 2m)."""
    if not m > 0:
        raise NonPositiveMass(f"resonator mass must be > 0, got {m!r}")
    return 2.0 * m * delta_omega / omega_m
