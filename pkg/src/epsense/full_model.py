"""Four-mode linearised optomechanical dynamics used to check the cavity
elimination behind the effective two-mode model.

State ordering is fixed as (a1, b1, a2^dagger, b2): cavity 1 couples to
resonator 1 by a beam-splitter term, cavity 2 to resonator 2 by a
two-mode-squeezing term. The matrix is stored in a common frame in which
every mode carries its mechanical frequency on the diagonal, so it stays
time independent when the resonators are detuned from each other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg

from .eigenmodes import EigenPair, build_heff, eigenvalues, order_pair
from .errors import AmbiguousBranch
from .params import DerivedParams, SystemParams, derive
from .steady_state import SteadyState, solve_ideal

MECHANICAL = (1, 3)
OPTICAL = (0, 2)
KAPPA_LADDER = (0.1, 0.3, 1.0, 3.0)


@dataclass(frozen=True)
class FourModeMatrix:
    matrix: np.ndarray
    frame_frequencies: np.ndarray

    def rotating(self) -> np.ndarray:
        """Entries in the slowly varying frames (diagonals -kappa/2, -gamma_j/2)."""
        return self.matrix + 1j * np.diag(self.frame_frequencies)


def build_full_matrix(params: SystemParams, derived: DerivedParams, steady: SteadyState) -> FourModeMatrix:
    k = params.kappa
    w1, w2 = derived.Delta_m_1, derived.Delta_m_2
    g1, g2 = steady.G_1, steady.G_2
    j = derived.J_tilde
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = -k / 2
    m[0, 1] = 1j * g1
    m[1, 0] = 1j * np.conj(g1)
    m[1, 1] = -derived.gamma_1 / 2
    m[1, 3] = 1j * j
    m[2, 2] = -k / 2
    m[2, 3] = -1j * np.conj(g2)
    m[3, 2] = 1j * g2
    m[3, 3] = -derived.gamma_2 / 2
    m[3, 1] = 1j * j
    freqs = np.array([w1, w1, w2, w2])
    return FourModeMatrix(m - 1j * np.diag(freqs), freqs)


def full_matrix(params: SystemParams, detuning: str = "bare") -> FourModeMatrix:
    derived = derive(params)
    return build_full_matrix(params, derived, solve_ideal(params, derived, detuning))


def mechanical_weights(vectors: np.ndarray) -> np.ndarray:
    p = np.abs(vectors) ** 2
    return p[list(MECHANICAL), :].sum(axis=0) / p.sum(axis=0)


def mechanical_branch(m: FourModeMatrix, threshold: float = 0.5) -> EigenPair:
    """The two mostly-mechanical eigenvalues, in the H_eff convention (i * lambda)."""
    w, v = np.linalg.eig(m.matrix)
    weights = mechanical_weights(v)
    idx = np.argsort(-weights, kind="stable")[:2]
    if np.any(weights[idx] < threshold):
        raise AmbiguousBranch(f"mechanical weights {np.round(weights, 3).tolist()} below {threshold}")
    lp, lm = order_pair(complex(1j * w[idx[0]]), complex(1j * w[idx[1]]))
    return EigenPair(lp, lm, "mechanical-weight")


def propagate(m: FourModeMatrix, state0, t):
    """exp(M t) state0; ``t`` may be a scalar or a 1-D array of times."""
    x0 = np.asarray(state0, dtype=complex)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("propagation time must be >= 0")
    out = np.array([linalg.expm(m.matrix * ti) @ x0 for ti in times])
    return out[0] if np.ndim(t) == 0 else out


def fit_decay_rate(times, states) -> float:
    """Amplitude decay rate from a least-squares fit of log|state| against time."""
    amp = np.linalg.norm(np.atleast_2d(states), axis=1)
    slope = np.polyfit(np.asarray(times, dtype=float), np.log(amp), 1)[0]
    return -float(slope)


def branch_error(params: SystemParams, detuning: str = "bare") -> float:
    """Largest distance between full-model and effective eigenvalues, in units of Gamma."""
    derived = derive(params)
    steady = solve_ideal(params, derived, detuning)
    full = mechanical_branch(build_full_matrix(params, derived, steady))
    eff = eigenvalues(build_heff(params, derived, steady))
    targets = np.array([eff.lambda_plus, eff.lambda_minus])
    worst = max(np.min(np.abs(lam - targets)) for lam in (full.lambda_plus, full.lambda_minus))
    return float(worst / steady.Gamma)


def with_kappa_at_fixed_damping(params: SystemParams, kappa: float) -> SystemParams:
    """Change kappa and rescale g so the optically induced damping stays put."""
    d1 = params.Delta_1 ** 2 + params.kappa ** 2 / 4
    d2 = params.Delta_1 ** 2 + kappa ** 2 / 4
    return replace(params, kappa=kappa, g=params.g * np.sqrt(d2 / d1))


def adiabatic_sweep(params: SystemParams, kappas=KAPPA_LADDER, detuning: str = "bare") -> list[tuple[float, float]]:
    return [(k, branch_error(with_kappa_at_fixed_damping(params, k), detuning)) for k in kappas]
