"""Equatorial qubit states: free precession, phase imprinting, dual-basis readout.

Every state the simulator ever handles is an equal-weight superposition of the
two energy eigenstates of a clock transition, so one relative phase angle on
[0, 2*pi) is a complete description. theta = 0 is the pos-type state, theta = pi
the neg-type state, and free evolution at angular frequency omega rotates theta
by -omega*tau. The pi/2 preparation/readout pulses are not separate operations
here: preparation is "states start equatorial" and readout is `prob_pos`, which
folds the second pulse and the detector into one projection probability.

Scalars and ndarrays are handled uniformly: an `EquatorialState` whose theta is
an array represents one state per pair of an ensemble, and every operation
applies elementwise. The full two-complex-amplitude representation exists only
in the test oracle, never here; keeping a single angle makes normalization and
range invariants exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def canonicalize(theta):
    """Reduce an angle (scalar or array) to the canonical range [0, 2*pi).

    Floor-based modular reduction; values that round up to exactly 2*pi
    (e.g. tiny negative inputs) are folded back to 0 so the half-open
    range holds bit-exactly.
    """
    t = np.mod(theta, TWO_PI)
    if np.ndim(t) == 0:
        t = float(t)
        return t - TWO_PI if t >= TWO_PI else t
    t[t >= TWO_PI] -= TWO_PI
    return t


@dataclass(frozen=True)
class Frequency:
    """Angular frequency of a clock transition, rad/s (strictly positive)."""

    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValueError(f"omega must be finite and > 0, got {self.omega}")


@dataclass(frozen=True, eq=False)
class EquatorialState:
    """Equal-weight superposition with relative phase theta in [0, 2*pi).

    theta may be a float (one state) or an ndarray (one state per pair of an
    ensemble). The constructor canonicalizes, so the range invariant holds
    after every operation.
    """

    theta: float | np.ndarray

    def __post_init__(self):
        th = self.theta
        if not np.all(np.isfinite(th)):
            raise ValueError("theta must be finite")
        if np.ndim(th) == 0:
            th = float(th)
        else:
            th = np.asarray(th, dtype=float)
        object.__setattr__(self, "theta", canonicalize(th))

    @property
    def size(self):
        return int(np.size(self.theta))


#: The two dual-basis states reachable at delta = 0.
POS = EquatorialState(0.0)
NEG = EquatorialState(math.pi)


@dataclass(frozen=True)
class BasisPhase:
    """Phase delta of a {pos_delta, neg_delta} measurement basis, [0, 2*pi).

    The basis pair is orthonormal for every delta by construction: the
    probability of the neg-type outcome is defined as 1 - prob_pos, so
    completeness holds exactly.
    """

    delta: float

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")
        object.__setattr__(self, "delta", canonicalize(float(self.delta)))


@dataclass(frozen=True, eq=False)
class CollapseOutcome:
    """Result of measuring the A side of one or many singlets in a common basis.

    `type_i` is True where A saw the pos-type outcome (type I); `state_b` holds
    the partner state(s) left on the B side, expressed in the same basis frame
    at the collapse instant: type I leaves B at delta + pi, type II at delta.
    """

    type_i: bool | np.ndarray
    state_b: EquatorialState


def evolve(state: EquatorialState, freq: Frequency, tau) -> EquatorialState:
    """Free precession for tau seconds: theta -> theta - omega*tau (mod 2*pi).

    tau may be negative (rewinding is legitimate for analysis); it must be
    finite. Evolution is additive in tau and the identity at tau = 0.
    """
    tau = float(tau)
    if not math.isfinite(tau):
        raise ValueError(f"tau must be finite, got {tau}")
    return EquatorialState(state.theta - freq.omega * tau)


def imprint_phase(state: EquatorialState, phi) -> EquatorialState:
    """Add a classical phase shift phi to the state (elementwise for arrays)."""
    if not np.all(np.isfinite(phi)):
        raise ValueError("phi must be finite")
    return EquatorialState(state.theta + phi)


def prob_pos(state: EquatorialState, basis: BasisPhase):
    """Probability of the pos-type outcome: cos((theta - delta) / 2)**2.

    Returns a float for scalar states, an ndarray for ensemble states.
    Always in [0, 1].
    """
    c = np.cos(0.5 * (state.theta - basis.delta))
    p = c * c
    return float(p) if np.ndim(p) == 0 else p


def prob_neg(state: EquatorialState, basis: BasisPhase):
    """Probability of the orthogonal neg-type outcome, exactly 1 - prob_pos."""
    return 1.0 - prob_pos(state, basis)


def collapse_singlet(basis_a: BasisPhase, rng, size=None) -> CollapseOutcome:
    """Measure the A halves of `size` singlets in basis_a (one pair if None).

    Each A outcome is type I (pos) or type II (neg) with probability 1/2.
    Singlet anticorrelation fixes the B partner in the same frame: a type I
    outcome leaves B in the neg-type state (theta = delta + pi), a type II
    outcome leaves B in the pos-type state (theta = delta).

    `rng` is an owned numpy Generator; one uniform is consumed per pair.
    """
    if size is None:
        type_i = bool(rng.random() < 0.5)
        theta_b = basis_a.delta + (math.pi if type_i else 0.0)
    else:
        type_i = rng.random(int(size)) < 0.5
        theta_b = np.where(type_i, basis_a.delta + math.pi, basis_a.delta)
    return CollapseOutcome(type_i, EquatorialState(theta_b))


def ramsey_prob(freq: Frequency, omega_osc: float, T: float, dphi_osc: float = 0.0) -> float:
    """Two-pulse interrogation fringe against a local oscillator.

    P = (1 + cos((omega - omega_osc)*T + dphi_osc)) / 2 for dark time T,
    oscillator frequency omega_osc and oscillator-vs-precession relative
    phase dphi_osc. On resonance with a phase-locked oscillator
    (omega_osc = omega, dphi_osc = 0) the outcome is 1 for every T: the
    fringe carries no dark-time dependence, only detuning and oscillator
    phase do.
    """
    T = float(T)
    if not math.isfinite(T) or T < 0.0:
        raise ValueError(f"T must be finite and >= 0, got {T}")
    detuning = freq.omega - float(omega_osc)
    return 0.5 * (1.0 + math.cos(detuning * T + float(dphi_osc)))
