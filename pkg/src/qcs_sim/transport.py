"""Phase imprinted on B's half of each pair by physically moving it.

The deterministic part is alpha * omega + beta[species]: an effective delay
alpha (seconds) that every species sees scaled by its own frequency, plus a
species-specific offset capturing that different isotopes respond differently
to field perturbations en route. On top of that, one common-mode Gaussian
phase is drawn per transported ensemble and an independent Gaussian phase per
pair.

The same model covers entanglement delivered by photons: writing the photon
phase onto the stored qubit makes an unknown propagation delay d act exactly
like alpha = d, so no separate channel type exists here. Post-arrival drift
of the accumulated phase is out of scope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .quantum import EquatorialState, Frequency, imprint_phase


@dataclass(frozen=True)
class TransportModel:
    """Frequency-dependent deterministic phase plus two Gaussian jitter scales.

    alpha         effective transport delay, s; deterministic phase = alpha*omega
    beta_by_species  extra per-species phase, rad (field-sensitivity offset)
    sigma_common  std. dev. of the per-ensemble common-mode phase, rad (>= 0)
    sigma_pair    std. dev. of the independent per-pair phase, rad (>= 0)
    """

    alpha: float = 0.0
    beta_by_species: Mapping[str, float] = field(default_factory=dict)
    sigma_common: float = 0.0
    sigma_pair: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "sigma_common", "sigma_pair"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("sigma_common", "sigma_pair"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for sp, beta in self.beta_by_species.items():
            if not math.isfinite(beta):
                raise ValueError(f"beta for species {sp!r} must be finite")


def beta_for(model: TransportModel, species: str) -> float:
    try:
        return model.beta_by_species[species]
    except KeyError:
        raise ConfigError(
            f"transport model has no beta entry for species {species!r}"
        ) from None


def deterministic_phase(model: TransportModel, species: str, freq: Frequency) -> float:
    """alpha * omega + beta[species], rad (unreduced)."""
    return model.alpha * freq.omega + beta_for(model, species)


def transport_phase(model: TransportModel, species: str, freq: Frequency, rng=None):
    """Draw the transport phase for one pair of one ensemble.

    Returns (phi_total, phi_common), both in rad and deliberately unreduced so
    callers can reason about unwrapped phase. phi_common is the per-ensemble
    draw (deterministic part plus common-mode jitter); phi_total adds the
    pair's own jitter.
    """
    phi_common = deterministic_phase(model, species, freq)
    if model.sigma_common > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma_common > 0")
        phi_common += model.sigma_common * rng.standard_normal()
    phi_total = phi_common
    if model.sigma_pair > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma_pair > 0")
        phi_total += model.sigma_pair * rng.standard_normal()
    return phi_total, phi_common


def apply_transport(
    states: EquatorialState,
    model: TransportModel,
    species: str,
    freq: Frequency,
    rng=None,
):
    """Imprint transport phases on a whole ensemble of B-side states.

    One common-mode phase is drawn for the ensemble and each pair receives an
    independent jitter on top; the states are shifted via `imprint_phase`.
    Returns (transported_states, phi_common) with phi_common unreduced, so the
    trial log can expose the drawn value for oracle checks.
    """
    n = states.size
    if n == 0:
        raise ValueError("ensemble must be non-empty")
    phi_common = deterministic_phase(model, species, freq)
    if model.sigma_common > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma_common > 0")
        phi_common += model.sigma_common * rng.standard_normal()
    if model.sigma_pair > 0.0:
        if rng is None:
            raise ValueError("rng required when sigma_pair > 0")
        phi = phi_common + model.sigma_pair * rng.standard_normal(np.shape(states.theta))
    else:
        phi = phi_common
    return imprint_phase(states, phi), phi_common
