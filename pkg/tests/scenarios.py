"""Scenario builders shared by the protocol, harness and acceptance tests."""
import math

from qcs_sim import ScenarioConfig

OMEGA_CS = 2 * math.pi * 1.0e6
OMEGA_RB = 2 * math.pi * 0.7e6


def one_species(**overrides):
    """Perfect-model single-species scenario; override any top-level section."""
    doc = {
        "species": {"cs": OMEGA_CS},
        "ensemble_size": 1_000_000,
        "clock_a": {"delta_by_species": {"cs": 0.0}},
        "clock_b": {"delta_by_species": {"cs": 0.0}},
        "transport": {"beta_by_species": {"cs": 0.0}},
        "epochs": {"a_start": 0.0, "b_measure": [0.25]},
    }
    doc.update(overrides)
    return ScenarioConfig.from_dict(doc)


def two_species(**overrides):
    """Perfect-model beat scenario with distinct frequencies."""
    doc = {
        "species": {"cs": OMEGA_CS, "rb": OMEGA_RB},
        "ensemble_size": 1_000_000,
        "clock_a": {"delta_by_species": {"cs": 0.0, "rb": 0.0}},
        "clock_b": {"delta_by_species": {"cs": 0.0, "rb": 0.0}},
        "transport": {"beta_by_species": {"cs": 0.0, "rb": 0.0}},
        "epochs": {"a_start": 0.0, "b_measure": [1e-3]},
    }
    doc.update(overrides)
    return ScenarioConfig.from_dict(doc)


def syntonize(y=1e-12, rad_advance=0.5, phi_common=0.0, **overrides):
    """Doubled-ensemble scenario whose rate walks `rad_advance` radians.

    phi_common is imposed deterministically through the species beta so the
    transport-invariance claims can pin its value exactly.
    """
    dt = rad_advance / (OMEGA_CS * y) if y else 1.0e3
    doc = {
        "species": {"cs": OMEGA_CS},
        "ensemble_size": 8_000_000,
        "clock_a": {"delta_by_species": {"cs": 0.0}},
        "clock_b": {"y": y, "delta_by_species": {"cs": 0.0}},
        "transport": {"beta_by_species": {"cs": phi_common}},
        "epochs": {"a_start": 0.0, "b_measure": [10.0, 10.0 + dt]},
    }
    doc.update(overrides)
    return ScenarioConfig.from_dict(doc)


def matched_compare(alpha=5e-9, jitter=1e-9, **overrides):
    """Matched transport/trip models for equivalence runs."""
    doc = {
        "species": {"cs": OMEGA_CS},
        "ensemble_size": 1_000_000,
        "clock_a": {"delta_by_species": {"cs": 0.0}},
        "clock_b": {"delta_by_species": {"cs": 0.0}},
        "transport": {
            "alpha": alpha,
            "sigma_common": jitter * OMEGA_CS,
            "beta_by_species": {"cs": 0.0},
        },
        "trip": {"duration": 10.0, "alpha": alpha, "jitter": jitter},
        "epochs": {"a_start": 0.0, "b_measure": [0.25]},
    }
    doc.update(overrides)
    return ScenarioConfig.from_dict(doc)
