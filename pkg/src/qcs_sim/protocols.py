"""The four experiments: basic QCS, two-frequency beat, syntonization, ESCT.

Protocol steps for the entanglement-based scheme:

1. a singlet ensemble of "pre-clock" pairs is created in the dual basis;
2. A starts the clocks by measuring her halves when her clock shows the
   agreed start reading, sorting her pairs into type I (pos) and type II;
3. the type list reaches B over a classical channel, modeled as perfect and
   instantaneous -- the scheme's limitations do not depend on channel quality,
   and a lossy/latent channel would conflate this with one-way time transfer;
4. B keeps the partners of A's type II outcomes (they start in phase with
   A's type I members), lets them precess, and reads them out in quadrature
   bases to estimate the accumulated phase.

Truth bookkeeping: true time zero is A's collapse event. B turns the phase
into a time offset via the residual against his own model of the pre-clock,
  t_hat = wrap(theta_expected - theta_hat) / omega,
so positive t_hat estimates "more true time elapsed than the two clock
readings suggest", i.e. B's clock lags A's announced start. Under this fixed
convention a transport phase phi biases t_hat by -phi/omega (an effective
delay alpha gives bias -alpha, in basic and beat runs alike) and an
oscillator-phase mismatch biases it by (delta_B - delta_A)/omega.

Sampling: when every retained pair carries the same phase (no per-pair
transport jitter, no shuffled type list), per-pair Bernoulli outcomes are
summed analytically and counts are drawn directly from the exact Binomial
law; otherwise pairs are simulated individually (vectorized). Both paths
sample the same distribution; the choice is a deterministic function of the
configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .clocks import basis_for, esct_transfer, trigger_time
from .config import ScenarioConfig
from .estimation import (
    MeasurementRecord,
    PhaseEstimate,
    check_rate_ambiguity,
    estimate_phase,
    estimate_rate,
    wrap_pi,
)
from .quantum import (
    BasisPhase,
    EquatorialState,
    Frequency,
    canonicalize,
    collapse_singlet,
    evolve,
    imprint_phase,
    prob_pos,
)
from .rng import trial_stream
from .transport import apply_transport, transport_phase

#: Stream lanes for runs that interleave two protocols.
LANE_PRIMARY = 0
LANE_BASELINE = 1

#: Relative tolerance for the matched-models precondition of compare runs.
MATCHED_MODEL_RTOL = 1e-9


class Protocol(str, Enum):
    QCS_BASIC = "qcs"
    QCS_BEAT = "beat"
    QCS_SYNTONIZE = "syntonize"
    ESCT_BASELINE = "esct"


@dataclass(frozen=True)
class TrialResult:
    """One trial's truth, estimates, errors and diagnostics.

    `error` holds estimate - truth for every key the two maps share; the
    identity is arithmetic, not a tolerance.
    """

    protocol: Protocol
    trial_id: int
    truth: dict[str, float]
    estimate: dict[str, float]
    error: dict[str, float]
    diagnostics: dict[str, float]


def _make_result(protocol, trial_id, truth, estimate, diagnostics) -> TrialResult:
    error = {k: estimate[k] - truth[k] for k in estimate if k in truth}
    return TrialResult(protocol, trial_id, dict(truth), dict(estimate), error, dict(diagnostics))


# -- one sub-ensemble: select, dephase, read out ---------------------------


def _collapse_type_ii_count(n_pairs, rng, noiseless):
    if noiseless:
        return 0.5 * n_pairs
    return int(rng.binomial(int(n_pairs), 0.5))


def _measure_quadratures_fast(state, n_kept, delta_b, species, epoch_local, rng, noiseless):
    """Exact count sampling when all kept pairs share one phase."""
    basis0 = delta_b
    basis1 = BasisPhase(delta_b.delta + 0.5 * math.pi)
    p0 = prob_pos(state, basis0)
    p1 = prob_pos(state, basis1)
    if noiseless:
        n0 = n1 = 0.5 * n_kept
        k0 = n0 * p0
        k1 = n1 * p1
    else:
        n0 = int(n_kept) // 2
        n1 = int(n_kept) - n0
        k0 = int(rng.binomial(n0, p0))
        k1 = int(rng.binomial(n1, p1))
    rec0 = MeasurementRecord(n0, k0, basis0, epoch_local, species)
    rec1 = MeasurementRecord(n1, k1, basis1, epoch_local, species)
    return rec0, rec1


def _measure_quadratures_pairwise(thetas, delta_b, species, epoch_local, rng):
    """Per-pair Bernoulli sampling for ensembles with heterogeneous phases."""
    basis0 = delta_b
    basis1 = BasisPhase(delta_b.delta + 0.5 * math.pi)
    n0 = thetas.size // 2
    p0 = prob_pos(EquatorialState(thetas[:n0]), basis0)
    p1 = prob_pos(EquatorialState(thetas[n0:]), basis1)
    k0 = int(np.count_nonzero(rng.random(p0.size) < p0))
    k1 = int(np.count_nonzero(rng.random(p1.size) < p1))
    rec0 = MeasurementRecord(n0, k0, basis0, epoch_local, species)
    rec1 = MeasurementRecord(thetas.size - n0, k1, basis1, epoch_local, species)
    return rec0, rec1


def _announced_types(outcome, cfg, rng):
    """A's type list as delivered to B (optionally shuffled in transit)."""
    if cfg.shuffle_type_list:
        return rng.permutation(outcome.type_i)
    return outcome.type_i


def _apply_type_list(thetas, announced, use_type_i):
    """B keeps the pairs announced as type II (plus corrected type I if enabled)."""
    kept = thetas[~announced]
    if use_type_i:
        kept = np.concatenate([kept, canonicalize(thetas[announced] + math.pi)])
    return kept


def _run_species_phase(cfg, species, freq, tau, epoch_local, rng):
    """One species' full pre-clock cycle; returns (PhaseEstimate, phi_common, counts)."""
    delta_a = basis_for(cfg.clock_a, species)
    delta_b = basis_for(cfg.clock_b, species)
    pairwise = cfg.transport.sigma_pair > 0.0 or cfg.shuffle_type_list
    if pairwise:
        outcome = collapse_singlet(delta_a, rng, size=cfg.ensemble_size)
        transported, phi_common = apply_transport(
            outcome.state_b, cfg.transport, species, freq, rng
        )
        announced = _announced_types(outcome, cfg, rng)
        kept = _apply_type_list(transported.theta, announced, cfg.use_type_i)
        kept = evolve(EquatorialState(kept), freq, tau).theta
        rec0, rec1 = _measure_quadratures_pairwise(kept, delta_b, species, epoch_local, rng)
    else:
        m_ii = _collapse_type_ii_count(cfg.ensemble_size, rng, cfg.noiseless)
        n_kept = cfg.ensemble_size if cfg.use_type_i else m_ii
        _, phi_common = transport_phase(cfg.transport, species, freq, rng)
        state = EquatorialState(delta_a.delta)  # type II partner at collapse
        state = evolve(imprint_phase(state, phi_common), freq, tau)
        rec0, rec1 = _measure_quadratures_fast(
            state, n_kept, delta_b, species, epoch_local, rng, cfg.noiseless
        )
    est = estimate_phase(rec0, rec1)
    counts = {"n0": float(rec0.n), "k0": float(rec0.k_pos),
              "n1": float(rec1.n), "k1": float(rec1.k_pos)}
    return est, phi_common, counts


def _expected_phase(delta_b, freq, nominal_elapsed):
    """B's model of the pre-clock phase: his own basis phase, nominal elapsed time."""
    return canonicalize(delta_b.delta - freq.omega * nominal_elapsed)


# -- protocols --------------------------------------------------------------


def run_qcs_basic(cfg: ScenarioConfig, rng, trial_id: int = 0) -> TrialResult:
    """Single-species time-offset recovery (protocol steps 1-4)."""
    if len(cfg.species) != 1:
        raise ValueError("basic protocol requires exactly one configured species")
    ((species, freq),) = cfg.species.items()
    epoch = cfg.epochs.b_measure[0]

    t_collapse = trigger_time(cfg.clock_a, cfg.epochs.a_start, rng)
    t_meas = trigger_time(cfg.clock_b, epoch, rng)
    tau = t_meas - t_collapse
    nominal = epoch - cfg.epochs.a_start

    est, phi_common, counts = _run_species_phase(cfg, species, freq, tau, epoch, rng)
    theta_exp = _expected_phase(basis_for(cfg.clock_b, species), freq, nominal)
    t_hat = wrap_pi(theta_exp - est.theta_hat) / freq.omega

    truth = {
        "time_offset": tau - nominal,
        "rate_offset": cfg.clock_b.y,
        f"phi_common_{species}": phi_common,
    }
    estimate = {"time_offset": t_hat}
    diagnostics = {
        "theta_hat": est.theta_hat,
        "sigma_theta": est.sigma_theta,
        "sigma_time": est.sigma_theta / freq.omega,
        "pairs_used": float(est.n_used),
        **counts,
    }
    return _make_result(Protocol.QCS_BASIC, trial_id, truth, estimate, diagnostics)


def run_qcs_beat(cfg: ScenarioConfig, rng, trial_id: int = 0) -> TrialResult:
    """Two-species run; the phase difference beats at omega1 - omega2.

    The widened ambiguity window comes at a price: only the parts of the two
    constant phases that are equal cancel. A species-independent delta
    drops out, but an effective transport delay alpha contributes
    alpha*(omega1 - omega2) to the beat phase and survives as a bias of
    exactly -alpha, and a species-dependent offset beta2 - beta1 biases the
    result by (beta2 - beta1)/(omega1 - omega2).
    """
    if len(cfg.species) != 2:
        raise ValueError("beat protocol requires exactly two configured species")
    (sp1, f1), (sp2, f2) = cfg.species.items()
    if f1.omega == f2.omega:
        raise ValueError("beat protocol requires omega1 != omega2 (beat undefined)")
    epoch = cfg.epochs.b_measure[0]

    t_collapse = trigger_time(cfg.clock_a, cfg.epochs.a_start, rng)
    t_meas = trigger_time(cfg.clock_b, epoch, rng)
    tau = t_meas - t_collapse
    nominal = epoch - cfg.epochs.a_start

    truth = {"time_offset": tau - nominal, "rate_offset": cfg.clock_b.y}
    diagnostics = {}
    residuals = {}
    sigmas = {}
    for species, freq in ((sp1, f1), (sp2, f2)):
        est, phi_common, counts = _run_species_phase(cfg, species, freq, tau, epoch, rng)
        theta_exp = _expected_phase(basis_for(cfg.clock_b, species), freq, nominal)
        residuals[species] = wrap_pi(theta_exp - est.theta_hat)
        sigmas[species] = est.sigma_theta
        truth[f"phi_common_{species}"] = phi_common
        diagnostics[f"theta_hat_{species}"] = est.theta_hat
        diagnostics[f"sigma_theta_{species}"] = est.sigma_theta
        diagnostics[f"t_hat_{species}"] = residuals[species] / freq.omega
        for key, value in counts.items():
            diagnostics[f"{key}_{species}"] = value

    beat_omega = f1.omega - f2.omega
    beat_residual = wrap_pi(residuals[sp1] - residuals[sp2])
    t_beat = beat_residual / beat_omega
    diagnostics["sigma_time"] = math.hypot(sigmas[sp1], sigmas[sp2]) / abs(beat_omega)

    estimate = {"time_offset": t_beat}
    return _make_result(Protocol.QCS_BEAT, trial_id, truth, estimate, diagnostics)


def run_qcs_syntonize(cfg: ScenarioConfig, rng, trial_id: int = 0) -> TrialResult:
    """Doubled-ensemble rate recovery from two measurement epochs.

    Both sub-ensembles ride the same transport (one common-mode draw); the
    first is read out at B's epoch t1, the second at t2. Constant phases --
    transport and oscillator alike -- cancel in the epoch difference, leaving
    only the phase accumulated between the two readouts, which calibrates
    B's clock rate against the atomic frequency itself. A's clock rate does
    not enter: the collapse is a single event.
    """
    if len(cfg.species) != 1:
        raise ValueError("syntonization requires exactly one configured species")
    if len(cfg.epochs.b_measure) != 2:
        raise ValueError("syntonization requires exactly two measurement epochs")
    ((species, freq),) = cfg.species.items()
    t1, t2 = cfg.epochs.b_measure
    check_rate_ambiguity(freq.omega, cfg.clock_b.y, t2 - t1)

    t_collapse = trigger_time(cfg.clock_a, cfg.epochs.a_start, rng)
    delta_a = basis_for(cfg.clock_a, species)
    delta_b = basis_for(cfg.clock_b, species)
    n_half = cfg.ensemble_size // 2
    halves = (n_half, cfg.ensemble_size - n_half)

    pairwise = cfg.transport.sigma_pair > 0.0 or cfg.shuffle_type_list
    estimates: list[PhaseEstimate] = []
    diagnostics = {}
    if pairwise:
        outcome = collapse_singlet(delta_a, rng, size=cfg.ensemble_size)
        transported, phi_common = apply_transport(
            outcome.state_b, cfg.transport, species, freq, rng
        )
        announced = _announced_types(outcome, cfg, rng)
        # the doubled ensemble is split by pair index into one sub-ensemble
        # per epoch; each half runs the ordinary selection and readout
        slices = (slice(0, n_half), slice(n_half, None))
        for epoch, half in zip((t1, t2), slices):
            t_meas = trigger_time(cfg.clock_b, epoch, rng)
            tau = t_meas - t_collapse
            kept = _apply_type_list(transported.theta[half], announced[half], cfg.use_type_i)
            thetas = evolve(EquatorialState(kept), freq, tau).theta
            rec0, rec1 = _measure_quadratures_pairwise(thetas, delta_b, species, epoch, rng)
            estimates.append(estimate_phase(rec0, rec1))
    else:
        _, phi_common = transport_phase(cfg.transport, species, freq, rng)
        at_collapse = imprint_phase(EquatorialState(delta_a.delta), phi_common)
        for epoch, n_pairs in zip((t1, t2), halves):
            t_meas = trigger_time(cfg.clock_b, epoch, rng)
            tau = t_meas - t_collapse
            m_ii = _collapse_type_ii_count(n_pairs, rng, cfg.noiseless)
            n_kept = n_pairs if cfg.use_type_i else m_ii
            state = evolve(at_collapse, freq, tau)
            rec0, rec1 = _measure_quadratures_fast(
                state, n_kept, delta_b, species, epoch, rng, cfg.noiseless
            )
            estimates.append(estimate_phase(rec0, rec1))

    for i, est in enumerate(estimates, start=1):
        diagnostics[f"theta_hat_{i}"] = est.theta_hat
        diagnostics[f"sigma_theta_{i}"] = est.sigma_theta
    rate = estimate_rate(estimates[0], t1, estimates[1], t2, freq)
    diagnostics["sigma_rate"] = rate.sigma_y

    truth = {"rate_offset": cfg.clock_b.y, f"phi_common_{species}": phi_common}
    estimate = {"rate_offset": rate.y_hat}
    return _make_result(Protocol.QCS_SYNTONIZE, trial_id, truth, estimate, diagnostics)


def run_esct(cfg: ScenarioConfig, rng, trial_id: int = 0) -> TrialResult:
    """Slow-clock-transport baseline: the arrival error is the whole story."""
    err = esct_transfer(cfg.trip, rng)
    truth = {"time_offset": 0.0}
    estimate = {"time_offset": err}
    return _make_result(Protocol.ESCT_BASELINE, trial_id, truth, estimate, {})


_RUNNERS = {
    Protocol.QCS_BASIC: run_qcs_basic,
    Protocol.QCS_BEAT: run_qcs_beat,
    Protocol.QCS_SYNTONIZE: run_qcs_syntonize,
    Protocol.ESCT_BASELINE: run_esct,
}


def run_trials(protocol: Protocol, cfg: ScenarioConfig, seed=None, trials=None,
               lane: int = LANE_PRIMARY) -> list[TrialResult]:
    """Run `trials` independent trials, one Philox stream per (seed, trial, lane).

    Results come back in trial_id order regardless of any execution order, so
    a parallel driver would merge to the same stream.
    """
    seed = cfg.seed if seed is None else int(seed)
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    runner = _RUNNERS[protocol]
    return [runner(cfg, trial_stream(seed, i, lane), trial_id=i) for i in range(trials)]


def _require_matched_models(cfg: ScenarioConfig, freq: Frequency):
    implied_jitter = cfg.transport.sigma_common / freq.omega
    alpha_gap = abs(cfg.trip.alpha - cfg.transport.alpha)
    jitter_gap = abs(cfg.trip.jitter - implied_jitter)
    alpha_tol = MATCHED_MODEL_RTOL * max(abs(cfg.trip.alpha), abs(cfg.transport.alpha))
    jitter_tol = MATCHED_MODEL_RTOL * max(abs(cfg.trip.jitter), abs(implied_jitter))
    if alpha_gap > alpha_tol or jitter_gap > jitter_tol:
        raise ValueError(
            "compare requires matched models: trip.alpha == transport.alpha "
            "and trip.jitter == transport.sigma_common/omega; got "
            f"trip=({cfg.trip.alpha}, {cfg.trip.jitter}) vs "
            f"transport=({cfg.transport.alpha}, {implied_jitter})"
        )


def compare_equivalence(cfg: ScenarioConfig, seed=None, trials=None,
                        keep_trials: bool = False) -> dict:
    """Head-to-head RMS time error of the entangled protocol vs. the clock trip.

    Requires matched models (trip.alpha = transport.alpha and trip.jitter =
    sigma_common/omega): then the two protocols face the same disturbance and
    the entangled one differs only by its binomial estimation floor, which is
    reported separately.
    """
    if len(cfg.species) != 1:
        raise ValueError("compare requires exactly one configured species")
    ((_, freq),) = cfg.species.items()
    _require_matched_models(cfg, freq)

    qcs = run_trials(Protocol.QCS_BASIC, cfg, seed, trials, lane=LANE_PRIMARY)
    esct = run_trials(Protocol.ESCT_BASELINE, cfg, seed, trials, lane=LANE_BASELINE)

    err_qcs = np.array([r.error["time_offset"] for r in qcs])
    err_esct = np.array([r.error["time_offset"] for r in esct])
    rms_qcs = float(np.sqrt(np.mean(err_qcs**2)))
    rms_esct = float(np.sqrt(np.mean(err_esct**2)))
    floor = float(np.sqrt(np.mean(np.array([r.diagnostics["sigma_time"] for r in qcs]) ** 2)))
    summary = {
        "trials": len(qcs),
        "rms_qcs": rms_qcs,
        "rms_esct": rms_esct,
        "ratio": rms_qcs / rms_esct if rms_esct > 0.0 else None,
        "mean_error_qcs": float(np.mean(err_qcs)),
        "mean_error_esct": float(np.mean(err_esct)),
        "qcs_estimator_floor": floor,
        "esct_floor": 0.0,
    }
    if keep_trials:
        summary["trials_qcs"] = qcs
        summary["trials_esct"] = esct
    return summary
