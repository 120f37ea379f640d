"""Per-slot transmission policies.

All six policies are two-level: each slot they either transmit at peak power
along the dominant eigenvector of a (weighted) combination of the channel
Grams, or stay silent. They differ in how the combination is weighted and
when they transmit:

* optimal-energy   transmit iff lambda_max(W_1) >= threshold (single receiver,
                   threshold from the energy solver); stateless.
* optimal-power    transmit iff lambda_max(sum_i W_i) >= threshold (threshold
                   from the power solver); stateless.
* mdpp-energy      weights are per-receiver deficit queues Z_i tracking the
                   delivery targets P_i; transmit iff
                   lambda_max(sum Z_i W_i - V I) > 0.
* mdpp-power       single budget queue Z_1 tracking the average transmit
                   power; transmit iff lambda_max(V sum W_i - Z_1 I) > 0.
* mmf              max-min fairness: per-receiver queues G_i chase a shared
                   bang-bang auxiliary target (p_peak for everyone while
                   sum G_i < V, else 0) plus the budget queue.
* qpf              proportional fairness with a QoS floor: auxiliary targets
                   gamma_i = min(V / G_i, p_peak), per-receiver floor queues
                   on p_min, plus the budget queue.

The queue-driven policies transmit on a strictly positive top eigenvalue; at
exactly zero the beam contributes nothing to the weighted objective, and the
policies stay silent. Beam amplitude is sqrt(p_peak), so transmit power is
exactly p_peak. Queue updates are Z <- max(Z + deficit, 0); each decision
exposes the per-queue deficits so a drift bound can be checked externally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from wptsim.channel import ScenarioConfig, SlotChannels
from wptsim.linalg import gram, max_eigpair, weighted_combine
from wptsim.threshold import ThresholdValue

POLICY_KINDS = (
    "optimal-energy",
    "mdpp-energy",
    "optimal-power",
    "mdpp-power",
    "mmf",
    "qpf",
)

QUEUE_DRIVEN_KINDS = ("mdpp-energy", "mdpp-power", "mmf", "qpf")
POWER_LIMITED_KINDS = ("optimal-power", "mdpp-power", "mmf", "qpf")


@dataclass
class PolicyParams:
    """Policy parameters; fields unused by a given policy may stay None."""

    p_peak: float
    v: Optional[float] = None
    p_avg: Optional[float] = None
    p_targets: Optional[tuple] = None
    p_min: Optional[float] = None

    def __post_init__(self):
        if self.p_peak <= 0.0:
            raise ValueError(f"p_peak must be > 0, got {self.p_peak}")
        if self.v is not None and self.v <= 0.0:
            raise ValueError(f"v must be > 0, got {self.v}")
        if self.p_avg is not None and not 0.0 < self.p_avg <= self.p_peak:
            raise ValueError(f"need 0 < p_avg <= p_peak, got p_avg={self.p_avg}")
        if self.p_targets is not None:
            self.p_targets = tuple(float(p) for p in self.p_targets)
            if any(p < 0.0 for p in self.p_targets):
                raise ValueError(f"p_targets must be >= 0, got {self.p_targets}")
        if self.p_min is not None and self.p_min < 0.0:
            raise ValueError(f"p_min must be >= 0, got {self.p_min}")


def validate_params_for(kind: str, params: PolicyParams, n_receivers: int) -> None:
    """Check that the fields a policy relies on are present and consistent."""
    if kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy kind {kind!r}; expected one of {POLICY_KINDS}")
    if kind in QUEUE_DRIVEN_KINDS and params.v is None:
        raise ValueError(f"{kind} needs the control parameter v")
    if kind in ("optimal-energy", "mdpp-energy"):
        if params.p_targets is None or len(params.p_targets) != n_receivers:
            raise ValueError(f"{kind} needs one delivery target per receiver")
    if kind in POWER_LIMITED_KINDS and params.p_avg is None:
        raise ValueError(f"{kind} needs the average power budget p_avg")
    if kind == "qpf" and params.p_min is None:
        raise ValueError("qpf needs the QoS floor p_min")
    if kind == "optimal-energy" and n_receivers != 1:
        raise ValueError("optimal-energy is single-receiver only")


@dataclass
class QueueState:
    """Virtual queues of one policy instance (watt-slots) plus current targets."""

    z: np.ndarray
    g: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.float64)
        self.g = np.asarray(self.g, dtype=np.float64)
        self.gamma = np.asarray(self.gamma, dtype=np.float64)
        if np.any(self.z < 0.0) or np.any(self.g < 0.0):
            raise ValueError("queue values must be nonnegative")


def init_queue_state(kind: str, n_receivers: int) -> QueueState:
    """All-zero queues, sized for the given policy."""
    k = n_receivers
    sizes = {
        "mdpp-energy": (k, 0, 0),
        "mdpp-power": (1, 0, 0),
        "mmf": (1, k, k),
        "qpf": (k + 1, k, k),
    }
    if kind not in sizes:
        raise ValueError(f"policy {kind!r} keeps no queue state")
    nz, ng, ngam = sizes[kind]
    return QueueState(np.zeros(nz), np.zeros(ng), np.zeros(ngam))


@dataclass
class SlotDecision:
    """One slot's outcome: the beam, its power, and per-queue deficits.

    deficits lists the arrival-minus-service increments of this slot's queue
    updates, constraint queues (z) first, then auxiliary queues (g); each
    queue evolved as q <- max(q + deficit, 0).
    """

    beam: np.ndarray
    transmitted_power: float
    received_power: np.ndarray
    deficits: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _grams(channels: SlotChannels) -> np.ndarray:
    return np.stack([gram(h) for h in channels.channels])


def _received(ws: np.ndarray, beam: np.ndarray, efficiency: float) -> np.ndarray:
    """Per-receiver harvested power zeta * beam^H W_i beam."""
    return efficiency * np.einsum("n,knm,m->k", beam.conj(), ws, beam).real


def _silent(n_tx: int, k: int) -> tuple:
    return np.zeros(n_tx, dtype=np.complex128), 0.0, np.zeros(k)


# ---------------------------------------------------------------------------
# optimal threshold policies (stateless)


def _core_optimal_energy(params, threshold, ws, efficiency):
    pair = max_eigpair(ws[0])
    if pair.value >= threshold.lambda_th:
        beam = np.sqrt(params.p_peak) * pair.vector
        recv = _received(ws, beam, efficiency)
        return SlotDecision(beam, params.p_peak, recv)
    beam, power, recv = _silent(ws.shape[1], 1)
    return SlotDecision(beam, power, recv)


def step_optimal_energy(
    cfg: ScenarioConfig,
    params: PolicyParams,
    threshold: ThresholdValue,
    channels: SlotChannels,
) -> SlotDecision:
    """Single-receiver threshold policy for the energy-limited objective."""
    if len(channels.channels) != 1:
        raise ValueError("optimal-energy is single-receiver only")
    return _core_optimal_energy(params, threshold, _grams(channels), cfg.efficiency)


def _core_optimal_power(params, threshold, ws, efficiency):
    combined = weighted_combine(np.ones(ws.shape[0]), ws, 0.0)
    pair = max_eigpair(combined)
    if pair.value >= threshold.lambda_th:
        beam = np.sqrt(params.p_peak) * pair.vector
        recv = _received(ws, beam, efficiency)
        return SlotDecision(beam, params.p_peak, recv)
    beam, power, recv = _silent(ws.shape[1], ws.shape[0])
    return SlotDecision(beam, power, recv)


def step_optimal_power(
    params: PolicyParams,
    threshold: ThresholdValue,
    channels: SlotChannels,
    efficiency: float = 1.0,
) -> SlotDecision:
    """Threshold policy on the summed Grams for the power-limited objective."""
    return _core_optimal_power(params, threshold, _grams(channels), efficiency)


# ---------------------------------------------------------------------------
# queue-driven policies


def _two_level(w_prime, p_peak, ws, efficiency):
    """Transmit at peak power iff the top eigenvalue is strictly positive."""
    pair = max_eigpair(w_prime)
    if pair.value > 0.0:
        beam = np.sqrt(p_peak) * pair.vector
        recv = _received(ws, beam, efficiency)
        return beam, p_peak, recv
    return _silent(ws.shape[1], ws.shape[0])


def _core_mdpp_energy(state, params, ws, efficiency):
    w_prime = weighted_combine(state.z, ws, shift=params.v)
    beam, power, recv = _two_level(w_prime, params.p_peak, ws, efficiency)
    deficits = np.asarray(params.p_targets) - recv
    new_z = np.maximum(state.z + deficits, 0.0)
    dec = SlotDecision(beam, power, recv, deficits)
    return dec, QueueState(new_z, state.g, state.gamma)


def step_mdpp_energy(
    state: QueueState,
    params: PolicyParams,
    channels: SlotChannels,
    efficiency: float = 1.0,
) -> tuple:
    """Queue-driven policy meeting per-receiver delivery targets at minimum
    average transmit power."""
    return _core_mdpp_energy(state, params, _grams(channels), efficiency)


def _core_mdpp_power(state, params, ws, efficiency):
    k = ws.shape[0]
    w_prime = weighted_combine(np.full(k, params.v), ws, shift=state.z[0])
    beam, power, recv = _two_level(w_prime, params.p_peak, ws, efficiency)
    deficit = power - params.p_avg
    new_z = np.maximum(state.z + deficit, 0.0)
    dec = SlotDecision(beam, power, recv, np.array([deficit]))
    return dec, QueueState(new_z, state.g, state.gamma)


def step_mdpp_power(
    state: QueueState,
    params: PolicyParams,
    channels: SlotChannels,
    efficiency: float = 1.0,
) -> tuple:
    """Queue-driven policy maximizing total received power under an average
    transmit-power budget."""
    return _core_mdpp_power(state, params, _grams(channels), efficiency)


def _core_mmf(state, params, ws, efficiency):
    k = ws.shape[0]
    gamma_on = params.v > float(np.sum(state.g))
    gamma = np.full(k, params.p_peak if gamma_on else 0.0)
    w_prime = weighted_combine(state.g, ws, shift=state.z[0])
    beam, power, recv = _two_level(w_prime, params.p_peak, ws, efficiency)
    z_deficit = power - params.p_avg
    g_deficits = gamma - recv
    new_z = np.maximum(state.z + z_deficit, 0.0)
    new_g = np.maximum(state.g + g_deficits, 0.0)
    dec = SlotDecision(beam, power, recv, np.concatenate(([z_deficit], g_deficits)))
    return dec, QueueState(new_z, new_g, gamma)


def step_mmf(
    state: QueueState,
    params: PolicyParams,
    channels: SlotChannels,
    efficiency: float = 1.0,
) -> tuple:
    """Max-min fair policy under an average transmit-power budget."""
    return _core_mmf(state, params, _grams(channels), efficiency)


def _core_qpf(state, params, ws, efficiency):
    k = ws.shape[0]
    g = state.g
    # gamma_i = min(V / G_i, p_peak); an empty queue gets the cap (V/0+ -> inf)
    gamma = np.full(k, params.p_peak)
    pos = g > 0.0
    gamma[pos] = np.minimum(params.v / g[pos], params.p_peak)
    w_prime = weighted_combine(state.z[:k] + g, ws, shift=state.z[k])
    beam, power, recv = _two_level(w_prime, params.p_peak, ws, efficiency)
    floor_deficits = params.p_min - recv
    budget_deficit = power - params.p_avg
    g_deficits = gamma - recv
    new_z = np.maximum(np.concatenate((state.z[:k] + floor_deficits, [state.z[k] + budget_deficit])), 0.0)
    new_g = np.maximum(g + g_deficits, 0.0)
    dec = SlotDecision(beam, power, recv, np.concatenate((floor_deficits, [budget_deficit], g_deficits)))
    return dec, QueueState(new_z, new_g, gamma)


def step_qpf(
    state: QueueState,
    params: PolicyParams,
    channels: SlotChannels,
    efficiency: float = 1.0,
) -> tuple:
    """Proportionally fair policy with a per-receiver QoS floor under an
    average transmit-power budget."""
    return _core_qpf(state, params, _grams(channels), efficiency)


_CORES = {
    "mdpp-energy": _core_mdpp_energy,
    "mdpp-power": _core_mdpp_power,
    "mmf": _core_mmf,
    "qpf": _core_qpf,
}


def core_step(kind: str, state, params, ws, efficiency):
    """Advance a queue-driven policy one slot on precomputed Grams."""
    return _CORES[kind](state, params, ws, efficiency)


# ---------------------------------------------------------------------------
# trade-off constants


def gap_bound_const(kind: str, n_receivers: int, p_peak: float) -> Optional[float]:
    """Constant B of the O(B/V) optimality-gap bound, None for the optimal policies."""
    k = n_receivers
    bounds = {
        "mdpp-energy": 0.5 * k * p_peak**2,
        "mdpp-power": 0.5 * p_peak**2,
        "mmf": 0.5 * (k + 1) * p_peak**2,
        "qpf": 0.5 * (2 * k + 1) * p_peak**2,
    }
    return bounds.get(kind)


def default_v(kind: str, params: PolicyParams, cfg: ScenarioConfig) -> float:
    """Default control parameter V for the configured horizon.

    V trades the optimality gap (O(1/V)) against queue magnitude (O(V)).
    Each formula was calibrated empirically on desk-scale Rician scenarios
    so that at the configured horizon the constraint queues end well inside
    the mean-rate stability budget 1e-3 * (power scale) * slots while the
    measured optimality gap stays under a few percent. The channel scale
    enters through the pure line-of-sight eigenvalue g_i * M * N. Pass an
    explicit v to override for anything exotic.
    """
    lam_hat = cfg.gains() * cfg.n_rx * cfg.n_tx
    horizon = 1e-3 * cfg.slots
    if kind == "mdpp-energy":
        # equilibrium backlog ~ v / lam_th per queue; 0.75 puts the worst
        # queue around 75% of its budget, which measured 3-4% above the
        # optimal transmit power on the single-receiver reference scenario
        targets = np.asarray(params.p_targets, dtype=np.float64)
        return 0.75 * horizon * float(np.min(targets * lam_hat))
    if kind == "mdpp-power":
        # equilibrium backlog ~ v * lam_th; measured gap ~1% with the
        # budget queue near a quarter of its allowance
        return 0.3 * horizon * params.p_avg / float(np.sum(lam_hat))
    if kind == "mmf":
        # bang-bang auxiliary targets keep sum(g) hovering near v, so a few
        # peak-power slots' worth is enough; larger v only slows tracking
        return 10.0 * params.p_avg
    if kind == "qpf":
        # the auxiliary queues settle at g_i ~ v / received_i following a
        # sqrt(2 v t) transient; this keeps that transient under a few
        # percent of the horizon for the weakest receiver
        recv_hat = params.p_avg * float(np.min(lam_hat))
        return 0.05 * cfg.slots * recv_hat**2
    raise ValueError(f"policy {kind!r} does not use v")
