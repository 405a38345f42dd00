"""Structural masking probabilities and mask-plan sampling.

Transmission from the anchor to each entry vertex mixes one-hop and two-hop
reachability equally, computed on a column-capped copy of the entry
similarity matrix so every transmission value stays a probability.  The
anchor is always masked; same-modality contexts get alpha * t and
opposite-modality contexts get (1 - alpha) * (1 - t).

Random plans for the plain masked-modeling tasks draw Bernoulli masks at a
fixed rate, forcing one index when the draw comes up empty so the loss is
always defined.
"""

from dataclasses import dataclass, field

import numpy as np

from .graph import MODALITY_IMAGE, MODALITY_TEXT

DEFAULT_ALPHA = 0.9
DEFAULT_RANDOM_RATE = 0.15


@dataclass
class MaskPlan:
    origin: str  # "skm" | "random"
    masked_word_indices: set = field(default_factory=set)
    masked_region_indices: set = field(default_factory=set)
    probabilities: np.ndarray | None = None  # entry-ordered (skm plans)
    rate: float | None = None  # random plans
    anchor: int | None = None  # graph vertex id (skm plans)


def _as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def cap_columns(S_hat):
    """Divide any column whose sum exceeds 1 by that sum.

    Keeps the two-hop products of the transmission computation inside
    [0, 1] while preserving within-column proportions.
    """
    capped = np.array(S_hat, dtype=np.float64, copy=True)
    sums = capped.sum(axis=0)
    over = sums > 1.0
    capped[:, over] /= sums[over]
    return capped


def transmission_probs(entry):
    """Anchor-to-vertex transmission: half one-hop plus half two-hop mass."""
    S = cap_columns(entry.S_hat)
    pi = np.zeros(entry.size)
    pi[0] = 1.0  # anchor is local index 0 by construction
    one_hop = S @ pi
    two_hop = S @ one_hop
    return 0.5 * one_hop + 0.5 * two_hop


def masking_probs(T, entry, alpha=DEFAULT_ALPHA):
    """Per-vertex masking probabilities for an entry.

    The anchor is always 1.  Contexts in the anchor's modality scale with
    transmission (mask likely leakers); contexts in the opposite modality
    scale against it (keep strong alignments visible).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0,1]")
    P = np.empty(entry.size)
    P[0] = 1.0
    anchor_mod = entry.anchor_modality
    for j in range(1, entry.size):
        if entry.modalities[j] == anchor_mod:
            P[j] = alpha * T[j]
        else:
            P[j] = (1.0 - alpha) * (1.0 - T[j])
    return P


def identical_probs(entry, p):
    """Ablation variant: anchor at 1, every context at a flat p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"identical probability {p} outside [0,1]")
    P = np.full(entry.size, p)
    P[0] = 1.0
    return P


def sample_masks(P, entry, seed_or_rng):
    """Draw an independent Bernoulli mask per entry vertex.

    Masked vertices are routed to word or region index sets by modality.
    Deterministic given the seed.
    """
    rng = _as_rng(seed_or_rng)
    draws = rng.random(entry.size) < P
    plan = MaskPlan(origin="skm", probabilities=np.asarray(P, dtype=np.float64),
                    anchor=entry.vertex_ids[0])
    for j, masked in enumerate(draws):
        if not masked:
            continue
        if entry.modalities[j] == MODALITY_TEXT:
            plan.masked_word_indices.add(entry.payloads[j])
        else:
            plan.masked_region_indices.add(entry.payloads[j])
    return plan


def random_mask_plan(n_items, modality, seed_or_rng, rate=DEFAULT_RANDOM_RATE):
    """Plain random mask over ``n_items`` positions at ``rate``.

    An empty draw masks one uniformly-chosen index instead, so every plan
    masks at least one position.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate {rate} outside [0,1]")
    if n_items < 1:
        raise ValueError("need at least one maskable item")
    rng = _as_rng(seed_or_rng)
    masked = set(np.flatnonzero(rng.random(n_items) < rate).tolist())
    if not masked:
        masked = {int(rng.integers(n_items))}
    plan = MaskPlan(origin="random", rate=rate)
    if modality == MODALITY_TEXT:
        plan.masked_word_indices = masked
    elif modality == MODALITY_IMAGE:
        plan.masked_region_indices = masked
    else:
        raise ValueError(f"unknown modality {modality!r}")
    return plan
