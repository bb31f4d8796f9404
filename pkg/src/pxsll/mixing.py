"""Optimal mixing operators: standard OM over a linkage tree, and the PX-like
variant that builds a per-pair PX-LT, selects masks with LTopWS, and exits on
the first strict improvement (applying one equal-fitness "sliding" mask when
no improvement exists).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS, EvalBudget, RngStream, Solution, evaluate
from .dependency import Vig
from .pxlt import all_internal_masks, build_px_lt, ltop_ws, px_masks
from .sll import Dsm, LinkageTree


@dataclass
class MixOutcome:
    solution: Solution
    accepted: bool
    masks_tried: int
    slide_used: bool


class MaskShareStats:
    """Counts, over every mask application, how often the applied mask exactly
    equals a PX mask of the (source, donor) pair under an oracle VIG.

    Also tallies the accepted strictly-improving (non-slide) applications
    separately, since with an oracle-perfect model those are the applications
    expected to be PX masks almost always.
    """

    def __init__(self, vig: Vig):
        self.vig = vig
        self.applied = 0
        self.px_matches = 0
        self.improving = 0
        self.improving_px_matches = 0

    def record(self, mask_indices, src_bits, donor_bits, improving: bool = False) -> None:
        self.applied += 1
        mask = frozenset(int(i) for i in mask_indices)
        hit = mask in px_masks(self.vig, src_bits, donor_bits)
        self.px_matches += hit
        if improving:
            self.improving += 1
            self.improving_px_matches += hit

    @property
    def share(self) -> float:
        """Share of all applied masks that were PX masks."""
        return self.px_matches / self.applied if self.applied else 0.0

    @property
    def improving_share(self) -> float:
        """Share of accepted, strictly-improving masks that were PX masks."""
        return self.improving_px_matches / self.improving if self.improving else 0.0


def _ordered_nodes(tree: LinkageTree, ordering: str, rng: RngStream):
    root = tree.root
    nodes = [nd for nd in tree.nodes if nd is not root]
    rng.gen.shuffle(nodes)
    if ordering == "random":
        return nodes
    if ordering == "shortest-first":
        nodes = [nd for nd in nodes if nd.size > 1]
        nodes.sort(key=lambda nd: nd.size)  # stable: random within equal size
        return nodes
    raise ValueError(f"unknown node ordering {ordering!r}")


def om_step(
    instance,
    src: Solution,
    members: np.ndarray,
    tree: LinkageTree,
    ordering: str,
    rng: RngStream,
    budget: EvalBudget,
    evig: Vig | None = None,
    stats: MaskShareStats | None = None,
) -> MixOutcome:
    """One optimal-mixing pass of ``src`` against a donor population.

    For each tree node (root excluded, ordered per ``ordering``): draw a donor
    uniformly among members that differ from ``src`` inside the mask, copy the
    donor's genes at the mask, and keep the candidate iff its fitness is not
    worse. Masks without an eligible donor are skipped at zero cost. When an
    empirical VIG is supplied, nodes with no internal eVIG edge are skipped.

    ``src`` is modified in place, so the last accepted state survives even if
    the budget runs out mid-pass (the in-flight candidate is discarded).
    """
    if members.ndim != 2 or members.shape[0] == 0:
        raise ValueError("donor population must be a non-empty matrix")
    if src.fitness is None:
        evaluate(instance, src, budget)
    accepted = False
    tried = 0
    for node in _ordered_nodes(tree, ordering, rng):
        mask = np.asarray(node.members, dtype=np.intp)
        if evig is not None and node.size > 1:
            if not evig.adj[np.ix_(mask, mask)].any():
                continue
        differs = (members[:, mask] != src.bits[mask]).any(axis=1)
        eligible = np.flatnonzero(differs)
        if eligible.size == 0:
            continue
        donor_bits = members[eligible[int(rng.gen.integers(eligible.size))]]
        candidate = src.copy()
        candidate.write_mask(mask, donor_bits)
        f = evaluate(instance, candidate, budget)
        tried += 1
        if stats is not None:
            stats.record(mask, src.bits, donor_bits, improving=f > src.fitness + EPS)
        if f >= src.fitness - EPS:
            src.bits[:] = candidate.bits
            src._fitness = f
            accepted = True
    return MixOutcome(src, accepted, tried, False)


def px_om(
    instance,
    dsm: Dsm,
    src: Solution,
    donor: Solution,
    rng: RngStream,
    budget: EvalBudget,
    mask_mode: str = "ltopws",
    stats: MaskShareStats | None = None,
) -> MixOutcome:
    """PX-like optimal mixing of ``src`` with a single donor.

    Builds the PX-LT for the pair, selects masks (LTopWS by default, or every
    internal node in the "all" ablation), shuffles them, and applies them one
    at a time: the first strict improvement is returned immediately; masks
    leaving fitness exactly unchanged are remembered as sliding masks, one of
    which is applied uniformly at random when no improvement is found.

    Consumes at most one evaluation per tried mask (plus one if ``src`` has no
    cached fitness); identical parents return ``src`` untouched at zero cost.
    """
    if mask_mode not in ("ltopws", "all"):
        raise ValueError(f"unknown mask mode {mask_mode!r}")
    if np.array_equal(src.bits, donor.bits):
        return MixOutcome(src, False, 0, False)
    if src.fitness is None:
        evaluate(instance, src, budget)
    tree = build_px_lt(dsm, src.bits, donor.bits)
    diff_count = int((src.bits != donor.bits).sum())
    if mask_mode == "ltopws":
        masks = ltop_ws(tree, diff_count)
    else:
        masks = all_internal_masks(tree)
    masks = list(masks)
    rng.gen.shuffle(masks)

    slides: list[tuple[tuple[int, ...], float]] = []
    tried = 0
    for members in masks:
        mask = np.asarray(members, dtype=np.intp)
        candidate = src.copy()
        candidate.write_mask(mask, donor.bits)
        f = evaluate(instance, candidate, budget)
        tried += 1
        if stats is not None:
            stats.record(mask, src.bits, donor.bits, improving=f > src.fitness + EPS)
        if f > src.fitness + EPS:
            src.bits[:] = candidate.bits
            src._fitness = f
            return MixOutcome(src, True, tried, False)
        if abs(f - src.fitness) <= EPS:
            slides.append((members, f))

    if slides:
        members, f = slides[int(rng.gen.integers(len(slides)))]
        mask = np.asarray(members, dtype=np.intp)
        src.write_mask(mask, donor.bits)
        src._fitness = f
        return MixOutcome(src, True, tried, True)
    return MixOutcome(src, False, tried, False)
