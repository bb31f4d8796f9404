"""Partition-crossover mask extraction and PX-like linkage trees.

A PX mask is a connected component of the interaction graph restricted to the
positions where two parents differ. The PX-like linkage tree reproduces those
masks from a dependency-structure matrix alone: it clusters only the differing
positions and merges by the strongest cross-pair entry, so with a
threshold-separable (perfect) DSM every PX mask appears as a tree node.
LTopWS then selects tree nodes of useful size as mixing masks.
"""

from __future__ import annotations

import numpy as np

from .dependency import Vig
from .sll import Dsm, LinkageTree, agglomerate


def diff_indices(bits1, bits2) -> np.ndarray:
    b1 = np.asarray(bits1, dtype=np.uint8)
    b2 = np.asarray(bits2, dtype=np.uint8)
    if b1.shape != b2.shape:
        raise ValueError("parents must have equal length")
    return np.flatnonzero(b1 != b2)


def px_masks(vig: Vig, bits1, bits2) -> list[frozenset[int]]:
    """Connected components of ``vig`` restricted to the differing positions.

    Returned in ascending order of smallest member, each a frozenset.
    """
    diff = diff_indices(bits1, bits2)
    in_diff = np.zeros(vig.n, dtype=bool)
    in_diff[diff] = True
    seen = np.zeros(vig.n, dtype=bool)
    masks = []
    for start in diff:
        if seen[start]:
            continue
        comp = []
        stack = [int(start)]
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in np.flatnonzero(vig.adj[v] & in_diff & ~seen):
                seen[w] = True
                stack.append(int(w))
        masks.append(frozenset(comp))
    return masks


def build_px_lt(dsm: Dsm, bits1, bits2) -> LinkageTree | None:
    """PX-like linkage tree: leaves are exactly the differing positions and
    agglomeration merges the node pair with the strongest cross-pair DSM entry.

    Returns None when the parents are identical (nothing to mix).
    """
    diff = diff_indices(bits1, bits2)
    if len(diff) == 0:
        return None
    return agglomerate(dsm, diff, "max")


def ltop_ws(tree: LinkageTree, diff_count: int) -> list[tuple[int, ...]]:
    """Top-down node selection: starting from the root's children, accept a
    node as a mask iff ``1 < size <= diff_count / 2`` and do not descend into
    accepted nodes; descend into rejected oversized nodes; skip leaves.

    Accepted masks are therefore pairwise disjoint.
    """
    limit = diff_count / 2.0
    masks: list[tuple[int, ...]] = []
    if tree.root.is_leaf:
        return masks
    stack = list(tree.children(tree.root))
    while stack:
        node = stack.pop()
        if node.is_leaf:
            continue
        if node.size <= limit:
            masks.append(node.members)
        else:
            stack.extend(tree.children(node))
    masks.sort()
    return masks


def all_internal_masks(tree: LinkageTree) -> list[tuple[int, ...]]:
    """Every non-leaf, non-root node of a PX-LT (the mask-selection ablation)."""
    root = tree.root
    return [nd.members for nd in tree.internal_nodes() if nd is not root]
