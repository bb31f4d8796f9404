"""Statistical linkage learning: dependency-structure matrices estimated from
population statistics, and the standard linkage tree that clusters them.

The DSM entry for a variable pair is mutual information normalized by joint
entropy, computed from the empirical joint distribution of the pair's values
over the population. The standard linkage tree merges the pair of clusters
with the highest average cross-pair strength (UPGMA); ties break toward the
lexicographically smallest merged index set so trees are replayable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dependency import Vig


class Dsm:
    """Symmetric matrix of predicted pairwise dependency strengths in [0, 1]."""

    __slots__ = ("n", "m")

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("DSM must be square")
        if not np.allclose(m, m.T):
            raise ValueError("DSM must be symmetric")
        if not np.all(np.isfinite(m)):
            raise ValueError("DSM entries must be finite")
        self.m = m.copy()
        np.fill_diagonal(self.m, 0.0)
        if self.m.min() < -1e-12 or self.m.max() > 1 + 1e-12:
            raise ValueError("DSM entries must lie in [0, 1]")
        self.m = np.clip(self.m, 0.0, 1.0)
        self.n = m.shape[0]

    def entry(self, g: int, h: int) -> float:
        return float(self.m[g, h])

    def distance(self, g: int, h: int) -> float:
        """The ``1 - D`` metric form some clusterers use."""
        return 1.0 - self.entry(g, h)


def _dsm_from_pair_probs(p11, p10, p01, p00) -> Dsm:
    """Normalized mutual information per pair from joint probability matrices.

    Uses the 0*log(0) = 0 convention; a pair with zero joint entropy (both
    variables constant) carries no dependency evidence and gets 0.
    """
    p1 = p11 + p10  # P(x_g = 1), on the diagonal-consistent grids
    q1 = p11 + p01  # P(x_h = 1)

    def plogp(p):
        out = np.zeros_like(p)
        mask = p > 0
        out[mask] = p[mask] * np.log2(p[mask])
        return out

    def ploglik(p, marg):
        out = np.zeros_like(p)
        mask = p > 0
        out[mask] = p[mask] * np.log2(p[mask] / marg[mask])
        return out

    H = -(plogp(p11) + plogp(p10) + plogp(p01) + plogp(p00))
    I = (
        ploglik(p11, p1 * q1)
        + ploglik(p10, p1 * (1 - q1))
        + ploglik(p01, (1 - p1) * q1)
        + ploglik(p00, (1 - p1) * (1 - q1))
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        D = np.where(H > 0, I / np.maximum(H, 1e-300), 0.0)
    D = np.clip(D, 0.0, 1.0)
    D = (D + D.T) / 2.0
    np.fill_diagonal(D, 0.0)
    return Dsm(D)


def estimate_dsm(population) -> Dsm:
    """DSM from a population of solutions (list of Solution or a 0/1 matrix)."""
    if hasattr(population, "ndim"):
        mat = np.asarray(population, dtype=np.float64)
    else:
        if len(population) == 0:
            raise ValueError("population must be non-empty")
        mat = np.array([s.bits for s in population], dtype=np.float64)
    m = mat.shape[0]
    c11 = mat.T @ mat
    ones = mat.sum(axis=0)
    c10 = ones[:, None] - c11
    c01 = ones[None, :] - c11
    c00 = m - c11 - c10 - c01
    return _dsm_from_pair_probs(c11 / m, c10 / m, c01 / m, c00 / m)


def dsm_from_distribution(dist: dict[int, float], n: int) -> Dsm:
    """DSM from an explicit distribution over states (integer-encoded bits)."""
    p11 = np.zeros((n, n))
    p10 = np.zeros((n, n))
    p01 = np.zeros((n, n))
    p00 = np.zeros((n, n))
    shifts = np.arange(n)
    for state, pr in dist.items():
        bits = (int(state) >> shifts) & 1
        b1 = bits[:, None].astype(bool)
        b2 = bits[None, :].astype(bool)
        p11 += pr * (b1 & b2)
        p10 += pr * (b1 & ~b2)
        p01 += pr * (~b1 & b2)
        p00 += pr * (~b1 & ~b2)
    return _dsm_from_pair_probs(p11, p10, p01, p00)


@dataclass(frozen=True)
class TreeNode:
    members: tuple[int, ...]
    left: int | None = None
    right: int | None = None
    strength: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def size(self) -> int:
        return len(self.members)


class LinkageTree:
    """Agglomerative hierarchy over variable indices. Nodes are stored in
    creation order (leaves first), so the root is last and the sequence of
    internal nodes is the merge order."""

    def __init__(self, nodes: list[TreeNode]):
        self.nodes = nodes

    @property
    def root(self) -> TreeNode:
        return self.nodes[-1]

    def leaves(self) -> list[TreeNode]:
        return [nd for nd in self.nodes if nd.is_leaf]

    def internal_nodes(self) -> list[TreeNode]:
        return [nd for nd in self.nodes if not nd.is_leaf]

    def node_sets(self) -> set[frozenset[int]]:
        return {frozenset(nd.members) for nd in self.nodes}

    def children(self, node: TreeNode) -> tuple[TreeNode, TreeNode]:
        if node.is_leaf:
            raise ValueError("leaves have no children")
        return self.nodes[node.left], self.nodes[node.right]

    def __len__(self) -> int:
        return len(self.nodes)


def agglomerate(dsm: Dsm, indices, linkage: str) -> LinkageTree:
    """Bottom-up clustering of ``indices`` under the given inter-node strength
    rule: 'average' (mean over cross-pairs) or 'max' (strongest cross-pair).

    The pair with the highest strength merges first; exact ties resolve to the
    lexicographically smallest merged member tuple.
    """
    if linkage not in ("average", "max"):
        raise ValueError("linkage must be 'average' or 'max'")
    indices = list(indices)
    if not indices:
        raise ValueError("cannot cluster an empty index set")
    nodes = [TreeNode((int(i),)) for i in indices]
    if len(indices) == 1:
        return LinkageTree(nodes)

    m = len(indices)
    S = dsm.m[np.ix_(indices, indices)].astype(np.float64).copy()
    np.fill_diagonal(S, -np.inf)
    node_of = list(range(m))  # matrix slot -> node id
    sizes = np.ones(m)
    heads = np.array(indices, dtype=np.int64)  # smallest member per slot
    iu0, iu1 = np.triu_indices(m, 1)

    for _ in range(m - 1):
        vals = S[iu0, iu1]
        k = int(np.argmax(vals))
        best = vals[k]
        hits = np.flatnonzero(vals == best)
        if len(hits) == 1:
            a, b = int(iu0[k]), int(iu1[k])
        else:
            # lexicographically smallest merged member set; cheap pre-filter on
            # the smallest member before building full merged tuples
            hi, hj = iu0[hits], iu1[hits]
            pair_heads = np.minimum(heads[hi], heads[hj])
            finalists = hits[pair_heads == pair_heads.min()]
            a, b = min(
                ((int(iu0[f]), int(iu1[f])) for f in finalists),
                key=lambda ij: tuple(
                    sorted(nodes[node_of[ij[0]]].members + nodes[node_of[ij[1]]].members)
                ),
            )
        members = tuple(sorted(nodes[node_of[a]].members + nodes[node_of[b]].members))
        nodes.append(TreeNode(members, node_of[a], node_of[b], float(best)))
        if linkage == "average":
            S[a, :] = (sizes[a] * S[a, :] + sizes[b] * S[b, :]) / (sizes[a] + sizes[b])
        else:
            S[a, :] = np.maximum(S[a, :], S[b, :])
        S[:, a] = S[a, :]
        S[a, a] = -np.inf
        S[b, :] = -np.inf
        S[:, b] = -np.inf
        sizes[a] += sizes[b]
        heads[a] = min(heads[a], heads[b])
        node_of[a] = len(nodes) - 1

    return LinkageTree(nodes)


def build_lt(dsm: Dsm) -> LinkageTree:
    """Standard linkage tree over all variables (average linkage); exactly
    ``2n - 1`` nodes."""
    return agglomerate(dsm, range(dsm.n), "average")


def is_perfect(dsm: Dsm, vig: Vig) -> float | None:
    """Threshold strictly separating dependent-pair strengths from independent
    ones, or None when no such threshold exists.

    Vacuous sides get a valid convention: with no dependent pairs the
    threshold sits above the largest entry, with no independent pairs below
    the smallest dependent one.
    """
    if dsm.n != vig.n:
        raise ValueError("DSM and VIG sizes differ")
    iu = np.triu_indices(dsm.n, 1)
    strengths = dsm.m[iu]
    dependent = vig.adj[iu]
    dep_min = strengths[dependent].min() if dependent.any() else None
    ind_max = strengths[~dependent].max() if (~dependent).any() else None
    if dep_min is None and ind_max is None:
        return 0.5
    if dep_min is None:
        return float((ind_max + 1.0) / 2.0)
    if ind_max is None:
        return float(dep_min / 2.0) if dep_min > 0 else -0.5
    if dep_min > ind_max:
        return float((dep_min + ind_max) / 2.0)
    return None


# ---------------------------------------------------------------------------
# Text dump formats (used by the CLI oracle and test fixtures)


def dump_dsm(dsm: Dsm) -> str:
    """``n`` on the first line, then upper-triangle entries row-major."""
    lines = [str(dsm.n)]
    for g in range(dsm.n - 1):
        lines.append(" ".join(repr(float(v)) for v in dsm.m[g, g + 1:]))
    return "\n".join(lines) + "\n"


def parse_dsm(text: str) -> Dsm:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    n = int(lines[0])
    m = np.zeros((n, n))
    for g in range(n - 1):
        vals = [float(t) for t in lines[1 + g].split()]
        if len(vals) != n - g - 1:
            raise ValueError(f"DSM dump: row {g} has {len(vals)} entries, expected {n - g - 1}")
        m[g, g + 1:] = vals
        m[g + 1:, g] = vals
    return Dsm(m)


def dump_tree(tree: LinkageTree) -> str:
    """One line per node: id, children ids (or 'leaf'), merge strength, members."""
    lines = []
    for i, nd in enumerate(tree.nodes):
        kids = "leaf" if nd.is_leaf else f"{nd.left} {nd.right}"
        strength = "-" if nd.strength is None else repr(nd.strength)
        members = " ".join(str(v) for v in nd.members)
        lines.append(f"{i} | {kids} | {strength} | {members}")
    return "\n".join(lines) + "\n"
