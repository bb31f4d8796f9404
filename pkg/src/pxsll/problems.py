"""Benchmark problem suite: deceptive traps, bimodal traps, overlapping rings,
NK landscapes, Ising spin glasses, MAX3SAT, and the small fixture functions
used throughout the tests.

Instances are immutable after construction and evaluation is a pure function
of the bits, so they can be shared read-only across concurrent runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dependency import Vig

KINDS = (
    "trap-concat",
    "cyclic-trap",
    "bimodal-concat",
    "bimodal-cyclic",
    "nk-landscape",
    "ising-spin-glass",
    "max3sat",
    "example-fixture",
)


def dec(u: int, k: int) -> int:
    """Standard deceptive trap of order ``k``: ``k`` at ``u == k``, else ``k - 1 - u``."""
    if not 0 <= u <= k:
        raise ValueError(f"unitation {u} out of range for order {k}")
    return k if u == k else k - 1 - u


def bim(u: int, k: int) -> int:
    """Bimodal deceptive trap of order ``k`` (``k`` even): peaks ``k/2`` at both
    ``u == 0`` and ``u == k``, deceptive middle peak ``k/2 - 1`` at ``u == k/2``."""
    if k % 2 != 0:
        raise ValueError("bimodal trap order must be even")
    if not 0 <= u <= k:
        raise ValueError(f"unitation {u} out of range for order {k}")
    if u == 0 or u == k:
        return k // 2
    return k // 2 - abs(u - k // 2) - 1


def _dec_table(k: int) -> np.ndarray:
    return np.array([dec(u, k) for u in range(k + 1)], dtype=np.float64)


def _bim_table(k: int) -> np.ndarray:
    return np.array([bim(u, k) for u in range(k + 1)], dtype=np.float64)


@dataclass(frozen=True)
class OverlapLayout:
    """Placement of equal-order blocks over the genome, optionally sharing
    ``overlap`` variables between neighbours and wrapping around when cyclic."""

    k: int
    overlap: int
    num_blocks: int
    cyclic: bool = False

    def __post_init__(self):
        if not 0 <= self.overlap < self.k:
            raise ValueError("overlap must satisfy 0 <= overlap < k")
        if self.num_blocks < 1:
            raise ValueError("need at least one block")
        if self.cyclic and self.overlap > 0 and self.num_blocks < 3:
            raise ValueError("a cyclic overlapping layout needs >= 3 blocks")

    @property
    def n(self) -> int:
        if self.cyclic:
            return self.num_blocks * (self.k - self.overlap)
        return self.k + (self.num_blocks - 1) * (self.k - self.overlap)

    def block_indices(self) -> list[tuple[int, ...]]:
        step = self.k - self.overlap
        n = self.n
        blocks = []
        for b in range(self.num_blocks):
            start = b * step
            if self.cyclic:
                blocks.append(tuple((start + j) % n for j in range(self.k)))
            else:
                blocks.append(tuple(start + j for j in range(self.k)))
        return blocks


class ProblemInstance:
    """An evaluable pseudo-boolean function with optional known optimum and
    ground-truth variable interaction graph."""

    def __init__(
        self,
        n: int,
        kind: str,
        value_fn,
        *,
        params: dict | None = None,
        known_optimum: float | None = None,
        deceptive_level: float | None = None,
        ground_truth_vig: Vig | None = None,
        value_batch_fn=None,
    ):
        if kind not in KINDS:
            raise ValueError(f"unknown problem kind {kind!r}")
        self.n = int(n)
        self.kind = kind
        self._value_fn = value_fn
        self.params = dict(params or {})
        self.known_optimum = known_optimum
        #: Fitness of the fully deceived solution, when analytically known;
        #: used by the noise wrapper's default threshold rule.
        self.deceptive_level = deceptive_level
        self.ground_truth_vig = ground_truth_vig
        self._value_batch_fn = value_batch_fn

    def value(self, bits) -> float:
        """Pure fitness of a bit vector (no budget accounting)."""
        return float(self._value_fn(np.asarray(bits, dtype=np.uint8)))

    def value_batch(self, mat: np.ndarray) -> np.ndarray:
        """Fitness of every row of ``mat``; vectorized where the kind allows."""
        mat = np.asarray(mat, dtype=np.uint8)
        if self._value_batch_fn is not None:
            return np.asarray(self._value_batch_fn(mat), dtype=np.float64)
        return np.array([self._value_fn(row) for row in mat], dtype=np.float64)

    def __repr__(self) -> str:  # pragma: no cover
        return f"ProblemInstance(kind={self.kind!r}, n={self.n})"


def _block_instance(
    kind: str,
    blocks: list[tuple[int, ...]],
    n: int,
    table: np.ndarray,
    *,
    product: bool = False,
    known_optimum: float | None = None,
    deceptive_level: float | None = None,
    params: dict | None = None,
) -> ProblemInstance:
    idx = np.array(blocks, dtype=np.intp)

    if product:
        def value(bits):
            u = bits[idx].sum(axis=1)
            return np.prod(table[u] + 1.0)

        def value_batch(mat):
            u = mat[:, idx].sum(axis=2)
            return np.prod(table[u] + 1.0, axis=1)
    else:
        def value(bits):
            u = bits[idx].sum(axis=1)
            return table[u].sum()

        def value_batch(mat):
            u = mat[:, idx].sum(axis=2)
            return table[u].sum(axis=1)

    return ProblemInstance(
        n,
        kind,
        value,
        params=params,
        known_optimum=known_optimum,
        deceptive_level=deceptive_level,
        ground_truth_vig=Vig.from_blocks(n, blocks),
        value_batch_fn=value_batch,
    )


def trap_concatenation(k: int, num_blocks: int) -> ProblemInstance:
    """Concatenation of ``num_blocks`` disjoint order-``k`` deceptive traps."""
    layout = OverlapLayout(k, 0, num_blocks)
    return _block_instance(
        "trap-concat",
        layout.block_indices(),
        layout.n,
        _dec_table(k),
        known_optimum=float(k * num_blocks),
        deceptive_level=float((k - 1) * num_blocks),
        params={"k": k, "num_blocks": num_blocks},
    )


def trap_ring(k: int, overlap: int, num_blocks: int) -> ProblemInstance:
    """Cyclic trap: order-``k`` deceptive blocks sharing ``overlap`` variables
    with each neighbour, the last wrapping onto the first."""
    layout = OverlapLayout(k, overlap, num_blocks, cyclic=True)
    return _block_instance(
        "cyclic-trap",
        layout.block_indices(),
        layout.n,
        _dec_table(k),
        known_optimum=float(k * num_blocks),
        deceptive_level=float((k - 1) * num_blocks),
        params={"k": k, "overlap": overlap, "num_blocks": num_blocks},
    )


def bimodal_concatenation(k: int, num_blocks: int) -> ProblemInstance:
    layout = OverlapLayout(k, 0, num_blocks)
    return _block_instance(
        "bimodal-concat",
        layout.block_indices(),
        layout.n,
        _bim_table(k),
        known_optimum=float((k // 2) * num_blocks),
        deceptive_level=float((k // 2 - 1) * num_blocks),
        params={"k": k, "num_blocks": num_blocks},
    )


def bimodal_ring(k: int, overlap: int, num_blocks: int) -> ProblemInstance:
    layout = OverlapLayout(k, overlap, num_blocks, cyclic=True)
    return _block_instance(
        "bimodal-cyclic",
        layout.block_indices(),
        layout.n,
        _bim_table(k),
        known_optimum=float((k // 2) * num_blocks),
        deceptive_level=float((k // 2 - 1) * num_blocks),
        params={"k": k, "overlap": overlap, "num_blocks": num_blocks},
    )


def overlapping_sum_value(blocks, base, bits) -> float:
    """Sum of ``base(unitation of block)`` over possibly overlapping blocks."""
    bits = np.asarray(bits, dtype=np.uint8)
    return float(sum(base(int(bits[list(b)].sum())) for b in blocks))


def overlapping_product_value(blocks, base, bits) -> float:
    """Product of ``base(unitation of block) + 1`` factors over the blocks."""
    bits = np.asarray(bits, dtype=np.uint8)
    out = 1.0
    for b in blocks:
        out *= base(int(bits[list(b)].sum())) + 1
    return out


#: Block index sets of the 9-variable overlapped bimodal fixtures: three
#: order-4 blocks, the first two sharing one variable, the last two sharing two.
TRIPLE_BIM4_BLOCKS = [(0, 1, 2, 3), (3, 4, 5, 6), (5, 6, 7, 8)]


def bim4_triple_overlap_sum() -> ProblemInstance:
    """Sum of three overlapping order-4 bimodal traps over 9 variables."""
    return _block_instance(
        "example-fixture",
        TRIPLE_BIM4_BLOCKS,
        9,
        _bim_table(4),
        known_optimum=6.0,
        params={"name": "bim4-triple-sum"},
    )


def bim4_triple_overlap_product() -> ProblemInstance:
    """Product of three overlapping ``bim_4 + 1`` factors over 9 variables."""
    return _block_instance(
        "example-fixture",
        TRIPLE_BIM4_BLOCKS,
        9,
        _bim_table(4),
        product=True,
        known_optimum=27.0,
        params={"name": "bim4-triple-product"},
    )


def onemax(n: int) -> ProblemInstance:
    return ProblemInstance(
        n,
        "example-fixture",
        lambda bits: float(bits.sum()),
        params={"name": "onemax"},
        known_optimum=float(n),
        ground_truth_vig=Vig(n),
        value_batch_fn=lambda mat: mat.sum(axis=1).astype(np.float64),
    )


def onemax_squared(n: int) -> ProblemInstance:
    """Squared unitation: separable to optimize, yet every pair is non-linearly
    dependent (the canonical oversensitivity case for the non-linearity check)."""
    return ProblemInstance(
        n,
        "example-fixture",
        lambda bits: float(bits.sum()) ** 2,
        params={"name": "onemax-squared"},
        known_optimum=float(n) ** 2,
        value_batch_fn=lambda mat: mat.sum(axis=1).astype(np.float64) ** 2,
    )


def double_trap4_spiked() -> ProblemInstance:
    """Two disjoint order-4 traps over 8 variables with a single off-peak
    solution raised to 5.5 -- a hand-sized model of noise that creates
    non-monotonic dependencies across the two blocks."""
    spike = np.array([0, 1, 1, 0, 0, 0, 0, 0], dtype=np.uint8)
    base = trap_concatenation(4, 2)

    def value(bits):
        if np.array_equal(bits, spike):
            return 5.5
        return base.value(bits)

    def value_batch(mat):
        out = base.value_batch(mat)
        hit = np.all(mat == spike, axis=1)
        out[hit] = 5.5
        return out

    return ProblemInstance(
        8,
        "example-fixture",
        value,
        params={"name": "double-trap4-spiked", "spike_value": 5.5},
        known_optimum=8.0,
        value_batch_fn=value_batch,
    )


def table_instance(values, kind: str = "example-fixture", **kwargs) -> ProblemInstance:
    """Instance defined by an explicit fitness table over all ``2**n`` states;
    index bit ``i`` is variable ``i``."""
    values = np.asarray(values, dtype=np.float64)
    n = int(values.shape[0]).bit_length() - 1
    if values.shape[0] != 1 << n:
        raise ValueError("table length must be a power of two")
    pow2 = (1 << np.arange(n)).astype(np.int64)

    return ProblemInstance(
        n,
        kind,
        lambda bits: values[int(bits.astype(np.int64) @ pow2)],
        value_batch_fn=lambda mat: values[mat.astype(np.int64) @ pow2],
        **kwargs,
    )


# ---------------------------------------------------------------------------
# NK landscapes


def _nk_instance(n, k, neighbors, tables, seed=None) -> ProblemInstance:
    nb = np.asarray(neighbors, dtype=np.intp).reshape(n, k)
    tab = np.asarray(tables, dtype=np.float64).reshape(n, 1 << (k + 1))
    # subfunction input code: own bit is the high bit, then neighbours in
    # stored order, first neighbour most significant
    w = (1 << np.arange(k - 1, -1, -1)).astype(np.int64) if k else np.zeros(0, np.int64)
    rows = np.arange(n)

    def value(bits):
        codes = bits.astype(np.int64) << k
        if k:
            codes = codes + bits[nb].astype(np.int64) @ w
        return tab[rows, codes].sum()

    def value_batch(mat):
        codes = mat.astype(np.int64) << k
        if k:
            codes = codes + mat[:, nb].astype(np.int64) @ w
        return tab[rows, codes].sum(axis=1)

    blocks = [tuple([i] + list(nb[i])) for i in range(n)]
    inst = ProblemInstance(
        n,
        "nk-landscape",
        value,
        params={"k": k, "seed": seed, "neighbors": nb, "tables": tab},
        ground_truth_vig=Vig.from_blocks(n, blocks),
        value_batch_fn=value_batch,
    )
    if n <= 16:
        inst.known_optimum = float(inst.value_batch(_all_states(n)).max())
    return inst


def _all_states(n: int) -> np.ndarray:
    ints = np.arange(1 << n, dtype=np.int64)
    return ((ints[:, None] >> np.arange(n)) & 1).astype(np.uint8)


def generate_nk(n: int, k: int, seed: int) -> ProblemInstance:
    """Random-neighbour NK landscape: each position depends on ``k`` distinct
    random other positions; subfunction tables uniform in [0, 1)."""
    if k >= n:
        raise ValueError("k must be smaller than n")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    neighbors = np.empty((n, k), dtype=np.intp)
    for i in range(n):
        pool = np.delete(np.arange(n), i)
        neighbors[i] = rng.choice(pool, size=k, replace=False)
    tables = rng.random((n, 1 << (k + 1)))
    return _nk_instance(n, k, neighbors, tables, seed)


def save_nk(instance: ProblemInstance, path) -> None:
    p = instance.params
    with open(path, "w") as fh:
        fh.write(f"{instance.n} {p['k']} {p['seed'] if p['seed'] is not None else 0}\n")
        for i in range(instance.n):
            nbs = " ".join(str(int(j)) for j in p["neighbors"][i])
            vals = " ".join(repr(float(v)) for v in p["tables"][i])
            fh.write((nbs + " " + vals).strip() + "\n")


def load_nk(path) -> ProblemInstance:
    with open(path) as fh:
        lines = fh.read().split("\n")
    try:
        n, k, seed = (int(t) for t in lines[0].split())
    except (ValueError, IndexError):
        raise ValueError(f"{path}: line 1: expected header 'n k seed'")
    neighbors = np.empty((n, k), dtype=np.intp)
    tables = np.empty((n, 1 << (k + 1)))
    for i in range(n):
        toks = lines[1 + i].split()
        if len(toks) != k + (1 << (k + 1)):
            raise ValueError(f"{path}: line {i + 2}: expected {k + (1 << (k + 1))} fields")
        neighbors[i] = [int(t) for t in toks[:k]]
        tables[i] = [float(t) for t in toks[k:]]
    return _nk_instance(n, k, neighbors, tables, seed)


# ---------------------------------------------------------------------------
# Ising spin glasses (2-D toroidal +/-J lattice, energy negated so we maximize)


def _isg_instance(side, edges, couplings) -> ProblemInstance:
    n = side * side
    e = np.asarray(edges, dtype=np.intp)
    j = np.asarray(couplings, dtype=np.float64)

    def value(bits):
        s = 2.0 * bits - 1.0
        return (j * s[e[:, 0]] * s[e[:, 1]]).sum()

    def value_batch(mat):
        s = 2.0 * mat - 1.0
        return (j * s[:, e[:, 0]] * s[:, e[:, 1]]).sum(axis=1)

    inst = ProblemInstance(
        n,
        "ising-spin-glass",
        value,
        params={"side": side, "edges": e, "couplings": j},
        ground_truth_vig=Vig.from_edges(n, [tuple(pair) for pair in e]),
        value_batch_fn=value_batch,
    )
    if n <= 16:
        inst.known_optimum = float(inst.value_batch(_all_states(n)).max())
    return inst


def generate_isg(side: int, seed: int) -> ProblemInstance:
    """Toroidal ``side x side`` lattice with couplings drawn uniformly from {-1, +1}."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    edges = []
    for r in range(side):
        for c in range(side):
            i = r * side + c
            edges.append((i, r * side + (c + 1) % side))
            edges.append((i, ((r + 1) % side) * side + c))
    couplings = rng.choice(np.array([-1.0, 1.0]), size=len(edges))
    return _isg_instance(side, edges, couplings)


def save_isg(instance: ProblemInstance, path) -> None:
    p = instance.params
    with open(path, "w") as fh:
        fh.write(f"{p['side']}\n")
        for (a, b), j in zip(p["edges"], p["couplings"]):
            fh.write(f"{int(a)} {int(b)} {int(j)}\n")


def load_isg(path) -> ProblemInstance:
    with open(path) as fh:
        lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    try:
        side = int(lines[0])
    except (ValueError, IndexError):
        raise ValueError(f"{path}: line 1: expected lattice side length")
    edges, couplings = [], []
    for ln_no, ln in enumerate(lines[1:], start=2):
        toks = ln.split()
        if len(toks) != 3:
            raise ValueError(f"{path}: line {ln_no}: expected 'i j J'")
        a, b, j = int(toks[0]), int(toks[1]), int(toks[2])
        if j not in (-1, 1):
            raise ValueError(f"{path}: line {ln_no}: coupling must be -1 or +1")
        edges.append((a, b))
        couplings.append(float(j))
    return _isg_instance(side, edges, couplings)


# ---------------------------------------------------------------------------
# MAX3SAT (DIMACS CNF; fitness = number of satisfied clauses)


def load_max3sat(path) -> ProblemInstance:
    with open(path) as fh:
        text = fh.read()
    return max3sat_from_dimacs(text, origin=str(path))


def max3sat_from_dimacs(text: str, origin: str = "<string>") -> ProblemInstance:
    n = None
    clauses: list[list[int]] = []
    pending: list[int] = []
    for ln_no, ln in enumerate(text.split("\n"), start=1):
        ln = ln.strip()
        if not ln or ln.startswith(("c", "%")):
            continue
        if ln.startswith("p"):
            toks = ln.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ValueError(f"{origin}: line {ln_no}: malformed problem line")
            n = int(toks[2])
            continue
        try:
            lits = [int(t) for t in ln.split()]
        except ValueError:
            raise ValueError(f"{origin}: line {ln_no}: non-integer literal")
        for lit in lits:
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(pending)
    if n is None:
        raise ValueError(f"{origin}: missing 'p cnf' header")
    if any(len(c) == 0 for c in clauses):
        raise ValueError(f"{origin}: empty clause")
    width = max(len(c) for c in clauses)
    idx = np.zeros((len(clauses), width), dtype=np.intp)
    want = np.zeros((len(clauses), width), dtype=np.uint8)
    valid = np.zeros((len(clauses), width), dtype=bool)
    for ci, c in enumerate(clauses):
        for li, lit in enumerate(c):
            idx[ci, li] = abs(lit) - 1
            want[ci, li] = 1 if lit > 0 else 0
            valid[ci, li] = True

    def value(bits):
        sat = (bits[idx] == want) & valid
        return float(sat.any(axis=1).sum())

    def value_batch(mat):
        sat = (mat[:, idx] == want) & valid
        return sat.any(axis=2).sum(axis=1).astype(np.float64)

    pairs = set()
    for c in clauses:
        vs = sorted({abs(lit) - 1 for lit in c})
        for i in range(len(vs)):
            for jv in vs[i + 1:]:
                pairs.add((vs[i], jv))
    inst = ProblemInstance(
        n,
        "max3sat",
        value,
        params={"num_clauses": len(clauses)},
        ground_truth_vig=Vig.from_edges(n, sorted(pairs)),
        value_batch_fn=value_batch,
    )
    if n <= 16:
        inst.known_optimum = float(inst.value_batch(_all_states(n)).max())
    return inst
