"""Zero forcing: the color-change rule, exhaustive Z(G) and the clique-tree formula."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .graph import CliqueTreeStructure, Graph, GraphError, blocks_and_cut_vertices, vertex_sum

DEFAULT_EXHAUSTIVE_CAP = 16


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True)
class ForcingState:
    """Blue set reached by the color-change rule and the forces that got there."""

    blue: frozenset[int]
    trace: tuple[tuple[int, int], ...]

    def is_complete(self, n: int) -> bool:
        return len(self.blue) == n


def _masks(g: Graph) -> list[int]:
    out = []
    for v in range(g.n):
        mask = 0
        for w in g.adj[v]:
            mask |= 1 << w
        out.append(mask)
    return out


def _closure_mask(nbr: Sequence[int], blue: int, order: Sequence[int]) -> int:
    changed = True
    while changed:
        changed = False
        for u in order:
            if not (blue >> u) & 1:
                continue
            white = nbr[u] & ~blue
            if white and not white & (white - 1):
                blue |= white
                changed = True
    return blue


def forcing_closure(
    g: Graph, seed: Iterable[int], order: Sequence[int] | None = None
) -> ForcingState:
    """Apply the color-change rule until nothing changes.

    Rounds scan vertices in ``order`` (ascending labels by default); the final
    blue set does not depend on the order, only the trace does.
    """
    blue = set(seed)
    for v in blue:
        if not 0 <= v < g.n:
            raise GraphError(f"seed vertex {v} out of range")
    order = list(range(g.n)) if order is None else list(order)
    trace: list[tuple[int, int]] = []
    changed = True
    while changed:
        changed = False
        for u in order:
            if u not in blue:
                continue
            white = [w for w in g.adj[u] if w not in blue]
            if len(white) == 1:
                blue.add(white[0])
                trace.append((u, white[0]))
                changed = True
    return ForcingState(frozenset(blue), tuple(trace))


def is_zero_forcing_set(g: Graph, s: Iterable[int]) -> bool:
    return forcing_closure(g, s).is_complete(g.n)


def zero_forcing_number_exhaustive(
    g: Graph, cap: int = DEFAULT_EXHAUSTIVE_CAP
) -> tuple[int, tuple[int, ...]]:
    """Minimum zero forcing set by subset search, smallest sizes first.

    Returns ``(Z, witness)`` where the witness is the lexicographically least
    minimum zero forcing set.
    """
    if g.n > cap:
        raise CapExceededError(
            f"exhaustive zero forcing limited to n <= {cap} (got n={g.n}); "
            "use zero_forcing_number_formula for clique trees"
        )
    if g.n == 0:
        return 0, ()
    nbr = _masks(g)
    full = (1 << g.n) - 1
    order = range(g.n)
    for size in range(g.n + 1):
        for subset in combinations(range(g.n), size):
            blue = 0
            for v in subset:
                blue |= 1 << v
            if _closure_mask(nbr, blue, order) == full:
                return size, subset
    raise AssertionError("unreachable: V(G) forces itself")


def zero_forcing_number_formula(ct: CliqueTreeStructure) -> int:
    """Sum of Z(K_m) = m - 1 over blocks minus sum of (block index - 1)."""
    small = [len(bl) for bl in ct.blocks if len(bl) < 3]
    if small:
        raise GraphError(f"formula requires blocks of size >= 3, found sizes {small}")
    return sum(len(bl) - 1 for bl in ct.blocks) - sum(bi - 1 for bi in ct.block_index)


def zero_forcing_number(g: Graph) -> int:
    return zero_forcing_number_formula(blocks_and_cut_vertices(g))


def pendant_reduction_check(
    g1: Graph, v: int, m: int, cap: int = DEFAULT_EXHAUSTIVE_CAP
) -> bool:
    """Check Z(G1 + K_m glued at v) == Z(G1) + Z(K_m) - 1 with the exhaustive oracle."""
    if m < 3:
        raise GraphError("pendant clique must have at least 3 vertices")
    if not 0 <= v < g1.n:
        raise GraphError(f"vertex {v} not in G1")
    composed = vertex_sum(g1, v, Graph.complete(m))
    if composed.n > cap:
        raise CapExceededError(f"composed graph has n={composed.n} > cap {cap}")
    z_sum = zero_forcing_number_exhaustive(composed, cap)[0]
    z1 = zero_forcing_number_exhaustive(g1, cap)[0]
    zk = zero_forcing_number_exhaustive(Graph.complete(m), cap)[0]
    return z_sum == z1 + zk - 1


def valid_k_range(n: int) -> tuple[int, int]:
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return n // 2 + 1, n - 1


def check_nk(n: int, k: int) -> None:
    lo, hi = valid_k_range(n)
    if not lo <= k <= hi:
        raise ValueError(f"invalid (n,k)=({n},{k}): k must lie in [{lo}, {hi}]")
