"""Graph rewrites that raise the spectral radius while keeping the zero forcing number.

Each rewrite checks its Perron-ordering preconditions against the Perron
vector of the input and returns a new graph.  Perron ties are broken by the
lowest vertex label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import CliqueTreeStructure, Graph, blocks_and_cut_vertices, canonical_key, is_clique_tree
from .spectral import spectral_radius, spectral_radius_value

# Perron entries closer than this count as equal
TIE_TOL = 1e-10


class PreconditionError(ValueError):
    pass


def _perron(g: Graph, perron: np.ndarray | None) -> np.ndarray:
    return spectral_radius(g).perron if perron is None else perron


def _as_block(ct: CliqueTreeStructure, block: int | Iterable[int]) -> tuple[int, ...]:
    if isinstance(block, (int, np.integer)):
        return ct.blocks[int(block)]
    return ct.blocks[ct.block_of(block)]


def _ranked(x: np.ndarray, vertices: Iterable[int]) -> list[int]:
    """Vertices by increasing Perron entry; near-ties keep label order."""
    out = sorted(vertices, key=lambda u: (x[u], u))
    # entries within TIE_TOL stay label ordered
    i = 0
    while i < len(out):
        j = i
        while j + 1 < len(out) and x[out[j + 1]] - x[out[i]] <= TIE_TOL:
            j += 1
        out[i : j + 1] = sorted(out[i : j + 1])
        i = j + 1
    return out


def _argmax(x: np.ndarray, vertices: Iterable[int]) -> int:
    vs = sorted(vertices)
    best = max(x[v] for v in vs)
    return next(v for v in vs if x[v] >= best - TIE_TOL)


def relocate_pendant_triangles(
    g: Graph, km_block: int | Iterable[int], perron: np.ndarray | None = None
) -> Graph:
    """Move every pendant triangle of a K_m onto its largest-Perron vertex.

    The input must be one K_m (m >= 3) with all remaining blocks pendant
    triangles glued to at least two distinct vertices of the K_m.
    """
    ct = blocks_and_cut_vertices(g)
    km = _as_block(ct, km_block)
    if len(km) < 3:
        raise PreconditionError("K_m must have at least 3 vertices")
    km_idx = ct.blocks.index(km)
    anchors: dict[int, list[tuple[int, ...]]] = {}
    for i, bl in enumerate(ct.blocks):
        if i == km_idx:
            continue
        shared = [v for v in bl if v in km]
        if len(bl) != 3 or len(shared) != 1 or ct.cuts_of(i) != shared:
            raise PreconditionError(
                f"block {list(bl)} is not a pendant triangle on the K_m block"
            )
        anchors.setdefault(shared[0], []).append(bl)
    if len(anchors) < 2:
        raise PreconditionError("triangles already sit on a single vertex of K_m")
    x = _perron(g, perron)
    target = _argmax(x, km)
    remove, add = [], []
    for c, tris in anchors.items():
        if c == target:
            continue
        for tri in tris:
            for w in tri:
                if w != c:
                    remove.append((c, w))
                    add.append((target, w))
    return g.with_edges(remove, add)


def _pair_blocks(
    ct: CliqueTreeStructure, v: int, l_block, m_block
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    kl, km = _as_block(ct, l_block), _as_block(ct, m_block)
    if kl == km or v not in kl or v not in km:
        raise PreconditionError(f"blocks {list(kl)} and {list(km)} do not meet at {v}")
    if len(kl) < 4 or len(km) < 4:
        raise PreconditionError("both blocks need at least 4 vertices")
    return kl, km


def _check_pq(x: np.ndarray, kl: Sequence[int], v: int, p: int, q: int) -> None:
    rest = [u for u in kl if u != v]
    if p not in rest or q not in rest or p == q:
        raise PreconditionError("p, q must be distinct vertices of K_l other than v")
    if x[p] > x[q] + TIE_TOL:
        raise PreconditionError("need x_p <= x_q")
    others = [u for u in rest if u not in (p, q)]
    if any(x[u] < x[q] - TIE_TOL for u in others):
        raise PreconditionError("p, q must carry the two least Perron entries of K_l - v")


def merge_blocks_case1(
    g: Graph,
    v: int,
    l_block,
    m_block,
    p: int,
    q: int,
    r: int,
    s: int,
    perron: np.ndarray | None = None,
) -> Graph:
    """Rewrite K_l + K_m at v into K_3 {v,p,q} + K_{l+m-3}.

    Requires r, s in K_m - v with Perron entries at least those of p and q.
    """
    ct = blocks_and_cut_vertices(g)
    kl, km = _pair_blocks(ct, v, l_block, m_block)
    x = _perron(g, perron)
    _check_pq(x, kl, v, p, q)
    mrest = [u for u in km if u != v]
    if r not in mrest or s not in mrest or r == s:
        raise PreconditionError("r, s must be distinct vertices of K_m other than v")
    bar = max(x[p], x[q]) - TIE_TOL
    if x[r] < bar or x[s] < bar:
        raise PreconditionError(
            "Perron ordering x_r, x_s >= x_p, x_q fails; try merge_blocks_case2"
        )
    core = [u for u in kl if u not in (p, q, v)]
    remove = [(u, p) for u in core] + [(u, q) for u in core]
    add = [(u, w) for u in core for w in mrest]
    return g.with_edges(remove, add)


def merge_blocks_case2(
    g: Graph,
    v: int,
    p: int,
    q: int,
    r: int,
    s: int,
    perron: np.ndarray | None = None,
) -> Graph:
    """Rewrite K_l + K_m at v into K_3 {v,p,s} + K_{l+m-3}.

    K_l is the block through v and p, K_m the block through v and r.  Requires
    x_r >= x_p, x_q while every other vertex of K_m - v sits strictly below x_q.
    """
    ct = blocks_and_cut_vertices(g)
    try:
        l_idx = next(i for i in ct.blocks_at(v) if p in ct.blocks[i])
        m_idx = next(i for i in ct.blocks_at(v) if r in ct.blocks[i])
    except StopIteration:
        raise PreconditionError("p and r must lie in blocks through v") from None
    kl, km = _pair_blocks(ct, v, l_idx, m_idx)
    x = _perron(g, perron)
    _check_pq(x, kl, v, p, q)
    mrest = [u for u in km if u != v]
    if r not in mrest or s not in mrest or r == s:
        raise PreconditionError("r, s must be distinct vertices of K_m other than v")
    if x[r] < max(x[p], x[q]) - TIE_TOL:
        raise PreconditionError("need x_r >= x_p, x_q")
    if any(x[u] >= x[q] - TIE_TOL for u in mrest if u != r):
        raise PreconditionError(
            "every vertex of K_m - {v, r} must sit strictly below x_q; try merge_blocks_case1"
        )
    lrest = [u for u in kl if u not in (p, v)]
    mkeep = [u for u in km if u not in (s, v)]
    remove = [(u, p) for u in lrest] + [(u, s) for u in mkeep]
    add = [(p, s)] + [(u, w) for u in lrest for w in mkeep]
    return g.with_edges(remove, add)


def move_pendant_block(
    g: Graph,
    block: int | Iterable[int],
    from_v: int,
    to_u: int,
    perron: np.ndarray | None = None,
) -> Graph:
    """Detach a pendant block from its cut vertex ``from_v`` and glue it at ``to_u``."""
    ct = blocks_and_cut_vertices(g)
    bl = _as_block(ct, block)
    if ct.cuts_of(ct.blocks.index(bl)) != [from_v]:
        raise PreconditionError(f"block {list(bl)} is not pendant at {from_v}")
    if to_u == from_v or to_u in bl:
        raise PreconditionError("target vertex must lie outside the moved block")
    x = _perron(g, perron)
    if x[to_u] < x[from_v] - TIE_TOL:
        raise PreconditionError(f"need x_{to_u} >= x_{from_v}")
    leaves = [w for w in bl if w != from_v]
    return g.with_edges([(from_v, w) for w in leaves], [(to_u, w) for w in leaves])


# --- automatic selection ---------------------------------------------------


def plan_merge(g: Graph, v: int, l_block, m_block, perron: np.ndarray | None = None) -> dict:
    """Choose orientation, case and p, q, r, s for merging two large blocks at v."""
    ct = blocks_and_cut_vertices(g)
    b1, b2 = _pair_blocks(ct, v, l_block, m_block)
    x = _perron(g, perron)
    for kl, km in ((b1, b2), (b2, b1)):
        lr = _ranked(x, [u for u in kl if u != v])
        mr = _ranked(x, [u for u in km if u != v])
        p, q = lr[0], lr[1]
        bar = max(x[p], x[q]) - TIE_TOL
        high = [u for u in mr if x[u] >= bar]
        if len(high) >= 2:
            r, s = high[-1], high[-2]
            return {"rule": "merge1", "v": v, "l_block": kl, "m_block": km,
                    "p": p, "q": q, "r": r, "s": s}
        if len(high) == 1:
            r = high[0]
            low = [u for u in mr if u != r]
            return {"rule": "merge2", "v": v, "l_block": kl, "m_block": km,
                    "p": p, "q": q, "r": r, "s": low[0]}
    raise PreconditionError("no merge orientation satisfies the Perron ordering")


def apply_plan(g: Graph, plan: dict, perron: np.ndarray | None = None) -> Graph:
    rule = plan["rule"]
    if rule == "merge1":
        return merge_blocks_case1(g, plan["v"], plan["l_block"], plan["m_block"],
                                  plan["p"], plan["q"], plan["r"], plan["s"], perron)
    if rule == "merge2":
        return merge_blocks_case2(g, plan["v"], plan["p"], plan["q"], plan["r"], plan["s"], perron)
    if rule == "relocate":
        return relocate_pendant_triangles(g, plan["km_block"], perron)
    if rule == "move":
        return move_pendant_block(g, plan["block"], plan["from_v"], plan["to_u"], perron)
    raise ValueError(f"unknown rule {rule!r}")


def merge_candidates(ct: CliqueTreeStructure) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """Pairs of blocks of size >= 4 sharing a cut vertex, largest pairs first."""
    out = []
    for v in sorted(ct.cut_vertices):
        big = [ct.blocks[i] for i in ct.blocks_at(v) if len(ct.blocks[i]) >= 4]
        for i in range(len(big)):
            for j in range(i + 1, len(big)):
                out.append((v, big[i], big[j]))
    out.sort(key=lambda t: (-(len(t[1]) + len(t[2])), t[0], t[1], t[2]))
    return out


def relocation_candidate(ct: CliqueTreeStructure) -> int | None:
    """Index of a block that satisfies the relocation precondition, if any."""
    for i in sorted(range(ct.b), key=lambda i: (-len(ct.blocks[i]), i)):
        km = set(ct.blocks[i])
        anchors = set()
        ok = True
        for j, bl in enumerate(ct.blocks):
            if j == i:
                continue
            shared = [v for v in bl if v in km]
            if len(bl) != 3 or len(shared) != 1 or ct.cuts_of(j) != shared:
                ok = False
                break
            anchors.add(shared[0])
        if ok and len(anchors) >= 2:
            return i
    return None


def next_plan(g: Graph, x: np.ndarray) -> dict | None:
    """Next rewrite in the order merges, relocation, pendant moves; None at a fixpoint."""
    ct = blocks_and_cut_vertices(g)
    merges = merge_candidates(ct)
    if merges:
        v, kl, km = merges[0]
        return plan_merge(g, v, kl, km, x)
    i = relocation_candidate(ct)
    if i is not None:
        return {"rule": "relocate", "km_block": ct.blocks[i]}
    return move_candidate(ct, x)


def move_candidate(ct: CliqueTreeStructure, x: np.ndarray) -> dict | None:
    """Move the pendant block with the smallest cut-vertex entry onto the top cut vertex."""
    if len(ct.cut_vertices) <= 1:
        return None
    hub = _argmax(x, ct.cut_vertices)
    movable = []
    for i in ct.pendant_blocks():
        (c,) = ct.cuts_of(i)
        if c != hub:
            movable.append((x[c], c, ct.blocks[i]))
    movable.sort()
    _, c, bl = movable[0]
    return {"rule": "move", "block": bl, "from_v": c, "to_u": hub}


@dataclass
class ReplayResult:
    start_key: str
    final: Graph
    final_key: str
    steps: list[dict] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(s["rho_after"] > s["rho_before"] for s in self.steps)


def replay_to_fixpoint(g: Graph, max_steps: int = 200) -> ReplayResult:
    """Apply rewrites until none applies; every step must raise rho."""
    if not is_clique_tree(g, 3):
        raise PreconditionError("replay needs a clique tree with blocks of size >= 3")
    result = ReplayResult(canonical_key(g), g, canonical_key(g))
    cur = g
    for _ in range(max_steps):
        sr = spectral_radius(cur, method="dense")
        plan = next_plan(cur, sr.perron)
        if plan is None:
            break
        nxt = apply_plan(cur, plan, sr.perron)
        result.steps.append({
            "rule": plan["rule"],
            "rho_before": sr.rho,
            "rho_after": spectral_radius_value(nxt),
        })
        cur = nxt
    else:
        raise RuntimeError(f"no fixpoint within {max_steps} steps")
    result.final = cur
    result.final_key = canonical_key(cur)
    return result
