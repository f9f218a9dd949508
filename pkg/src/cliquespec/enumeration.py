"""Clique trees up to isomorphism, the classes G(n,k) and the main-theorem harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterator

from .graph import Graph, blocks_and_cut_vertices, build_clique_tree, canonical_key, vertex_sum
from .spectral import spectral_radius_value
from .zero_forcing import check_nk, valid_k_range, zero_forcing_number_formula

DEFAULT_ENUM_CAP = 14
RHO_TIE = 1e-9


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True)
class ExtremalReport:
    n: int
    k: int
    class_size: int
    max_rho: float
    argmax_canonical: str
    unique: bool
    matches_extremal: bool
    runner_up_rho: float | None

    @property
    def gap(self) -> float | None:
        if self.runner_up_rho is None:
            return None
        return self.max_rho - self.runner_up_rho

    @property
    def ok(self) -> bool:
        return self.unique and self.matches_extremal

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gap"] = self.gap
        return d


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise EnumerationCapError(
            f"enumeration refuses n={n} above the cap {cap}; raise --enum-cap explicitly"
        )


@lru_cache(maxsize=None)
def _level(n: int, min_block: int) -> tuple[tuple[str, Graph], ...]:
    """All clique trees on n vertices, one representative per class, sorted by key.

    Every clique tree with two or more blocks has a pendant block, so it arises
    from a smaller one by gluing a clique at a vertex.
    """
    found: dict[str, Graph] = {}
    if n >= min_block:
        kn = Graph.complete(n)
        found[canonical_key(kn)] = kn
    for size in range(min_block, n):
        smaller = n - size + 1
        if smaller < min_block:
            continue
        clique = Graph.complete(size)
        for _, base in _level(smaller, min_block):
            for v in range(base.n):
                g = vertex_sum(base, v, clique)
                key = canonical_key(g)
                if key not in found:
                    found[key] = g
    return tuple(sorted(found.items()))


def enumerate_clique_trees(
    n: int, min_block: int = 3, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[Graph]:
    """Yield each clique tree on ``n`` vertices with blocks >= ``min_block`` once."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if min_block < 3:
        raise ValueError("min_block must be at least 3")
    _check_cap(n, cap)
    for _, g in _level(n, min_block):
        yield g


def class_G(n: int, k: int, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Graph]:
    """Clique trees on n vertices, blocks >= 3, zero forcing number k."""
    check_nk(n, k)
    for g in enumerate_clique_trees(n, 3, cap):
        ct = blocks_and_cut_vertices(g)
        if ct.b != n - k:
            continue
        z = zero_forcing_number_formula(ct)
        if z != k:
            raise AssertionError(f"block count says Z={k} but formula gives {z}")
        yield g


def build_extremal(n: int, k: int) -> Graph:
    """One K_{2k-n+2} and n-k-1 triangles sharing vertex 0."""
    check_nk(n, k)
    t = n - k - 1
    g, _ = build_clique_tree([2 * k - n + 2] + [3] * t, [(0, 0)] * t)
    return g


def verify_main_theorem(n: int, k: int, cap: int = DEFAULT_ENUM_CAP) -> ExtremalReport:
    members = [(spectral_radius_value(g), canonical_key(g)) for g in class_G(n, k, cap)]
    if not members:
        raise AssertionError(f"G({n},{k}) enumerated empty")
    members.sort(key=lambda t: (-t[0], t[1]))
    max_rho, arg = members[0]
    runner = members[1][0] if len(members) > 1 else None
    unique = runner is None or max_rho - runner > RHO_TIE
    target = canonical_key(build_extremal(n, k))
    return ExtremalReport(
        n=n,
        k=k,
        class_size=len(members),
        max_rho=max_rho,
        argmax_canonical=arg,
        unique=unique,
        matches_extremal=arg == target,
        runner_up_rho=runner,
    )


def remark_range_summary(n: int, cap: int = DEFAULT_ENUM_CAP) -> dict:
    """Observed range of Z over clique trees on n vertices and the minimizers' blocks."""
    zs = []
    minimizers: list[list[int]] = []
    for g in enumerate_clique_trees(n, 3, cap):
        ct = blocks_and_cut_vertices(g)
        zs.append((zero_forcing_number_formula(ct), ct.block_sizes))
    zmin = min(z for z, _ in zs)
    zmax = max(z for z, _ in zs)
    minimizers = sorted({tuple(s) for z, s in zs if z == zmin})
    expected = valid_k_range(n)
    if n % 2 == 0:
        expected_blocks = [4] + [3] * (n // 2 - 2)
    else:
        expected_blocks = [3] * (n // 2)
    return {
        "n": n,
        "z_min": zmin,
        "z_max": zmax,
        "expected_range": list(expected),
        "minimizer_blocks": [list(s) for s in minimizers],
        "expected_minimizer_blocks": expected_blocks,
        "triangles_in_minimizer": [list(s).count(3) for s in minimizers],
    }


def verify_remark_range(n: int, cap: int = DEFAULT_ENUM_CAP) -> bool:
    s = remark_range_summary(n, cap)
    return (
        [s["z_min"], s["z_max"]] == s["expected_range"]
        and s["minimizer_blocks"] == [s["expected_minimizer_blocks"]]
    )
