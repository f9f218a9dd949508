"""Verification suites shared by the CLI and the acceptance tests.

Every suite returns a JSON-ready dict with an ``ok`` flag and enough detail
to see what was checked.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .enumeration import DEFAULT_ENUM_CAP, build_extremal, class_G, enumerate_clique_trees, verify_main_theorem
from .graph import Graph, blocks_and_cut_vertices, build_clique_tree, canonical_key, is_clique_tree
from .spectral import (
    bounds_report,
    char_poly_extremal,
    cluster_eigenvalues,
    extremal_partition,
    extremal_quotient,
    extremal_rho,
    perron_pendant_check,
    quotient_matrix,
    spectral_radius,
    spectral_radius_value,
)
from .transforms import (
    TIE_TOL,
    merge_blocks_case1,
    merge_blocks_case2,
    move_pendant_block,
    relocate_pendant_triangles,
    replay_to_fixpoint,
)
from .zero_forcing import valid_k_range, zero_forcing_number_exhaustive, zero_forcing_number_formula

RHO_MARGIN = 1e-9
EIG_TOL = 1e-9


def valid_pairs(n_min: int, n_max: int):
    for n in range(max(3, n_min), n_max + 1):
        lo, hi = valid_k_range(n)
        for k in range(lo, hi + 1):
            yield n, k


# --- random instances ------------------------------------------------------


def random_recipe(rng: np.random.Generator, n_max: int, sizes=(3, 3, 3, 4, 5)) -> tuple[list[int], list[tuple[int, int]]]:
    first = int(rng.integers(3, min(n_max, 7) + 1))
    blocks, attach, n = [first], [], first
    while True:
        size = int(rng.choice(sizes))
        if n + size - 1 > n_max or rng.random() < 0.2:
            break
        host = int(rng.integers(0, len(blocks)))
        attach.append((host, int(rng.integers(0, blocks[host]))))
        blocks.append(size)
        n += size - 1
    return blocks, attach


def random_relabel(rng: np.random.Generator, g: Graph) -> tuple[Graph, np.ndarray]:
    perm = rng.permutation(g.n)
    return g.relabel([int(p) for p in perm]), perm


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Random spanning tree plus independent extra edges."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        u, w = int(order[i]), int(order[rng.integers(0, i)])
        edges.add((min(u, w), max(u, w)))
    for u in range(n):
        for w in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, w))
    return Graph(n, frozenset(edges))


# --- transform instances ---------------------------------------------------


def _least_two(x, vertices):
    vs = sorted(vertices, key=lambda u: (x[u], u))
    return vs[0], vs[1]


def _case1_args(x, v, kl, km):
    p, q = _least_two(x, [u for u in kl if u != v])
    bar = max(x[p], x[q]) - TIE_TOL
    high = sorted((u for u in km if u != v and x[u] >= bar), key=lambda u: (-x[u], u))
    if len(high) < 2:
        return None
    return p, q, high[0], high[1]


def case2_options(x, v, kl, km):
    p, q = _least_two(x, [u for u in kl if u != v])
    mr = [u for u in km if u != v]
    high = [u for u in mr if x[u] >= max(x[p], x[q]) - TIE_TOL]
    if len(high) != 1:
        return []
    r = high[0]
    if any(x[u] >= x[q] - TIE_TOL for u in mr if u != r):
        return []
    return [(p, q, r, s) for s in mr if s != r]


def _big_pairs(ct, v):
    big = [ct.blocks[i] for i in ct.blocks_at(v) if len(ct.blocks[i]) >= 4]
    return [(a, c) for a in big for c in big if a != c]


def _sample_case1(rng, n_max):
    while True:
        blocks, attach = random_recipe(rng, n_max, sizes=(3, 4, 4, 5))
        g, _ = build_clique_tree(blocks, attach)
        g, _ = random_relabel(rng, g)
        ct = blocks_and_cut_vertices(g)
        x = spectral_radius(g, method="dense").perron
        options = []
        for v in sorted(ct.cut_vertices):
            for kl, km in _big_pairs(ct, v):
                args = _case1_args(x, v, kl, km)
                if args:
                    options.append((v, kl, km, args))
        if options:
            v, kl, km, (p, q, r, s) = options[int(rng.integers(0, len(options)))]
            after = merge_blocks_case1(g, v, kl, km, p, q, r, s, perron=x)
            return g, after, {"v": v, "l": len(kl), "m": len(km), "p": p, "q": q, "r": r, "s": s}


@lru_cache(maxsize=None)
def case2_pool(n_max: int) -> tuple[tuple[Graph, int, tuple, tuple, tuple], ...]:
    """Every (graph, v, K_l, K_m, p, q, r, s) with n <= n_max meeting the case-2 ordering."""
    pool = []
    for n in range(7, n_max + 1):
        for g in enumerate_clique_trees(n, 3, max(n_max, DEFAULT_ENUM_CAP)):
            ct = blocks_and_cut_vertices(g)
            x = spectral_radius(g, method="dense").perron
            for v in sorted(ct.cut_vertices):
                for kl, km in _big_pairs(ct, v):
                    for args in case2_options(x, v, kl, km):
                        pool.append((g, v, kl, km, args))
    return tuple(pool)


def _sample_case2(rng, n_max):
    pool = case2_pool(n_max)
    if not pool:
        raise RuntimeError(f"no case-2 instance with n <= {n_max}")
    base, v, kl, km, (p, q, r, s) = pool[int(rng.integers(0, len(pool)))]
    g, perm = random_relabel(rng, base)
    mp = lambda u: int(perm[u])  # noqa: E731
    x = spectral_radius(g, method="dense").perron
    # recompute p, q under the new labels so the tie rule is honoured
    kl2 = [mp(u) for u in kl]
    p2, q2 = _least_two(x, [u for u in kl2 if u != mp(v)])
    after = merge_blocks_case2(g, mp(v), p2, q2, mp(r), mp(s), perron=x)
    return g, after, {"v": mp(v), "l": len(kl), "m": len(km), "p": p2, "q": q2, "r": mp(r), "s": mp(s)}


def _sample_relocate(rng, n_max):
    while True:
        m = int(rng.integers(3, min(8, n_max - 3) + 1))
        t = int(rng.integers(2, (n_max - m) // 2 + 1))
        hosts = [int(h) for h in rng.integers(0, m, size=t)]
        if len(set(hosts)) < 2:
            continue
        g, _ = build_clique_tree([m] + [3] * t, [(0, h) for h in hosts])
        g, perm = random_relabel(rng, g)
        km = [int(perm[u]) for u in range(m)]
        x = spectral_radius(g, method="dense").perron
        return g, relocate_pendant_triangles(g, km, perron=x), {"m": m, "triangles": t}


def _sample_move(rng, n_max):
    while True:
        blocks, attach = random_recipe(rng, n_max)
        g, _ = build_clique_tree(blocks, attach)
        g, _ = random_relabel(rng, g)
        ct = blocks_and_cut_vertices(g)
        if len(ct.cut_vertices) < 2:
            continue
        x = spectral_radius(g, method="dense").perron
        options = []
        for i in ct.pendant_blocks():
            (c,) = ct.cuts_of(i)
            for u in range(g.n):
                if u not in ct.blocks[i] and x[u] >= x[c] - TIE_TOL:
                    options.append((ct.blocks[i], c, u))
        if options:
            bl, c, u = options[int(rng.integers(0, len(options)))]
            return g, move_pendant_block(g, bl, c, u, perron=x), {"from": c, "to": u}


SAMPLERS = {
    "relocate": _sample_relocate,
    "merge1": _sample_case1,
    "merge2": _sample_case2,
    "move": _sample_move,
}


def transform_suite(rule: str, trials: int = 200, seed: int = 0, n_max: int = 14, z_exhaustive_max: int = 10) -> dict:
    """Random instances of one rewrite: rho must rise, Z and the vertex count must not change."""
    rng = np.random.default_rng([seed, list(SAMPLERS).index(rule)])
    strict = rule != "move"
    failures = []
    classes = set()
    min_gain = math.inf
    for t in range(trials):
        before, after, info = SAMPLERS[rule](rng, n_max)
        classes.add(canonical_key(before))
        rb, ra = spectral_radius_value(before), spectral_radius_value(after)
        min_gain = min(min_gain, ra - rb)
        ok_rho = ra > rb + RHO_MARGIN if strict else ra >= rb - RHO_MARGIN
        ok_tree = is_clique_tree(after, 3)
        ctb, cta = blocks_and_cut_vertices(before), blocks_and_cut_vertices(after)
        zb = zero_forcing_number_formula(ctb)
        za = zero_forcing_number_formula(cta) if ok_tree else None
        ok_z = za == zb and after.n == before.n
        if ok_z and before.n <= z_exhaustive_max:
            ok_z = zero_forcing_number_exhaustive(before)[0] == zero_forcing_number_exhaustive(after)[0] == zb
        ok_blocks = True
        if rule in ("merge1", "merge2"):
            sizes = list(ctb.block_sizes)
            sizes.remove(info["l"])
            sizes.remove(info["m"])
            expect = sorted(sizes + [3, info["l"] + info["m"] - 3], reverse=True)
            ok_blocks = cta.block_sizes == expect
        elif rule in ("relocate", "move"):
            ok_blocks = cta.block_sizes == ctb.block_sizes
        if not (ok_rho and ok_tree and ok_z and ok_blocks):
            failures.append({"trial": t, "rho_before": rb, "rho_after": ra, "z_before": zb,
                             "z_after": za, "blocks_ok": ok_blocks, **info})
    return {
        "rule": rule,
        "trials": trials,
        "distinct_classes": len(classes),
        "min_rho_gain": min_gain,
        "failures": failures[:10],
        "ok": not failures,
    }


def edge_monotonicity_suite(trials: int = 200, seed: int = 0, n_max: int = 12) -> dict:
    rng = np.random.default_rng([seed, 101])
    failures = []
    min_gain = math.inf
    done = 0
    while done < trials:
        n = int(rng.integers(3, n_max + 1))
        g = random_connected_graph(rng, n, float(rng.uniform(0.05, 0.6)))
        non_edges = [(u, w) for u in range(n) for w in range(u + 1, n) if not g.has_edge(u, w)]
        if not non_edges:
            continue
        u, w = non_edges[int(rng.integers(0, len(non_edges)))]
        rb = spectral_radius(g).rho
        ra = spectral_radius(g.add_edge(u, w)).rho
        min_gain = min(min_gain, ra - rb)
        if not ra > rb + RHO_MARGIN:
            failures.append({"n": n, "edge": [u, w], "rho_before": rb, "rho_after": ra})
        done += 1
    return {"trials": trials, "min_rho_gain": min_gain, "failures": failures[:10], "ok": not failures}


def perron_pendant_suite(n_max: int = 12) -> dict:
    checked, failures = 0, []
    for n in range(4, n_max + 1):
        for g in enumerate_clique_trees(n):
            ct = blocks_and_cut_vertices(g)
            if not ct.pendant_blocks():
                continue
            checked += 1
            if not perron_pendant_check(g, ct):
                failures.append(canonical_key(g))
    return {"checked": checked, "failures": failures[:10], "ok": checked > 0 and not failures}


def z_formula_suite(n_max: int = 10, relabelings: int = 4, seed: int = 0) -> dict:
    """Formula Z against exhaustive Z on every class plus random relabelings of it."""
    rng = np.random.default_rng([seed, 202])
    checked, classes, failures = 0, 0, []
    for n in range(3, n_max + 1):
        for base in enumerate_clique_trees(n):
            classes += 1
            copies = [base] + [random_relabel(rng, base)[0] for _ in range(relabelings)]
            for g in copies:
                ct = blocks_and_cut_vertices(g)
                zf = zero_forcing_number_formula(ct)
                ze = zero_forcing_number_exhaustive(g)[0]
                checked += 1
                if not zf == ze == n - ct.b:
                    failures.append({"key": canonical_key(g), "formula": zf, "exhaustive": ze,
                                     "n_minus_b": n - ct.b})
    return {"classes": classes, "checked": checked, "failures": failures[:10],
            "ok": checked > 0 and not failures}


def quotient_suite(n_max: int = 30) -> dict:
    checked, failures, worst = 0, [], 0.0
    for n, k in valid_pairs(3, n_max):
        g = build_extremal(n, k)
        qm = quotient_matrix(g, extremal_partition(n, k))
        rho_a = spectral_radius_value(g)
        closed = extremal_quotient(n, k)
        same = qm.q.shape == closed.shape and np.array_equal(qm.q, closed)
        if k == n - 1:
            # no triangle part; the quotient is the leading 2x2 corner
            same = np.array_equal(qm.q, closed[:2, :2])
        err = abs(qm.rho - rho_a)
        worst = max(worst, err)
        checked += 1
        if not (qm.equitable and same and err <= EIG_TOL):
            failures.append({"n": n, "k": k, "equitable": qm.equitable, "closed_form": bool(same), "err": err})
    return {"checked": checked, "max_abs_err": worst, "failures": failures[:10], "ok": not failures}


def char_poly_suite(n_min: int = 6, n_max: int = 30) -> dict:
    checked, failures, worst, skipped = 0, [], 0.0, []
    for n, k in valid_pairs(n_min, n_max):
        if k == n - 1:
            skipped.append([n, k])
            continue
        g = build_extremal(n, k)
        got = np.linalg.eigvalsh(g.adjacency_matrix())
        want = np.array(char_poly_extremal(n, k).eigenvalues())
        err = float(np.max(np.abs(np.sort(got) - np.sort(want))))
        worst = max(worst, err)
        checked += 1
        if err > EIG_TOL:
            failures.append({"n": n, "k": k, "err": err})
    return {"checked": checked, "skipped_boundary": skipped, "max_abs_err": worst,
            "failures": failures[:10], "ok": not failures}


def multiplicities(n: int, k: int) -> dict[str, int]:
    g = build_extremal(n, k)
    clusters = cluster_eigenvalues(np.linalg.eigvalsh(g.adjacency_matrix()))
    out = {"1": 0, "-1": 0}
    for val, mult in clusters:
        if abs(val - 1) < 1e-7:
            out["1"] = mult
        elif abs(val + 1) < 1e-7:
            out["-1"] = mult
    return out


def bounds_suite(n_max: int = 200) -> dict:
    checked, failures, inapplicable = 0, [], []
    for n, k in valid_pairs(3, n_max):
        if k == n - 1:
            continue
        rep = bounds_report(n, k)
        checked += 1
        if not rep["lower_ok"]:
            failures.append(rep)
        if not rep["applicable"]:
            inapplicable.append([n, k])
        elif not rep["upper_ok"]:
            failures.append(rep)
    return {
        "checked": checked,
        "case2_inapplicable_count": len(inapplicable),
        "case2_inapplicable": inapplicable,
        "failures": failures[:10],
        "ok": not failures,
    }


def replay_suite(n_max: int = 12) -> dict:
    checked, failures, steps = 0, [], 0
    for n, k in valid_pairs(3, n_max):
        target = canonical_key(build_extremal(n, k))
        for g in class_G(n, k):
            res = replay_to_fixpoint(g)
            checked += 1
            steps += len(res.steps)
            if res.final_key != target or not res.monotone:
                failures.append({"n": n, "k": k, "start": res.start_key, "final": res.final_key})
    return {"checked": checked, "steps": steps, "failures": failures[:10], "ok": not failures}


def main_theorem_suite(n_min: int = 6, n_max: int = 12) -> dict:
    reports = [verify_main_theorem(n, k) for n, k in valid_pairs(n_min, n_max)]
    gaps = [r.gap for r in reports if r.gap is not None]
    bad = [r.to_dict() for r in reports if not r.ok or (r.gap is not None and r.gap <= 1e-6)]
    return {
        "pairs": len(reports),
        "min_gap": min(gaps) if gaps else None,
        "failures": bad,
        "ok": not bad,
    }


def cubic_vs_dense(n: int, k: int) -> float:
    return abs(extremal_rho(n, k) - spectral_radius_value(build_extremal(n, k)))
