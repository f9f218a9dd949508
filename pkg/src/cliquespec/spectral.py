"""Spectral radius, Perron vectors, quotient matrices and the extremal graph's polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import CliqueTreeStructure, Graph, GraphError, NotConnectedError
from .zero_forcing import check_nk

DEFAULT_TOL = 1e-12
# clustering tolerance for eigenvalue multiplicities
CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class SpectralResult:
    rho: float
    perron: np.ndarray
    residual: float
    iterations: int
    method: str


@dataclass(frozen=True)
class QuotientMatrix:
    partition: tuple[tuple[int, ...], ...]
    q: np.ndarray
    equitable: bool

    @property
    def rho(self) -> float:
        return float(max(np.linalg.eigvals(self.q).real))


@dataclass(frozen=True)
class BoundParameters:
    n: int
    k: int
    a: int
    b: float
    alpha: float
    beta: float

    @classmethod
    def of(cls, n: int, k: int) -> "BoundParameters":
        a = 2 * k - n + 1
        b = math.sqrt(n - 1)
        alpha = 2 * n - 2 * a * b + a - 3
        beta = (1 - a) * (a - b) + k - k * (n - a)
        return cls(n, k, a, b, alpha, beta)


class BoundNotApplicable(ValueError):
    """Case 2 of the upper bound needs 3*sqrt(n-1) - (2k-n+1) > 0."""


def _residual(a: np.ndarray, x: np.ndarray, rho: float) -> float:
    return float(np.max(np.abs(a @ x - rho * x)))


def _dense(a: np.ndarray) -> tuple[float, np.ndarray]:
    w, v = np.linalg.eigh(a)
    x = v[:, -1]
    if x.sum() < 0:
        x = -x
    return float(w[-1]), x


def spectral_radius(
    g: Graph,
    tol: float = DEFAULT_TOL,
    max_iter: int = 5000,
    method: str = "power",
) -> SpectralResult:
    """Largest adjacency eigenvalue and unit Perron vector of a connected graph.

    ``method="power"`` runs shifted power iteration from the all-ones vector,
    then Rayleigh quotient iteration once the residual is small.  It escalates
    to a dense symmetric eigensolve if it stalls or leaves the positive cone.
    ``method="dense"`` goes straight to the dense solve.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not g.is_connected():
        raise NotConnectedError()
    a = g.adjacency_matrix()
    n = g.n
    if n == 1:
        return SpectralResult(0.0, np.ones(1), 0.0, 0, "trivial")
    if method == "dense":
        rho, x = _dense(a)
        return SpectralResult(rho, x, _residual(a, x, rho), 0, "dense")
    if method != "power":
        raise ValueError(f"unknown method {method!r}")

    # shift by I so bipartite graphs do not oscillate
    shifted = a + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    rho = float(x @ a @ x)
    it = 0
    while it < max_iter:
        it += 1
        y = shifted @ x
        x = y / np.linalg.norm(y)
        rho = float(x @ a @ x)
        res = _residual(a, x, rho)
        if res <= tol:
            break
        if res < 1e-4:
            # Rayleigh quotient iteration: cubic convergence near the Perron pair
            for _ in range(20):
                it += 1
                try:
                    y = np.linalg.solve(a - (rho + 1e-14) * np.eye(n), x)
                except np.linalg.LinAlgError:
                    break
                nrm = np.linalg.norm(y)
                if not np.isfinite(nrm) or nrm == 0:
                    break
                x = y / nrm
                if x.sum() < 0:
                    x = -x
                rho = float(x @ a @ x)
                if _residual(a, x, rho) <= tol:
                    break
            break
    res = _residual(a, x, rho)
    if res <= tol and np.all(x > 0):
        return SpectralResult(rho, x, res, it, "power")
    rho, x = _dense(a)
    return SpectralResult(rho, x, _residual(a, x, rho), it, "dense")


def spectral_radius_value(g: Graph) -> float:
    """Dense-solver spectral radius; the reference path for comparisons."""
    return float(np.linalg.eigvalsh(g.adjacency_matrix())[-1])


def rayleigh_quotient(g: Graph, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    denom = float(x @ x)
    if denom == 0:
        raise ValueError("zero vector")
    num = 2.0 * sum(x[u] * x[v] for u, v in g.edges)
    return num / denom


def quotient_matrix(g: Graph, partition: Sequence[Sequence[int]]) -> QuotientMatrix:
    parts = tuple(tuple(sorted(p)) for p in partition)
    flat = [v for p in parts for v in p]
    if any(not p for p in parts):
        raise GraphError("empty part in partition")
    if sorted(flat) != list(range(g.n)):
        raise GraphError("partition must cover every vertex exactly once")
    where = {v: i for i, p in enumerate(parts) for v in p}
    k = len(parts)
    q = np.zeros((k, k))
    equitable = True
    for i, p in enumerate(parts):
        sums = np.zeros((len(p), k), dtype=int)
        for r, v in enumerate(p):
            for w in g.adj[v]:
                sums[r, where[w]] += 1
        q[i] = sums.mean(axis=0)
        if np.any(sums != sums[0]):
            equitable = False
    return QuotientMatrix(parts, q, equitable)


def extremal_partition(n: int, k: int) -> list[list[int]]:
    """Partition of the extremal graph: clique leaves, center, triangle leaves.

    Uses the labeling of :func:`cliquespec.enumeration.build_extremal`.
    """
    check_nk(n, k)
    a = 2 * k - n + 1
    parts = [list(range(1, a + 1)), [0]]
    if n - k - 1 > 0:
        parts.append(list(range(a + 1, n)))
    return parts


def extremal_quotient(n: int, k: int) -> np.ndarray:
    """The 3x3 equitable quotient of the extremal graph in closed form."""
    check_nk(n, k)
    return np.array(
        [
            [2 * k - n, 1, 0],
            [2 * k - n + 1, 0, 2 * (n - k - 1)],
            [0, 1, 1],
        ],
        dtype=float,
    )


def f_poly(n: int, k: int) -> tuple[int, int, int, int]:
    """Coefficients (1, c2, c1, c0) of det(xI - Q) for the extremal quotient Q.

    With a = 2k - n + 1 this is x^3 - a x^2 - (n - a) x + 1 + (a - 1)(n - a).
    """
    check_nk(n, k)
    a = 2 * k - n + 1
    return 1, -a, -(n - a), 1 + (a - 1) * (n - a)


def eval_poly(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def cubic_roots(coeffs: Sequence[float]) -> list[float]:
    """Real roots of a monic cubic with three real roots, descending, Newton-polished."""
    _, c2, c1, c0 = (float(c) for c in coeffs)
    # depressed cubic t^3 + p t + q with x = t - c2/3
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    if p >= 0:
        # only possible with a triple root here
        roots = [-shift] * 3
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = max(-1.0, min(1.0, arg))
        theta = math.acos(arg) / 3.0
        roots = [m * math.cos(theta - 2 * math.pi * j / 3) - shift for j in range(3)]
    dcoef = (3.0, 2 * c2, c1)
    polished = []
    for r in roots:
        for _ in range(6):
            d = eval_poly(dcoef, r)
            if d == 0:
                break
            step = eval_poly((1.0, c2, c1, c0), r) / d
            r -= step
            if abs(step) < 1e-16 * max(1.0, abs(r)):
                break
        polished.append(r)
    return sorted(polished, reverse=True)


def extremal_rho(n: int, k: int) -> float:
    """Spectral radius of the extremal graph as the largest root of its cubic."""
    return cubic_roots(f_poly(n, k))[0]


@dataclass(frozen=True)
class CharPolyFactorization:
    """det(xI - A) = (x - 1)^ones * (x + 1)^minus_ones * f(x)."""

    n: int
    k: int
    ones: int
    minus_ones: int
    cubic: tuple[int, int, int, int]

    def eigenvalues(self) -> list[float]:
        vals = [1.0] * self.ones + [-1.0] * self.minus_ones + cubic_roots(self.cubic)
        return sorted(vals)

    def coefficients(self) -> list[int]:
        poly = np.poly1d(list(self.cubic))
        poly = poly * np.poly1d([1, -1]) ** self.ones * np.poly1d([1, 1]) ** self.minus_ones
        return [int(round(c)) for c in poly.coeffs]


def char_poly_extremal(n: int, k: int) -> CharPolyFactorization:
    check_nk(n, k)
    if k == n - 1:
        raise ValueError(
            "k = n-1: the extremal graph is K_n and the (x-1) exponent would be -1; "
            "its spectrum is {n-1, -1 x (n-1)}"
        )
    return CharPolyFactorization(n, k, n - k - 2, k - 1, f_poly(n, k))


def extremal_eigenvectors(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Explicit eigenvectors for -1 (rows of the first array) and +1 (second).

    Vertex labels follow :func:`cliquespec.enumeration.build_extremal`:
    0 is the center, 1..a the other clique vertices, then triangle pairs.
    """
    check_nk(n, k)
    a = 2 * k - n + 1
    t = n - k - 1
    pairs = [(a + 1 + 2 * i, a + 2 + 2 * i) for i in range(t)]
    e1 = []
    for j in range(2, a + 1):
        x = np.zeros(n)
        x[1], x[j] = 1.0, -1.0
        e1.append(x)
    for u1, u2 in pairs:
        x = np.zeros(n)
        x[u1], x[u2] = 1.0, -1.0
        e1.append(x)
    e2 = []
    for u1, u2 in pairs[1:]:
        x = np.zeros(n)
        x[pairs[0][0]] = x[pairs[0][1]] = 1.0
        x[u1] = x[u2] = -1.0
        e2.append(x)
    return np.array(e1).reshape(-1, n), np.array(e2).reshape(-1, n)


def cluster_eigenvalues(values: Sequence[float], tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group sorted eigenvalues into (mean, multiplicity) clusters."""
    out: list[list[float]] = []
    for v in sorted(values):
        if out and abs(v - out[-1][-1]) <= tol:
            out[-1].append(v)
        else:
            out.append([v])
    return [(float(np.mean(c)), len(c)) for c in out]


def lower_bound(n: int, k: int) -> float:
    check_nk(n, k)
    return max(2 * k - n + 1, math.sqrt(n - 1))


def bound_case(n: int, k: int) -> int:
    check_nk(n, k)
    return 1 if k <= (n - 1 + math.sqrt(n - 1)) / 2 else 2


def upper_bound(n: int, k: int) -> float:
    """Upper bound on the extremal spectral radius, split at k = (n-1+sqrt(n-1))/2.

    Raises :class:`BoundNotApplicable` when the second case would divide by a
    non-positive 3b - a.
    """
    p = BoundParameters.of(n, k)
    a, b = p.a, p.b
    if bound_case(n, k) == 1:
        disc = (a * a + a - n) ** 2 + 8 * a * k * (n - 1 - a)
        return a + (n - a * (a + 1) + math.sqrt(disc)) / (4 * a)
    den = 3 * b - a
    if den <= 0:
        raise BoundNotApplicable(f"(n,k)=({n},{k}): 3b - a = {den:.6g} <= 0")
    disc = p.alpha**2 - 4 * p.beta * den
    if disc < 0:
        raise BoundNotApplicable(f"(n,k)=({n},{k}): negative discriminant {disc:.6g}")
    return b + (math.sqrt(disc) - p.alpha) / (2 * den)


def bounds_report(n: int, k: int) -> dict:
    """Lower bound, cubic root and upper bound for one (n,k), JSON-ready."""
    p = BoundParameters.of(n, k)
    rho = extremal_rho(n, k)
    lo = lower_bound(n, k)
    out = {
        "n": n,
        "k": k,
        "a": p.a,
        "b": p.b,
        "alpha": p.alpha,
        "beta": p.beta,
        "case": bound_case(n, k),
        "lower": lo,
        "rho": rho,
        "upper": None,
        "applicable": True,
        "note": None,
    }
    try:
        out["upper"] = upper_bound(n, k)
    except BoundNotApplicable as exc:
        out["applicable"] = False
        out["note"] = str(exc)
    out["lower_ok"] = lo < rho
    out["upper_ok"] = out["upper"] is not None and rho < out["upper"]
    return out


def perron_pendant_check(
    g: Graph, ct: CliqueTreeStructure, tol: float = 1e-9, perron: np.ndarray | None = None
) -> bool:
    """On every pendant block the cut vertex dominates and the other entries agree."""
    pend = ct.pendant_blocks()
    if not pend:
        raise GraphError("graph has no pendant block")
    x = spectral_radius(g).perron if perron is None else perron
    for bi in pend:
        (cut,) = ct.cuts_of(bi)
        leaves = [v for v in ct.blocks[bi] if v != cut]
        vals = x[leaves]
        if np.max(vals) - np.min(vals) > tol:
            return False
        if not np.all(x[cut] > vals + tol):
            return False
    return True
