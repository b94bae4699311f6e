"""Spectral measurements and the three expansion checks the pipeline relies on.

lambda = max(lambda_2, |lambda_n|) is always *measured*, never assumed: for
small graphs by dense symmetric eigendecomposition, for large ones by Lanczos
(ARPACK) on the adjacency operator with the all-ones direction shifted out of
the way (valid because the top eigenvector of a connected regular graph is
the all-ones vector). Estimates coming from the iterative path get a +5%
safety margin before being consumed by parameter derivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import sqrt

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigenConvergenceError, NonRegularGraph
from .graph import Graph, _as_array, edge_count_between, gamma_restricted
from .rand import rng_for

DENSE_LIMIT = 512
SAFETY_MARGIN = 1.05
_V0_TAG = 0xE16E


@dataclass(frozen=True)
class SpectralProfile:
    lambda2: float
    lambda_n: float
    lam: float    # max(lambda2, |lambda_n|); serialized under the key "lambda"
    ratio: float  # d / lam
    tol: float
    method: str   # "dense" | "iterative"

    def to_json(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "lambda_n": self.lambda_n,
            "lambda": self.lam,
            "ratio": self.ratio,
            "tol": self.tol,
        }


def _require_regular(g: Graph) -> int:
    d = g.regular_degree()
    if d is None:
        raise NonRegularGraph("operation requires a regular graph")
    return d


def _profile(d: int, lambda2: float, lambda_n: float, tol: float, method: str) -> SpectralProfile:
    lam = max(lambda2, abs(lambda_n))
    ratio = d / lam if lam > 0 else float("inf")
    return SpectralProfile(float(lambda2), float(lambda_n), float(lam), ratio, tol, method)


def extremal_eigenvalues(g: Graph, tol: float = 1e-9) -> SpectralProfile:
    """lambda_2 and lambda_n of the adjacency operator, to relative accuracy tol.

    Dense eigendecomposition for n <= DENSE_LIMIT, Lanczos above that.
    """
    d = _require_regular(g)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.n <= DENSE_LIMIT:
        lambda2, lambda_n = _dense_extremal(g)
        return _profile(d, lambda2, lambda_n, tol, "dense")
    lambda2, lambda_n = _iterative_extremal(g, tol)
    return _profile(d, lambda2, lambda_n, tol, "iterative")


def _dense_extremal(g: Graph) -> tuple[float, float]:
    a = np.zeros((g.n, g.n))
    edges = g.edge_array()
    a[edges[:, 0], edges[:, 1]] = 1.0
    a[edges[:, 1], edges[:, 0]] = 1.0
    w = np.linalg.eigvalsh(a)
    return float(w[-2]), float(w[0])


def _adjacency_csr(g: Graph) -> sp.csr_matrix:
    data = np.ones(g.indices.size)
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))


def _iterative_extremal(g: Graph, tol: float, maxiter: int | None = None) -> tuple[float, float]:
    """Lanczos estimates of lambda_2 and lambda_n.

    The all-ones eigenvalue d is shifted to -d (resp. +3d) by adding a rank-one
    multiple of J/n, so the wanted eigenvalue is extremal for ARPACK in both
    calls regardless of sign patterns in the rest of the spectrum.
    """
    d = _require_regular(g)
    n = g.n
    if d == 0:
        return 0.0, 0.0
    a = _adjacency_csr(g)
    shift = 2.0 * d

    def mv_down(x):
        return a @ x - shift * x.mean()

    def mv_up(x):
        return a @ x + shift * x.mean()

    v0 = rng_for(_V0_TAG, n).standard_normal(n)
    kwargs = dict(k=1, tol=tol, v0=v0, return_eigenvectors=False)
    if maxiter is not None:
        kwargs["maxiter"] = maxiter
    try:
        op = spla.LinearOperator((n, n), matvec=mv_down, dtype=float)
        lambda2 = float(spla.eigsh(op, which="LA", **kwargs)[0])
        op = spla.LinearOperator((n, n), matvec=mv_up, dtype=float)
        lambda_n = float(spla.eigsh(op, which="SA", **kwargs)[0])
    except spla.ArpackNoConvergence as exc:
        raise EigenConvergenceError(f"Lanczos did not converge: {exc}") from None
    return lambda2, lambda_n


def lambda_with_margin(profile: SpectralProfile) -> float:
    """The lambda value parameter derivation should consume.

    Iterative estimates carry a +5% margin so mixing-based guarantees still
    hold under estimation error; dense values are exact and used as-is.
    """
    if profile.method == "iterative":
        return profile.lam * SAFETY_MARGIN
    return profile.lam


def mixing_slack(g: Graph, lam: float, a, b) -> float:
    """lam*sqrt(|a||b|) - |e(a,b) - |a||b|d/n|.

    Nonnegative (up to rounding) whenever lam is a true upper bound on the
    graph's second eigenvalue magnitude.
    """
    d = _require_regular(g)
    a_arr = _as_array(g, a)
    b_arr = _as_array(g, b)
    if a_arr.size == 0 or b_arr.size == 0:
        return 0.0
    e_ab = edge_count_between(g, a_arr, b_arr)
    expected = a_arr.size * b_arr.size * d / g.n
    return lam * sqrt(a_arr.size * b_arr.size) - abs(e_ab - expected)


@dataclass(frozen=True)
class JoinedReport:
    passed: bool
    exhaustive: bool
    pairs_checked: int
    witness: tuple[list[int], list[int]] | None
    vacuous: bool = False


def check_joined(g: Graph, m: int, trials: int = 1000, seed: int = 0) -> JoinedReport:
    """Check that every two disjoint size-m vertex sets span at least one edge.

    Exhaustive for n <= 24 (complete over all pairs of size exactly m);
    sampled otherwise, which makes a pass one-sided. A witness, when found,
    is a pair (X, Y) with no edge between them.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    n = g.n
    if 2 * m > n:
        return JoinedReport(True, True, 0, None, vacuous=True)
    if n <= 24:
        return _check_joined_exhaustive(g, m)
    rng = rng_for(seed, 3)
    for t in range(trials):
        perm = rng.permutation(n)
        x = sorted(perm[:m].tolist())
        y = sorted(perm[m:2 * m].tolist())
        if edge_count_between(g, x, y) == 0:
            return JoinedReport(False, False, t + 1, (x, y))
    return JoinedReport(True, False, trials, None)


def _check_joined_exhaustive(g: Graph, m: int) -> JoinedReport:
    n = g.n
    nbr_mask = [0] * n
    for v in range(n):
        acc = 0
        for w in g.neighbors(v).tolist():
            acc |= 1 << w
        nbr_mask[v] = acc
    full = (1 << n) - 1
    checked = 0
    for xs in combinations(range(n), m):
        checked += 1
        covered = 0
        for v in xs:
            covered |= (1 << v) | nbr_mask[v]
        free = full & ~covered
        if free.bit_count() >= m:
            ys = []
            while len(ys) < m:
                low = free & -free
                ys.append(low.bit_length() - 1)
                free ^= low
            return JoinedReport(False, True, checked, (list(xs), ys))
    return JoinedReport(True, True, checked, None)


@dataclass(frozen=True)
class ExpansionReport:
    passed: bool
    ratio: float
    threshold: float
    vacuous: bool = False


def expansion_check(g: Graph, b, x, eps: float, k: float) -> ExpansionReport:
    """Check |Gamma_b(x)| >= eps^2 * k * |x| under the stated preconditions.

    Preconditions (violations raise ValueError): k > 1, |x| <= n/(12k), and
    every vertex of g must have at least eps*d/3 neighbors in b.
    """
    d = _require_regular(g)
    if not k > 1:
        raise ValueError("k must exceed 1")
    x_arr = _as_array(g, x)
    b_arr = _as_array(g, b)
    if x_arr.size == 0:
        return ExpansionReport(True, float("inf"), eps * eps * k, vacuous=True)
    if x_arr.size > g.n / (12 * k):
        raise ValueError(f"|x|={x_arr.size} exceeds n/(12k)={g.n / (12 * k):.3f}")
    in_b = np.zeros(g.n, dtype=np.int64)
    in_b[b_arr] = 1
    b_degrees = np.bincount(g.row_index, weights=in_b[g.indices], minlength=g.n)
    need = eps * d / 3
    if b_degrees.min() < need:
        v = int(np.argmin(b_degrees))
        raise ValueError(
            f"vertex {v} has {int(b_degrees[v])} neighbors in b, needs >= {need:.3f}")
    gam = gamma_restricted(g, x_arr, b_arr)
    ratio = len(gam) / x_arr.size
    threshold = eps * eps * k
    return ExpansionReport(ratio >= threshold, ratio, threshold)
