"""Two-stage seeded random coloring with bad-event resampling.

Stage one assigns every vertex to the reservoir (probability b_prob), to one
of r1 first-stage colors (probability p1 each), or leaves it uncolored (only
possible through floating-point edge cases, since b_prob + r1*p1 = 1). Stage
two refines each colored vertex with a uniform second-stage color in [r2].
Both stages run a Moser-Tardos style loop: while some neighborhood count
violates its threshold, re-randomize the labels the violated event depends
on, always picking the lexicographically lowest violated event.

Thresholds by mode:
  theory   - stage one requires every count inside [(1-eps/2)E, (1+eps/2)E]
             with E = p1*d for colors and b_prob*d for the reservoir.
  practice - one-sided lower bounds only: reservoir counts must reach
             b_prob*d/2 (exactly the bound the output contract needs) and
             color counts max(r2, p1*d/2) (enough for stage two to have room
             to work). The two-sided windows have per-event failure
             probability near 1/2 at desk-scale d, so resampling would never
             terminate; callers may still pass explicit thresholds.

Stage two uses the same band in both modes: each (c, c') must appear in every
neighborhood strictly more than eps^2 * ln d times and strictly fewer than
20 * ln d times. At desk scale the lower bound reduces to "at least once",
which is exactly domination.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, log

import numpy as np

from .errors import PostconditionViolation, ResampleBudgetExhausted
from .graph import Graph, components_of, concat_neighbors
from .params import PackingParams
from .rand import rng_for

RESERVOIR = -1
UNCOLORED = -2

_STAGE1_TAG = 11
_STAGE2_TAG = 12
RESAMPLE_FACTOR = 100  # cap = RESAMPLE_FACTOR * n per stage


@dataclass
class ColorAssignment:
    """Per-vertex labels after a coloring stage.

    c1[v] is RESERVOIR, UNCOLORED, or a first-stage color in [0, r1).
    c2[v] is -1 until stage two assigns a second-stage color in [0, r2).
    """

    c1: np.ndarray
    c2: np.ndarray | None
    r1: int
    r2: int
    resamples: int = 0


@dataclass
class DominatingFamily:
    """Reservoir plus d_star disjoint dominating sets with component counts."""

    reservoir: list[int]
    sets: list[list[int]]
    component_counts: list[int]

    def to_json(self) -> dict:
        return {
            "B": list(self.reservoir),
            "sets": [list(s) for s in self.sets],
            "component_counts": list(self.component_counts),
        }


def _draw_stage1(rng: np.random.Generator, size: int, b_prob: float,
                 p1: float, r1: int) -> np.ndarray:
    u = rng.random(size)
    out = np.full(size, UNCOLORED, dtype=np.int32)
    out[u < b_prob] = RESERVOIR
    rest = u >= b_prob
    if p1 > 0:
        c = np.floor((u[rest] - b_prob) / p1).astype(np.int64)
        ok = c < r1
        out[np.flatnonzero(rest)[ok]] = c[ok].astype(np.int32)
    return out


def _column_labels(c1: np.ndarray, r1: int) -> np.ndarray:
    """Map stage-one labels to count-matrix columns: colors 0..r1-1, reservoir r1."""
    lab = c1.astype(np.int64).copy()
    lab[c1 == RESERVOIR] = r1
    lab[c1 == UNCOLORED] = -1
    return lab


def _neighbor_counts(g: Graph, labels: np.ndarray, ncols: int) -> np.ndarray:
    """counts[v, c] = number of neighbors of v whose label is c (label -1 skipped)."""
    lab = labels[g.indices]
    valid = lab >= 0
    flat = g.row_index[valid] * ncols + lab[valid]
    return np.bincount(flat, minlength=g.n * ncols).reshape(g.n, ncols)


def _shift_counts(g: Graph, counts: np.ndarray, verts: np.ndarray,
                  old: np.ndarray, new: np.ndarray) -> None:
    """Apply a relabeling of `verts` to the neighbor-count matrix in place."""
    degs = g.degrees[verts]
    nbrs = concat_neighbors(g, verts)
    rep_old = np.repeat(old, degs)
    rep_new = np.repeat(new, degs)
    dec = rep_old >= 0
    if dec.any():
        np.subtract.at(counts, (nbrs[dec], rep_old[dec]), 1)
    inc = rep_new >= 0
    if inc.any():
        np.add.at(counts, (nbrs[inc], rep_new[inc]), 1)


def stage_one_thresholds(params: PackingParams) -> tuple[np.ndarray, np.ndarray]:
    """Default per-column (lo, hi) count bounds for stage one."""
    r1 = params.r1
    e_color = params.p1 * params.d
    e_res = params.b_prob * params.d
    lo = np.empty(r1 + 1)
    hi = np.empty(r1 + 1)
    if params.mode == "theory":
        lo[:r1] = (1 - params.epsilon / 2) * e_color
        hi[:r1] = (1 + params.epsilon / 2) * e_color
        lo[r1] = (1 - params.epsilon / 2) * e_res
        hi[r1] = (1 + params.epsilon / 2) * e_res
    else:
        lo[:r1] = max(float(params.r2), e_color / 2)
        lo[r1] = e_res / 2
        hi[:] = inf
    return lo, hi


def stage_one(g: Graph, params: PackingParams, seed: int,
              thresholds: tuple | None = None,
              max_resamples: int | None = None) -> ColorAssignment:
    """Stage-one coloring: reservoir / first-stage colors, with resampling.

    Re-randomizes N(v) for the lowest violated (v, c) until every
    neighborhood count sits inside its bounds.
    """
    n = g.n
    r1 = params.r1
    rng = rng_for(seed, _STAGE1_TAG)
    c1 = _draw_stage1(rng, n, params.b_prob, params.p1, r1)
    lo, hi = thresholds if thresholds is not None else stage_one_thresholds(params)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (r1 + 1,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (r1 + 1,))
    counts = _neighbor_counts(g, _column_labels(c1, r1), r1 + 1)
    cap = max_resamples if max_resamples is not None else RESAMPLE_FACTOR * n
    resamples = 0
    while True:
        bad = (counts < lo) | (counts > hi)
        flat = np.flatnonzero(bad.ravel())
        if flat.size == 0:
            break
        v = int(flat[0]) // (r1 + 1)
        resamples += 1
        if resamples > cap:
            raise ResampleBudgetExhausted(
                f"stage one: {flat.size} bad events after {cap} resamples")
        w = g.neighbors(v).astype(np.int64)
        old_cols = _column_labels(c1[w], r1)
        c1[w] = _draw_stage1(rng, w.size, params.b_prob, params.p1, r1)
        _shift_counts(g, counts, w, old_cols, _column_labels(c1[w], r1))
    return ColorAssignment(c1=c1, c2=None, r1=r1, r2=params.r2, resamples=resamples)


def stage_two_thresholds(params: PackingParams) -> tuple[float, float]:
    """(lo, hi) band for per-class neighborhood counts; bad iff <= lo or >= hi."""
    lg = log(params.d)
    return params.epsilon ** 2 * lg, 20.0 * lg


def stage_two(g: Graph, stage1: ColorAssignment, params: PackingParams, seed: int,
              thresholds: tuple[float, float] | None = None,
              max_resamples: int | None = None) -> ColorAssignment:
    """Refine first-stage colors with uniform second-stage colors.

    Theory mode clears violations by re-randomizing the second-stage labels
    of all c-colored neighbors of v, which is the regime where the local
    lemma guarantees termination. At desk scale that cascade branches (one
    fixed zero-count creates tens of new ones a hop away), so practice mode
    instead repairs a violation by relabeling a single c-colored neighbor
    into the deficient class, chosen to create the fewest new violations.
    Stage-one labels are never touched in either mode.
    """
    n = g.n
    r1, r2 = stage1.r1, params.r2
    d_star = r1 * r2
    rng = rng_for(seed, _STAGE2_TAG)
    c1 = stage1.c1
    c2 = rng.integers(0, r2, size=n).astype(np.int32)
    c2[c1 < 0] = -1
    lo, hi = thresholds if thresholds is not None else stage_two_thresholds(params)

    labels = c1.astype(np.int64) * r2 + c2
    labels[c1 < 0] = -1
    counts = _neighbor_counts(g, labels, d_star)
    cap = max_resamples if max_resamples is not None else RESAMPLE_FACTOR * n
    resamples = 0
    while True:
        bad = (counts <= lo) | (counts >= hi)
        flat = np.flatnonzero(bad.ravel())
        if flat.size == 0:
            break
        idx = int(flat[0])
        v, cls = idx // d_star, idx % d_star
        c = cls // r2
        resamples += 1
        if resamples > cap:
            raise ResampleBudgetExhausted(
                f"stage two: {flat.size} bad events after {cap} resamples")
        nbrs = g.neighbors(v).astype(np.int64)
        members = nbrs[c1[nbrs] == c]
        if members.size == 0:
            raise ResampleBudgetExhausted(
                f"stage two: event (v={v}, class={cls}) has no {c}-colored "
                f"neighbors to resample")
        if params.mode == "theory":
            old = labels[members].copy()
            c2[members] = rng.integers(0, r2, size=members.size).astype(np.int32)
            labels[members] = c1[members].astype(np.int64) * r2 + c2[members]
            _shift_counts(g, counts, members, old, labels[members])
        else:
            _repair_event(g, counts, labels, c2, members, c, cls, r2,
                          int(counts[v, cls]) >= hi, lo, v)
    return ColorAssignment(c1=c1, c2=c2, r1=r1, r2=r2,
                           resamples=stage1.resamples + resamples)


def _repair_event(g: Graph, counts: np.ndarray, labels: np.ndarray,
                  c2: np.ndarray, members: np.ndarray, c: int, cls: int,
                  r2: int, overfull: bool, lo: float, v: int) -> None:
    """Flip one second-stage label to move counts[v, cls] toward its band.

    The flipped vertex is the candidate whose relabeling drops the fewest
    neighborhood counts to the lower threshold (ties to lowest id), so
    repairs rarely spawn new violations.
    """
    if overfull:
        cand = members[c2[members] == cls % r2]
        # move one vertex out of the crowded class into v's emptiest class
        target = int(np.argmin(counts[v, c * r2:(c + 1) * r2]))
    else:
        cand = members[c2[members] != cls % r2]
        target = cls % r2
    if cand.size == 0:
        raise ResampleBudgetExhausted(
            f"stage two: event (v={v}, class={cls}) has no movable neighbor")
    best_w, best_score = -1, None
    for w in cand.tolist():
        old_cls = c * r2 + int(c2[w])
        created = int((counts[g.neighbors(w), old_cls] <= lo + 1).sum())
        if best_score is None or created < best_score:
            best_w, best_score = w, created
            if created == 0:
                break
    old = labels[[best_w]].copy()
    c2[best_w] = target
    labels[best_w] = c * r2 + target
    _shift_counts(g, counts, np.asarray([best_w], dtype=np.int64), old,
                  labels[[best_w]])


def build_family(g: Graph, stage2_out: ColorAssignment,
                 params: PackingParams) -> DominatingFamily:
    """Assemble the reservoir and the d_star color classes, then validate.

    Classes map to set indices lexicographically: (c, c') -> c*r2 + c'.
    All three output properties are checked mechanically and a violation
    raises with the failed property and a witness vertex.
    """
    if stage2_out.c2 is None:
        raise ValueError("stage two has not run")
    n = g.n
    r1, r2 = stage2_out.r1, stage2_out.r2
    d_star = r1 * r2
    c1, c2 = stage2_out.c1, stage2_out.c2
    labels = c1.astype(np.int64) * r2 + c2
    labels[c1 < 0] = -1

    reservoir = np.flatnonzero(c1 == RESERVOIR)
    sets = [np.flatnonzero(labels == i) for i in range(d_star)]

    # property: every vertex has at least b_prob*d/2 neighbors in the reservoir
    counts = _neighbor_counts(g, _column_labels(c1, r1), r1 + 1)
    res_need = params.b_prob * params.d / 2
    short = np.flatnonzero(counts[:, r1] < res_need)
    if short.size:
        v = int(short[0])
        raise PostconditionViolation(
            "reservoir-degree", witness=v,
            detail=f"vertex {v} has {int(counts[v, r1])} reservoir neighbors, "
                   f"needs >= {res_need:.3f}")

    # property: every class dominates (member or neighbor in every class)
    class_counts = _neighbor_counts(g, labels, d_star)
    for i in range(d_star):
        covered = (class_counts[:, i] > 0) | (labels == i)
        if not covered.all():
            v = int(np.flatnonzero(~covered)[0])
            raise PostconditionViolation(
                "dominating", witness=v,
                detail=f"vertex {v} has no neighbor in set {i}")

    # property: each class induces few components
    comp_bound = 20 * n / (params.epsilon ** 2 * params.d)
    component_counts = []
    for i, members in enumerate(sets):
        k = len(components_of(g, members))
        if k > comp_bound:
            raise PostconditionViolation(
                "component-count", witness=i,
                detail=f"set {i} has {k} components, bound {comp_bound:.3f}")
        component_counts.append(k)

    return DominatingFamily(
        reservoir=reservoir.tolist(),
        sets=[s.tolist() for s in sets],
        component_counts=component_counts,
    )
