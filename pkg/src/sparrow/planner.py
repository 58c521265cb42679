"""Turret visit-order planning over detected weeds, plus evaluation metrics.

All planners share one instance shape: a reference point (the footprint
center, where the nozzle rests) and a list of weed ground points.  Plans
are closed tours by default, so every algorithm answers the same question
and the classic Christofides 1.5x bound applies; open-path mode simply
drops the closing edge and is a reporting convention, not a different
optimization problem.

Planners:

* nearest neighbor: greedy chain, lowest-index tie break;
* Christofides: MST + minimum-weight perfect matching on odd-degree
  vertices (exact subset DP up to 12 odd vertices, greedy nearest-pair
  beyond, annotated on the plan) + Eulerian circuit + first-visit
  shortcutting;
* exact optimum: Held-Karp dynamic program over vertex subsets, capped
  at 15 weeds;
* hybrid: best-of-both or a weed-count threshold switch.

Plan quality is scored as optimal length over heuristic length, a ratio
in (0, 1] where 1 means the heuristic matched the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeError, ValidationError
from .field import GroundPoint

HELD_KARP_LIMIT = 15
EXACT_MATCHING_LIMIT = 12  # odd-vertex count above which matching falls back to greedy

ALG_NEAREST = "NearestNeighbor"
ALG_CHRISTOFIDES = "Christofides"
ALG_OPTIMAL = "Optimal"
ALG_HYBRID = "Hybrid"


@dataclass(frozen=True)
class SprayPlan:
    """Ordered weed visit sequence from a reference point.

    ``order`` holds indices into the weed list the plan was built from;
    ``length`` is the total path length in cm under the plan's own
    closed/open convention.  ``matching`` records whether a Christofides
    plan used exact or greedy matching; ``inner`` records which heuristic
    a hybrid plan settled on.
    """

    start: GroundPoint
    order: tuple[int, ...]
    length: float
    algorithm: str
    closed: bool = True
    matching: str | None = None
    inner: str | None = None


def build_distance_matrix(ref: GroundPoint, weeds: list[GroundPoint]) -> np.ndarray:
    """Symmetric Euclidean distance matrix; index 0 is the reference point."""
    pts = np.array([(ref.x, ref.y)] + [(w.x, w.y) for w in weeds], dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def tour_length(plan: SprayPlan, points: list[GroundPoint]) -> float:
    """Recompute a plan's path length from scratch.

    Raises ValidationError when the plan order is not a permutation of
    the point indices.
    """
    if sorted(plan.order) != list(range(len(points))):
        raise ValidationError("plan order is not a permutation of the weed indices")
    if not plan.order:
        return 0.0
    total = 0.0
    prev = plan.start
    for idx in plan.order:
        total += prev.distance_to(points[idx])
        prev = points[idx]
    if plan.closed:
        total += prev.distance_to(plan.start)
    return total


def _finish_plan(ref, weeds, order, algorithm, closed, **extra) -> SprayPlan:
    plan = SprayPlan(start=ref, order=tuple(order), length=0.0,
                     algorithm=algorithm, closed=closed, **extra)
    length = tour_length(plan, weeds)
    return SprayPlan(start=ref, order=tuple(order), length=length,
                     algorithm=algorithm, closed=closed, **extra)


def plan_nearest_neighbor(ref: GroundPoint, weeds: list[GroundPoint],
                          closed: bool = True) -> SprayPlan:
    """Greedy chain from the reference: always visit the nearest unvisited weed.

    Distance ties break toward the lowest weed index, so identical inputs
    always give identical plans.
    """
    n = len(weeds)
    dist = build_distance_matrix(ref, weeds)
    remaining = list(range(1, n + 1))
    order = []
    current = 0
    while remaining:
        d = dist[current, remaining]
        pick = int(np.argmin(d))  # argmin returns the first minimum: lowest index
        current = remaining.pop(pick)
        order.append(current - 1)
    return _finish_plan(ref, weeds, order, ALG_NEAREST, closed)


def _prim_mst(dist: np.ndarray) -> list[tuple[int, int]]:
    """Minimum spanning tree edges by Prim's method, deterministic tie-break."""
    m = dist.shape[0]
    in_tree = np.zeros(m, dtype=bool)
    in_tree[0] = True
    key = dist[0].copy()
    parent = np.zeros(m, dtype=int)
    edges = []
    for _ in range(m - 1):
        key_masked = np.where(in_tree, np.inf, key)
        v = int(np.argmin(key_masked))
        edges.append((int(parent[v]), v))
        in_tree[v] = True
        better = ~in_tree & (dist[v] < key)
        key[better] = dist[v][better]
        parent[better] = v
    return edges


def _exact_matching(odd: list[int], dist: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-weight perfect matching by DP over subsets of the odd vertices."""
    k = len(odd)
    size = 1 << k
    cost = [math.inf] * size
    choice: list[tuple[int, int] | None] = [None] * size
    cost[0] = 0.0
    for mask in range(size):
        if math.isinf(cost[mask]):
            continue
        i = 0
        while mask >> i & 1:
            i += 1
        if i >= k:
            continue
        for j in range(i + 1, k):
            if mask >> j & 1:
                continue
            nm = mask | 1 << i | 1 << j
            w = cost[mask] + dist[odd[i], odd[j]]
            if w < cost[nm]:
                cost[nm] = w
                choice[nm] = (i, j)
    pairs = []
    mask = size - 1
    while mask:
        i, j = choice[mask]
        pairs.append((odd[i], odd[j]))
        mask ^= 1 << i | 1 << j
    return pairs


def _greedy_matching(odd: list[int], dist: np.ndarray) -> list[tuple[int, int]]:
    """Repeatedly match the globally closest unmatched pair."""
    left = list(odd)
    pairs = []
    while left:
        best = None
        for ai in range(len(left)):
            for bi in range(ai + 1, len(left)):
                w = dist[left[ai], left[bi]]
                if best is None or w < best[0]:
                    best = (w, ai, bi)
        _, ai, bi = best
        a, b = left[ai], left[bi]
        pairs.append((a, b))
        del left[bi], left[ai]
    return pairs


def _hierholzer(edges: list[tuple[int, int]], start: int) -> list[int]:
    """Eulerian circuit over a connected even-degree multigraph."""
    adj: dict[int, list[int]] = {}
    for eid, (a, b) in enumerate(edges):
        adj.setdefault(a, []).append(eid)
        adj.setdefault(b, []).append(eid)
    used = [False] * len(edges)
    stack = [start]
    circuit = []
    while stack:
        v = stack[-1]
        found = False
        while adj.get(v):
            eid = adj[v].pop()
            if used[eid]:
                continue
            used[eid] = True
            a, b = edges[eid]
            stack.append(b if a == v else a)
            found = True
            break
        if not found:
            circuit.append(stack.pop())
    circuit.reverse()
    return circuit


def plan_christofides(ref: GroundPoint, weeds: list[GroundPoint],
                      closed: bool = True) -> SprayPlan:
    """Christofides tour: MST, odd-vertex matching, Eulerian shortcutting.

    With exact matching (up to 12 odd vertices) the closed tour is at most
    1.5x the optimum; beyond that a greedy matching is used and the plan
    carries matching="greedy" since the bound no longer holds.
    """
    n = len(weeds)
    if n == 0:
        return _finish_plan(ref, weeds, [], ALG_CHRISTOFIDES, closed, matching="exact")
    dist = build_distance_matrix(ref, weeds)
    mst = _prim_mst(dist)
    degree = np.zeros(n + 1, dtype=int)
    for a, b in mst:
        degree[a] += 1
        degree[b] += 1
    odd = [v for v in range(n + 1) if degree[v] % 2 == 1]
    if len(odd) <= EXACT_MATCHING_LIMIT:
        matching_kind = "exact"
        pairs = _exact_matching(odd, dist) if odd else []
    else:
        matching_kind = "greedy"
        pairs = _greedy_matching(odd, dist)
    circuit = _hierholzer(mst + pairs, start=0)
    seen = set()
    tour = []
    for v in circuit:
        if v not in seen:
            seen.add(v)
            tour.append(v)
    order = [v - 1 for v in tour if v != 0]
    return _finish_plan(ref, weeds, order, ALG_CHRISTOFIDES, closed,
                        matching=matching_kind)


def plan_optimal_heldkarp(ref: GroundPoint, weeds: list[GroundPoint],
                          closed: bool = True) -> SprayPlan:
    """Exact minimum closed tour by dynamic programming over weed subsets.

    A closed tour and its reversal are the same cycle, so the direction is
    canonicalized (first visited index not larger than the last); without
    this the floating-point tie between the two directions would make the
    reported order depend on coordinate translation.

    Raises SizeError above 15 weeds; state space is 2^n by n.
    """
    n = len(weeds)
    if n > HELD_KARP_LIMIT:
        raise SizeError(f"{n} weeds exceeds the exact-solver limit of {HELD_KARP_LIMIT}")
    if n == 0:
        return _finish_plan(ref, weeds, [], ALG_OPTIMAL, closed)
    dist = build_distance_matrix(ref, weeds)
    d = dist[1:, 1:]
    d0 = dist[0, 1:]
    size = 1 << n
    dp = np.full((size, n), np.inf)
    parent = np.full((size, n), -1, dtype=np.int64)
    idx = np.arange(n)
    dp[1 << idx, idx] = d0
    masks = np.arange(size, dtype=np.int64)
    popcount = ((masks[:, None] >> idx) & 1).sum(axis=1)
    for p in range(2, n + 1):
        level = masks[popcount == p]
        for j in range(n):
            mj = level[((level >> j) & 1) == 1]
            if mj.size == 0:
                continue
            prev = mj ^ (1 << j)
            cand = dp[prev] + d[:, j]  # dp entries for k not in prev are inf
            k = np.argmin(cand, axis=1)
            rows = np.arange(mj.size)
            dp[mj, j] = cand[rows, k]
            parent[mj, j] = k
    full = size - 1
    closing = dp[full] + d0
    j = int(np.argmin(closing))
    order = [j]
    mask = full
    while parent[mask, j] >= 0:
        k = int(parent[mask, j])
        mask ^= 1 << j
        j = k
        order.append(j)
    order.reverse()
    if len(order) > 1 and order[0] > order[-1]:
        order.reverse()
    return _finish_plan(ref, weeds, order, ALG_OPTIMAL, closed)


def plan_hybrid(ref: GroundPoint, weeds: list[GroundPoint],
                mode: str = "best_of_both", threshold: int = 10,
                closed: bool = True) -> SprayPlan:
    """Combine the two heuristics.

    mode "best_of_both" runs both and keeps the shorter plan (ties go to
    nearest neighbor); mode "threshold" uses nearest neighbor below
    ``threshold`` weeds and Christofides otherwise.
    """
    if mode == "best_of_both":
        nn = plan_nearest_neighbor(ref, weeds, closed)
        chr_plan = plan_christofides(ref, weeds, closed)
        winner = nn if nn.length <= chr_plan.length else chr_plan
    elif mode == "threshold":
        if len(weeds) < threshold:
            winner = plan_nearest_neighbor(ref, weeds, closed)
        else:
            winner = plan_christofides(ref, weeds, closed)
    else:
        raise ValidationError(f"unknown hybrid mode {mode!r}")
    return SprayPlan(start=winner.start, order=winner.order, length=winner.length,
                     algorithm=ALG_HYBRID, closed=winner.closed,
                     matching=winner.matching, inner=winner.algorithm)


def phi_score(candidate: SprayPlan, optimal: SprayPlan) -> float:
    """Optimal-to-heuristic length ratio; 1.0 means the heuristic was optimal.

    Both plans must cover the same weed count under the same closed/open
    convention, and ``optimal`` must come from the exact solver.
    """
    if optimal.algorithm != ALG_OPTIMAL:
        raise ValidationError("reference plan must be produced by the exact solver")
    if len(candidate.order) != len(optimal.order):
        raise ValidationError("plans cover different weed sets")
    if candidate.closed != optimal.closed:
        raise ValidationError("plans use different closed/open conventions")
    if candidate.length == 0.0 and optimal.length == 0.0:
        return 1.0
    return optimal.length / candidate.length


def random_instance(n: int, rng: np.random.Generator,
                    field_dims: tuple[float, float] = (96.0, 51.0),
                    min_separation: float = 2.0) -> tuple[GroundPoint, list[GroundPoint]]:
    """Uniform weed points inside the footprint rectangle, min 2 cm apart.

    The reference point is the footprint center; separation is enforced
    against it as well so no two points can tie degenerately.
    """
    width, depth = field_dims
    ref = GroundPoint(0.0, depth / 2.0)
    points: list[GroundPoint] = []
    attempts = 0
    while len(points) < n:
        attempts += 1
        if attempts > 10000 * (n + 1):
            raise ValidationError(
                f"cannot place {n} points {min_separation} cm apart in {field_dims}"
            )
        x = float(rng.uniform(-width / 2.0, width / 2.0))
        y = float(rng.uniform(0.0, depth))
        p = GroundPoint(x, y)
        if p.distance_to(ref) < min_separation:
            continue
        if any(p.distance_to(q) < min_separation for q in points):
            continue
        points.append(p)
    return ref, points


@dataclass(frozen=True)
class EvalRow:
    trial: int
    n: int
    lambda_nn: float
    lambda_chr: float
    lambda_opt: float
    phi_n: float
    phi_c: float


@dataclass(frozen=True)
class EvalSummary:
    n: int
    trials: int
    mean_phi_n: float
    mean_phi_c: float


def evaluate_planners(trials: int, n_range: tuple[int, int],
                      field_dims: tuple[float, float] = (96.0, 51.0),
                      seed: int = 0) -> tuple[list[EvalRow], list[EvalSummary]]:
    """Benchmark both heuristics against the exact optimum on random instances.

    Each trial draws a weed count uniformly from ``n_range`` (inclusive)
    and a fresh instance; rows come back in trial order plus per-n means.
    Deterministic for a fixed seed.  Raises SizeError when the range top
    exceeds the exact-solver limit.
    """
    n_min, n_max = n_range
    if n_max > HELD_KARP_LIMIT:
        raise SizeError(f"n_range top {n_max} exceeds the exact-solver limit "
                        f"of {HELD_KARP_LIMIT}")
    if n_min < 1 or n_min > n_max:
        raise ValidationError(f"invalid n_range {n_range}")
    rng = np.random.default_rng(seed)
    rows: list[EvalRow] = []
    for trial in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        ref, weeds = random_instance(n, rng, field_dims)
        nn = plan_nearest_neighbor(ref, weeds)
        chr_plan = plan_christofides(ref, weeds)
        opt = plan_optimal_heldkarp(ref, weeds)
        rows.append(EvalRow(
            trial=trial, n=n,
            lambda_nn=nn.length, lambda_chr=chr_plan.length, lambda_opt=opt.length,
            phi_n=phi_score(nn, opt), phi_c=phi_score(chr_plan, opt),
        ))
    summary = []
    for n in sorted({r.n for r in rows}):
        group = [r for r in rows if r.n == n]
        summary.append(EvalSummary(
            n=n, trials=len(group),
            mean_phi_n=sum(r.phi_n for r in group) / len(group),
            mean_phi_c=sum(r.phi_c for r in group) / len(group),
        ))
    return rows, summary


def eval_rows_to_csv(rows: list[EvalRow]) -> str:
    lines = ["trial,n,lambda_nn,lambda_chr,lambda_opt,phi_n,phi_c"]
    for r in rows:
        lines.append(
            f"{r.trial},{r.n},{r.lambda_nn:.6f},{r.lambda_chr:.6f},"
            f"{r.lambda_opt:.6f},{r.phi_n:.6f},{r.phi_c:.6f}"
        )
    return "\n".join(lines) + "\n"


def eval_summary_to_csv(summary: list[EvalSummary]) -> str:
    lines = ["n,trials,mean_phi_n,mean_phi_c"]
    for s in summary:
        lines.append(f"{s.n},{s.trials},{s.mean_phi_n:.6f},{s.mean_phi_c:.6f}")
    return "\n".join(lines) + "\n"
