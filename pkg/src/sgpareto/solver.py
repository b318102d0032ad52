"""Bounded value iteration for multi-target reachability on stochastic games.

The solver evolves per-state lower and upper downward-closed sets with
synchronous Bellman sweeps; between sweeps the upper bounds of candidate
simple end components are deflated, region by region, to the upper bound of
their best Maximizer exit.  The gap between the bounds at the initial state
certifies the precision of the current approximation at any stopping time.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from . import geometry, regions, simplexes
from .game import Objective, StochasticGame, exits, exits_max, indicator, restrict
from .geometry import DwcSet
from .graph import MecDecomposition, mec_decomposition
from .simplexes import Face

Bounds = dict  # state index -> DwcSet


@dataclass(frozen=True)
class BoundPair:
    """Per-state lower and upper value sets; lower(s) is always inside upper(s)."""

    lower: Bounds
    upper: Bounds


@dataclass
class SolverConfig:
    epsilon: Fraction
    max_iterations: int | None = None
    deflate_enabled: bool = True
    progress_sink: object = None  # callable taking an IterationStats
    stall_limit: int = 20

    def __post_init__(self):
        self.epsilon = Fraction(self.epsilon)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    gap: Fraction
    piece_count: int
    region_counts: tuple[int, ...]
    wall_ms: float


@dataclass(frozen=True)
class RegionalSec:
    """Candidate simple end component for one region of a consistent partition."""

    states: frozenset[int]
    region: Face
    restricted: dict  # Minimizer state -> frozenset of retained actions


@dataclass
class SolveResult:
    bounds: BoundPair
    stats: list[IterationStats]
    converged: bool
    gap: Fraction

    @property
    def iterations(self) -> int:
        return len(self.stats)


class SolverStallError(RuntimeError):
    """Gap bound unchanged over the stall window; carries dump diagnostics."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


# ---------------------------------------------------------------------------
# Bellman operator


def bellman_sa(game: StochasticGame, objective: Objective, values: Bounds, s: int, a: str) -> DwcSet:
    """Action value: indicator of s plus the weighted successor sum, unit-clipped."""
    n = objective.dimension
    acc = DwcSet.from_points([indicator(objective, s)], n)
    for t, p in game.successors(s, a):
        acc = geometry.minkowski(acc, geometry.scale(p, values[t]))
    return acc


def bellman_state(game: StochasticGame, objective: Objective, values: Bounds, s: int,
                  cache: dict | None = None) -> DwcSet:
    action_values = []
    for a in game.available[s]:
        if cache is None:
            action_values.append(bellman_sa(game, objective, values, s, a))
        else:
            key = (s, a, tuple(values[t] for t, _ in game.successors(s, a)))
            hit = cache.get(key)
            if hit is None:
                hit = bellman_sa(game, objective, values, s, a)
                cache[key] = hit
            action_values.append(hit)
    if game.is_maximizer(s):
        piece = geometry.convex_union(action_values)
        return DwcSet(objective.dimension, (piece,))
    return geometry.intersect_many(action_values)


def bellman(game: StochasticGame, objective: Objective, values: Bounds,
            cache: dict | None = None) -> Bounds:
    """One synchronous sweep against the previous snapshot."""
    return {s: bellman_state(game, objective, values, s, cache) for s in game.states()}


# ---------------------------------------------------------------------------
# Best exits and regional SEC detection


def _indicator_sum_set(objective: Objective, member_states) -> DwcSet:
    total = [Fraction(0)] * objective.dimension
    for s in member_states:
        for i, c in enumerate(indicator(objective, s)):
            total[i] += c
    clipped = tuple(min(Fraction(1), c) for c in total)
    return DwcSet.from_points([clipped], objective.dimension)


def best_exit(game: StochasticGame, objective: Objective, values: Bounds, member_states) -> DwcSet:
    """Achievable set when the whole member set cooperates: internal targets
    plus any randomization over Maximizer-owned exits, unit-clipped."""
    ind = _indicator_sum_set(objective, member_states)
    mx = sorted(exits_max(game, member_states), key=lambda sa: (sa.state, sa.action))
    if not mx:
        return ind
    hull = geometry.convex_union(
        [bellman_sa(game, objective, values, sa.state, sa.action) for sa in mx]
    )
    return geometry.minkowski(ind, DwcSet(objective.dimension, (hull,)))


def _argmin_restriction(game: StochasticGame, action_values: dict, member_states, d) -> dict:
    """Per-state retained actions: Minimizer keeps only radially minimal ones."""
    out = {}
    for s in sorted(member_states):
        if game.is_maximizer(s):
            out[s] = tuple(game.available[s])
        else:
            vals = {a: action_values[(s, a)].radial(d) for a in game.available[s]}
            best = min(vals.values())
            out[s] = tuple(a for a in game.available[s] if vals[a] == best)
    return out


def find_secs(game: StochasticGame, action_values: dict, member_states, region: Face) -> list[RegionalSec]:
    """Candidate regional SECs: MECs after dropping non-optimal Minimizer actions.

    The region must come from a consistent partition; sampling two interior
    directions guards against an inconsistent one.
    """
    samples = list(regions._interior_points(region, _FixedRng()))
    restrictions = [_argmin_restriction(game, action_values, member_states, d) for d in samples]
    if any(r != restrictions[0] for r in restrictions[1:]):
        raise AssertionError("inconsistent partition: argmin differs between samples")
    chosen = restrictions[0]
    sub = restrict(game, member_states, chosen)
    decomp = mec_decomposition(sub)
    out = []
    for comp in decomp.components:
        out.append(
            RegionalSec(
                states=comp,
                region=region,
                restricted={s: frozenset(chosen[s]) for s in comp if not game.is_maximizer(s)},
            )
        )
    return sorted(out, key=lambda sec: sorted(sec.states))


class _FixedRng:
    """Deterministic stand-in for random.Random in interior sampling."""

    def __init__(self):
        self._seq = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7]
        self._i = 0

    def randint(self, lo, hi):
        v = self._seq[self._i % len(self._seq)]
        self._i += 1
        return lo + (v % (hi - lo + 1))


# ---------------------------------------------------------------------------
# Deflation


def _lower_action_values(game, objective, lower, member_states, cache):
    out = {}
    for s in sorted(member_states):
        if game.is_maximizer(s):
            continue
        for a in game.available[s]:
            key = (s, a, tuple(lower[t] for t, _ in game.successors(s, a)))
            hit = cache.get(key) if cache is not None else None
            if hit is None:
                hit = bellman_sa(game, objective, lower, s, a)
                if cache is not None:
                    cache[key] = hit
            out[(s, a)] = hit
    return out


def deflate_secs(
    game: StochasticGame,
    objective: Objective,
    lower: Bounds,
    upper: Bounds,
    *,
    deflate_ecs: bool = True,
    decomposition: MecDecomposition | None = None,
    lower_cache: dict | None = None,
    region_counts: list | None = None,
    partitions: dict | None = None,
) -> Bounds:
    """Updated upper bounds; states outside every MEC keep their value.

    End components without any exit are always capped at their internal
    indicator sum (they cannot achieve anything else).  The regional SEC
    treatment of components with exits is skipped when `deflate_ecs` is off.
    """
    n = objective.dimension
    decomp = decomposition if decomposition is not None else mec_decomposition(game)
    new_upper = dict(upper)
    for component in decomp.components:
        has_exits = bool(exits(game, component))
        if not has_exits and (len(component) == 1 or not deflate_ecs):
            # Nothing leaves the component: its states achieve at most the
            # internal indicator sum.  Sub-component analysis below refines
            # this further when regional deflation is on.
            cap = _indicator_sum_set(objective, component)
            for s in sorted(component):
                new_upper[s] = geometry.intersect(upper[s], cap)
            if region_counts is not None:
                region_counts.append(1)
            continue
        if not deflate_ecs:
            continue
        action_values = _lower_action_values(game, objective, lower, component, lower_cache)
        partition = regions.get_regions(game, component, action_values, n)
        if partitions is not None:
            partitions[component] = partition
        faces = partition.faces()
        if region_counts is not None:
            region_counts.append(len(faces))
        sec_cache: dict = {}
        face_cands: dict[Face, list[RegionalSec]] = {}
        for face in faces:
            signature = tuple(
                sorted(
                    (s, partition.argmin_at(face, s))
                    for s in component
                    if not game.is_maximizer(s)
                )
            )
            if signature not in sec_cache:
                sec_cache[signature] = find_secs(game, action_values, component, face)
            face_cands[face] = sec_cache[signature]
        # Star of every face: built top by top to stay linear in the complex.
        cover: dict[Face, set] = {face: set() for face in faces}
        from itertools import combinations as _combos

        for top in partition.complex.tops:
            subs = [
                sub
                for k in range(1, len(top) + 1)
                for sub in _combos(top, k)
            ]
            for outer in subs:
                outer_set = set(outer)
                for inner in subs:
                    if set(inner) <= outer_set:
                        cover[inner].add(outer)
        exit_cache: dict[frozenset[int], DwcSet] = {}

        def exit_set(cand: frozenset[int]) -> DwcSet:
            hit = exit_cache.get(cand)
            if hit is None:
                hit = best_exit(game, objective, upper, cand)
                exit_cache[cand] = hit
            return hit

        tops = list(partition.complex.tops)
        top_index = {top: i for i, top in enumerate(tops)}
        for s in sorted(component):
            face_ids = {
                face: tuple(
                    sorted(
                        {
                            sec.states
                            for outer in cover[face]
                            for sec in face_cands[outer]
                            if s in sec.states
                        },
                        key=sorted,
                    )
                )
                for face in faces
            }
            if not any(face_ids.values()):
                # No candidate touches this state anywhere: its bound is kept.
                new_upper[s] = geometry.canonicalize(upper[s])
                continue
            value_cache: dict[tuple, tuple] = {}

            def deflated_for(key):
                hit = value_cache.get(key)
                if hit is None:
                    parts = [upper[s]] + [exit_set(c) for c in key]
                    value = geometry.intersect_many(parts) if len(parts) > 1 else upper[s]
                    hit = (value, geometry._comparison_pool([value]))
                    value_cache[key] = hit
                return hit

            piece_pool = []
            # Top-dimensional faces are batched per candidate signature and
            # cut by the deflated value's own comparison hyperplanes once.
            by_sig: dict[tuple, list[Face]] = {}
            for top in tops:
                by_sig.setdefault(face_ids[top], []).append(top)
            for key, group in sorted(by_sig.items()):
                value, pool = deflated_for(key)
                refined = simplexes.refine(group, pool)
                piece_pool.extend(geometry.frontier_pieces(value, refined))
            # Lower-dimensional faces matter where the candidate signature
            # differs from the surrounding tops or where the value can jump
            # (faces on the boundary of the direction simplex).
            for face in faces:
                if face in top_index:
                    continue
                boundary = any(all(v[i] == 0 for v in face) for i in range(n))
                star_tops = [t for t in cover[face] if t in top_index]
                if not boundary and all(face_ids[t] == face_ids[face] for t in star_tops):
                    continue
                value, pool = deflated_for(face_ids[face])
                piece_pool.extend(
                    geometry.restrict_frontier(value, face, interior_only=True, pool=pool)
                )
            new_upper[s] = geometry.canonicalize(DwcSet(n, tuple(piece_pool)))
    return new_upper


# ---------------------------------------------------------------------------
# Main loop


def stopping_gap(upper_s0: DwcSet, lower_s0: DwcSet) -> tuple[Fraction, Face | None]:
    """Gap bound in the scale metric, with the region witnessing it."""
    faces = geometry._refined_faces([upper_s0, lower_s0])
    return geometry._gap_bound_over(upper_s0, lower_s0, faces)


def mo_bvi(game: StochasticGame, objective: Objective, config: SolverConfig) -> SolveResult:
    """Anytime bounded value iteration; stops at gap < epsilon or the cap."""
    n = objective.dimension
    geometry._check_dim(n)
    lower: Bounds = {s: DwcSet.zero(n) for s in game.states()}
    upper: Bounds = {s: DwcSet.unit(n) for s in game.states()}
    decomp = mec_decomposition(game)
    sweep_cache: dict = {}
    stats: list[IterationStats] = []
    reported = None
    stall = 0
    converged = False
    started = time.monotonic()
    iteration = 0
    while config.max_iterations is None or iteration < config.max_iterations:
        iteration += 1
        lower = bellman(game, objective, lower, sweep_cache)
        upper = bellman(game, objective, upper, sweep_cache)
        counts: list[int] = []
        upper = deflate_secs(
            game,
            objective,
            lower,
            upper,
            deflate_ecs=config.deflate_enabled,
            decomposition=decomp,
            lower_cache=sweep_cache,
            region_counts=counts,
        )
        bound, _ = stopping_gap(upper[game.initial], lower[game.initial])
        previous = reported
        reported = bound if reported is None else min(reported, bound)
        pieces = sum(v.piece_count() for v in lower.values()) + sum(
            v.piece_count() for v in upper.values()
        )
        entry = IterationStats(
            iteration=iteration,
            gap=reported,
            piece_count=pieces,
            region_counts=tuple(counts),
            wall_ms=(time.monotonic() - started) * 1000.0,
        )
        stats.append(entry)
        if config.progress_sink is not None:
            config.progress_sink(entry)
        if reported < config.epsilon:
            converged = True
            break
        # Fail loudly on uncapped runs instead of looping forever; capped runs
        # keep the anytime contract and report the partial bounds.  A stall is
        # either a bug or a game whose sup-direction gap cannot shrink because
        # an achievable set is degenerate along some axis.
        if config.deflate_enabled and config.max_iterations is None:
            stall = stall + 1 if previous is not None and reported == previous else 0
            if stall >= config.stall_limit:
                raise SolverStallError(
                    f"gap bound stalled at {reported} for {stall} iterations",
                    diagnostics=_stall_diagnostics(game, objective, lower, upper, decomp),
                )
    return SolveResult(
        bounds=BoundPair(lower=lower, upper=upper),
        stats=stats,
        converged=converged,
        gap=reported if reported is not None else Fraction(1),
    )


def _stall_diagnostics(game, objective, lower, upper, decomp) -> dict:
    partitions: dict = {}
    deflate_secs(
        game,
        objective,
        lower,
        upper,
        decomposition=decomp,
        partitions=partitions,
    )
    return {
        "lower": {game.state_names[s]: geometry.serialize_set(v) for s, v in lower.items()},
        "upper": {game.state_names[s]: geometry.serialize_set(v) for s, v in upper.items()},
        "regions": {
            ",".join(sorted(game.state_names[s] for s in comp)): [
                [[str(c) for c in v] for v in face] for face in part.faces()
            ]
            for comp, part in partitions.items()
        },
    }


def final_partitions(game, objective, lower, decomposition=None) -> dict:
    """Region partitions of every MEC under the final lower bounds."""
    decomp = decomposition if decomposition is not None else mec_decomposition(game)
    out = {}
    for component in decomp.components:
        action_values = _lower_action_values(game, objective, lower, component, None)
        out[component] = regions.get_regions(game, component, action_values, objective.dimension)
    return out


# ---------------------------------------------------------------------------
# Single-dimension specialization


def single_dim_solve(
    game: StochasticGame,
    target_set,
    epsilon,
    *,
    max_iterations: int | None = None,
    deflate_enabled: bool = True,
) -> dict:
    """Scalar bounded value iteration; same semantics as mo_bvi at n = 1.

    Returns per-state exact rational intervals (lower, upper).
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    targets = frozenset(target_set)
    lo = {s: Fraction(0) for s in game.states()}
    hi = {s: Fraction(1) for s in game.states()}
    decomp = mec_decomposition(game)

    def action_value(values, s, a) -> Fraction:
        base = Fraction(1) if s in targets else Fraction(0)
        total = base + sum(p * values[t] for t, p in game.successors(s, a))
        return min(Fraction(1), total)

    def sweep(values):
        out = {}
        for s in game.states():
            vals = [action_value(values, s, a) for a in game.available[s]]
            out[s] = max(vals) if game.is_maximizer(s) else min(vals)
        return out

    iteration = 0
    while max_iterations is None or iteration < max_iterations:
        iteration += 1
        lo = sweep(lo)
        hi = sweep(hi)
        for component in decomp.components:
            has_exits = bool(exits(game, component))
            if not has_exits and (len(component) == 1 or not deflate_enabled):
                cap = Fraction(1) if component & targets else Fraction(0)
                for s in component:
                    hi[s] = min(hi[s], cap)
                continue
            if not deflate_enabled:
                continue
            chosen = {}
            for s in sorted(component):
                if game.is_maximizer(s):
                    chosen[s] = tuple(game.available[s])
                else:
                    vals = {a: action_value(lo, s, a) for a in game.available[s]}
                    best = min(vals.values())
                    chosen[s] = tuple(a for a in game.available[s] if vals[a] == best)
            sub = restrict(game, component, chosen)
            for cand in mec_decomposition(sub).components:
                ind = Fraction(1) if cand & targets else Fraction(0)
                mx = exits_max(game, cand)
                exit_val = max(
                    (action_value(hi, sa.state, sa.action) for sa in mx),
                    default=Fraction(0),
                )
                bound = min(Fraction(1), ind + exit_val)
                for s in cand:
                    hi[s] = min(hi[s], bound)
        if hi[game.initial] - lo[game.initial] < eps:
            break
    return {s: (lo[s], hi[s]) for s in game.states()}
