"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines interleaved with the test progress.
"""

import random
import time
from fractions import Fraction

import pytest

from conftest import random_direction
from sgpareto import geometry as G, oracle, regions, solver
from sgpareto.geometry import Direction, DwcSet, dwc_hull, evaluate, is_subset
from sgpareto.graph import mec_decomposition
from sgpareto.simplexes import solve_linear
from sgpareto.solver import SolverConfig, find_secs, mo_bvi, single_dim_solve

F = Fraction
EPS = F(1, 1000)


def report(criterion: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    print(f"[acceptance {criterion}] {status} {detail}")
    assert passed, f"criterion {criterion}: {detail}"


def dilate(x: DwcSet, factor: Fraction) -> DwcSet:
    pts = [
        tuple(min(F(1), c * factor) for c in g)
        for piece in x.pieces
        for g in piece.generators
    ]
    return DwcSet.from_points(pts, x.dim)


def test_criterion_1_running_example_convergence():
    game, objective = oracle.fixture("ec-cycle")
    start = time.monotonic()
    res = mo_bvi(game, objective, SolverConfig(epsilon=EPS, max_iterations=100))
    elapsed = time.monotonic() - start
    p = game.index_of("p")
    truth = DwcSet.from_points([(F(1, 2), F(1, 2))])
    ok = (
        res.converged
        and elapsed < 60
        and is_subset(res.bounds.lower[p], dilate(truth, 1 + EPS))
        and is_subset(truth, res.bounds.upper[p])
        and is_subset(res.bounds.upper[p], dilate(truth, 1 + EPS))
    )
    report("1", ok, f"converged in {res.iterations} iterations, {elapsed:.1f}s, gap {res.gap}")


def test_criterion_2_deflation_necessity():
    game, objective = oracle.fixture("ec-cycle")
    res = mo_bvi(
        game,
        objective,
        SolverConfig(epsilon=EPS, max_iterations=500, deflate_enabled=False),
    )
    ok = not res.converged and res.gap >= F(2, 5)
    report("2", ok, f"gap stalled at {res.gap} (~{float(res.gap):.3f}) >= 2/5")


def test_criterion_3_regional_sec_classification():
    game, objective = oracle.fixture("ec-cycle")
    res = mo_bvi(game, objective, SolverConfig(epsilon=EPS, max_iterations=100))
    core = frozenset(game.index_of(x) for x in ("p", "q", "r"))
    values = solver._lower_action_values(game, objective, res.bounds.lower, core, None)
    part = regions.get_regions(game, core, values, 2)

    def classify(direction):
        face = part.locate(Direction(direction))
        return [
            frozenset(game.state_names[s] for s in sec.states)
            for sec in find_secs(game, values, core, face)
        ]

    ok = (
        classify((3, 1)) == [frozenset({"p", "q"})]
        and classify((1, 3)) == [frozenset({"p", "r"})]
        and classify((1, 1)) == [frozenset({"p", "q", "r"})]
        and len(part.locate(Direction((1, 1)))) == 1
    )
    report("3", ok, "x side {p,q}, y side {p,r}, diagonal point {p,q,r}")


PROP1_PARTITIONS = []


def test_criterion_4_prop1_monotonicity_suite():
    violations = 0
    rng = random.Random(20240)
    for case in range(100):
        n_states = rng.randint(4, 8)
        n_actions = rng.randint(1, 3)
        n_targets = rng.randint(1, 3)
        game, objective = oracle.random_game(
            n_states=n_states,
            n_actions=n_actions,
            n_targets=n_targets,
            branching=rng.randint(1, 3),
            seed=1000 + case,
        )
        n = objective.dimension
        lower = {s: DwcSet.zero(n) for s in game.states()}
        upper = {s: DwcSet.unit(n) for s in game.states()}
        decomp = mec_decomposition(game)
        cache = {}
        iters = 6 if n >= 3 else 8
        for _ in range(iters):
            new_lower = solver.bellman(game, objective, lower, cache)
            new_upper = solver.bellman(game, objective, upper, cache)
            partitions = {}
            new_upper = solver.deflate_secs(
                game,
                objective,
                new_lower,
                new_upper,
                decomposition=decomp,
                lower_cache=cache,
                partitions=partitions,
            )
            if case % 10 == 0:
                for comp, part in partitions.items():
                    PROP1_PARTITIONS.append((game, comp, part))
            for s in game.states():
                if not (
                    is_subset(lower[s], new_lower[s])
                    and is_subset(new_lower[s], new_upper[s])
                    and is_subset(new_upper[s], upper[s])
                ):
                    violations += 1
            lower, upper = new_lower, new_upper
    report("4", violations == 0, f"100 games, {violations} monotonicity violations")


def test_criterion_5_single_dim_oracle_equivalence():
    start = time.monotonic()
    violations = 0
    for case in range(100):
        game, objective = oracle.random_game(
            n_states=6, n_actions=2, n_targets=1, seed=5000 + case
        )
        exact = oracle.solve_single_dim_exact(game, objective.targets[0])
        intervals = single_dim_solve(
            game, objective.targets[0], F(1, 10**6), max_iterations=20000
        )
        for s in game.states():
            lo, hi = intervals[s]
            if not (lo <= exact[s] <= hi):
                violations += 1
    elapsed = time.monotonic() - start
    ok = violations == 0 and elapsed < 600
    report("5", ok, f"100 games, {violations} violations, {elapsed:.1f}s")


STOPPING_PARTITIONS = []


def test_criterion_6_stopping_game_equivalence():
    mismatches = 0
    for case in range(50):
        n_targets = 2 + case % 2
        game, objective = oracle.random_game(
            n_states=5,
            n_actions=2,
            n_targets=n_targets,
            stopping=True,
            seed=7000 + case,
        )
        n = objective.dimension
        lo1 = {s: DwcSet.zero(n) for s in game.states()}
        up1 = {s: DwcSet.unit(n) for s in game.states()}
        lo2, up2 = dict(lo1), dict(up1)
        decomp = mec_decomposition(game)
        cache = {}
        for _ in range(5):
            lo1 = solver.bellman(game, objective, lo1, cache)
            up1 = solver.bellman(game, objective, up1, cache)
            up1 = solver.deflate_secs(
                game, objective, lo1, up1, deflate_ecs=True, decomposition=decomp
            )
            lo2 = solver.bellman(game, objective, lo2, cache)
            up2 = solver.bellman(game, objective, up2, cache)
            up2 = solver.deflate_secs(
                game, objective, lo2, up2, deflate_ecs=False, decomposition=decomp
            )
            for s in game.states():
                if G.canonicalize(up1[s]) != G.canonicalize(up2[s]) or lo1[s] != lo2[s]:
                    mismatches += 1
    report("6", mismatches == 0, f"50 stopping games, {mismatches} piecewise mismatches")


def _locate_all_faces(tops, faces, d):
    """All open faces whose relative interior contains d, by exhaustive check."""
    hits = set()
    n = len(d)
    for top in tops:
        rows = [[top[j][i] for j in range(len(top))] for i in range(n)]
        coeffs = solve_linear(rows, list(d))
        if coeffs is None or any(c < 0 for c in coeffs):
            continue
        face = tuple(sorted(p for p, c in zip(top, coeffs) if c > 0))
        hits.add(face)
    return [f for f in hits if f in set(faces)]


def test_criterion_7_region_partition_properties():
    # Distinct partitions from the fixture runs plus the sampled random-game
    # partitions recorded by the earlier suites.
    samples = []
    game, objective = oracle.fixture("ec-cycle")
    res = mo_bvi(game, objective, SolverConfig(epsilon=EPS, max_iterations=100))
    core = frozenset(game.index_of(x) for x in ("p", "q", "r"))
    values = solver._lower_action_values(game, objective, res.bounds.lower, core, None)
    samples.append((game, core, regions.get_regions(game, core, values, 2), values))

    game3, objective3 = oracle.fixture("three-target-wedges")
    res3 = mo_bvi(game3, objective3, SolverConfig(epsilon=EPS, max_iterations=20))
    core3 = next(c for c in mec_decomposition(game3).components if len(c) == 2)
    values3 = solver._lower_action_values(game3, objective3, res3.bounds.lower, core3, None)
    samples.append((game3, core3, regions.get_regions(game3, core3, values3, 3), values3))

    seen = set()
    extra = []
    for g, comp, part in PROP1_PARTITIONS:
        key = (part.hyperplanes, part.dim)
        if key not in seen:
            seen.add(key)
            extra.append((g, comp, part, None))
    samples.extend(extra[:8])

    rng = random.Random(99)
    bad_cover = 0
    bad_consistency = 0
    for game_i, comp, part, values_i in samples:
        tops = list(part.complex.tops)
        faces = part.faces()
        for _ in range(10**4 // len(samples) + 1):
            d = random_direction(rng, part.dim)
            hits = _locate_all_faces(tops, faces, d.coords)
            if len(hits) != 1:
                bad_cover += 1
        if values_i is not None:
            if not regions.consistency_check(part, game_i, comp, values_i, seed=1):
                bad_consistency += 1
    ok = bad_cover == 0 and bad_consistency == 0
    report(
        "7",
        ok,
        f"{len(samples)} partitions, {bad_cover} cover faults, "
        f"{bad_consistency} consistency faults",
    )


def test_criterion_8_geometry_spot_values():
    ev = evaluate(DwcSet.from_points([(F(1, 2), F(1, 2))]), Direction((1, 1)))
    alpha = DwcSet.from_points([(F(1, 2), F(9, 10))])
    beta = DwcSet.from_points([(F(9, 10), F(1, 2))])
    inter = G.intersect(alpha, beta)
    hull = G.convex_union([alpha, beta])
    ok = (
        ev.scale == 1
        and ev.length_squared() == F(1, 2)
        and inter == DwcSet.from_points([(F(1, 2), F(1, 2))])
        and ((F(1), F(1)), F(7, 5)) in set(hull.facets())
    )
    report("8", ok, "diagonal evaluation, box intersection, hull facet")


def test_criterion_9_fixpoint_stability():
    fixtures = ["ec-cycle", "ec-cycle-all-max", "three-target-wedges"]
    worst = F(0)
    for name in fixtures:
        game, objective = oracle.fixture(name)
        res = mo_bvi(game, objective, SolverConfig(epsilon=EPS, max_iterations=100))
        assert res.converged, name
        lower = solver.bellman(game, objective, res.bounds.lower)
        upper = solver.bellman(game, objective, res.bounds.upper)
        upper = solver.deflate_secs(game, objective, lower, upper)
        after, _ = solver.stopping_gap(upper[game.initial], lower[game.initial])
        change = abs(res.gap - after)
        worst = max(worst, change)
    ok = worst < EPS
    report("9", ok, f"max gap change after one extra loop: {worst}")
