import random
from fractions import Fraction

from conftest import box, random_direction
from sgpareto import oracle, regions, solver
from sgpareto.geometry import Direction, DwcSet
from sgpareto.graph import mec_decomposition
from sgpareto.regions import (
    OpenSimplex,
    build_arrangement,
    common_refinement,
    comparison_hyperplanes,
    consistency_check,
    get_regions,
    interior_sample,
    triangulate,
)
from sgpareto.solver import SolverConfig, mo_bvi

F = Fraction


def converged_cycle():
    game, objective = oracle.fixture("ec-cycle")
    res = mo_bvi(game, objective, SolverConfig(epsilon=F(1, 1000), max_iterations=20))
    core = frozenset(game.index_of(x) for x in ("p", "q", "r"))
    values = solver._lower_action_values(game, objective, res.bounds.lower, core, None)
    return game, objective, core, values


def test_comparison_hyperplanes_include_diagonal():
    game, objective, core, values = converged_cycle()
    p = game.index_of("p")
    pool = comparison_hyperplanes(values, [p])
    assert (1, -1) in pool  # where the two box frontiers swap order


def test_comparison_hyperplanes_single_action():
    game, objective = oracle.fixture("ec-cycle")
    q = game.index_of("q")
    values = {(q, "b"): DwcSet.unit(2)}
    assert comparison_hyperplanes(values, [q]) == []


def test_comparison_hyperplanes_identical_sets():
    game, objective = oracle.fixture("ec-cycle")
    p = game.index_of("p")
    values = {(p, "a"): box("1/2", "1/2"), (p, "c"): box("1/2", "1/2")}
    # Identical polytopes tie everywhere: every region is classified as a tie
    # even though their own facet comparisons may still split directions.
    part = get_regions(game, {p}, values, 2)
    for face in part.faces():
        assert part.argmin_at(face, p) == frozenset({"a", "c"})


def test_arrangement_trivial_two_dims():
    complex_ = build_arrangement([], 2)
    assert len(complex_.faces()) == 3  # two corner points and the open segment


def test_arrangement_single_split_two_dims():
    complex_ = build_arrangement([(1, -1)], 2)
    assert len(complex_.faces()) == 5


def test_triangulate_triangle():
    cell = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    faces = triangulate(cell)
    assert len(faces) == 7  # 3 vertices + 3 open edges + 1 open triangle


def test_triangulate_quadrilateral():
    cell = [(1, 0, 0), (0, 1, 0), (0, 0, 1), ("2/5", 0, "3/5")]
    faces = triangulate(cell)
    dims = sorted(len(f.vertices) for f in faces)
    assert dims.count(3) == 2  # two open triangles
    assert dims.count(2) == 5  # four boundary edges plus the shared diagonal
    assert dims.count(1) == 4


def test_triangulate_hexagon_fan():
    cell = [
        ("3/6", "2/6", "1/6"),
        ("2/6", "3/6", "1/6"),
        ("1/6", "3/6", "2/6"),
        ("1/6", "2/6", "3/6"),
        ("2/6", "1/6", "3/6"),
        ("3/6", "1/6", "2/6"),
    ]
    faces = triangulate(cell)
    assert sum(1 for f in faces if len(f.vertices) == 3) == 4  # fan of a 6-gon


def test_get_regions_cycle_classification():
    game, objective, core, values = converged_cycle()
    part = get_regions(game, core, values, 2)
    p = game.index_of("p")
    x_side = part.locate(Direction((3, 1)))
    y_side = part.locate(Direction((1, 3)))
    diag = part.locate(Direction((1, 1)))
    assert part.argmin_at(x_side, p) == frozenset({"a"})
    assert part.argmin_at(y_side, p) == frozenset({"c"})
    assert part.argmin_at(diag, p) == frozenset({"a", "c"})
    assert len(diag) == 1  # the tie is a point region


def test_get_regions_trivial_partition():
    game, objective = oracle.fixture("ec-cycle")
    q = game.index_of("q")
    values = {(q, "b"): DwcSet.unit(2), (q, "f"): DwcSet.unit(2)}
    part = get_regions(game, {q}, values, 2)
    # q is a Maximizer state, so no comparisons arise at all.
    assert part.hyperplanes == ()
    assert len(part.faces()) == 3


def test_get_regions_two_minimizers_common_refinement():
    doc = {
        "states": [
            {"id": "m1", "owner": "min"},
            {"id": "m2", "owner": "min"},
        ],
        "initial": "m1",
        "actions": [
            {"state": "m1", "action": "u", "dist": [{"to": "m2", "p": "1"}]},
            {"state": "m1", "action": "v", "dist": [{"to": "m2", "p": "1"}]},
            {"state": "m2", "action": "u", "dist": [{"to": "m1", "p": "1"}]},
            {"state": "m2", "action": "v", "dist": [{"to": "m1", "p": "1"}]},
        ],
        "targets": [["m1"], ["m2"]],
    }
    from sgpareto.game import parse_game

    game, _ = parse_game(doc)
    m1, m2 = game.index_of("m1"), game.index_of("m2")
    values = {
        (m1, "u"): box("1/2", 1),
        (m1, "v"): box(1, "1/2"),
        (m2, "u"): box("1/3", 1),
        (m2, "v"): box(1, "2/3"),
    }
    part = get_regions(game, {m1, m2}, values, 2)
    split_a = part.locate(Direction((1, 1)))  # x <= 1/2 vs y <= 1/2 tie
    split_b = part.locate(Direction((1, 2)))  # x <= 1/3 vs y <= 2/3 tie
    assert len(split_a) == 1 and len(split_b) == 1  # both boundaries are points
    assert split_a != split_b


def test_common_refinement_identities():
    game, objective, core, values = converged_cycle()
    part = get_regions(game, core, values, 2)
    trivial = build_arrangement([], 2)
    from sgpareto.regions import RegionPartition

    trivial_part = RegionPartition(2, (), trivial, {f: {} for f in trivial.faces()})
    assert common_refinement(part, trivial_part).complex == part.complex
    assert common_refinement(part, part).complex == part.complex


def test_common_refinement_pools_splits():
    a = build_arrangement([(1, -1)], 2)
    b = build_arrangement([(1, -2)], 2)
    from sgpareto.regions import RegionPartition

    pa = RegionPartition(2, ((1, -1),), a, {f: {} for f in a.faces()})
    pb = RegionPartition(2, ((1, -2),), b, {f: {} for f in b.faces()})
    merged = common_refinement(pa, pb)
    assert len(merged.faces()) == 7  # two interior split points


def test_interior_sample():
    seg = OpenSimplex(((F(1), F(0)), (F(0), F(1))))
    assert interior_sample(seg).coords == (F(1, 2), F(1, 2))
    point = OpenSimplex(((F(0), F(1)),))
    assert interior_sample(point).coords == (F(0), F(1))
    tri = OpenSimplex(((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(1))))
    assert interior_sample(tri).coords == (F(1, 3), F(1, 3), F(1, 3))


def test_consistency_check_passes_and_detects_corruption():
    game, objective, core, values = converged_cycle()
    part = get_regions(game, core, values, 2)
    assert consistency_check(part, game, core, values, seed=5)
    p = game.index_of("p")
    corrupted = dict(part.argmin)
    x_side = part.locate(Direction((5, 1)))
    corrupted[x_side] = {p: frozenset({"e"})}
    from sgpareto.regions import RegionPartition

    bad = RegionPartition(part.dim, part.hyperplanes, part.complex, corrupted)
    assert not consistency_check(bad, game, core, values, seed=5)


def test_disjoint_cover_by_point_location():
    game, objective, core, values = converged_cycle()
    part = get_regions(game, core, values, 2)
    rng = random.Random(17)
    for _ in range(400):
        d = random_direction(rng, 2)
        face = part.locate(d)
        hits = [
            f
            for f in part.faces()
            if f == face
        ]
        assert len(hits) == 1


def test_wedge_partition_isolates_axis_vertex():
    game, objective = oracle.fixture("three-target-wedges")
    res = mo_bvi(game, objective, SolverConfig(epsilon=F(1, 1000), max_iterations=20))
    core = next(c for c in mec_decomposition(game).components if len(c) == 2)
    values = solver._lower_action_values(game, objective, res.bounds.lower, core, None)
    part = get_regions(game, core, values, 3)
    s = game.index_of("s")
    vertex = part.locate(Direction((0, 1, 0)))
    assert len(vertex) == 1
    vertex_argmin = part.argmin_at(vertex, s)
    assert "a3" not in vertex_argmin  # the line action is not optimal only here
    for face in part.faces():
        if face != vertex and vertex[0] in face:
            assert part.argmin_at(face, s) != vertex_argmin
    # The frontier crossing of the two wedges projects to its own point region.
    crossing = part.locate(Direction((1, 0, 1)))
    assert len(crossing) == 1
