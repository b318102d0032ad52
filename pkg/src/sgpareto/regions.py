"""Direction-space partitions: arrangements, consistent partitions, refinement.

A region partition subdivides the unit-sum direction simplex into relatively
open simplices on which every tracked Minimizer state has a constant set of
radially minimal actions.  The subdividing hyperplanes come from pairwise
comparisons of the facets of the action-value sets, which linearize the
radial-ratio order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import simplexes
from .game import StochasticGame
from .geometry import Direction, DwcSet, ratio_comparison_hyperplane
from .simplexes import Face, Hyperplane, Point


@dataclass(frozen=True)
class OpenSimplex:
    """Relative interior of the convex hull of affinely independent directions."""

    vertices: Face

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    def barycenter(self) -> Point:
        return simplexes.barycenter(self.vertices)


@dataclass(frozen=True)
class SimplicialComplex:
    """An open-simplex subdivision given by its top simplices."""

    tops: tuple[Face, ...]

    def faces(self) -> list[Face]:
        return simplexes.faces_of(list(self.tops))

    def open_simplices(self) -> list[OpenSimplex]:
        return [OpenSimplex(f) for f in self.faces()]

    def locate(self, d: Point) -> Face | None:
        return simplexes.face_containing(list(self.tops), d)


@dataclass(frozen=True)
class RegionPartition:
    """Consistent partition of all directions, with per-region argmin metadata."""

    dim: int
    hyperplanes: tuple[Hyperplane, ...]
    complex: SimplicialComplex
    argmin: dict  # face -> {state: frozenset(action names)}

    def faces(self) -> list[Face]:
        return self.complex.faces()

    def locate(self, d) -> Face:
        point = d.coords if isinstance(d, Direction) else simplexes.normalize_direction(d)
        face = self.complex.locate(point)
        if face is None:
            raise ValueError(f"direction {d} not located in the partition")
        return face

    def argmin_at(self, face: Face, state: int) -> frozenset[str]:
        return self.argmin[face][state]


def comparison_hyperplanes(action_values: dict, minimizer_states) -> list[Hyperplane]:
    """Hyperplanes where two actions of a Minimizer state swap radial order.

    `action_values` maps (state, action) to the action's DwcSet value; for
    every state the facets of each pair of its actions are compared pairwise.
    Duplicates, zero normals, and normals that cannot separate interior
    directions are removed.
    """
    out: set[Hyperplane] = set()
    for s in sorted(minimizer_states):
        actions = sorted(a for (t, a) in action_values if t == s)
        for a1, a2 in combinations(actions, 2):
            for p in action_values[(s, a1)].pieces:
                for q in action_values[(s, a2)].pieces:
                    for f1 in p.facets():
                        for f2 in q.facets():
                            h = ratio_comparison_hyperplane(f1, f2)
                            if h is not None and not simplexes.is_boundary_normal(h):
                                out.add(h)
    return sorted(out)


def build_arrangement(hyperplanes, dim: int) -> SimplicialComplex:
    """Subdivision of the direction simplex refined along the given hyperplanes."""
    tops = simplexes.refine(simplexes.unit_simplex_tops(dim), list(hyperplanes))
    return SimplicialComplex(tuple(sorted(tops)))


def triangulate(cell) -> list[OpenSimplex]:
    """Fan triangulation of a convex cell (dimension <= 2) with all open faces.

    The fan is rooted at the lexicographically smallest vertex; the cell is
    given by its vertex directions.
    """
    verts = sorted({simplexes.normalize_direction(v) for v in cell})
    if len(verts) <= 3:
        tops = [tuple(verts)]
    else:
        ordered = _convex_cycle(verts)
        apex = min(ordered)
        i = ordered.index(apex)
        cyc = ordered[i:] + ordered[:i]
        tops = [tuple(sorted((apex, cyc[j], cyc[j + 1]))) for j in range(1, len(cyc) - 1)]
    return [OpenSimplex(f) for f in simplexes.faces_of(tops)]


def _convex_cycle(verts: list[Point]) -> list[Point]:
    """Vertices of a planar convex cell in cyclic order (exact gift wrapping)."""
    if len(verts) <= 2:
        return list(verts)
    base = verts[0]
    basis = _plane_basis(verts)
    coords = {v: tuple(_project(v, base, basis)) for v in verts}
    start = min(verts, key=lambda v: coords[v])
    cycle = [start]
    current = start
    while True:
        candidates = [v for v in verts if v != current]
        nxt = candidates[0]
        for v in candidates[1:]:
            turn = _cross2(coords[current], coords[nxt], coords[v])
            if turn < 0 or (turn == 0 and _closer(coords[current], coords[v], coords[nxt])):
                nxt = v
        if nxt == start:
            break
        cycle.append(nxt)
        current = nxt
        if len(cycle) > len(verts):
            raise ValueError("cell vertices are not in convex position")
    return cycle


def _plane_basis(verts: list[Point]):
    base = verts[0]
    dirs = [tuple(v[i] - base[i] for i in range(len(base))) for v in verts[1:]]
    basis = []
    for d in dirs:
        rows = [list(b) for b in basis] + [list(d)]
        from .geometry import _rank  # exact rank over rationals

        if _rank(rows) > len(basis):
            basis.append(d)
        if len(basis) == 2:
            break
    if len(basis) < 2:
        basis.append(tuple(Fraction(0) for _ in base))
    return basis


def _project(v: Point, base: Point, basis) -> list[Fraction]:
    d = tuple(x - y for x, y in zip(v, base))
    return [sum(a * b for a, b in zip(d, e)) for e in basis]


def _cross2(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _closer(o, a, b) -> bool:
    da = sum((x - y) ** 2 for x, y in zip(a, o))
    db = sum((x - y) ** 2 for x, y in zip(b, o))
    return da < db


def interior_sample(region: OpenSimplex | Face) -> Direction:
    """The barycenter, always in the relative interior."""
    verts = region.vertices if isinstance(region, OpenSimplex) else region
    return Direction(simplexes.barycenter(verts))


def _argmin_actions(action_values: dict, s: int, actions, d: Point) -> frozenset[str]:
    values = {a: action_values[(s, a)].radial(d) for a in actions}
    best = min(values.values())
    return frozenset(a for a, v in values.items() if v == best)


def _tie_is_active_somewhere(h, f1, facets_a, f2, facets_b, dim) -> bool:
    """Exact feasibility of an active ratio tie on the hyperplane.

    The argmin order of two actions can only flip where their radially active
    facets tie, so a comparison hyperplane matters only if some direction on
    it has f1 minimal among the first action's facets and f2 among the
    second's.  All conditions are linear; a vertex of the feasible region is
    searched by tight-subset enumeration.
    """
    rows_eq = [[Fraction(1)] * dim, [Fraction(c) for c in h]]
    rhs_eq = [Fraction(1), Fraction(0)]
    (a1, b1), (a2, b2) = f1, f2
    constraints = []  # linear forms required to be >= 0 on the witness
    for i in range(dim):
        axis = [Fraction(0)] * dim
        axis[i] = Fraction(1)
        constraints.append(axis)
    for normal, offset in facets_a:
        if (normal, offset) != f1:
            constraints.append([offset * x1 - b1 * xg for x1, xg in zip(a1, normal)])
    for normal, offset in facets_b:
        if (normal, offset) != f2:
            constraints.append([offset * x2 - b2 * xg for x2, xg in zip(a2, normal)])
    free = dim - 2
    if free < 0:
        return False
    for tight in combinations(range(len(constraints)), free):
        rows = rows_eq + [constraints[i] for i in tight]
        sol = simplexes.solve_linear(rows, rhs_eq + [Fraction(0)] * free)
        if sol is None:
            continue
        if all(sum(c * x for c, x in zip(row, sol)) >= 0 for row in constraints):
            return True
    return False


def _relevant_hyperplanes(action_values: dict, minimizer_states, dim: int):
    """Comparison hyperplanes that can realize an active tie somewhere."""
    out = set()
    for s in sorted(minimizer_states):
        actions = sorted(a for (t, a) in action_values if t == s)
        for a1, a2 in combinations(actions, 2):
            for p in action_values[(s, a1)].pieces:
                for q in action_values[(s, a2)].pieces:
                    for f1 in p.facets():
                        for f2 in q.facets():
                            h = ratio_comparison_hyperplane(f1, f2)
                            if h is None or simplexes.is_boundary_normal(h):
                                continue
                            if h in out:
                                continue
                            if _tie_is_active_somewhere(
                                h, f1, p.facets(), f2, q.facets(), dim
                            ):
                                out.add(h)
    return sorted(out)


def get_regions(
    game: StochasticGame,
    member_states,
    action_values: dict,
    dim: int,
) -> RegionPartition:
    """Consistent partition for the Minimizer states of a state set.

    `action_values` maps (state, action) to the current lower-bound value of
    playing that action, for every Minimizer state in the set.  Comparison
    hyperplanes whose facets never tie while radially active cannot flip any
    argmin and are left out of the arrangement.
    """
    minimizers = sorted(s for s in member_states if not game.is_maximizer(s))
    pool = _relevant_hyperplanes(action_values, minimizers, dim)
    complex_ = build_arrangement(pool, dim)
    actions = {s: sorted(a for (t, a) in action_values if t == s) for s in minimizers}
    argmin = {}
    for face in complex_.faces():
        bc = simplexes.barycenter(face)
        argmin[face] = {
            s: _argmin_actions(action_values, s, actions[s], bc) for s in minimizers
        }
    return RegionPartition(dim, tuple(pool), complex_, argmin)


def common_refinement(p1: RegionPartition, p2: RegionPartition) -> RegionPartition:
    """Pooled-hyperplane rebuild; a consistent refinement of both partitions."""
    if p1.dim != p2.dim:
        raise ValueError("dimension mismatch in common refinement")
    pool = sorted(set(p1.hyperplanes) | set(p2.hyperplanes))
    complex_ = build_arrangement(pool, p1.dim)
    argmin = {}
    for face in complex_.faces():
        merged = {}
        for source in (p1, p2):
            outer = source.complex.locate(simplexes.barycenter(face))
            if outer is not None:
                merged.update(source.argmin.get(outer, {}))
        argmin[face] = merged
    return RegionPartition(p1.dim, tuple(pool), complex_, argmin)


def consistency_check(
    partition: RegionPartition,
    game: StochasticGame,
    member_states,
    action_values: dict,
    seed: int = 0,
) -> bool:
    """Sample extra interior points per region and re-derive the argmin sets."""
    rng = random.Random(seed)
    minimizers = [s for s in member_states if not game.is_maximizer(s)]
    actions = {s: sorted(a for (t, a) in action_values if t == s) for s in minimizers}
    for face in partition.faces():
        recorded = partition.argmin[face]
        for point in _interior_points(face, rng):
            for s in minimizers:
                fresh = _argmin_actions(action_values, s, actions[s], point)
                if fresh != recorded[s]:
                    return False
    return True


def _interior_points(face: Face, rng: random.Random):
    yield simplexes.barycenter(face)
    if len(face) > 1:
        weights = [Fraction(rng.randint(1, 9)) for _ in face]
        total = sum(weights)
        yield tuple(
            sum(w * v[i] for w, v in zip(weights, face)) / total for i in range(len(face[0]))
        )
