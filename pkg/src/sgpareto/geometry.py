"""Exact-rational geometry of downward-closed sets in the unit box.

A value is a `DwcSet`: a finite union of convex downward-closed pieces, each
piece the downward closure of the convex hull of its generator points.  The
set is faithfully described by its radial function over directions (the scale
factor lambda(d) = max {t : t*d in X}), which is what the piecewise algebra
below manipulates.  All coordinates are `fractions.Fraction`; nothing here
touches floating point.

Dual conversion (generators <-> facets) is supported up to dimension 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import simplexes
from .simplexes import Face, Point, ZERO, ONE, primitive_normal, solve_linear

MAX_DUAL_DIM = 4

Vec = tuple[Fraction, ...]
Facet = tuple[Vec, Fraction]  # normal (componentwise >= 0), offset: a.x <= b


def vec(*components) -> Vec:
    return tuple(Fraction(c) for c in components)


class DimensionError(ValueError):
    pass


def _check_dim(n: int) -> None:
    if n > MAX_DUAL_DIM:
        raise DimensionError(f"dimension {n} exceeds supported limit {MAX_DUAL_DIM}")


@dataclass(frozen=True)
class Direction:
    """A ray from the origin, stored by its unit-sum canonical representative."""

    coords: Point

    def __init__(self, coords):
        object.__setattr__(self, "coords", simplexes.normalize_direction(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def norm_squared(self) -> Fraction:
        return sum(c * c for c in self.coords)


@dataclass(frozen=True)
class Evaluation:
    """Radial evaluation: scale factor plus the squared norm of the canonical direction.

    The Euclidean distance from the origin to the frontier point is
    scale * sqrt(dir_norm_squared); both factors are kept rational.
    """

    scale: Fraction
    dir_norm_squared: Fraction

    def length_squared(self) -> Fraction:
        return self.scale * self.scale * self.dir_norm_squared


# ---------------------------------------------------------------------------
# Convex downward-closed pieces


class ConvexDwcPiece:
    """dwc(conv(generators)) within the nonnegative orthant.

    Canonical form: generators are exactly the Pareto-maximal vertices of the
    polytope, sorted.  Facet lists are derived lazily and memoized; every
    facet normal is componentwise nonnegative (the x >= 0 halfspaces are
    implicit).
    """

    __slots__ = ("dim", "generators", "_hash", "_facets")

    def __init__(self, dim: int, generators: tuple[Vec, ...]):
        self.dim = dim
        self.generators = generators
        self._hash = None
        self._facets = None

    def __eq__(self, other):
        return (
            isinstance(other, ConvexDwcPiece)
            and self.dim == other.dim
            and self.generators == other.generators
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.generators))
        return self._hash

    def __repr__(self):
        pts = ", ".join("(" + ", ".join(str(c) for c in g) + ")" for g in self.generators)
        return f"ConvexDwcPiece[{pts}]"

    def facets(self) -> tuple[Facet, ...]:
        if self._facets is None:
            self._facets = _facets_memo(self.dim, self.generators)
        return self._facets

    def is_zero(self) -> bool:
        return all(c == 0 for g in self.generators for c in g)

    def contains(self, point: Vec) -> bool:
        if any(c < 0 for c in point):
            return False
        return all(_dot(a, point) <= b for a, b in self.facets())

    def radial(self, d: Point) -> Fraction:
        """Scale factor along the canonical direction d (max t with t*d inside)."""
        best = None
        for a, b in self.facets():
            ad = _dot(a, d)
            if ad > 0:
                r = b / ad
                if best is None or r < best:
                    best = r
        if best is None:
            raise RuntimeError("unbounded piece; facet list incomplete")
        return best

    def active_facet(self, d: Point) -> Facet:
        """The facet attaining the radial minimum at d (ties broken canonically)."""
        best: Facet | None = None
        best_r = None
        for a, b in sorted(self.facets()):
            ad = _dot(a, d)
            if ad > 0:
                r = b / ad
                if best_r is None or r < best_r:
                    best, best_r = (a, b), r
        assert best is not None
        return best


def _dot(a, b) -> Fraction:
    return sum(x * y for x, y in zip(a, b))


_FACET_CACHE: dict[tuple[int, tuple[Vec, ...]], tuple[Facet, ...]] = {}


def _facets_memo(dim: int, generators: tuple[Vec, ...]) -> tuple[Facet, ...]:
    key = (dim, generators)
    cached = _FACET_CACHE.get(key)
    if cached is None:
        cached = tuple(_enumerate_facets(dim, generators))
        _FACET_CACHE[key] = cached
    return cached


def _normalize_facet(a, b) -> Facet:
    prim = primitive_normal(a)
    assert prim is not None
    scale = None
    for raw, p in zip(a, prim):
        if p != 0:
            scale = Fraction(raw) / p
            break
    return tuple(Fraction(p) for p in prim), Fraction(b) / scale


def _affinely_independent(points: list[Vec]) -> bool:
    base = points[0]
    rows = [[p[i] - base[i] for i in range(len(base))] for p in points[1:]]
    return _rank(rows) == len(points) - 1


def _rank(rows: list[list[Fraction]]) -> int:
    a = [list(r) for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][c]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _hyperplane_through(points: list[Vec]) -> tuple[Vec, Fraction] | None:
    """Normal and offset of the hyperplane through k affinely independent points in R^k."""
    k = len(points)
    base = points[0]
    rows = [[p[i] - base[i] for i in range(k)] for p in points[1:]]
    # Nullspace of the (k-1) x k difference matrix via cofactor expansion.
    normal = []
    for j in range(k):
        minor = [[row[i] for i in range(k) if i != j] for row in rows]
        sign = 1 if j % 2 == 0 else -1
        normal.append(sign * _det(minor))
    if all(c == 0 for c in normal):
        return None
    return tuple(normal), _dot(normal, base)


def _det(m: list[list[Fraction]]) -> Fraction:
    size = len(m)
    if size == 0:
        return ONE
    if size == 1:
        return m[0][0]
    if size == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    a = [list(r) for r in m]
    det = ONE
    for c in range(size):
        piv = next((i for i in range(c, size) if a[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, size):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def _enumerate_facets(dim: int, generators: tuple[Vec, ...]) -> list[Facet]:
    """Halfspace description of dwc(conv(generators)), axis caps included.

    Candidate facets are enumerated by support: for every coordinate subset J
    the strictly-positive-normal supporting hyperplanes of the projection onto
    J are collected, then non-facets are pruned by the dimension of their
    tight vertex set.
    """
    _check_dim(dim)
    candidates: set[Facet] = set()
    for size in range(1, dim + 1):
        for J in combinations(range(dim), size):
            proj = sorted({tuple(g[j] for j in J) for g in generators})
            if size == 1:
                top = max(p[0] for p in proj)
                normal = tuple(ONE if i == J[0] else ZERO for i in range(dim))
                candidates.add(_normalize_facet(normal, top))
                continue
            if len(proj) < size:
                continue
            for subset in combinations(proj, size):
                pts = list(subset)
                if not _affinely_independent(pts):
                    continue
                hp = _hyperplane_through(pts)
                if hp is None:
                    continue
                normal, offset = hp
                if all(c < 0 for c in normal):
                    normal = tuple(-c for c in normal)
                    offset = -offset
                if any(c <= 0 for c in normal):
                    continue
                if any(_dot(normal, p) > offset for p in proj):
                    continue
                full = [ZERO] * dim
                for j, c in zip(J, normal):
                    full[j] = c
                candidates.add(_normalize_facet(tuple(full), offset))
    zero_coords = {
        i for i in range(dim) if all(g[i] == 0 for g in generators)
    }
    inner_dim = dim - len(zero_coords)
    verts = _enumerate_vertices(dim, sorted(candidates))
    facets: list[Facet] = []
    for a, b in sorted(candidates):
        support = {i for i, c in enumerate(a) if c != 0}
        if b == 0 and len(support) == 1 and support <= zero_coords:
            facets.append((a, b))
            continue
        tight = [v for v in verts if _dot(a, v) == b]
        if not tight:
            continue
        if len(tight) == 1:
            dim_tight = 0
        else:
            base = tight[0]
            dim_tight = _rank([[p[i] - base[i] for i in range(dim)] for p in tight[1:]])
        if dim_tight == inner_dim - 1:
            facets.append((a, b))
    return sorted(facets)


def _enumerate_vertices(dim: int, halfspaces: list[Facet]) -> list[Vec]:
    """All vertices of {x >= 0, a.x <= b for each halfspace}."""
    _check_dim(dim)
    constraints: list[tuple[Vec, Fraction]] = list(halfspaces)
    for i in range(dim):
        axis = tuple(-ONE if j == i else ZERO for j in range(dim))
        constraints.append((axis, ZERO))  # -x_i <= 0
    verts: set[Vec] = set()
    for subset in combinations(range(len(constraints)), dim):
        rows = [list(constraints[i][0]) for i in subset]
        rhs = [constraints[i][1] for i in subset]
        if _rank(rows) < dim:
            continue
        sol = solve_linear(rows, rhs)
        if sol is None:
            continue
        point = tuple(sol)
        if any(c < 0 for c in point):
            continue
        if all(_dot(a, point) <= b for a, b in constraints):
            verts.add(point)
    return sorted(verts)


def _pareto_maximal(points: list[Vec]) -> list[Vec]:
    pts = sorted(set(points))
    dim = len(pts[0]) if pts else 0
    if dim <= 3 and len(pts) > 8:
        return _pareto_maximal_swept(pts, dim)
    out = []
    for p in pts:
        if not any(q != p and all(x >= y for x, y in zip(q, p)) for q in pts):
            out.append(p)
    return out


def _pareto_maximal_swept(pts: list[Vec], dim: int) -> list[Vec]:
    """Plane-sweep maxima for up to three dimensions, O(k log k)."""
    from bisect import bisect_left, insort

    if dim == 1:
        return [max(pts)]
    if dim == 2:
        out = []
        best_y = None
        for p in sorted(pts, reverse=True):
            if best_y is None or p[1] > best_y:
                out.append(p)
                best_y = p[1]
        return sorted(out)
    out = []
    stairs: list[tuple] = []  # incomparable (y, z) pairs: y ascending, z descending
    for p in sorted(pts, key=lambda q: (-q[0], -q[1], -q[2])):
        y, z = p[1], p[2]
        i = bisect_left(stairs, (y,))
        if i < len(stairs) and stairs[i][1] >= z:
            continue  # dominated by a processed point with larger x
        out.append(p)
        while i > 0 and stairs[i - 1][1] <= z:
            del stairs[i - 1]
            i -= 1
        insort(stairs, (y, z))
    return sorted(out)


def _cross2(o: Vec, a: Vec, b: Vec) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _chain_2d(pts: list[Vec]) -> list[Vec]:
    """Canonical generators of a planar dwc hull: the outward-convex chain.

    Expects Pareto-maximal points; sorting by x makes y strictly decreasing.
    """
    chain: list[Vec] = []
    for p in sorted(pts):
        while len(chain) >= 2 and _cross2(chain[-2], chain[-1], p) >= 0:
            chain.pop()
        chain.append(p)
    return chain


def _canonical_piece(dim: int, points) -> ConvexDwcPiece:
    _check_dim(dim)
    pts = sorted({tuple(Fraction(c) for c in p) for p in points})
    if not pts:
        return ConvexDwcPiece(dim, (tuple([ZERO] * dim),))
    for p in pts:
        if any(c < 0 for c in p):
            raise ValueError(f"negative coordinate in {p}")
        if len(p) != dim:
            raise DimensionError("generator dimension mismatch")
    pts = _pareto_maximal(pts)
    # Pareto-incomparable singletons and pairs are their own canonical form;
    # in the plane the outward-convex chain settles any input.  Only higher
    # dimensions need the dual round trip.
    if len(pts) <= 2 or dim == 1:
        return ConvexDwcPiece(dim, tuple(pts))
    if dim == 2:
        return ConvexDwcPiece(dim, tuple(sorted(_chain_2d(pts))))
    facets = _facets_memo(dim, tuple(pts))
    verts = _enumerate_vertices(dim, list(facets))
    gens = _pareto_maximal(verts)
    if not gens:
        gens = [tuple([ZERO] * dim)]
    # The facet set is presentation independent, so it is valid for the
    # canonical generators as well.
    _FACET_CACHE.setdefault((dim, tuple(gens)), facets)
    return ConvexDwcPiece(dim, tuple(gens))


def dwc_hull(points, dim: int | None = None) -> ConvexDwcPiece:
    """Canonical piece for dwc(conv(points)); empty input yields the zero set."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    if dim is None:
        if not pts:
            raise DimensionError("cannot infer dimension from empty input")
        dim = len(pts[0])
    return _canonical_piece(dim, pts)


def facet_enumeration(piece: ConvexDwcPiece) -> list[Facet]:
    """Halfspace list of a piece (normals >= 0; x >= 0 implicit)."""
    return list(piece.facets())


def vertex_enumeration(halfspaces, dim: int) -> list[Vec]:
    """Canonical generators of the dwc polytope cut out by the halfspaces."""
    normalized = [_normalize_facet(a, b) for a, b in halfspaces]
    for a, _ in normalized:
        if any(c < 0 for c in a):
            raise ValueError("facet normals of a dwc polytope must be nonnegative")
    verts = _enumerate_vertices(dim, sorted(set(normalized)))
    gens = _pareto_maximal(verts)
    if not gens:
        gens = [tuple([ZERO] * dim)]
    return gens


# ---------------------------------------------------------------------------
# DwcSet: finite unions of pieces


class DwcSet:
    """A downward-closed subset of the unit box, as a union of convex pieces."""

    __slots__ = ("dim", "pieces", "_hash")

    def __init__(self, dim: int, pieces: tuple[ConvexDwcPiece, ...]):
        self.dim = dim
        self.pieces = tuple(pieces)
        self._hash = None

    def __eq__(self, other):
        return (
            isinstance(other, DwcSet)
            and self.dim == other.dim
            and self.pieces == other.pieces
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.pieces))
        return self._hash

    def __repr__(self):
        return f"DwcSet(dim={self.dim}, pieces={self.pieces!r})"

    @staticmethod
    def zero(dim: int) -> "DwcSet":
        return DwcSet(dim, (ConvexDwcPiece(dim, (tuple([ZERO] * dim),)),))

    @staticmethod
    def unit(dim: int) -> "DwcSet":
        return DwcSet(dim, (ConvexDwcPiece(dim, (tuple([ONE] * dim),)),))

    @staticmethod
    def from_points(points, dim: int | None = None) -> "DwcSet":
        piece = dwc_hull(points, dim)
        return DwcSet(piece.dim, (piece,))

    @staticmethod
    def from_pieces(dim: int, pieces) -> "DwcSet":
        kept = _prune_dominated(list(pieces))
        if not kept:
            return DwcSet.zero(dim)
        return DwcSet(dim, tuple(sorted(kept, key=lambda p: p.generators)))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.pieces)

    def contains(self, point: Vec) -> bool:
        return any(p.contains(point) for p in self.pieces)

    def radial(self, d: Point) -> Fraction:
        return max(p.radial(d) for p in self.pieces)

    def piece_count(self) -> int:
        return len(self.pieces)


def _piece_subset(inner: ConvexDwcPiece, outer: ConvexDwcPiece) -> bool:
    return all(outer.contains(g) for g in inner.generators)


def _corner(piece: ConvexDwcPiece) -> Vec:
    return tuple(max(g[i] for g in piece.generators) for i in range(piece.dim))


def _prune_dominated(pieces: list[ConvexDwcPiece]) -> list[ConvexDwcPiece]:
    uniq = sorted(set(pieces), key=lambda p: p.generators)
    corners = [_corner(p) for p in uniq]
    kept: list[ConvexDwcPiece] = []
    for i, p in enumerate(uniq):
        dominated = False
        for j, q in enumerate(uniq):
            if i == j:
                continue
            # Containment needs the coordinate maxima to be dominated first.
            if any(a > b for a, b in zip(corners[i], corners[j])):
                continue
            if _piece_subset(p, q):
                # On mutual containment keep the lexicographically first.
                if _piece_subset(q, p) and j > i:
                    continue
                dominated = True
                break
        if not dominated:
            kept.append(p)
    return kept


def scale(c, x: DwcSet) -> DwcSet:
    """Scale a set by a rational constant in [0, 1]."""
    c = Fraction(c)
    if c < 0 or c > 1:
        raise ValueError(f"scale factor {c} outside [0, 1]")
    if c == 0:
        return DwcSet.zero(x.dim)
    pieces = [
        ConvexDwcPiece(x.dim, tuple(sorted(tuple(c * v for v in g) for g in p.generators)))
        for p in x.pieces
    ]
    return DwcSet.from_pieces(x.dim, pieces)


def _clip_piece_unit(piece: ConvexDwcPiece) -> ConvexDwcPiece:
    if all(v <= 1 for g in piece.generators for v in g):
        return piece
    caps = []
    for i in range(piece.dim):
        normal = tuple(ONE if j == i else ZERO for j in range(piece.dim))
        caps.append((normal, ONE))
    halfspaces = list(piece.facets()) + caps
    verts = _enumerate_vertices(piece.dim, sorted(set(halfspaces)))
    gens = _pareto_maximal(verts)
    return ConvexDwcPiece(piece.dim, tuple(gens))


def minkowski(x: DwcSet, y: DwcSet, clip: bool = True) -> DwcSet:
    """Minkowski sum, clipped to the unit box by default."""
    if x.dim != y.dim:
        raise DimensionError("dimension mismatch in minkowski sum")
    pieces = []
    for p in x.pieces:
        for q in y.pieces:
            sums = [tuple(a + b for a, b in zip(g, h)) for g in p.generators for h in q.generators]
            piece = dwc_hull(sums, x.dim) if not clip else _clip_piece_unit(dwc_hull(sums, x.dim))
            pieces.append(piece)
    return canonicalize(DwcSet.from_pieces(x.dim, pieces))


def convex_union(sets) -> ConvexDwcPiece:
    """Single convex piece covering the union: dwc_hull of all generators."""
    sets = list(sets)
    if not sets:
        raise ValueError("convex_union of an empty collection")
    dim = sets[0].dim
    points = []
    for s in sets:
        if s.dim != dim:
            raise DimensionError("dimension mismatch in convex_union")
        for p in s.pieces:
            points.extend(p.generators)
    return dwc_hull(points, dim)


# ---------------------------------------------------------------------------
# Radial envelopes over the direction simplex


def ratio_comparison_hyperplane(f1: Facet, f2: Facet):
    """Origin hyperplane where the radial ratios of two facets swap order.

    b1/(a1.d) = b2/(a2.d) linearizes to (b1*a2 - b2*a1).d = 0.
    """
    a1, b1 = f1
    a2, b2 = f2
    return primitive_normal(tuple(b1 * x2 - b2 * x1 for x1, x2 in zip(a1, a2)))


def _facet_pool(sets) -> list[Facet]:
    pool: set[Facet] = set()
    for s in sets:
        for p in s.pieces:
            pool.update(p.facets())
    return sorted(pool)


def _comparison_pool(sets) -> list[tuple[int, ...]]:
    facets = _facet_pool(sets)
    hyperplanes = set()
    for f1, f2 in combinations(facets, 2):
        h = ratio_comparison_hyperplane(f1, f2)
        if h is not None and not simplexes.is_boundary_normal(h):
            hyperplanes.add(h)
    return sorted(hyperplanes)


def _refined_faces(sets, base_tops=None) -> list[Face]:
    dim = sets[0].dim
    tops = base_tops if base_tops is not None else simplexes.unit_simplex_tops(dim)
    tops = simplexes.refine(tops, _comparison_pool(sets))
    return simplexes.faces_of(tops)


def _winner(xs: DwcSet, d: Point) -> tuple[int, Facet, Fraction]:
    """Index of the winning piece, its active facet, and the radial value at d."""
    best = None
    for idx, p in enumerate(xs.pieces):
        r = p.radial(d)
        if best is None or r > best[2]:
            best = (idx, p.active_facet(d), r)
    assert best is not None
    return best


def _frontier_point(facet: Facet, v: Point) -> Vec | None:
    a, b = facet
    av = _dot(a, v)
    if av == 0:
        # Active facets with positive offset cannot degenerate on their region.
        assert b == 0
        return None
    return simplexes.Pt(b / av * c for c in v)


def _facet_group_piece(dim: int, facet: Facet, pts) -> ConvexDwcPiece:
    """Canonical piece for frontier points that all lie on one facet.

    Coplanarity makes the hull planar: in three dimensions the extreme points
    come from a two-dimensional convex hull in plane coordinates, avoiding the
    general dual conversion.
    """
    pts = sorted(set(pts))
    if dim != 3 or len(pts) <= 3:
        return dwc_hull(pts, dim)
    a, _ = facet
    drop = max(range(dim), key=lambda i: (a[i], -i))
    keep = [i for i in range(dim) if i != drop]
    planar = {}
    for p in pts:
        planar.setdefault((p[keep[0]], p[keep[1]]), []).append(p)
    hull2d = _convex_hull_2d(sorted(planar))
    candidates = [q for xy in hull2d for q in planar[xy]]
    return ConvexDwcPiece(dim, tuple(_pareto_maximal(candidates)))


def _convex_hull_2d(pts: list[tuple]) -> list[tuple]:
    """Extreme points of a planar point set (monotone chain, collinear dropped)."""
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross2(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(list(reversed(pts)))
    return sorted(set(lower + upper))


def frontier_pieces(xs: DwcSet, faces: list[Face]) -> list[ConvexDwcPiece]:
    """Pieces realizing the radial envelope of xs over the given open faces.

    Faces sharing the same winning piece and active facet are merged into one
    piece, which stays inside the winning piece and therefore inside the set.
    """
    groups: dict[tuple[int, Facet], set[Vec]] = {}
    for face in faces:
        bc = simplexes.barycenter(face)
        idx, facet, value = _winner(xs, bc)
        if value == 0:
            continue
        pts = groups.setdefault((idx, facet), set())
        for v in face:
            fp = _frontier_point(facet, v)
            if fp is not None:
                pts.add(fp)
    pieces = [
        _facet_group_piece(xs.dim, facet, pts)
        for (_, facet), pts in sorted(groups.items(), key=lambda kv: kv[0])
    ]
    return pieces


def canonicalize(x: DwcSet) -> DwcSet:
    """Prune dominated pieces; rebuild multi-piece unions as their radial envelope."""
    pruned = DwcSet.from_pieces(x.dim, x.pieces)
    if len(pruned.pieces) <= 1:
        return pruned
    faces = _refined_faces([pruned])
    pieces = frontier_pieces(pruned, faces)
    if not pieces:
        return DwcSet.zero(x.dim)
    return DwcSet.from_pieces(x.dim, pieces)


def restrict_frontier(
    x: DwcSet, face: Face, interior_only: bool = False, pool=None
) -> list[ConvexDwcPiece]:
    """Frontier pieces of x over the closed cone spanned by one open face.

    With `interior_only` the radial profile is sampled only on the relative
    interior of the face; values on the face boundary are then the continuous
    extensions of the interior profile rather than the (possibly jumping)
    boundary values of x itself.  `pool` lets callers reuse the comparison
    hyperplanes of x across faces.
    """
    base = [tuple(sorted(face))]
    if pool is None:
        pool = _comparison_pool([x])
    tops = simplexes.refine(base, pool)
    faces = simplexes.faces_of(tops)
    if interior_only:
        faces = [f for f in faces if len(f) == len(face)]
    return frontier_pieces(x, faces)


def intersect(x: DwcSet, y: DwcSet) -> DwcSet:
    return intersect_many([x, y])


def intersect_many(sets) -> DwcSet:
    """Radial minimum of the given sets (equals set intersection of dwc sets)."""
    sets = [s for s in sets]
    if not sets:
        raise ValueError("intersection of an empty collection")
    dim = sets[0].dim
    for s in sets:
        if s.dim != dim:
            raise DimensionError("dimension mismatch in intersection")
    if len(sets) == 1:
        return canonicalize(sets[0])
    if all(len(s.pieces) == 1 for s in sets):
        halfspaces: set[Facet] = set()
        for s in sets:
            halfspaces.update(s.pieces[0].facets())
        gens = vertex_enumeration(sorted(halfspaces), dim)
        return DwcSet(dim, (ConvexDwcPiece(dim, tuple(gens)),))
    faces = _refined_faces(sets)
    # The merge key fixes the winning piece of every input so merged hulls stay
    # inside each of them (hence inside the intersection).
    groups: dict[tuple, set[Vec]] = {}
    for face in faces:
        bc = simplexes.barycenter(face)
        winners = [_winner(s, bc) for s in sets]
        low = min(range(len(sets)), key=lambda i: winners[i][2])
        facet, value = winners[low][1], winners[low][2]
        if value == 0:
            continue
        key = (tuple(w[0] for w in winners), low, facet)
        pts = groups.setdefault(key, set())
        for v in face:
            fp = _frontier_point(facet, v)
            if fp is not None:
                pts.add(fp)
    pieces = [
        _facet_group_piece(dim, key[2], pts)
        for key, pts in sorted(groups.items(), key=lambda kv: kv[0])
    ]
    if not pieces:
        return DwcSet.zero(dim)
    return DwcSet.from_pieces(dim, pieces)


def evaluate(x: DwcSet, d: Direction) -> Evaluation:
    """Radial evaluation of a set in a direction, in exact arithmetic."""
    if d.dim != x.dim:
        raise DimensionError("direction dimension mismatch")
    return Evaluation(x.radial(d.coords), d.norm_squared())


def is_subset(x: DwcSet, y: DwcSet) -> bool:
    """Exact decision of x subseteq y via the common direction refinement."""
    if x.dim != y.dim:
        raise DimensionError("dimension mismatch in is_subset")
    if len(y.pieces) == 1:
        target = y.pieces[0]
        return all(target.contains(g) for p in x.pieces for g in p.generators)
    faces = _refined_faces([x, y])
    for face in faces:
        bc = simplexes.barycenter(face)
        _, (ax, bx), rx = _winner(x, bc)
        _, (ay, by), ry = _winner(y, bc)
        if rx == 0:
            continue
        if ry == 0:
            return False
        # r_x <= r_y on the face iff b_x*(a_y.d) - b_y*(a_x.d) <= 0 on its closure.
        for v in face:
            if bx * _dot(ay, v) > by * _dot(ax, v):
                return False
    return True


def sets_equal(x: DwcSet, y: DwcSet) -> bool:
    return is_subset(x, y) and is_subset(y, x)


def gap_bound(upper: DwcSet, lower: DwcSet) -> Fraction:
    """Sound upper bound on sup_d (radial(upper, d) - radial(lower, d)).

    Per refined region with active facets (aU, bU), (aL, bL), the difference is
    N(d)/D(d) with N linear and D a product of positive linear forms, so the
    region bound max(N at vertices)/min(D at vertices) dominates the supremum.
    """
    if upper.dim != lower.dim:
        raise DimensionError("dimension mismatch in gap_bound")
    faces = _refined_faces([upper, lower])
    bound, _ = _gap_bound_over(upper, lower, faces)
    return bound


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def serialize_set(x: DwcSet) -> list:
    """JSON form of a set: one generator list per piece, rationals as strings."""
    return [
        [[format_rational(c) for c in g] for g in piece.generators] for piece in x.pieces
    ]


def deserialize_set(data, dim: int) -> DwcSet:
    pieces = [dwc_hull([[Fraction(c) for c in g] for g in gens], dim) for gens in data]
    return DwcSet.from_pieces(dim, pieces)


def _gap_bound_over(upper: DwcSet, lower: DwcSet, faces: list[Face]) -> tuple[Fraction, Face | None]:
    best = ZERO
    witness: Face | None = None
    for face in faces:
        bc = simplexes.barycenter(face)
        _, (au, bu), ru = _winner(upper, bc)
        _, (al, bl), rl = _winner(lower, bc)
        if bu == 0:
            continue
        if len(face) == 1:
            region_bound = ru - rl
        elif bl == 0:
            region_bound = max(bu / _dot(au, v) for v in face)
        else:
            num = max(bu * _dot(al, v) - bl * _dot(au, v) for v in face)
            den = min(_dot(au, v) * _dot(al, v) for v in face)
            if num <= 0:
                continue
            assert den > 0, "degenerate denominator for a positive-offset active facet"
            region_bound = num / den
        if region_bound > best:
            best = region_bound
            witness = face
    return best, witness
