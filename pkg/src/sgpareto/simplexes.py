"""Subdivisions of the unit-sum direction simplex into relatively open simplices.

Directions are canonical rational vectors with nonnegative components summing
to one.  A subdivision is stored by its top-dimensional simplices; every
nonempty subset of a top's vertex set is an open face of the complex.
Hyperplanes through the origin are inserted by stellar subdivision of the
crossed edges, which keeps the subdivision a simplicial complex.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

Point = tuple[Fraction, ...]
Face = tuple[Point, ...]
Hyperplane = tuple[int, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class Pt(tuple):
    """Coordinate tuple with a cached hash.

    Rational hashes are costly (a modular inverse per component) and the
    subdivision machinery keys sets and dicts on points constantly.
    """

    def __hash__(self):
        h = getattr(self, "_h", None)
        if h is None:
            h = tuple.__hash__(self)
            object.__setattr__(self, "_h", h)
        return h


def normalize_direction(vec) -> Point:
    """Canonical unit-sum representative of a nonnegative, nonzero vector."""
    coords = tuple(Fraction(c) for c in vec)
    if any(c < 0 for c in coords):
        raise ValueError(f"direction has negative component: {vec}")
    total = sum(coords)
    if total == 0:
        raise ValueError("zero vector does not define a direction")
    return Pt(c / total for c in coords)


def primitive_normal(vec) -> Hyperplane | None:
    """Scale a rational vector to a primitive integer vector, first nonzero positive.

    Returns None for the zero vector.
    """
    fracs = [Fraction(c) for c in vec]
    if all(c == 0 for c in fracs):
        return None
    denom_lcm = 1
    for c in fracs:
        denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in fracs]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def unit_simplex_tops(dim: int) -> list[Face]:
    """The whole direction simplex as a single top simplex (corner directions)."""
    corners = []
    for i in range(dim):
        corners.append(Pt(ONE if j == i else ZERO for j in range(dim)))
    return [tuple(sorted(corners))]


def dot(h: Hyperplane, p: Point) -> Fraction:
    return sum(Fraction(a) * b for a, b in zip(h, p))


def _crossing_point(h: Hyperplane, u: Point, v: Point) -> Point:
    pu, pv = dot(h, u), dot(h, v)
    # pu and pv have strictly opposite signs; the result stays unit-sum.
    return Pt((pu * vi - pv * ui) / (pu - pv) for ui, vi in zip(u, v))


def is_boundary_normal(h: Hyperplane) -> bool:
    """True when h cannot separate interior directions (all components one sign)."""
    return all(c >= 0 for c in h) or all(c <= 0 for c in h)


def refine(tops: list[Face], hyperplanes) -> list[Face]:
    """Refine a subdivision so every open face has a constant sign per hyperplane."""
    return [top for top, _ in refine_with_origin(tops, hyperplanes)]


def refine_with_origin(tops: list[Face], hyperplanes) -> list[tuple[Face, int]]:
    """Like refine, but each result carries the index of its originating top.

    Crossed edges are subdivided stellarly; a vertex-incidence index keeps
    each subdivision local to the simplices actually containing the edge.
    """
    entries: list = [(top, i) for i, top in enumerate(tops)]  # None = replaced
    incident: dict[Point, set[int]] = {}
    for idx, (top, _) in enumerate(entries):
        for p in top:
            incident.setdefault(p, set()).add(idx)

    def add_entry(top: Face, origin: int):
        entries.append((top, origin))
        idx = len(entries) - 1
        for p in top:
            incident.setdefault(p, set()).add(idx)

    for h in sorted(set(hyperplanes)):
        if is_boundary_normal(h):
            continue
        signs: dict[Point, int] = {}
        for p in incident:
            if incident[p]:
                d = dot(h, p)
                signs[p] = 0 if d == 0 else (1 if d > 0 else -1)
        crossed = set()
        for entry in entries:
            if entry is None:
                continue
            for u, v in combinations(entry[0], 2):
                if signs[u] * signs[v] < 0:
                    crossed.add((u, v) if u < v else (v, u))
        for u, v in sorted(crossed):
            w = _crossing_point(h, u, v)
            signs.setdefault(w, 0)
            for idx in sorted(incident.get(u, ()) & incident.get(v, ())):
                entry = entries[idx]
                if entry is None:
                    continue
                top, origin = entry
                entries[idx] = None
                for p in top:
                    incident[p].discard(idx)
                rest = [p for p in top if p != u and p != v]
                add_entry(tuple(sorted(rest + [w, v])), origin)
                add_entry(tuple(sorted(rest + [w, u])), origin)
    return [entry for entry in entries if entry is not None]


def faces_of(tops: list[Face]) -> list[Face]:
    """All open faces of the subdivision, canonically ordered."""
    seen: set[Face] = set()
    for top in tops:
        for k in range(1, len(top) + 1):
            for sub in combinations(top, k):
                seen.add(sub)
    return sorted(seen, key=lambda f: (len(f), f))


def barycenter(face: Face) -> Point:
    k = Fraction(len(face))
    return Pt(sum(col) / k for col in zip(*face))


def solve_linear(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Exact solve of a (possibly overdetermined) full-column-rank system.

    Returns None when the system is inconsistent.
    """
    m, n = len(rows), len(rows[0]) if rows else 0
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != 0:
            return None
    if len(piv_cols) < n:
        return None
    sol = [ZERO] * n
    for i, c in enumerate(piv_cols):
        sol[c] = a[i][n]
    return sol


def face_containing(tops: list[Face], d: Point) -> Face | None:
    """Locate the unique open face whose relative interior contains d."""
    n = len(d)
    for top in tops:
        rows = [[top[j][i] for j in range(len(top))] for i in range(n)]
        coeffs = solve_linear(rows, list(d))
        if coeffs is None or any(c < 0 for c in coeffs):
            continue
        return tuple(sorted(p for p, c in zip(top, coeffs) if c > 0))
    return None


def closure_contains(outer: Face, inner: Face) -> bool:
    """True when the closed simplex of `outer` contains the open face `inner`."""
    return set(inner) <= set(outer)
