"""Strongly connected components and end-component analysis.

End components ignore the owner partition: a state set with a witness action
set is an EC when no witness pair exits the set and the internal graph is
strongly connected through witness actions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .game import Restriction, StochasticGame


def _availability(structure):
    """(states, available-map, post-map) for a game or a restriction."""
    if isinstance(structure, Restriction):
        game = structure.game
        states = sorted(structure.states)
        avail = {s: structure.available[s] for s in states}
    else:
        game = structure
        states = list(game.states())
        avail = {s: game.available[s] for s in states}
    return game, states, avail


def scc(vertices, edges) -> list[list[int]]:
    """Strongly connected components in reverse topological order (iterative Tarjan)."""
    index_of: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in vertices:
        if root in index_of:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index_of[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def graph_scc(structure) -> list[list[int]]:
    """SCCs of the successor graph induced by the availability map."""
    game, states, avail = _availability(structure)
    inside = set(states)
    edges = {
        s: sorted(
            {t for a in avail[s] for t in game.post(s, a) if t in inside}
        )
        for s in states
    }
    return scc(states, edges)


def is_ec(game: StochasticGame, states, actions) -> bool:
    """Both end-component conditions for a state set and a witness action set.

    `actions` holds action names, interpreted per state as the retained subset
    of that state's available actions.
    """
    inside = frozenset(states)
    if not inside:
        return False
    witness = set(actions)
    retained = {s: [a for a in game.available[s] if a in witness] for s in inside}
    if not any(retained.values()):
        return False
    for s in inside:
        for a in retained[s]:
            if any(t not in inside for t in game.post(s, a)):
                return False
    edges = {s: sorted({t for a in retained[s] for t in game.post(s, a)}) for s in inside}
    if len(inside) == 1:
        (s,) = inside
        return bool(retained[s])
    comps = scc(sorted(inside), edges)
    if len(comps) != 1:
        return False
    # Strong connectivity additionally needs an outgoing retained action everywhere.
    return all(retained[s] for s in inside)


@dataclass(frozen=True)
class MecDecomposition:
    """Maximal end components with witness actions, MECs in reverse topological order."""

    components: tuple[frozenset[int], ...]
    witnesses: tuple[dict, ...]  # per component: state -> tuple of staying actions

    def __iter__(self):
        return iter(self.components)

    def component_of(self, s: int) -> frozenset[int] | None:
        for comp in self.components:
            if s in comp:
                return comp
        return None


def mec_decomposition(structure) -> MecDecomposition:
    """Standard iterative MEC algorithm: SCC refinement with exit pruning."""
    game, states, avail = _availability(structure)
    candidate_actions = {s: list(avail[s]) for s in states}
    candidates: list[set[int]] = [set(states)]
    finished: list[tuple[frozenset[int], dict]] = []
    while candidates:
        current = candidates.pop()
        retained = {
            s: [a for a in candidate_actions[s] if all(t in current for t in game.post(s, a))]
            for s in current
        }
        edges = {s: sorted({t for a in retained[s] for t in game.post(s, a)}) for s in current}
        comps = scc(sorted(current), edges)
        stable = len(comps) == 1
        for comp in comps:
            comp_set = set(comp)
            staying = {
                s: tuple(
                    a for a in candidate_actions[s] if all(t in comp_set for t in game.post(s, a))
                )
                for s in comp
            }
            if len(comp) == 1:
                (s,) = comp
                if staying[s]:
                    finished.append((frozenset(comp), {s: staying[s]}))
                continue
            if all(staying[s] for s in comp) and stable and comp_set == current:
                finished.append((frozenset(comp), dict(staying)))
                continue
            shrunk = {s for s in comp if staying[s]}
            # States with no staying action cannot belong to an EC inside comp.
            if shrunk:
                for s in shrunk:
                    candidate_actions[s] = list(staying[s])
                candidates.append(shrunk)
    finished.sort(key=lambda item: sorted(item[0]))
    comps = tuple(c for c, _ in finished)
    witnesses = tuple(w for _, w in finished)
    ordered = _reverse_topological(game, avail, comps)
    return MecDecomposition(
        components=tuple(comps[i] for i in ordered),
        witnesses=tuple(witnesses[i] for i in ordered),
    )


def _reverse_topological(game, avail, comps) -> list[int]:
    """Order MEC indices so successors in the condensed graph come first."""
    member = {}
    for i, comp in enumerate(comps):
        for s in comp:
            member[s] = i
    n = len(comps)
    succ: dict[int, set[int]] = {i: set() for i in range(n)}
    reach_cache: dict[int, set[int]] = {}

    def reachable(start: int) -> set[int]:
        if start in reach_cache:
            return reach_cache[start]
        seen = {start}
        frontier = [start]
        while frontier:
            s = frontier.pop()
            for a in avail.get(s, ()):
                for t in game.post(s, a):
                    if t in avail and t not in seen:
                        seen.add(t)
                        frontier.append(t)
        reach_cache[start] = seen
        return seen

    for i, comp in enumerate(comps):
        hit = set()
        for s in comp:
            hit |= reachable(s)
        for j, other in enumerate(comps):
            if i != j and hit & set(other):
                succ[i].add(j)
    order: list[int] = []
    seen: set[int] = set()

    def visit(i: int):
        if i in seen:
            return
        seen.add(i)
        for j in sorted(succ[i]):
            visit(j)
        order.append(i)

    for i in range(n):
        visit(i)
    return order


def bottom_mecs(structure, decomposition: MecDecomposition | None = None) -> list[frozenset[int]]:
    """MECs with no path to any other MEC within the analyzed set, smallest ids first."""
    game, states, avail = _availability(structure)
    decomp = decomposition if decomposition is not None else mec_decomposition(structure)
    bottoms = []
    for comp in decomp.components:
        seen = set(comp)
        frontier = list(comp)
        escapes = False
        while frontier and not escapes:
            s = frontier.pop()
            for a in avail.get(s, ()):
                for t in game.post(s, a):
                    if t not in avail or t in seen:
                        continue
                    if any(t in other for other in decomp.components if other != comp):
                        escapes = True
                        break
                    seen.add(t)
                    frontier.append(t)
                if escapes:
                    break
        if not escapes:
            bottoms.append(comp)
    return sorted(bottoms, key=lambda c: sorted(c))
