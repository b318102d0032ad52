"""Ground-truth generators and reference solvers used by the test suites.

The exact single-dimension solver enumerates memoryless deterministic
strategy pairs and solves the induced Markov chains as rational linear
systems.  For multi-target stopping games, iterating the plain Bellman
operator with a certified residual serves as the reference.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import geometry, solver
from .game import Objective, StochasticGame, exits, parse_game, serialize_game
from .geometry import DwcSet
from .graph import mec_decomposition
from .simplexes import solve_linear

STRATEGY_PAIR_CAP = 1 << 20


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Exact single-dimension values


def _chain_reach_probability(game: StochasticGame, choice: dict, targets) -> dict:
    """Exact reachability probabilities of the Markov chain fixed by `choice`."""
    n = game.n_states
    reach_t = set(targets)
    frontier = list(reach_t)
    incoming: dict[int, set[int]] = {s: set() for s in game.states()}
    for s in game.states():
        for t, _ in game.successors(s, choice[s]):
            incoming[t].add(s)
    while frontier:
        t = frontier.pop()
        for s in incoming[t]:
            if s not in reach_t:
                reach_t.add(s)
                frontier.append(s)
    values = {s: Fraction(0) for s in game.states()}
    unknown = [s for s in game.states() if s in reach_t and s not in targets]
    for s in targets:
        values[s] = Fraction(1)
    if not unknown:
        return values
    index = {s: i for i, s in enumerate(unknown)}
    rows = []
    rhs = []
    for s in unknown:
        row = [Fraction(0)] * len(unknown)
        row[index[s]] = Fraction(1)
        constant = Fraction(0)
        for t, p in game.successors(s, choice[s]):
            if t in targets:
                constant += p
            elif t in index:
                row[index[t]] -= p
        rows.append(row)
        rhs.append(constant)
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise OracleError("singular reachability system")
    for s, v in zip(unknown, sol):
        values[s] = v
    return values


def solve_single_dim_exact(game: StochasticGame, target_set) -> dict:
    """Exact per-state values by memoryless-deterministic strategy enumeration."""
    targets = frozenset(target_set)
    max_states = [s for s in game.states() if game.is_maximizer(s)]
    min_states = [s for s in game.states() if not game.is_maximizer(s)]
    pairs = 1
    for s in game.states():
        pairs *= len(game.available[s])
    if pairs > STRATEGY_PAIR_CAP:
        raise OracleError(f"strategy pair count {pairs} exceeds cap {STRATEGY_PAIR_CAP}")
    best = {s: Fraction(0) for s in game.states()}
    first = True
    for max_choice in itertools.product(*(game.available[s] for s in max_states)):
        worst = None
        for min_choice in itertools.product(*(game.available[s] for s in min_states)):
            choice = dict(zip(max_states, max_choice))
            choice.update(zip(min_states, min_choice))
            values = _chain_reach_probability(game, choice, targets)
            if worst is None:
                worst = values
            else:
                worst = {s: min(worst[s], values[s]) for s in game.states()}
        assert worst is not None
        if first:
            best = worst
            first = False
        else:
            best = {s: max(best[s], worst[s]) for s in game.states()}
    return best


# ---------------------------------------------------------------------------
# Stopping-game reference via plain Bellman iteration


def _escape_residual(game: StochasticGame, absorbing, steps: int) -> float:
    """Upper bound on the probability of avoiding the absorbing states for
    `steps` steps when both players cooperate to stay out; conservatively
    rounded upward after each arithmetic step."""
    stay = {s: 0.0 if s in absorbing else 1.0 for s in game.states()}
    for _ in range(steps):
        nxt = {}
        for s in game.states():
            if s in absorbing:
                nxt[s] = 0.0
                continue
            best = 0.0
            for a in game.available[s]:
                total = 0.0
                for t, p in game.successors(s, a):
                    total = math.nextafter(total + float(p) * stay[t], math.inf)
                best = max(best, total)
            nxt[s] = min(1.0, best)
        stay = nxt
    return max(stay.values())


def achievable_oracle_stopping(
    game: StochasticGame,
    objective: Objective,
    iterations: int | None = None,
    residual: float = 1e-9,
) -> dict:
    """Plain Bellman iterates as ground truth for stopping games.

    The iteration count is certified: the cooperative escape probability after
    k steps bounds the mass the k-step sets can still be missing.
    """
    decomp = mec_decomposition(game)
    absorbing = set()
    for comp in decomp.components:
        if exits(game, comp):
            raise OracleError("game is not stopping: a component has exits")
        absorbing |= comp
    k = iterations
    if k is None:
        k = max(4, game.n_states)
        while _escape_residual(game, absorbing, k) >= residual:
            k *= 2
            if k > 1 << 16:
                raise OracleError("residual does not certify within the step budget")
    values = {s: DwcSet.zero(objective.dimension) for s in game.states()}
    for _ in range(k):
        values = solver.bellman(game, objective, values)
    return values


# ---------------------------------------------------------------------------
# Random games


def random_game(
    n_states: int = 5,
    n_actions: int = 2,
    n_targets: int = 2,
    stopping: bool = False,
    branching: int = 2,
    seed: int = 0,
) -> tuple[StochasticGame, Objective]:
    """Reproducible random game; `stopping=True` redirects mass to fresh sinks
    until no component with exits remains."""
    if min(n_states, n_actions, n_targets, branching) < 1:
        raise ValueError("generator parameters must be positive")
    rng = random.Random(seed)
    names = [f"s{i}" for i in range(n_states)]
    doc = {
        "states": [
            {"id": name, "owner": rng.choice(["max", "min"])} for name in names
        ],
        "initial": names[0],
        "actions": [],
        "targets": [],
    }
    for name in names:
        for k in range(rng.randint(1, n_actions)):
            succ = rng.sample(names, min(len(names), rng.randint(1, branching)))
            weights = [rng.randint(1, 4) for _ in succ]
            total = sum(weights)
            doc["actions"].append(
                {
                    "state": name,
                    "action": f"a{k}",
                    "dist": [
                        {"to": t, "p": f"{w}/{total}"} for t, w in zip(succ, weights)
                    ],
                }
            )
    for _ in range(n_targets):
        size = rng.randint(1, max(1, n_states // 2))
        doc["targets"].append(sorted(rng.sample(names, size)))
    if stopping:
        doc = _make_stopping(doc, rng)
    game, objective = parse_game(doc)
    if stopping:
        for comp in mec_decomposition(game).components:
            assert not exits(game, comp), "stopping post-processing failed"
    return game, objective


def _make_stopping(doc: dict, rng: random.Random) -> dict:
    """Redirect a quarter of every distribution to fresh absorbing sinks."""
    hit = "sink_hit"
    miss = "sink_miss"
    doc["states"] = doc["states"] + [
        {"id": hit, "owner": "max"},
        {"id": miss, "owner": "max"},
    ]
    new_actions = []
    for entry in doc["actions"]:
        dist = []
        leak_hit = rng.choice([True, False])
        leak = {"to": hit if leak_hit else miss, "p": "1/4"}
        for branch in dist_scaled(entry["dist"], Fraction(3, 4)):
            dist.append(branch)
        dist.append(leak)
        new_actions.append({"state": entry["state"], "action": entry["action"], "dist": dist})
    for sink in (hit, miss):
        new_actions.append(
            {"state": sink, "action": "stay", "dist": [{"to": sink, "p": "1"}]}
        )
    doc["actions"] = new_actions
    # The hit sink satisfies every target so capping it is a no-op.
    doc["targets"] = [sorted(set(t) | {hit}) for t in doc["targets"]]
    return doc


def dist_scaled(dist: list, factor: Fraction) -> list:
    out = []
    for branch in dist:
        p = Fraction(branch["p"]) * factor
        out.append({"to": branch["to"], "p": f"{p.numerator}/{p.denominator}"})
    return out


# ---------------------------------------------------------------------------
# Diagnostics


def diagnostic_delta(game, objective, upper, oracle_values, direction) -> dict:
    """Per-state over-approximation error in one direction.

    `oracle_values` maps states to DwcSets (or plain rationals for one
    dimension); the result maps states to exact rationals.
    """
    out = {}
    for s in game.states():
        u = upper[s].radial(direction.coords)
        ref = oracle_values[s]
        if isinstance(ref, DwcSet):
            r = ref.radial(direction.coords)
        else:
            r = Fraction(ref)
        out[s] = u - r
    return out


# ---------------------------------------------------------------------------
# Fixture library


@dataclass(frozen=True)
class Fixture:
    name: str
    document: dict
    notes: str

    def build(self) -> tuple[StochasticGame, Objective]:
        return parse_game(self.document)


def ec_cycle_game() -> dict:
    """One Minimizer state cycling with two Maximizer states, each owning an
    exit whose frontier is a box; a third exit reaches the hull of both.

    Exact exit sets: f achieves dwc{(1/2, 9/10)}, g achieves dwc{(9/10, 1/2)},
    e reaches a Maximizer choice between the two distributions.
    """
    alpha = [
        {"to": "t12", "p": "1/2"},
        {"to": "t2", "p": "2/5"},
        {"to": "t0", "p": "1/10"},
    ]
    beta = [
        {"to": "t12", "p": "1/2"},
        {"to": "t1", "p": "2/5"},
        {"to": "t0", "p": "1/10"},
    ]
    return {
        "states": [
            {"id": "p", "owner": "min"},
            {"id": "q", "owner": "max"},
            {"id": "r", "owner": "max"},
            {"id": "mix", "owner": "max"},
            {"id": "t12", "owner": "max"},
            {"id": "t1", "owner": "max"},
            {"id": "t2", "owner": "max"},
            {"id": "t0", "owner": "max"},
        ],
        "initial": "p",
        "actions": [
            {"state": "p", "action": "a", "dist": [{"to": "q", "p": "1"}]},
            {"state": "p", "action": "c", "dist": [{"to": "r", "p": "1"}]},
            {"state": "p", "action": "e", "dist": [{"to": "mix", "p": "1"}]},
            {"state": "q", "action": "b", "dist": [{"to": "p", "p": "1"}]},
            {"state": "q", "action": "f", "dist": alpha},
            {"state": "r", "action": "d", "dist": [{"to": "p", "p": "1"}]},
            {"state": "r", "action": "g", "dist": beta},
            {"state": "mix", "action": "left", "dist": alpha},
            {"state": "mix", "action": "right", "dist": beta},
            {"state": "t12", "action": "stay", "dist": [{"to": "t12", "p": "1"}]},
            {"state": "t1", "action": "stay", "dist": [{"to": "t1", "p": "1"}]},
            {"state": "t2", "action": "stay", "dist": [{"to": "t2", "p": "1"}]},
            {"state": "t0", "action": "stay", "dist": [{"to": "t0", "p": "1"}]},
        ],
        "targets": [["t12", "t1"], ["t12", "t2"]],
    }


def ec_cycle_all_max() -> dict:
    doc = ec_cycle_game()
    for entry in doc["states"]:
        if entry["id"] == "p":
            entry["owner"] = "max"
    return doc


def three_target_wedges() -> dict:
    """A Minimizer/Maximizer loop whose Minimizer owns three exits with
    frontiers dwc{(1,0,1/2)}, dwc{(1/2,0,1)}, and the line dwc{(0,1,0)}."""
    return {
        "states": [
            {"id": "s", "owner": "min"},
            {"id": "h", "owner": "max"},
            {"id": "v", "owner": "max"},
            {"id": "w1", "owner": "max"},
            {"id": "w3", "owner": "max"},
            {"id": "t2", "owner": "max"},
            {"id": "z", "owner": "max"},
        ],
        "initial": "s",
        "actions": [
            {
                "state": "s",
                "action": "a1",
                "dist": [{"to": "v", "p": "1/2"}, {"to": "w1", "p": "1/2"}],
            },
            {
                "state": "s",
                "action": "a2",
                "dist": [{"to": "v", "p": "1/2"}, {"to": "w3", "p": "1/2"}],
            },
            {"state": "s", "action": "a3", "dist": [{"to": "t2", "p": "1"}]},
            {"state": "s", "action": "wait", "dist": [{"to": "h", "p": "1"}]},
            {"state": "h", "action": "back", "dist": [{"to": "s", "p": "1"}]},
            {"state": "h", "action": "drop", "dist": [{"to": "z", "p": "1"}]},
            {"state": "v", "action": "stay", "dist": [{"to": "v", "p": "1"}]},
            {"state": "w1", "action": "stay", "dist": [{"to": "w1", "p": "1"}]},
            {"state": "w3", "action": "stay", "dist": [{"to": "w3", "p": "1"}]},
            {"state": "t2", "action": "stay", "dist": [{"to": "t2", "p": "1"}]},
            {"state": "z", "action": "stay", "dist": [{"to": "z", "p": "1"}]},
        ],
        "targets": [["v", "w1"], ["t2"], ["v", "w3"]],
    }


def chain_with_nested_components() -> dict:
    """A single-target chain whose plain upper fixpoint stays bloated: nested
    components around states 4..8 make the bottom analysis nontrivial.

    Exit gadgets reach the target with probabilities 1/5, 4/5, 2/5, 2/5, 1.
    """

    def exit_dist(p: str, rest: str):
        return [{"to": "goal", "p": p}, {"to": "zero", "p": rest}]

    return {
        "states": [
            {"id": "n0", "owner": "min"},
            {"id": "n1", "owner": "min"},
            {"id": "n2", "owner": "max"},
            {"id": "n3", "owner": "max"},
            {"id": "n4", "owner": "max"},
            {"id": "n5", "owner": "min"},
            {"id": "n6", "owner": "min"},
            {"id": "n7u", "owner": "min"},
            {"id": "n8u", "owner": "max"},
            {"id": "n7d", "owner": "max"},
            {"id": "goal", "owner": "max"},
            {"id": "zero", "owner": "max"},
        ],
        "initial": "n0",
        "actions": [
            {
                "state": "n0",
                "action": "split",
                "dist": [{"to": "zero", "p": "1/2"}, {"to": "n1", "p": "1/2"}],
            },
            {"state": "n1", "action": "go", "dist": [{"to": "n2", "p": "1"}]},
            {"state": "n2", "action": "fwd", "dist": [{"to": "n3", "p": "1"}]},
            {"state": "n3", "action": "back", "dist": [{"to": "n2", "p": "1"}]},
            {"state": "n3", "action": "fwd", "dist": [{"to": "n4", "p": "1"}]},
            {"state": "n4", "action": "exit", "dist": exit_dist("1/5", "4/5")},
            {"state": "n4", "action": "fwd", "dist": [{"to": "n5", "p": "1"}]},
            {"state": "n5", "action": "exit", "dist": exit_dist("4/5", "1/5")},
            {"state": "n5", "action": "back", "dist": [{"to": "n4", "p": "1"}]},
            {"state": "n5", "action": "fwd", "dist": [{"to": "n6", "p": "1"}]},
            {"state": "n6", "action": "up", "dist": [{"to": "n8u", "p": "1"}]},
            {"state": "n6", "action": "down", "dist": [{"to": "n7d", "p": "1"}]},
            {"state": "n7u", "action": "pair", "dist": [{"to": "n8u", "p": "1"}]},
            {"state": "n7u", "action": "exit", "dist": exit_dist("1", "0")},
            {"state": "n8u", "action": "pair", "dist": [{"to": "n7u", "p": "1"}]},
            {"state": "n8u", "action": "exit", "dist": exit_dist("2/5", "3/5")},
            {"state": "n8u", "action": "back", "dist": [{"to": "n5", "p": "1"}]},
            {"state": "n7d", "action": "self", "dist": [{"to": "n7d", "p": "1"}]},
            {"state": "n7d", "action": "back", "dist": [{"to": "n5", "p": "1"}]},
            {"state": "n7d", "action": "exit", "dist": exit_dist("2/5", "3/5")},
            {"state": "goal", "action": "stay", "dist": [{"to": "goal", "p": "1"}]},
            {"state": "zero", "action": "stay", "dist": [{"to": "zero", "p": "1"}]},
        ],
        "targets": [["goal"]],
    }


def single_dim_cycle(alpha: str, beta: str, gamma: str) -> dict:
    """The three-state cycle with scalar exit probabilities."""

    def chance(p: str):
        q = 1 - Fraction(p)
        return [{"to": "goal", "p": p}, {"to": "zero", "p": f"{q.numerator}/{q.denominator}"}]

    return {
        "states": [
            {"id": "p", "owner": "min"},
            {"id": "q", "owner": "max"},
            {"id": "r", "owner": "max"},
            {"id": "goal", "owner": "max"},
            {"id": "zero", "owner": "max"},
        ],
        "initial": "p",
        "actions": [
            {"state": "p", "action": "a", "dist": [{"to": "q", "p": "1"}]},
            {"state": "p", "action": "c", "dist": [{"to": "r", "p": "1"}]},
            {"state": "p", "action": "e", "dist": chance(gamma)},
            {"state": "q", "action": "b", "dist": [{"to": "p", "p": "1"}]},
            {"state": "q", "action": "f", "dist": chance(alpha)},
            {"state": "r", "action": "d", "dist": [{"to": "p", "p": "1"}]},
            {"state": "r", "action": "g", "dist": chance(beta)},
            {"state": "goal", "action": "stay", "dist": [{"to": "goal", "p": "1"}]},
            {"state": "zero", "action": "stay", "dist": [{"to": "zero", "p": "1"}]},
        ],
        "targets": [["goal"]],
    }


FIXTURES = {
    "ec-cycle": Fixture(
        "ec-cycle",
        ec_cycle_game(),
        "core cycle p/q/r with box exits (1/2,9/10), (9/10,1/2) and their hull",
    ),
    "ec-cycle-all-max": Fixture(
        "ec-cycle-all-max",
        ec_cycle_all_max(),
        "same cycle with every state owned by the Maximizer",
    ),
    "three-target-wedges": Fixture(
        "three-target-wedges",
        three_target_wedges(),
        "three-dimensional exits: two wedges and a line",
    ),
    "nested-components": Fixture(
        "nested-components",
        chain_with_nested_components(),
        "single target; bloated plain fixpoint with nested sub-components",
    ),
    "single-dim-case1": Fixture(
        "single-dim-case1",
        single_dim_cycle("1/2", "9/10", "1/10"),
        "cheap middle exit: plain iteration already converges",
    ),
    "single-dim-case2": Fixture(
        "single-dim-case2",
        single_dim_cycle("4/5", "1/2", "9/10"),
        "expensive middle exit: plain upper iteration stalls until deflation",
    ),
}


def fixture(name: str) -> tuple[StochasticGame, Objective]:
    return FIXTURES[name].build()


def fixture_json(name: str) -> str:
    game, objective = fixture(name)
    return serialize_game(game, objective)
