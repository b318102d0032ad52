"""Turn-based stochastic games with multi-target reachability objectives.

Games are parsed from a JSON document; all probabilities are exact rationals
("a/b" or terminating decimal strings).  States and actions are strings in
files and dense integer indices internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

MAXIMIZER = "max"
MINIMIZER = "min"


class GameFormatError(ValueError):
    """Raised for malformed game documents."""


def parse_probability(raw) -> Fraction:
    """Exact rational from "a/b", a terminating decimal string, or an int."""
    if isinstance(raw, bool):
        raise GameFormatError(f"invalid probability: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise GameFormatError(f"invalid probability: {raw!r}") from exc
    raise GameFormatError(
        f"probability must be a string or integer, got {type(raw).__name__}: {raw!r}"
    )


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class StateActionPair:
    state: int
    action: str


@dataclass(frozen=True)
class StochasticGame:
    """Immutable game structure over dense state indices."""

    state_names: tuple[str, ...]
    owner: tuple[str, ...]  # MAXIMIZER | MINIMIZER per state
    initial: int
    available: tuple[tuple[str, ...], ...]  # per state, sorted action names
    transition: dict = field(hash=False)  # (state, action) -> tuple[(succ, prob)]

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    def states(self) -> range:
        return range(self.n_states)

    def index_of(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise GameFormatError(f"unknown state: {name!r}") from None

    def is_maximizer(self, s: int) -> bool:
        return self.owner[s] == MAXIMIZER

    def successors(self, s: int, a: str):
        return self.transition[(s, a)]

    def post(self, s: int, a: str) -> frozenset[int]:
        return frozenset(t for t, _ in self.transition[(s, a)])


@dataclass(frozen=True)
class Objective:
    """An n-tuple of target state sets."""

    targets: tuple[frozenset[int], ...]

    @property
    def dimension(self) -> int:
        return len(self.targets)


def indicator(objective: Objective, s: int) -> tuple[Fraction, ...]:
    """Component i is 1 exactly when s belongs to the i-th target set."""
    return tuple(Fraction(1) if s in t else Fraction(0) for t in objective.targets)


def exits(game: StochasticGame, states) -> set[StateActionPair]:
    """All state-action pairs of the set with some successor outside it."""
    inside = frozenset(states)
    out = set()
    for s in inside:
        for a in game.available[s]:
            if any(t not in inside for t in game.post(s, a)):
                out.add(StateActionPair(s, a))
    return out


def exits_max(game: StochasticGame, states) -> set[StateActionPair]:
    """Maximizer-owned exits of the set."""
    return {sa for sa in exits(game, states) if game.is_maximizer(sa.state)}


@dataclass(frozen=True)
class Restriction:
    """A sub-structure over a state subset with a restricted availability map.

    Retained actions may still exit the subset; they simply count as exits in
    the downstream end-component analysis.
    """

    game: StochasticGame
    states: frozenset[int]
    available: dict  # state -> tuple of retained action names


def restrict(game: StochasticGame, states, available) -> Restriction:
    inside = frozenset(states)
    cleaned: dict[int, tuple[str, ...]] = {}
    for s, actions in available.items():
        if s not in inside:
            raise GameFormatError(f"restriction references state outside the set: {s}")
        acts = tuple(sorted(actions))
        if not acts:
            raise GameFormatError(f"restriction leaves state {game.state_names[s]} blocked")
        for a in acts:
            if a not in game.available[s]:
                raise GameFormatError(
                    f"action {a!r} not available in state {game.state_names[s]}"
                )
        cleaned[s] = acts
    for s in inside:
        if s not in cleaned:
            raise GameFormatError(f"restriction misses state {game.state_names[s]}")
    return Restriction(game, inside, cleaned)


def parse_game(document) -> tuple[StochasticGame, Objective]:
    """Validate a game document (JSON text or parsed object)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"invalid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise GameFormatError("game document must be a JSON object")
    for key in ("states", "initial", "actions", "targets"):
        if key not in doc:
            raise GameFormatError(f"missing field: {key!r}")

    names: list[str] = []
    owners: list[str] = []
    for entry in doc["states"]:
        sid = entry.get("id")
        owner = entry.get("owner")
        if not isinstance(sid, str) or owner not in (MAXIMIZER, MINIMIZER):
            raise GameFormatError(f"bad state entry: {entry!r}")
        if sid in names:
            raise GameFormatError(f"duplicate state id: {sid!r}")
        names.append(sid)
        owners.append(owner)
    index = {name: i for i, name in enumerate(names)}

    if doc["initial"] not in index:
        raise GameFormatError(f"unknown initial state: {doc['initial']!r}")

    transition: dict[tuple[int, str], tuple] = {}
    available: list[list[str]] = [[] for _ in names]
    for entry in doc["actions"]:
        state_name = entry.get("state")
        action = entry.get("action")
        dist = entry.get("dist")
        if state_name not in index or not isinstance(action, str) or not isinstance(dist, list):
            raise GameFormatError(f"bad action entry: {entry!r}")
        s = index[state_name]
        if action in available[s]:
            raise GameFormatError(f"duplicate action {action!r} in state {state_name!r}")
        branches = []
        total = Fraction(0)
        for branch in dist:
            to = branch.get("to")
            if to not in index:
                raise GameFormatError(f"unknown successor state: {branch!r}")
            p = parse_probability(branch.get("p"))
            if p < 0 or p > 1:
                raise GameFormatError(f"probability out of range: {branch!r}")
            total += p
            if p > 0:
                branches.append((index[to], p))
        if total != 1:
            raise GameFormatError(
                f"distribution sum != 1 for {state_name!r}/{action!r}: {format_rational(total)}"
            )
        available[s].append(action)
        transition[(s, action)] = tuple(sorted(branches))
    for i, acts in enumerate(available):
        if not acts:
            raise GameFormatError(f"state {names[i]!r} has an empty available-action set")

    targets = []
    for raw in doc["targets"]:
        if not isinstance(raw, list):
            raise GameFormatError(f"bad target set: {raw!r}")
        members = set()
        for name in raw:
            if name not in index:
                raise GameFormatError(f"unknown target state: {name!r}")
            members.add(index[name])
        targets.append(frozenset(members))
    if not targets:
        raise GameFormatError("objective needs at least one target set")

    game = StochasticGame(
        state_names=tuple(names),
        owner=tuple(owners),
        initial=index[doc["initial"]],
        available=tuple(tuple(sorted(acts)) for acts in available),
        transition=transition,
    )
    return game, Objective(tuple(targets))


def serialize_game(game: StochasticGame, objective: Objective) -> str:
    """Canonical JSON form; parse(serialize(...)) is the identity on it."""
    doc = {
        "states": [
            {"id": name, "owner": game.owner[i]} for i, name in enumerate(game.state_names)
        ],
        "initial": game.state_names[game.initial],
        "actions": [
            {
                "state": game.state_names[s],
                "action": a,
                "dist": [
                    {"to": game.state_names[t], "p": format_rational(p)}
                    for t, p in game.transition[(s, a)]
                ],
            }
            for s in game.states()
            for a in game.available[s]
        ],
        "targets": [sorted(game.state_names[t] for t in ts) for ts in objective.targets],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
