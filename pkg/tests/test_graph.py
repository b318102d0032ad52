import itertools

from sgpareto import oracle
from sgpareto.game import parse_game, restrict
from sgpareto.graph import bottom_mecs, graph_scc, is_ec, mec_decomposition, scc


def test_scc_two_cycle():
    comps = scc([0, 1], {0: [1], 1: [0]})
    assert comps == [[0, 1]]


def test_scc_chain_reverse_topological():
    comps = scc([0, 1, 2], {0: [1], 1: [2], 2: []})
    assert comps == [[2], [1], [0]]


def test_scc_of_cycle_fixture(cycle_game):
    game, _ = cycle_game
    comps = graph_scc(game)
    core = sorted(game.index_of(x) for x in ("p", "q", "r"))
    assert core in comps
    for name in ("t12", "t1", "t2", "t0"):
        assert [game.index_of(name)] in comps


def test_is_ec_cases(cycle_game):
    game, _ = cycle_game
    core = {game.index_of(x) for x in ("p", "q", "r")}
    assert is_ec(game, core, {"a", "b", "c", "d"})
    assert not is_ec(game, core, {"a", "b", "c", "d", "f"})
    assert not is_ec(game, {game.index_of("p")}, {"a"})
    assert is_ec(game, {game.index_of("t0")}, {"stay"})


def test_mec_decomposition_cycle_fixture(cycle_game):
    game, _ = cycle_game
    decomp = mec_decomposition(game)
    comps = {frozenset(c) for c in decomp.components}
    core = frozenset(game.index_of(x) for x in ("p", "q", "r"))
    assert core in comps
    for name in ("t12", "t1", "t2", "t0"):
        assert frozenset({game.index_of(name)}) in comps
    assert len(comps) == 5  # the mixing helper state is transient
    for comp, witness in zip(decomp.components, decomp.witnesses):
        actions = {a for acts in witness.values() for a in acts}
        assert is_ec(game, comp, actions)


def test_mec_decomposition_acyclic_game():
    doc = {
        "states": [
            {"id": "a", "owner": "max"},
            {"id": "b", "owner": "min"},
            {"id": "end", "owner": "max"},
        ],
        "initial": "a",
        "actions": [
            {"state": "a", "action": "go", "dist": [{"to": "b", "p": "1"}]},
            {"state": "b", "action": "go", "dist": [{"to": "end", "p": "1"}]},
            {"state": "end", "action": "stay", "dist": [{"to": "end", "p": "1"}]},
        ],
        "targets": [["end"]],
    }
    game, _ = parse_game(doc)
    decomp = mec_decomposition(game)
    assert [sorted(c) for c in decomp.components] == [[game.index_of("end")]]


def test_single_self_loop_state():
    doc = {
        "states": [{"id": "a", "owner": "min"}],
        "initial": "a",
        "actions": [{"state": "a", "action": "loop", "dist": [{"to": "a", "p": "1"}]}],
        "targets": [["a"]],
    }
    game, _ = parse_game(doc)
    decomp = mec_decomposition(game)
    assert [sorted(c) for c in decomp.components] == [[0]]


def brute_force_mecs(game):
    """Inclusion-maximal ECs by enumerating every candidate state set."""
    states = list(game.states())
    ecs = []
    for r in range(1, len(states) + 1):
        for combo in itertools.combinations(states, r):
            inside = frozenset(combo)
            staying = {
                s: [a for a in game.available[s] if all(t in inside for t in game.post(s, a))]
                for s in inside
            }
            witness = {a for acts in staying.values() for a in acts}
            if witness and is_ec(game, inside, witness):
                ecs.append(inside)
    return {e for e in ecs if not any(e < other for other in ecs)}


def test_mec_oracle_equivalence_on_random_games():
    for seed in range(25):
        game, _ = oracle.random_game(n_states=6, n_actions=2, n_targets=1, seed=seed)
        decomp = mec_decomposition(game)
        assert {frozenset(c) for c in decomp.components} == brute_force_mecs(game), seed


def test_decomposition_invariant_under_relabeling():
    game, objective = oracle.random_game(n_states=6, n_actions=2, n_targets=1, seed=3)
    import json

    from sgpareto.game import serialize_game

    doc = json.loads(serialize_game(game, objective))
    mapping = {f"s{i}": f"u{(i * 3) % 7}" for i in range(7)}

    def rename(name):
        return mapping.get(name, name)

    doc["states"] = [{"id": rename(e["id"]), "owner": e["owner"]} for e in doc["states"]]
    doc["initial"] = rename(doc["initial"])
    for entry in doc["actions"]:
        entry["state"] = rename(entry["state"])
        for br in entry["dist"]:
            br["to"] = rename(br["to"])
    doc["targets"] = [sorted(rename(x) for x in t) for t in doc["targets"]]
    game2, _ = parse_game(doc)
    original = {
        frozenset(rename(game.state_names[s]) for s in c)
        for c in mec_decomposition(game).components
    }
    renamed = {
        frozenset(game2.state_names[s] for s in c)
        for c in mec_decomposition(game2).components
    }
    assert original == renamed


def test_bottom_mecs_tie_break():
    game, objective = oracle.fixture("nested-components")
    names = ["n6", "n7u", "n8u", "n7d"]
    y = frozenset(game.index_of(x) for x in names)
    sub = restrict(game, y, {s: game.available[s] for s in y})
    bottoms = bottom_mecs(sub)
    as_names = [sorted(game.state_names[s] for s in c) for c in bottoms]
    assert as_names == [["n7u", "n8u"], ["n7d"]]
