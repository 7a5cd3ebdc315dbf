from __future__ import annotations

from importlib import resources

import pytest
from hypothesis import given, settings

from cordcat.cords import Match, New, Recv, Send
from cordcat.dsl import parse, parse_process, print_process, print_source, print_value, tokenize
from cordcat.errors import DSLSyntaxError
from cordcat.interaction import int_equal
from cordcat.process import alpha_equal, trace
from cordcat.terms import AGENT, DATA, App, Const, Mu, Var, enc, pair, pk, term_equal

from gen import gen_sorted_process, rngs

CONSTS = {"A": AGENT, "B": AGENT, "c": DATA}
CORPUS = ("mitm.cord", "nspk.cord")


def shipped_text(name: str) -> str:
    return (resources.files("cordcat") / "data" / name).read_text(encoding="utf-8")


# -- lexing and parsing ----------------------------------------------------------------

def test_hyphenated_identifiers():
    toks = [t.text for t in tokenize("int-compose attack-goal -> x") if t.kind != "eof"]
    assert toks == ["int-compose", "attack-goal", "->", "x"]


def test_comments_are_skipped():
    p = parse_process("# nothing here\n()[]<> # trailing")
    assert p.outputs == () and p.space.events == ()


def test_parse_small_process():
    p = parse_process("""
        (X:agent, y)
          [ a @ X : new(m),
            b @ X : send(E(k(X), (y, m))) after a,
            c @ X : recv(z) after b ]
          <m, z>""")
    X, y, m, z = Var("X", AGENT), Var("y"), Var("m"), Var("z")
    assert p.inputs == (X, y)
    acts = [e.action for e in p.space.events]
    assert acts[0] == New(m)
    assert acts[1] == Send(enc(pk(X), pair(y, m)))
    assert acts[2] == Recv((z,))
    assert ("a", "b") in p.space.order and ("b", "c") in p.space.order
    assert p.outputs == (m, z)


def test_locality_and_key_arguments_are_agents():
    p = parse_process("(P, Q, y)[ a @ P : send(E(k(Q), y)) ]<>")
    assert [v.sort for v in p.inputs] == [AGENT, AGENT, DATA]


def test_match_binds_new_names_and_checks_bound_ones():
    p = parse_process("""
        (kb, x, m)
          [ a @ A : match(m, n = D(kb, x)) ]
          <n>""", CONSTS)
    act = p.space.events[0].action
    assert isinstance(act, Match)
    assert act.binders == {Var("n")}


def test_forced_check():
    text = """
        (x)
          [ a @ A : recv(u),
            b @ A : match(=v, w = u) after a ]
          <w>
          free v"""
    p = parse_process(text, CONSTS)
    act = p.space.events[1].action
    assert act.binders == {Var("w")}
    assert Var("v") in p.free_vars()


def test_uninterpreted_operations():
    p = parse_process("(x)[]<hash(x, x)>")
    assert p.outputs == (App("hash", (Var("x"), Var("x"))),)


def test_mu_outputs():
    p = parse_process("(x)[]<mu y. g(x, y)>")
    assert isinstance(p.outputs[0], Mu)
    assert term_equal(p.outputs[0], App("g", (Var("x"), p.outputs[0])))


def test_data_annotation_on_agent_output():
    p = parse_process("(X:agent)[]<X:data, X>")
    assert p.out_sorts == (DATA, AGENT)
    assert print_process(p).endswith("<X0:data, X0>")


def test_constants_are_not_variables():
    p = parse_process("()[ a @ A : send(c) ]<>", CONSTS)
    assert p.space.events[0].agent == Const("A", AGENT)
    assert p.free_vars() == set()


# -- errors carry positions ------------------------------------------------------------

@pytest.mark.parametrize("text,line,col,fragment", [
    ("process P = ()[]<>\n$", 2, 1, "unexpected character"),
    ("process P = (x, X:agent)\n [ a @ X : send(x),\n   a @ X : send(x) ]\n <>", 3, 4, "duplicate label 'a'"),
    ("process P = (X:agent)\n [ a @ X : send(y) ]\n <>", 2, 17, "unbound variable 'y'"),
    ("process P = (x, X:agent)\n [ a @ X : send(x) after b ]\n <>", 2, 4, "unknown label 'b'"),
    ("process P = ()[]<>\nprocess P = ()[]<>", 2, 9, "duplicate process 'P'"),
    ("process P = (x:foo)[]<>", 1, 16, "unknown sort 'foo'"),
    ("process P = (X:agent)[ a @ X : jump(x) ]<>", 1, 32, "unknown action 'jump'"),
    ("process P = (X:agent)[ a @ X : send(X) <>", 1, 40, "expected ']'"),
    ("process P = (x)[]<mu y. y>", 1, 19, "unguarded"),
    ("int I < ; > -> < ; > = ()[]<>\nprotocol Q = int-compose I I bogus\n run { }", 2, 30,
     "unknown strategy 'bogus'"),
])
def test_errors_report_line_and_column(text, line, col, fragment):
    with pytest.raises(DSLSyntaxError) as info:
        parse(text)
    err = info.value
    assert (err.line, err.col) == (line, col), str(err)
    assert fragment in str(err)
    assert str(err).startswith(f"{line}:{col}: ")


def test_unknown_interaction_in_protocol():
    with pytest.raises(DSLSyntaxError):
        parse("protocol Q = int-compose I J\n run { }")


# -- printing -----------------------------------------------------------------------------

def test_canonical_print_names_by_position():
    p = parse_process("(Y:agent, s)[ a @ Y : recv(r), b @ Y : send((s, r)) after a ]<r>")
    assert print_process(p) == (
        "(X0:agent, x1)\n"
        "  [ e0 @ X0 : recv(u0),\n"
        "    e1 @ X0 : send((x1, u0)) after e0 ]\n"
        "  <u0>"
    )


def test_plain_print_keeps_names():
    p = parse_process("(Y:agent, s)[ a @ Y : recv(r) ]<r>")
    assert "a @ Y : recv(r)" in print_process(p, canonical=False)


def test_trace_result_prints_freed_variables():
    p = parse_process("(y)[ a @ A : send(y) ]<y>", CONSTS)
    t = trace(p, 1)
    assert print_process(t).endswith("send(f0) ]\n  <>\n  freed f0")
    assert alpha_equal(parse_process(print_process(t), CONSTS), t)


def test_print_value_rejects_other_things():
    with pytest.raises(TypeError):
        print_value(42)


@settings(max_examples=200, deadline=None)
@given(rngs())
def test_random_processes_round_trip(rng):
    p = gen_sorted_process(rng, rng.randint(0, 3), rng.randint(0, 3))
    text = print_process(p)
    q = parse_process(text, CONSTS)
    assert alpha_equal(p, q)
    assert print_process(q) == text


# -- the shipped corpus ---------------------------------------------------------------------

@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip_is_byte_stable(name):
    once = print_source(parse(shipped_text(name)))
    twice = print_source(parse(once))
    assert once == twice


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_round_trip_preserves_meaning(name):
    original = parse(shipped_text(name))
    again = parse(print_source(original))
    assert original.processes.keys() == again.processes.keys()
    assert original.interactions.keys() == again.interactions.keys()
    for k, p in original.processes.items():
        assert alpha_equal(p, again.processes[k])
    for k, f in original.interactions.items():
        assert int_equal(f, again.interactions[k])
    assert original.goals.keys() == again.goals.keys()
    assert original.protocols.keys() == again.protocols.keys()


def test_goal_binding_to_output_positions():
    sf = parse(shipped_text("nspk.cord"))
    proto = sf.protocol("NSPK-honest")
    goal = sf.goal("honest-goal", proto.process)
    assert goal.agreements == ((0, 4), (1, 5), (2, 6), (3, 7))
    assert {str(v) for v, _ in goal.secrets} == {"m", "n"}


def test_goal_naming_a_non_output():
    sf = parse(shipped_text("nspk.cord") + "\ngoal odd { agree kb_X = X }\n")
    proto = sf.protocol("NSPK-honest")
    with pytest.raises(KeyError):
        sf.goal("odd", proto.process)
