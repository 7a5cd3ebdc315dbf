from __future__ import annotations

import time
from dataclasses import replace
from importlib import resources

import pytest

from cordcat.cords import CordSpace, Send, recvs, sends, validate_run
from cordcat.dsl import parse_file
from cordcat.errors import MatchError, ResolutionError, RunError
from cordcat.interaction import STRATEGIES, Interaction, int_compose, int_equal
from cordcat.protocols import (ATTACK_GOAL, ATTACK_RUN, NETWORK, NSPK_GOAL, Protocol, SecurityGoal,
                               analyze, attack_composite, attack_env, attack_protocol, check_agreement,
                               check_secrecy, knowledge, nspk, nspk1, nspk2, report, resolve, rows)
from cordcat.process import alpha_equal
from cordcat.terms import AGENT, Const, Var, enc, pk, sk

A, C = Const("A", AGENT), Const("C", AGENT)


def shipped(name):
    return parse_file(resources.files("cordcat") / "data" / name)


# -- shape of the handshake ---------------------------------------------------------------

def test_handshake_counts():
    p = nspk()
    space = p.process.space
    assert len(space.events) == 11
    assert len(sends(space)) == 3
    assert len(recvs(space)) == 3
    assert rows(p.process, p.run) == 8


def test_handshake_run_is_valid():
    p = nspk()
    assert validate_run(p.process.space, p.run) is None


def test_composite_counts():
    c = attack_composite()
    assert len(c.body.space.events) == 19
    assert rows(c.body, ATTACK_RUN) == 13


def test_composite_cross_order():
    order = attack_composite().body.space.order
    cross = {(a, b) for a, b in order if a[0] != b[0]}
    assert cross == {("z2", "w1"), ("w2", "z3"), ("z5", "w3")}


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_composite_matches_golden_file(strategy):
    golden = shipped("mitm.cord").interactions["MITM"]
    assert int_equal(attack_composite(strategy), golden)


def test_composite_freed_variables():
    body = attack_composite().body
    assert {v.name for v in body.freed} == {"Z'", "kb_Z'"}


def test_shipped_source_agrees_with_builders():
    sf = shipped("nspk.cord")
    assert alpha_equal(sf.processes["NSPK"], nspk().process)
    assert int_equal(sf.interactions["NSPK1"], nspk1())
    assert int_equal(sf.interactions["NSPK2"], nspk2())


def test_composition_is_fast():
    start = time.perf_counter()
    attack_composite()
    assert time.perf_counter() - start < 1.0


# -- honest run -----------------------------------------------------------------------------

def test_honest_resolution():
    p = nspk()
    res = resolve(p.process, p.run, p.environment)
    assert res.value(Var("m")) == Const("~m")
    assert res.value(Var("n")) == Const("~n'")
    assert res.value(Var("X'", AGENT)) == A


def test_honest_report():
    text, ok = report(nspk(), NSPK_GOAL)
    assert ok
    assert text.splitlines() == [
        "AGREEMENT",
        "X = X': PASS — A = A",
        "Y = Y': PASS — B = B",
        "m = m': PASS — ~m = ~m",
        "n = n': PASS — ~n' = ~n'",
        "SECRECY",
        "secret m among X, Y': PASS — ~m underivable by net",
        "secret n among X, Y': PASS — ~n' underivable by net",
        "RUN",
        "run resolves: PASS — 11 events, 3 communications",
    ]


def test_eavesdropper_can_be_switched_off():
    p = nspk()
    v = check_secrecy(p.process, p.run, Var("m"), [Var("X", AGENT), Var("Y'", AGENT)],
                      env=p.environment, eavesdropper=False)
    assert v.passed and v.witness.endswith("underivable by nobody")


def test_network_cannot_decrypt():
    p = nspk()
    res = resolve(p.process, p.run, p.environment)
    sent = [e.action.payload for e in res.events.values() if isinstance(e.action, Send)]
    k = knowledge(res, NETWORK, sent)
    assert not k.knows(Const("~m")) and not k.knows(sk(A))


# -- the attack ---------------------------------------------------------------------------------

def test_attack_verdicts():
    verdicts = {v.claim: v for _, v in analyze(attack_protocol(), ATTACK_GOAL)}
    assert verdicts["X = X''"].passed
    assert not verdicts["Z = Y''"].passed
    assert verdicts["Z = Y''"].witness == "C != B"
    assert verdicts["m = m''"].passed
    assert verdicts["n = n''"].passed
    for claim in ("secret m among X, Y''", "secret n among X, Y''"):
        assert not verdicts[claim].passed
        assert verdicts[claim].witness.startswith("derived by C (as Z')")
    assert verdicts["run resolves"].passed


def test_attack_report_sections():
    text, ok = report(attack_protocol(), ATTACK_GOAL)
    assert not ok
    heads = [line for line in text.splitlines() if ":" not in line]
    assert heads == ["AGREEMENT", "SECRECY", "RUN"]


def test_attacker_learns_responder_nonce():
    res = resolve(attack_protocol().process, ATTACK_RUN, attack_env())
    k = knowledge(res, C)
    assert k.knows(Const("~n''"))
    assert k.derived[Const("~n''")][0] == "decrypt"


def test_shipped_attack_protocol():
    sf = shipped("nspk.cord")
    proto = sf.protocol("NSPK")
    goal = sf.goal("attack-goal", proto.process)
    assert goal == ATTACK_GOAL
    assert report(proto, goal) == report(attack_protocol(), ATTACK_GOAL)


def test_literal_relay_breaks_the_run():
    # re-encrypting the forwarded reply leaves X with a double ciphertext
    f = nspk1()
    z1, x1 = Var("z'"), Var("X'", AGENT)
    events = tuple(replace(e, action=Send(enc(pk(x1), z1))) if e.label == "z3" else e
                   for e in f.body.space.events)
    body = replace(f.body, space=CordSpace(events, f.body.space.order))
    literal = int_compose(Interaction(f.dom, f.cod, body), nspk2())
    with pytest.raises(MatchError):
        resolve(literal.body, ATTACK_RUN, attack_env())


# -- errors ------------------------------------------------------------------------------------

def test_protocol_needs_a_run():
    with pytest.raises(RunError):
        Protocol("empty", nspk().process, ())


def test_protocol_rejects_invalid_run():
    with pytest.raises(RunError):
        Protocol("bad", nspk().process, ({"y1": "x5", "x3": "y4", "y5": "x2"},))


def test_missing_environment_does_not_resolve():
    p = nspk()
    with pytest.raises(ResolutionError):
        resolve(p.process, p.run, {})


def test_agreement_position_out_of_range():
    with pytest.raises(IndexError):
        analyze(nspk(), SecurityGoal(agreements=((0, 99),)))


def test_agreement_failure_witness():
    p = nspk()
    [v] = check_agreement(p.process, p.run, [(0, 1)], p.environment)
    assert not v.passed and v.line() == "X = Y: FAIL — A != B"
