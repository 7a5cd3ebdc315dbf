"""Random generators for terms, processes, guarded systems and interactions.

All generators take a ``random.Random`` so runs are reproducible from a
seed; the hypothesis strategies at the bottom feed them seeds.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from cordcat.cords import CordSpace, Event, Match, New, Recv, Send, bv, flow_pairs, fv
from cordcat.interaction import IntObject, Interaction
from cordcat.process import CordProcess
from cordcat.terms import AGENT, DATA, App, Const, GuardedSystem, Var, dec, enc, pair, pk, sk

AGENTS = (Const("A", AGENT), Const("B", AGENT))
DATA_CONSTS = (Const("c"),)


def gen_term(rng: random.Random, data_vars, agent_vars, depth: int) -> App:
    """A data-sorted term of depth at most ``depth``."""
    agents = list(agent_vars) + list(AGENTS)
    leaves = list(data_vars) + list(agent_vars) + list(DATA_CONSTS)
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(leaves)
    kind = rng.randrange(5)
    sub = lambda: gen_term(rng, data_vars, agent_vars, depth - 1)
    if kind == 0:
        return App("f", (sub(),))
    if kind == 1:
        return App("g", (sub(), sub()))
    if kind == 2:
        return pair(sub(), sub())
    if kind == 3:
        return enc(pk(rng.choice(agents)), sub())
    return dec(sk(rng.choice(agents)), sub())


def gen_decr_term(rng: random.Random, depth: int) -> App:
    """Terms rich in decryption redexes, for the rewrite tests."""
    a = rng.choice(AGENTS)
    if depth <= 0 or rng.random() < 0.2:
        return rng.choice([Var("m"), Var("n"), Const("c")])
    sub = lambda: gen_decr_term(rng, depth - 1)
    kind = rng.randrange(5)
    if kind == 0:
        return dec(sk(a), enc(pk(a), sub()))
    if kind == 1:
        return dec(sk(a), sub())
    if kind == 2:
        return enc(pk(rng.choice(AGENTS)), sub())
    if kind == 3:
        return pair(sub(), sub())
    return App("f", (sub(),))


def _sorts(rng: random.Random, n: int, agent_bias: float = 0.25) -> tuple:
    return tuple(AGENT if rng.random() < agent_bias else DATA for _ in range(n))


def gen_process(rng: random.Random, in_sorts, out_sorts, max_events: int = 5,
                depth: int = 3, label_prefix: str = "a") -> CordProcess:
    """A flow-closed process with the given interface sorts."""
    inputs = tuple(Var(f"v{i}", s) for i, s in enumerate(in_sorts))
    data_vars = [v for v in inputs if v.sort == DATA]
    agent_vars = [v for v in inputs if v.sort == AGENT]
    events, order = [], set()
    n_events = rng.randint(0, max_events)
    fresh = iter(range(1000))
    for i in range(n_events):
        label = f"{label_prefix}{i}"
        locality = rng.choice(agent_vars + list(AGENTS))
        kind = rng.randrange(4)
        if kind == 0:
            v = Var(f"b{next(fresh)}")
            act = New(v)
        elif kind == 1:
            v = Var(f"b{next(fresh)}", AGENT if rng.random() < 0.2 else DATA)
            act = Recv((v,))
        elif kind == 2:
            act = Send(gen_term(rng, data_vars, agent_vars, depth))
        else:
            v = Var(f"b{next(fresh)}")
            act = Match((v,), (gen_term(rng, data_vars, agent_vars, depth - 1),), frozenset({v}))
        ev = Event(label, act, locality)
        for prev in events:
            if rng.random() < 0.15:
                order.add((prev.label, label))
        events.append(ev)
        for v in bv(ev):
            (agent_vars if v.sort == AGENT else data_vars).append(v)
    order |= flow_pairs(events, events)
    outputs = []
    for s in out_sorts:
        if s == AGENT:
            outputs.append(rng.choice(agent_vars + list(AGENTS)))
        else:
            outputs.append(gen_term(rng, data_vars, agent_vars, depth))
    return CordProcess(inputs, CordSpace(tuple(events), frozenset(order)), tuple(outputs), tuple(out_sorts))


def gen_sorted_process(rng: random.Random, n_in: int, n_out: int, **kw) -> CordProcess:
    return gen_process(rng, _sorts(rng, n_in), _sorts(rng, n_out), **kw)


def gen_guarded_system(rng: random.Random, k: int, depth: int = 3) -> tuple:
    """``(params, system)``: ``k`` equations over traced ``y1..yk`` and inputs ``x1, x2``."""
    xs = (Var("x1"), Var("x2"))
    ys = tuple(Var(f"y{i + 1}") for i in range(k))
    rhs = {}
    for y in ys:
        if rng.random() < 0.2:
            rhs[y] = rng.choice(ys + xs)
        else:
            t = gen_term(rng, list(xs + ys), [], depth)
            while t in ys:
                t = gen_term(rng, list(xs + ys), [], depth)
            rhs[y] = t
    return xs, GuardedSystem(ys, rhs)


def gen_object(rng: random.Random, max_arity: int = 2) -> IntObject:
    return IntObject(_sorts(rng, rng.randint(0, max_arity)), _sorts(rng, rng.randint(0, max_arity)))


def gen_interaction(rng: random.Random, a: IntObject, b: IntObject, prefix: str = "a", **kw) -> Interaction:
    body = gen_process(rng, a.plus + b.minus, a.minus + b.plus, label_prefix=prefix, **kw)
    return Interaction(a, b, body)


# -- hypothesis strategies -----------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rngs():
    return seeds.map(random.Random)


def gen_run(rng: random.Random, space: CordSpace):
    """A random valid total run of ``space``, or ``None`` when none was found."""
    from cordcat.cords import recvs, run_extended, sends

    rs, ss = sorted(recvs(space)), sorted(sends(space))
    if rs and not ss:
        return None
    run = {}
    for r in rng.sample(rs, len(rs)):
        ext = run_extended(space, run)
        ok = [s for s in ss if s not in ext.closure[r]]
        if not ok:
            return None
        run[r] = rng.choice(ok)
    return run
