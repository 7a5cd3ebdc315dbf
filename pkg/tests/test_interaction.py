from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings

from cordcat.interaction import (STRATEGIES, UNIT, IntObject, Interaction, as_scalar, dual,
                                 embed_init, embed_resp, epsilon, eta, int_compose, int_equal,
                                 int_identity, int_tensor, interaction_system, obj_tensor)
from cordcat.process import compose, identity, tensor
from cordcat.protocols import attack_composite, nspk1, nspk2
from cordcat.terms import AGENT, DATA

from gen import gen_interaction, gen_object, gen_process, rngs

SMALL_SORTS = [()] + [tuple(s) for k in (1, 2) for s in itertools.product((DATA, AGENT), repeat=k)]
SMALL_OBJECTS = [IntObject(p, m) for p in SMALL_SORTS for m in SMALL_SORTS]


def test_body_must_fit_the_objects():
    with pytest.raises(TypeError):
        Interaction(IntObject((DATA,), ()), IntObject((), ()), identity(2))


def test_object_mismatch_is_rejected():
    f = int_identity(IntObject((DATA,), ()))
    g = int_identity(IntObject((), (DATA,)))
    with pytest.raises(TypeError):
        int_compose(f, g)


def test_dual_is_an_involution():
    for a in SMALL_OBJECTS:
        assert dual(dual(a)) == a


def test_unit_and_buffer_bodies():
    a = IntObject((DATA, AGENT), (DATA,))
    assert eta(a).dom == UNIT and eta(a).cod == obj_tensor(dual(a), a)
    assert epsilon(a).cod == UNIT
    assert all(not e.body.space.events for e in (eta(a), epsilon(a), int_identity(a)))


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_identity_is_a_unit(strategy):
    rng = random.Random(5)
    for _ in range(20):
        a, b = gen_object(rng), gen_object(rng)
        f = gen_interaction(rng, a, b)
        assert int_equal(int_compose(f, int_identity(b), strategy), f)
        assert int_equal(int_compose(int_identity(a), f, strategy), f)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_nspk_components_compose_to_the_attack(strategy):
    assert int_equal(int_compose(nspk1(), nspk2(), strategy), attack_composite())


def test_equation_system_of_a_composition():
    f, g = nspk1(), nspk2()
    sys_ = interaction_system(f, g)
    # B- of NSPK1 has three wires, B+ six
    assert len(sys_.traced) == len(f.cod.minus) + len(f.cod.plus) == 9
    names = [v.name for v in sys_.traced]
    assert names[:3] == ["Z'", "kb_Z'", "z'"]


@settings(max_examples=60, deadline=None)
@given(rngs())
def test_strategies_agree(rng):
    a, b, c = gen_object(rng), gen_object(rng), gen_object(rng)
    f = gen_interaction(rng, a, b, "f")
    g = gen_interaction(rng, b, c, "g")
    base = int_compose(f, g, "traceBoth")
    for s in ("traceMinus", "tracePlus"):
        assert int_equal(int_compose(f, g, s), base)


@settings(max_examples=40, deadline=None)
@given(rngs())
def test_composition_is_associative(rng):
    a, b, c, d = (gen_object(rng) for _ in range(4))
    f = gen_interaction(rng, a, b, "f")
    g = gen_interaction(rng, b, c, "g")
    h = gen_interaction(rng, c, d, "h")
    assert int_equal(int_compose(int_compose(f, g), h), int_compose(f, int_compose(g, h)))


def triangle_left(a):
    """``A -> A (x) A* (x) A -> A`` through the unit then the counit."""
    return int_compose(int_tensor(int_identity(a), eta(a)), int_tensor(epsilon(a), int_identity(a)))


def triangle_right(a):
    d = dual(a)
    return int_compose(int_tensor(eta(a), int_identity(d)), int_tensor(int_identity(d), epsilon(a)))


@pytest.mark.parametrize("a", SMALL_OBJECTS, ids=str)
def test_triangle_identities(a):
    assert int_equal(triangle_left(a), int_identity(a))
    assert int_equal(triangle_right(a), int_identity(dual(a)))


def test_scalars_compose_as_tensor_and_commute():
    rng = random.Random(11)
    for _ in range(30):
        s = as_scalar(gen_process(rng, (), (), label_prefix="s"))
        t = as_scalar(gen_process(rng, (), (), label_prefix="t"))
        st_ = int_compose(s, t)
        assert int_equal(st_, Interaction(UNIT, UNIT, tensor(s.body, t.body)))
        assert int_equal(st_, int_compose(t, s))


@settings(max_examples=40, deadline=None)
@given(rngs())
def test_embeddings_are_functors(rng):
    s1, s2, s3 = ((DATA,) * rng.randint(0, 2) for _ in range(3))
    p = gen_process(rng, s1, s2, label_prefix="p")
    q = gen_process(rng, s2, s3, label_prefix="q")
    assert int_equal(embed_init(identity(s1)), int_identity(IntObject(s1, ())))
    assert int_equal(embed_init(compose(p, q)), int_compose(embed_init(p), embed_init(q)))
    assert int_equal(embed_resp(compose(p, q)), int_compose(embed_resp(q), embed_resp(p)))


@settings(max_examples=40, deadline=None)
@given(rngs())
def test_tensor_is_functorial(rng):
    a, b, c, d, e, f_ = (gen_object(rng, 1) for _ in range(6))
    p = gen_interaction(rng, a, b, "p")
    q = gen_interaction(rng, b, c, "q")
    r = gen_interaction(rng, d, e, "r")
    s = gen_interaction(rng, e, f_, "s")
    lhs = int_compose(int_tensor(p, r), int_tensor(q, s))
    rhs = int_tensor(int_compose(p, q), int_compose(r, s))
    assert int_equal(lhs, rhs)
