from __future__ import annotations

import pytest
from hypothesis import given, settings

from cordcat.errors import ArityError, SortError, StateError
from cordcat.terms import (AGENT, BOTTOM, App, Const, GuardedSystem, Mu, Var, canonical_term,
                           clone_compose, compose_subst, dec, enc, free_vars, normalize_decr, pair,
                           partition_system, pk, redex_positions, rewrite_at, sk, solve_iterative,
                           substitute, term_equal, unfold)

from gen import gen_decr_term, gen_guarded_system, gen_term, rngs

x, y, z, m, n = (Var(v) for v in "xyzmn")
X, Y = Var("X", AGENT), Var("Y", AGENT)
A, B = Const("A", AGENT), Const("B", AGENT)


def f(t):
    return App("f", (t,))


def g(*ts):
    return App("g", ts)


# -- substitution and free variables ---------------------------------------------------

def test_substitute_instantiates_agent():
    t = enc(pk(Y), pair(X, m))
    assert substitute(t, {Y: B}) == enc(pk(B), pair(X, m))


def test_substitute_empty_is_identity():
    assert substitute(y, {}) == y


def test_substitute_duplicates():
    assert substitute(pair(y, y), {y: f(x)}) == pair(f(x), f(x))


def test_substitute_rejects_sort_change():
    with pytest.raises(SortError):
        substitute(pk(X), {X: m})


def test_substitute_avoids_mu_capture():
    t = Mu(y, pair(y, x))
    out = substitute(t, {x: y})
    assert free_vars(out) == {y}
    assert term_equal(out, pair(out, y))


def test_free_vars():
    assert free_vars(enc(pk(X), y)) == {X, y}
    assert free_vars(Mu(y, g(y, x))) == {x}
    assert free_vars(dec(sk(Var("Y'", AGENT)), Var("u'"))) == {Var("Y'", AGENT), Var("u'")}


def test_agent_operations_need_agents():
    with pytest.raises(SortError):
        pk(m)
    with pytest.raises(ArityError):
        App("E", (m,))


def test_mu_must_be_guarded():
    with pytest.raises(StateError):
        Mu(y, y)


@settings(max_examples=200, deadline=None)
@given(rngs())
def test_substitution_composition(rng):
    vs = [x, y, z]
    t = gen_term(rng, vs, [], 3)
    sigma = {v: gen_term(rng, vs, [], 2) for v in vs if rng.random() < 0.6}
    tau = {v: gen_term(rng, vs, [], 2) for v in vs if rng.random() < 0.6}
    assert substitute(substitute(t, sigma), tau) == substitute(t, compose_subst(sigma, tau))


# -- the decryption rule -------------------------------------------------------------------

def test_decrypt_redex():
    assert normalize_decr(dec(sk(A), enc(pk(A), m))) == m


def test_key_mismatch_is_stuck():
    t = dec(sk(A), enc(pk(B), m))
    assert normalize_decr(t) == t


def test_independent_redexes():
    t = pair(dec(sk(A), enc(pk(A), m)), dec(sk(A), enc(pk(A), n)))
    assert normalize_decr(t) == pair(m, n)


def test_nested_redex_created_by_rewriting():
    inner = dec(sk(B), enc(pk(B), enc(pk(A), m)))
    assert normalize_decr(dec(sk(A), inner)) == m


@settings(max_examples=200, deadline=None)
@given(rngs())
def test_rewriting_is_confluent(rng):
    t = gen_decr_term(rng, 6)
    expected = normalize_decr(t)
    assert redex_positions(expected) == []
    u, steps = t, 0
    while True:
        ps = redex_positions(u)
        if not ps:
            break
        u = rewrite_at(u, rng.choice(ps))
        steps += 1
        assert steps < 200
    assert u == expected


# -- guarded systems --------------------------------------------------------------------

def test_partition_pure_renaming_cycle():
    y1, y2 = Var("y1"), Var("y2")
    part = partition_system(GuardedSystem((y1, y2), {y1: y2, y2: y1}))
    assert part.guarded.traced == ()
    assert part.classes == ((y1, frozenset({y1, y2})),)


def test_partition_guarded_only():
    y1 = Var("y1")
    part = partition_system(GuardedSystem((y1,), {y1: g(x, x)}))
    assert part.guarded.rhs == {y1: g(x, x)}
    assert part.classes == ()


def test_partition_mixed():
    y1, y2 = Var("y1"), Var("y2")
    sys_ = GuardedSystem((y1, y2), {y1: y2, y2: f(y1)})
    part = partition_system(sys_)
    assert part.guarded.rhs == {y1: f(y1)}
    assert part.classes == ((y1, frozenset({y1, y2})),)
    sol = solve_iterative(part).subst
    for v, t in sys_.rhs.items():
        assert term_equal(substitute(t, sol), sol[v])


def test_solve_acyclic():
    sol = solve_iterative(GuardedSystem((y,), {y: g(x, x)}))
    assert sol.subst == {y: g(x, x)} and not sol.nonfinite


def test_solve_self_loop():
    sol = solve_iterative(GuardedSystem((y,), {y: f(y)}))
    assert sol.subst == {y: Mu(y, f(y))} and sol.nonfinite


def test_solve_mutual_recursion():
    y1, y2 = Var("y1"), Var("y2")
    sol = solve_iterative(GuardedSystem((y1, y2), {y1: pair(y2, x), y2: enc(pk(A), y1)})).subst
    s1 = Mu(y1, pair(enc(pk(A), y1), x))
    assert term_equal(sol[y1], s1)
    assert term_equal(sol[y2], enc(pk(A), s1))
    assert _prefix(sol[y1], 10) == _prefix(s1, 10)


def test_solve_rejects_unpartitioned():
    y1, y2 = Var("y1"), Var("y2")
    with pytest.raises(StateError):
        solve_iterative(GuardedSystem((y1, y2), {y1: y2, y2: f(y1)}))


def test_free_representative_maps_to_itself():
    sol = solve_iterative(partition_system(GuardedSystem((y,), {y: y})))
    assert sol.subst == {y: y} and sol.free == (y,)


@settings(max_examples=150, deadline=None)
@given(rngs())
def test_fixpoint_law(rng):
    _, sys_ = gen_guarded_system(rng, rng.randint(1, 3))
    sol = solve_iterative(partition_system(sys_)).subst
    for v, t in sys_.rhs.items():
        assert term_equal(substitute(t, sol), sol[v])


@settings(max_examples=150, deadline=None)
@given(rngs())
def test_elimination_order_does_not_matter(rng):
    _, sys_ = gen_guarded_system(rng, 3)
    part = partition_system(sys_)
    base = solve_iterative(part).subst
    order = list(part.guarded.traced)
    rng.shuffle(order)
    other = solve_iterative(part, order).subst
    assert all(term_equal(base[v], other[v]) for v in sys_.traced)


# -- rational trees ------------------------------------------------------------------------

def test_unfold_examples():
    assert unfold(Mu(y, f(y)), 2) == f(f(BOTTOM))
    assert unfold(g(x, x), 5) == g(x, x)
    a = Const("a")
    assert unfold(Mu(y, pair(a, y)), 3) == pair(a, pair(a, pair(a, BOTTOM)))


def _self_substitute(t: Mu, d: int):
    """``d`` rounds of ``y := body`` starting from bottom."""
    cur = BOTTOM
    for _ in range(d):
        cur = substitute(t.body, {t.var: cur})
    return cur


@settings(max_examples=100, deadline=None)
@given(rngs())
def test_unfold_matches_self_substitution(rng):
    body = gen_term(rng, [x, y], [], 2)
    if body == y:
        body = f(y)
    t = Mu(y, body)
    d = rng.randint(0, 10)
    assert unfold(t, d) == _self_substitute(t, d)


def test_term_equal_examples():
    s = Mu(y, f(y))
    assert term_equal(s, f(s))
    assert term_equal(s, Mu(z, f(z)))
    assert term_equal(Mu(y, f(f(y))), s)
    # prefix oracle: both trees cut at the same height
    assert _prefix(Mu(y, f(f(y))), 12) == _prefix(s, 12)
    assert not term_equal(Mu(y, f(y)), Mu(y, g(y, y)))


def _prefix(t, height):
    """Tree cut at a given height, as nested tuples."""
    from cordcat.terms import unroll
    t = unroll(t)
    if height == 0:
        return "..."
    if isinstance(t, App):
        return (t.op,) + tuple(_prefix(a, height - 1) for a in t.args)
    return str(t)


@settings(max_examples=100, deadline=None)
@given(rngs())
def test_canonical_term_decides_equality(rng):
    _, sys_ = gen_guarded_system(rng, 2)
    sol = solve_iterative(partition_system(sys_)).subst
    a, b = sol[sys_.traced[0]], sol[sys_.traced[1]]
    assert (canonical_term(a) == canonical_term(b)) == term_equal(a, b)
    assert _prefix(a, 8) == _prefix(canonical_term(a), 8)


# -- clones ------------------------------------------------------------------------------

def test_clone_compose_examples():
    x1, x2 = Var("x1"), Var("x2")
    a, b, s, t = (Const(c) for c in "abst")
    assert clone_compose([x1], [g(x1, x1)]) == [g(x1, x1)]
    assert clone_compose([g(x1, x2)], [a, b]) == [g(a, b)]
    assert clone_compose([x2, x1], [s, t]) == [t, s]


def test_clone_compose_arity_mismatch():
    with pytest.raises(ArityError):
        clone_compose([g(Var("x1"), Var("x2"))], [Const("a")])
