"""Cord processes ``(x)[P]<s>`` and their traced monoidal structure.

Objects are tuples of sorts.  Composition wires outputs to inputs by
substitution and orders the composite by information flow; tensor is
juxtaposition; the trace feeds trailing outputs back into trailing inputs
by solving the induced equation system.
"""

from __future__ import annotations

import itertools
import re
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence, Union

from .cords import (CordSpace, EMPTY, Event, Match, Recv, New, bv, flow_pairs, fv,
                    map_action, oslash, par, sccs, subst_event, action_terms)
from .errors import ArityError, SortError
from .terms import (AGENT, DATA, GuardedSystem, Term, Var, canonical_term, contains_mu,
                    free_vars, fresh_name, partition_system, solve_iterative, sort_of,
                    substitute, Mu, App)


@dataclass(frozen=True)
class ProcessType:
    agent_arity: int
    data_arity: int

    def __post_init__(self) -> None:
        if self.agent_arity < 0 or self.data_arity < 0:
            raise ValueError("arities are non-negative")


def ptype(sorts: Sequence[str]) -> ProcessType:
    return ProcessType(sum(s == AGENT for s in sorts), sum(s == DATA for s in sorts))


@dataclass(frozen=True)
class CordProcess:
    inputs: tuple = ()
    space: CordSpace = EMPTY
    outputs: tuple = ()
    out_sorts: Optional[tuple] = None
    # variables left free by a trace (unsolved representatives); renamed like bound ones
    freed: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "freed", frozenset(self.freed))
        if self.out_sorts is None:
            object.__setattr__(self, "out_sorts", tuple(sort_of(t) for t in self.outputs))
        else:
            object.__setattr__(self, "out_sorts", tuple(self.out_sorts))
        if len(set(self.inputs)) != len(self.inputs) or not all(isinstance(v, Var) for v in self.inputs):
            raise ArityError("input interface must list distinct variables")
        if len(self.out_sorts) != len(self.outputs):
            raise ArityError("one sort per output")
        for t, s in zip(self.outputs, self.out_sorts):
            if s == AGENT and sort_of(t) != AGENT:
                raise SortError(f"output {t} is declared agent-sorted")

    @property
    def dom(self) -> tuple:
        return tuple(v.sort for v in self.inputs)

    @property
    def cod(self) -> tuple:
        return self.out_sorts

    @property
    def type(self) -> tuple:
        return ptype(self.dom), ptype(self.cod)

    @property
    def nonfinite(self) -> bool:
        """True when some term is a genuinely cyclic (mu) solution."""
        return any(contains_mu(t) for t in self._terms())

    def _terms(self) -> list:
        out = list(self.outputs)
        for e in self.space.events:
            out.append(e.agent)
            out.extend(action_terms(e.action))
        return out

    def bound_vars(self) -> frozenset:
        return self.space.bound_vars()

    def free_vars(self) -> frozenset:
        used: frozenset = frozenset()
        for t in self._terms():
            used |= free_vars(t)
        return used - set(self.inputs) - self.bound_vars()

    def local_vars(self) -> frozenset:
        return frozenset(self.inputs) | self.bound_vars() | (self.freed & self.free_vars())

    def var_names(self) -> set:
        return {v.name for v in self.local_vars() | self.free_vars()}

    def __str__(self) -> str:
        from .dsl import print_process
        return print_process(self)


def process_type(p: CordProcess) -> tuple:
    return p.type


# -- renaming -----------------------------------------------------------------

def _rename_event(e: Event, ren: Mapping[Var, Var]) -> Event:
    fn = lambda t: substitute(t, ren)
    return Event(e.label, map_action(e.action, fn, lambda v: ren.get(v, v)), fn(e.agent))


def rename_vars(p: CordProcess, ren: Mapping[Var, Var]) -> CordProcess:
    """Rename variables everywhere (inputs, binders, uses)."""
    if not ren:
        return p
    space = CordSpace(tuple(_rename_event(e, ren) for e in p.space.events), p.space.order)
    return CordProcess(
        tuple(ren.get(v, v) for v in p.inputs),
        space,
        tuple(substitute(t, ren) for t in p.outputs),
        p.out_sorts,
        frozenset(ren.get(v, v) for v in p.freed),
    )


def rename_apart(p: CordProcess, avoid: Iterable[str]) -> CordProcess:
    """Rename the local variables of ``p`` whose names occur in ``avoid``."""
    avoid = set(avoid)
    clash = [v for v in sorted(p.local_vars()) if v.name in avoid]
    if not clash:
        return p
    taken = avoid | p.var_names()
    ren = {}
    for v in clash:
        new = fresh_name(v.name, taken)
        taken.add(new)
        ren[v] = Var(new, v.sort)
    return rename_vars(p, ren)


def _apart_pair(p: CordProcess, q: CordProcess) -> tuple:
    q = rename_apart(q, p.var_names())
    p = rename_apart(p, {v.name for v in q.free_vars() - q.freed} | q.var_names() - p.var_names())
    return p, q


# -- category structure ----------------------------------------------------------

def identity(tau: Union[int, Sequence[str]]) -> CordProcess:
    """The buffer ``(x1..xn)[]<x1..xn>``."""
    sorts = (DATA,) * tau if isinstance(tau, int) else tuple(tau)
    xs = tuple(Var(f"x{i + 1}", s) for i, s in enumerate(sorts))
    return CordProcess(xs, EMPTY, xs, sorts)


def pi(f: Sequence[int], m: Union[int, Sequence[str]]) -> CordProcess:
    """``pi_f : m -> n`` for ``f : n -> m`` (0-based table), rearranging inputs."""
    sorts = (DATA,) * m if isinstance(m, int) else tuple(m)
    xs = tuple(Var(f"x{i + 1}", s) for i, s in enumerate(sorts))
    if any(not 0 <= j < len(xs) for j in f):
        raise ArityError(f"function {list(f)} does not land in {len(xs)}")
    return CordProcess(xs, EMPTY, tuple(xs[j] for j in f), tuple(sorts[j] for j in f))


def swap(a: Union[int, Sequence[str]], b: Union[int, Sequence[str]]) -> CordProcess:
    sa = (DATA,) * a if isinstance(a, int) else tuple(a)
    sb = (DATA,) * b if isinstance(b, int) else tuple(b)
    na, nb = len(sa), len(sb)
    return pi(list(range(na, na + nb)) + list(range(na)), sa + sb)


def reorder(p: CordProcess, in_perm: Sequence[int], out_perm: Sequence[int]) -> CordProcess:
    """Permute the interfaces; equal to composing with ``pi`` on either side."""
    if sorted(in_perm) != list(range(len(p.inputs))) or sorted(out_perm) != list(range(len(p.outputs))):
        raise ArityError("reorder needs permutations of the interfaces")
    return CordProcess(
        tuple(p.inputs[i] for i in in_perm), p.space,
        tuple(p.outputs[i] for i in out_perm), tuple(p.out_sorts[i] for i in out_perm), p.freed,
    )


def compose(p: CordProcess, q: CordProcess) -> CordProcess:
    """``p`` then ``q``: ``(x)[P oslash Q(s/y)]<t(s/y)>``."""
    if p.cod != q.dom:
        raise ArityError(f"cannot compose {p.cod} -> with -> {q.dom}")
    p, q = _apart_pair(p, q)
    sigma = dict(zip(q.inputs, p.outputs))
    space = oslash(p.space, q.space, sigma)
    outputs = tuple(substitute(t, sigma) for t in q.outputs)
    return CordProcess(p.inputs, space, outputs, q.out_sorts, p.freed | q.freed)


def tensor(p: CordProcess, q: CordProcess) -> CordProcess:
    p, q = _apart_pair(p, q)
    return CordProcess(p.inputs + q.inputs, par(p.space, q.space), p.outputs + q.outputs,
                       p.out_sorts + q.out_sorts, p.freed | q.freed)


def tensor_all(ps: Iterable[CordProcess]) -> CordProcess:
    out = identity(0)
    for p in ps:
        out = tensor(out, p)
    return out


def compose_all(ps: Iterable[CordProcess]) -> CordProcess:
    ps = list(ps)
    out = ps[0]
    for p in ps[1:]:
        out = compose(out, p)
    return out


def trace(p: CordProcess, ell: int) -> CordProcess:
    """Feed the last ``ell`` outputs back into the last ``ell`` inputs."""
    if ell == 0:
        return p
    if ell > len(p.inputs) or ell > len(p.outputs):
        raise ArityError(f"cannot trace {ell} wires of {len(p.inputs)} -> {len(p.outputs)}")
    m, n = len(p.inputs) - ell, len(p.outputs) - ell
    ys = p.inputs[m:]
    if tuple(v.sort for v in ys) != p.out_sorts[n:]:
        raise ArityError("traced inputs and outputs differ in sort")
    system = GuardedSystem(ys, dict(zip(ys, p.outputs[n:])))
    sol = solve_iterative(partition_system(system))
    sigma = {y: t for y, t in sol.subst.items() if t != y}
    events = tuple(subst_event(e, sigma) for e in p.space.events)
    extra = flow_pairs(events, events)
    space = CordSpace(events, p.space.order | extra)
    outputs = tuple(substitute(t, sigma) for t in p.outputs[:n])
    out = CordProcess(p.inputs[:m], space, outputs, p.out_sorts[:n], p.freed)
    freed = (p.freed | set(sol.free)) & out.free_vars()
    return replace(out, freed=freed)


def restrict_context(p: CordProcess, vs: Iterable[Union[Var, str]]) -> bool:
    """Does ``p`` live in the subcategory of processes with free variables among ``vs``?"""
    names = {v.name if isinstance(v, Var) else v for v in vs}
    return all(v.name in names for v in p.free_vars())


# -- alpha-canonical form -------------------------------------------------------------

_PLACEHOLDER = "?"
_TIE_LIMIT = 720


def _ordered_vars(t: Term, out: list, bound: tuple = ()) -> None:
    if isinstance(t, Var):
        if t not in bound and t not in out:
            out.append(t)
    elif isinstance(t, App):
        for a in t.args:
            _ordered_vars(a, out, bound)
    elif isinstance(t, Mu):
        _ordered_vars(t.body, out, bound + (t.var,))


def _event_key(e: Event, ren: Mapping[Var, Var]) -> str:
    e = _rename_event(e, ren)
    a = e.action
    terms = [canonical_term(t) for t in action_terms(a)]
    extra = ""
    if isinstance(a, Match):
        extra = "|" + ",".join("b" if t in a.binders else "c" for t in a.pattern)
    elif isinstance(a, Recv):
        extra = f"|{len(a.binders)}"
    return f"{canonical_term(e.agent)}:{type(a).__name__}{extra}:{';'.join(map(str, terms))}"


def _depths(space: CordSpace) -> dict:
    comps = sccs(space)
    idx = {l: i for i, c in enumerate(comps) for l in c}
    succ = {i: set() for i in range(len(comps))}
    for a, b in space.order:
        if idx[a] != idx[b]:
            succ[idx[a]].add(idx[b])
    depth = {i: 0 for i in succ}
    # longest path from sources; comps count is small
    changed = True
    while changed:
        changed = False
        for i, ss in succ.items():
            for j in ss:
                if depth[j] < depth[i] + 1:
                    depth[j] = depth[i] + 1
                    changed = True
    return {l: depth[idx[l]] for l in space.labels}


def canonical_order(labels: Sequence[str], closure: Mapping[str, set]) -> frozenset:
    """A canonical generating set for a preorder: complete inside each SCC,
    transitive reduction between SCCs."""
    comp = {l: frozenset(m for m in closure[l] if l in closure[m]) for l in labels}
    out = set()
    for a in labels:
        for b in closure[a]:
            if a == b:
                continue
            if comp[a] == comp[b]:
                out.add((a, b))
                continue
            between = any(
                c not in comp[a] and c not in comp[b] and b in closure[c]
                for c in closure[a]
            )
            if not between:
                out.add((a, b))
    return frozenset(out)


def alpha_canonical(p: CordProcess) -> CordProcess:
    """Deterministic representative of the renaming class of ``p``.

    Inputs are numbered by position, events are ordered by causal depth and
    a structural colouring (ties broken by trying every arrangement of the
    tied events and keeping the least), bound variables are numbered in the
    order their binders appear, and labels become ``e0, e1, ...``.
    """
    space = p.space
    bound = p.bound_vars()
    freed = p.freed & p.free_vars()
    plain_free = p.free_vars() - freed
    taken = {v.name for v in plain_free}
    prefix = ""
    while any(re.fullmatch(re.escape(prefix) + r"[xXuUfF]\d+", n) for n in taken):
        prefix += "_"

    def name(kind: str, i: int, sort: str) -> str:
        return f"{prefix}{kind.upper() if sort == AGENT else kind}{i}"

    input_ren = {v: Var(name("x", i, v.sort), v.sort) for i, v in enumerate(p.inputs)}
    hole = {v: Var(_PLACEHOLDER, v.sort) for v in (bound | freed) - set(p.inputs)}
    key_ren = {**hole, **input_ren}

    labels = space.labels
    depth = _depths(space)
    color = {l: (depth[l], _event_key(space.event(l), key_ren)) for l in labels}
    cl = space.closure
    binders_of: dict = {}
    for e in space.events:
        for v in bv(e):
            binders_of.setdefault(v, []).append(e.label)
    uses = {e.label: fv(e) for e in space.events}

    def rank(c: Mapping[str, tuple]) -> dict:
        order = sorted(set(c.values()))
        pos = {v: i for i, v in enumerate(order)}
        return {l: pos[c[l]] for l in labels}

    col = rank(color)
    for _ in range(len(labels)):
        sig = {}
        for l in labels:
            preds = sorted(col[m] for m in labels if m != l and l in cl[m])
            succs = sorted(col[m] for m in cl[l] if m != l)
            src = sorted(col[b] for v in uses[l] for b in binders_of.get(v, ()) if b != l)
            dst = sorted(col[u] for v in bv(space.event(l)) for u in labels if u != l and v in uses[u])
            sig[l] = (col[l], tuple(preds), tuple(succs), tuple(src), tuple(dst))
        new = rank(sig)
        if len(set(new.values())) == len(set(col.values())):
            break
        col = new

    groups: dict = {}
    for l in sorted(labels, key=lambda l: (col[l], l)):
        groups.setdefault(col[l], []).append(l)
    ordered_groups = [groups[c] for c in sorted(groups)]
    n_choices = math.prod(math.factorial(len(g)) for g in ordered_groups)
    if n_choices <= _TIE_LIMIT:
        choices = itertools.product(*(itertools.permutations(g) for g in ordered_groups))
    else:
        choices = [tuple(tuple(g) for g in ordered_groups)]

    best, best_key = None, None
    for choice in choices:
        order = [l for g in choice for l in g]
        cand = _build_canonical(p, order, input_ren, bound, freed, name)
        k = _candidate_key(cand)
        if best_key is None or k < best_key:
            best, best_key = cand, k
    return best


def _build_canonical(p, order, input_ren, bound, freed, name) -> CordProcess:
    space = p.space
    ren = dict(input_ren)
    i = 0
    for l in order:
        a = space.event(l).action
        if isinstance(a, Recv):
            bs = list(a.binders)
        elif isinstance(a, New):
            bs = [a.binder]
        elif isinstance(a, Match):
            bs = [t for t in a.pattern if t in a.binders]
        else:
            bs = []
        for v in bs:
            if v not in ren:
                ren[v] = Var(name("u", i, v.sort), v.sort)
                i += 1
    seen: list = []
    for l in order:
        e = space.event(l)
        for t in [e.agent] + action_terms(e.action):
            _ordered_vars(t, seen)
    for t in p.outputs:
        _ordered_vars(t, seen)
    j = 0
    for v in seen:
        if v in freed and v not in ren:
            ren[v] = Var(name("f", j, v.sort), v.sort)
            j += 1
    relabel = {l: f"e{k}" for k, l in enumerate(order)}
    events = []
    for l in order:
        e = _rename_event(space.event(l), ren)
        ct = canonical_term
        events.append(Event(relabel[l], map_action(e.action, ct), ct(e.agent)))
    closure = {relabel[a]: {relabel[b] for b in space.closure[a]} for a in order}
    gens = canonical_order([relabel[l] for l in order], closure)
    return CordProcess(
        tuple(ren[v] for v in p.inputs),
        CordSpace(tuple(events), gens),
        tuple(canonical_term(substitute(t, ren)) for t in p.outputs),
        p.out_sorts,
        frozenset(ren[v] for v in freed if v in ren),
    )


def _candidate_key(p: CordProcess) -> tuple:
    return (
        tuple(str(e) for e in p.space.events),
        tuple(sorted(p.space.order)),
        tuple(map(str, p.outputs)),
    )


def alpha_equal(p: CordProcess, q: CordProcess) -> bool:
    return alpha_canonical(p) == alpha_canonical(q)
