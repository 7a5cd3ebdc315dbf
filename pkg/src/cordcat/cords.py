"""Cord spaces: finite sets of located actions under a temporal preorder.

The preorder is stored as generator pairs; reflexive-transitive closure is
computed on demand.  Cycles are allowed (they are deadlocks, and get
reported rather than collapsed).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

from .errors import LabelError, RunError
from .terms import (Term, Var, free_vars, fresh_name, substitute, AGENT)


# -- actions ------------------------------------------------------------------

@dataclass(frozen=True)
class Send:
    payload: Term
    src: Optional[Term] = None
    dst: Optional[Term] = None

    def __str__(self) -> str:
        return f"send({self.payload})"


@dataclass(frozen=True)
class Recv:
    binders: tuple
    src: Optional[Term] = None
    dst: Optional[Term] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "binders", tuple(self.binders))

    def __str__(self) -> str:
        return f"recv({', '.join(map(str, self.binders))})"


@dataclass(frozen=True)
class New:
    binder: Var

    def __str__(self) -> str:
        return f"new({self.binder})"


@dataclass(frozen=True)
class Match:
    """``match(pattern = against)``.

    ``binders`` are the pattern variables the match assigns; any other
    pattern entry is checked for equality.  When not given, every variable
    entry is a binder.  Pattern and value lists are compared as
    right-nested tuples, so ``match(m, n = D(kb, x))`` destructures a pair.
    """

    pattern: tuple
    against: tuple
    binders: Optional[frozenset] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "pattern", tuple(self.pattern))
        against = (self.against,) if not isinstance(self.against, (tuple, list)) else self.against
        object.__setattr__(self, "against", tuple(against))
        if self.binders is None:
            object.__setattr__(self, "binders", frozenset(t for t in self.pattern if isinstance(t, Var)))
        else:
            object.__setattr__(self, "binders", frozenset(self.binders))
        if not self.binders <= set(self.pattern):
            raise ValueError("match binders must be pattern entries")

    def __str__(self) -> str:
        return f"match({', '.join(map(str, self.pattern))} = {', '.join(map(str, self.against))})"


Action = Union[Send, Recv, New, Match]


@dataclass(frozen=True)
class Event:
    label: str
    action: Action
    agent: Term

    def __str__(self) -> str:
        return f"{self.label}@{self.agent}: {self.action}"


def bv(x: Union[Action, Event]) -> frozenset:
    a = x.action if isinstance(x, Event) else x
    if isinstance(a, Recv):
        return frozenset(a.binders)
    if isinstance(a, New):
        return frozenset((a.binder,))
    if isinstance(a, Match):
        return a.binders
    return frozenset()


def _terms_fv(terms: Iterable[Optional[Term]]) -> frozenset:
    out: frozenset = frozenset()
    for t in terms:
        if t is not None:
            out |= free_vars(t)
    return out


def fv(x: Union[Action, Event]) -> frozenset:
    """Free variables used by an action; for an event, its locality too."""
    if isinstance(x, Event):
        return fv(x.action) | free_vars(x.agent)
    if isinstance(x, Send):
        return _terms_fv((x.payload, x.src, x.dst))
    if isinstance(x, Recv):
        return _terms_fv((x.src, x.dst))
    if isinstance(x, Match):
        checks = [t for t in x.pattern if t not in x.binders]
        return _terms_fv(list(x.against) + checks)
    return frozenset()


def action_terms(a: Action) -> list:
    if isinstance(a, Send):
        return [t for t in (a.payload, a.src, a.dst) if t is not None]
    if isinstance(a, Recv):
        return [t for t in (a.src, a.dst) if t is not None]
    if isinstance(a, Match):
        return [t for t in a.pattern if t not in a.binders] + list(a.against)
    return []


def _opt(t: Optional[Term], fn) -> Optional[Term]:
    return None if t is None else fn(t)


def map_action(a: Action, term_fn, var_fn=None) -> Action:
    """Apply ``term_fn`` to the used terms and ``var_fn`` to the binders."""
    var_fn = var_fn or (lambda v: v)
    if isinstance(a, Send):
        return Send(term_fn(a.payload), _opt(a.src, term_fn), _opt(a.dst, term_fn))
    if isinstance(a, Recv):
        return Recv(tuple(var_fn(v) for v in a.binders), _opt(a.src, term_fn), _opt(a.dst, term_fn))
    if isinstance(a, New):
        return New(var_fn(a.binder))
    pattern = tuple(var_fn(t) if t in a.binders else term_fn(t) for t in a.pattern)
    return Match(pattern, tuple(term_fn(t) for t in a.against), frozenset(var_fn(v) for v in a.binders))


def subst_event(e: Event, sigma: Mapping[Var, Term]) -> Event:
    sigma = {v: s for v, s in sigma.items() if v not in bv(e)}
    fn = lambda t: substitute(t, sigma)
    return Event(e.label, map_action(e.action, fn), fn(e.agent))


# -- cord spaces ----------------------------------------------------------------

@dataclass(frozen=True)
class CordSpace:
    events: tuple = ()
    order: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "order", frozenset(self.order))
        labels = [e.label for e in self.events]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate labels in {labels}")
        known = set(labels)
        for a, b in self.order:
            if a not in known or b not in known:
                raise LabelError(f"order generator ({a}, {b}) names an unknown label")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CordSpace):
            return NotImplemented
        return set(self.events) == set(other.events) and self.order == other.order

    def __hash__(self) -> int:
        return hash((frozenset(self.events), self.order))

    def __len__(self) -> int:
        return len(self.events)

    @cached_property
    def by_label(self) -> dict:
        return {e.label: e for e in self.events}

    @property
    def labels(self) -> list:
        return [e.label for e in self.events]

    def event(self, label: str) -> Event:
        try:
            return self.by_label[label]
        except KeyError:
            raise LabelError(label) from None

    @cached_property
    def successors(self) -> dict:
        succ = {l: set() for l in self.labels}
        for a, b in self.order:
            succ[a].add(b)
        return succ

    @cached_property
    def closure(self) -> dict:
        """label -> set of labels it precedes (reflexive)."""
        return _closure(self.labels, self.successors)

    def bound_vars(self) -> frozenset:
        out: frozenset = frozenset()
        for e in self.events:
            out |= bv(e)
        return out

    def used_vars(self) -> frozenset:
        out: frozenset = frozenset()
        for e in self.events:
            out |= fv(e)
        return out

    def with_events(self, events: Iterable[Event], extra: Iterable = ()) -> "CordSpace":
        return CordSpace(tuple(events), self.order | frozenset(extra))


def _closure(labels: Iterable[str], succ: Mapping[str, Iterable[str]]) -> dict:
    out = {}
    for l in labels:
        seen = {l}
        stack = [l]
        while stack:
            for n in succ.get(stack.pop(), ()):
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        out[l] = seen
    return out


EMPTY = CordSpace()


def recvs(p: CordSpace) -> set:
    return {e.label for e in p.events if isinstance(e.action, Recv)}


def sends(p: CordSpace) -> set:
    return {e.label for e in p.events if isinstance(e.action, Send)}


def freshen_labels(q: CordSpace, avoid: Iterable[str]) -> tuple:
    """Rename labels of ``q`` that clash with ``avoid``; returns (space, renaming)."""
    avoid = set(avoid)
    taken = avoid | set(q.labels)
    ren = {}
    for l in q.labels:
        if l in avoid:
            new = fresh_name(l, taken)
            taken.add(new)
            ren[l] = new
    if not ren:
        return q, {}
    return relabel(q, ren), ren


def relabel(q: CordSpace, ren: Mapping[str, str]) -> CordSpace:
    r = lambda l: ren.get(l, l)
    events = tuple(Event(r(e.label), e.action, e.agent) for e in q.events)
    return CordSpace(events, frozenset((r(a), r(b)) for a, b in q.order))


def par(p: CordSpace, q: CordSpace) -> CordSpace:
    """Parallel composition: disjoint union, no cross ordering."""
    q, _ = freshen_labels(q, p.labels)
    return CordSpace(p.events + q.events, p.order | q.order)


def seq(p: CordSpace, q: CordSpace) -> CordSpace:
    """Sequential composition: every event of ``p`` precedes every event of ``q``."""
    q, _ = freshen_labels(q, p.labels)
    cross = {(a, b) for a in p.labels for b in q.labels}
    return CordSpace(p.events + q.events, p.order | q.order | cross)


def flow_pairs(sources: Iterable[Event], targets: Iterable[Event]) -> set:
    """Pairs (a, b) with a != b where a binds a variable that b uses."""
    targets = list(targets)
    out = set()
    for a in sources:
        bound = bv(a)
        if not bound:
            continue
        for b in targets:
            if a.label != b.label and bound & fv(b):
                out.add((a.label, b.label))
    return out


def oslash(p: CordSpace, q: CordSpace, sigma: Mapping[Var, Term]) -> CordSpace:
    """Parallel composition of ``p`` with ``q(sigma)``, ordered by information flow.

    An event of ``q`` that (after substitution) uses a variable bound by an
    event of ``p`` is placed after it.  Labels of ``q`` are freshened on clash.
    """
    q, _ = freshen_labels(q, p.labels)
    q_events = tuple(subst_event(e, sigma) for e in q.events)
    cross = flow_pairs(p.events, q_events)
    return CordSpace(p.events + q_events, p.order | q.order | cross)


def preceq(p: CordSpace, a: str, b: str) -> bool:
    if a not in p.by_label:
        raise LabelError(a)
    if b not in p.by_label:
        raise LabelError(b)
    return b in p.closure[a]


def sccs(p: CordSpace) -> list:
    """Strongly connected components (as frozensets), in label order of first member."""
    cl = p.closure
    seen, out = set(), []
    for l in p.labels:
        if l in seen:
            continue
        comp = frozenset(m for m in cl[l] if l in cl[m])
        seen |= comp
        out.append(comp)
    return out


def temporal_cycles(p: CordSpace) -> list:
    selfloops = {a for a, b in p.order if a == b}
    return [c for c in sccs(p) if len(c) >= 2 or (c & selfloops)]


# -- runs -----------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    label: str
    send: str

    def __str__(self) -> str:
        return f"receive {self.label} cannot take its message from {self.send}: {self.label} already precedes it"


def check_run_shape(p: CordSpace, run: Mapping[str, str]) -> None:
    rs, ss = recvs(p), sends(p)
    missing = rs - set(run)
    if missing:
        raise RunError(f"run is not total: no send for {sorted(missing)}")
    for l, k in run.items():
        if l not in rs:
            raise RunError(f"{l} is not a receive")
        if k not in ss:
            raise RunError(f"{k} is not a send")


def run_extended(p: CordSpace, run: Mapping[str, str]) -> CordSpace:
    return CordSpace(p.events, p.order | {(k, l) for l, k in run.items()})


def validate_run(p: CordSpace, run: Mapping[str, str]) -> Optional[Violation]:
    """``None`` if the run is correct, else the first offending receive.

    A receive ``l`` served by send ``k`` is offending when ``l`` precedes
    ``k`` once all the run's send-before-receive pairs are added.
    """
    check_run_shape(p, run)
    ext = run_extended(p, run)
    for l in sorted(run):
        k = run[l]
        if k in ext.closure[l]:
            return Violation(l, k)
    return None


def is_injective(run: Mapping[str, str]) -> bool:
    """Lint: does every send feed at most one receive?"""
    return len(set(run.values())) == len(run)


def union_runs(run_p: Mapping[str, str], run_q: Mapping[str, str],
               composite: Optional[CordSpace] = None,
               q_relabel: Optional[Mapping[str, str]] = None) -> dict:
    """Disjoint union of two runs; ``q_relabel`` tracks labels freshened during composition."""
    r = (lambda l: q_relabel.get(l, l)) if q_relabel else (lambda l: l)
    out = dict(run_p)
    for l, k in run_q.items():
        if r(l) in out:
            raise RunError(f"runs overlap at {r(l)}")
        out[r(l)] = r(k)
    if composite is not None:
        bad = validate_run(composite, out)
        if bad is not None:
            raise RunError(str(bad))
    return out


def linearizations_sample(p: CordSpace, rng) -> list:
    """A random topological order of the SCC condensation (members of an SCC adjacent)."""
    comps = sccs(p)
    idx = {l: i for i, c in enumerate(comps) for l in c}
    preds = {i: set() for i in range(len(comps))}
    for a, b in p.order:
        if idx[a] != idx[b]:
            preds[idx[b]].add(idx[a])
    out, done = [], set()
    while len(done) < len(comps):
        ready = [i for i in preds if i not in done and preds[i] <= done]
        i = rng.choice(ready)
        done.add(i)
        out.extend(sorted(comps[i]))
    return out
