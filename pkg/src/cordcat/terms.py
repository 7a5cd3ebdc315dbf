"""Symbolic message terms.

Two-sorted first-order terms (agents and data, agents being a subset of
data), the decryption rewrite ``D(kbar(w), E(k(w), s)) -> s``, and the
iterative structure that solves guarded equation systems.  Solutions of
cyclic systems are rational trees, written as ``mu`` terms; equality of
rational trees is decided by bisimulation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import ArityError, SortError, StateError

DATA = "data"
AGENT = "agent"
SORTS = (DATA, AGENT)

# Built-in signature.  Operations outside it are allowed, with arity fixed by use.
SIGNATURE = {"pair": 2, "E": 2, "D": 2, "k": 1, "kbar": 1}
_AGENT_ARG_OPS = {"k", "kbar"}


@dataclass(frozen=True, order=True)
class Var:
    name: str
    sort: str = DATA

    def __post_init__(self) -> None:
        if self.sort not in SORTS:
            raise SortError(f"unknown sort {self.sort!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str
    sort: str = DATA

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class OpSym:
    name: str
    arity: int


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        want = SIGNATURE.get(self.op)
        if want is not None and want != len(self.args):
            raise ArityError(f"{self.op} takes {want} arguments, got {len(self.args)}")
        if self.op in _AGENT_ARG_OPS and sort_of(self.args[0]) != AGENT:
            raise SortError(f"{self.op} expects an agent, got {self.args[0]}")

    @property
    def sym(self) -> OpSym:
        return OpSym(self.op, len(self.args))

    def __str__(self) -> str:
        if self.op == "pair":
            return f"({self.args[0]}, {self.args[1]})"
        return f"{self.op}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Mu:
    """``mu var. body`` -- the unique solution of ``var = body``."""

    var: Var
    body: "Term"

    def __post_init__(self) -> None:
        core, binders = self.body, {self.var}
        while isinstance(core, Mu):
            binders.add(core.var)
            core = core.body
        if isinstance(core, Var) and core in binders:
            raise StateError(f"unguarded mu-term: mu {self.var}. {self.body}")

    def __str__(self) -> str:
        return f"mu {self.var}. {self.body}"


@dataclass(frozen=True)
class Bottom:
    """Opaque marker left by :func:`unfold` where unrolling stopped."""

    def __str__(self) -> str:
        return "⊥"


BOTTOM = Bottom()

Term = Union[Var, Const, App, Mu, Bottom]
Subst = Mapping[Var, Term]


# -- constructors ---------------------------------------------------------

def pair(a: Term, b: Term) -> App:
    return App("pair", (a, b))


def tup(items: Sequence[Term]) -> Term:
    """Right-nested pairing: ``(a, b, c)`` is ``(a, (b, c))``."""
    if not items:
        raise ArityError("empty tuple")
    out = items[-1]
    for t in reversed(items[:-1]):
        out = pair(t, out)
    return out


def enc(key: Term, msg: Term) -> App:
    return App("E", (key, msg))


def dec(key: Term, msg: Term) -> App:
    return App("D", (key, msg))


def pk(agent: Term) -> App:
    return App("k", (agent,))


def sk(agent: Term) -> App:
    return App("kbar", (agent,))


def sort_of(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.sort
    return DATA


# -- variables and substitution --------------------------------------------

def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, App):
        out: frozenset = frozenset()
        for a in t.args:
            out |= free_vars(a)
        return out
    if isinstance(t, Mu):
        return free_vars(t.body) - {t.var}
    return frozenset()


def all_names(t: Term) -> set:
    """Names of every variable in ``t``, free or mu-bound."""
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(all_names(a) for a in t.args)) if t.args else set()
    if isinstance(t, Mu):
        return {t.var.name} | all_names(t.body)
    return set()


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def check_subst(sigma: Subst) -> None:
    for v, s in sigma.items():
        if v.sort == AGENT and sort_of(s) != AGENT:
            raise SortError(f"agent variable {v} cannot be bound to {s}")


def substitute(t: Term, sigma: Subst) -> Term:
    """Simultaneous, capture-avoiding substitution."""
    check_subst(sigma)
    return _subst(t, dict(sigma))


def _subst(t: Term, sigma: dict) -> Term:
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    if isinstance(t, App):
        return App(t.op, tuple(_subst(a, sigma) for a in t.args))
    if isinstance(t, Mu):
        inner = {v: s for v, s in sigma.items() if v != t.var}
        fv_body = free_vars(t.body)
        inner = {v: s for v, s in inner.items() if v in fv_body}
        if not inner:
            return t
        range_names = set()
        for s in inner.values():
            range_names |= {v.name for v in free_vars(s)}
        var = t.var
        body = t.body
        if var.name in range_names:
            avoid = range_names | all_names(t.body) | {v.name for v in inner}
            var = Var(fresh_name(t.var.name, avoid), t.var.sort)
            body = _subst(body, {t.var: var})
        return Mu(var, _subst(body, inner))
    return t


def compose_subst(sigma: Subst, tau: Subst) -> dict:
    """The substitution ``sigma ; tau`` (apply sigma first, then tau)."""
    out = {v: substitute(s, tau) for v, s in sigma.items()}
    for v, s in tau.items():
        out.setdefault(v, s)
    return out


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(term_size(a) for a in t.args)
    if isinstance(t, Mu):
        return 1 + term_size(t.body)
    return 1


def contains_mu(t: Term) -> bool:
    if isinstance(t, Mu):
        return True
    if isinstance(t, App):
        return any(contains_mu(a) for a in t.args)
    return False


# -- the decryption rule ---------------------------------------------------

def is_redex(t: Term) -> bool:
    if not (isinstance(t, App) and t.op == "D"):
        return False
    key, msg = t.args
    return (
        isinstance(key, App) and key.op == "kbar"
        and isinstance(msg, App) and msg.op == "E"
        and isinstance(msg.args[0], App) and msg.args[0].op == "k"
        and msg.args[0].args[0] == key.args[0]
    )


def normalize_decr(t: Term) -> Term:
    """Exhaustively rewrite ``D(kbar(w), E(k(w), s))`` to ``s``, outermost first."""
    if is_redex(t):
        return normalize_decr(t.args[1].args[1])
    if isinstance(t, App):
        out = App(t.op, tuple(normalize_decr(a) for a in t.args))
        return normalize_decr(out) if is_redex(out) else out
    if isinstance(t, Mu):
        return Mu(t.var, normalize_decr(t.body))
    return t


def redex_positions(t: Term, path: tuple = ()) -> list:
    out = [path] if is_redex(t) else []
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            out.extend(redex_positions(a, path + (i,)))
    elif isinstance(t, Mu):
        out.extend(redex_positions(t.body, path + (0,)))
    return out


def rewrite_at(t: Term, path: tuple) -> Term:
    """Contract the redex at ``path`` (one rewrite step)."""
    if not path:
        if not is_redex(t):
            raise StateError(f"no redex at root of {t}")
        return t.args[1].args[1]
    i, rest = path[0], path[1:]
    if isinstance(t, App):
        args = list(t.args)
        args[i] = rewrite_at(args[i], rest)
        return App(t.op, tuple(args))
    if isinstance(t, Mu):
        return Mu(t.var, rewrite_at(t.body, rest))
    raise StateError(f"bad path {path}")


# -- guarded systems -------------------------------------------------------

@dataclass(frozen=True)
class GuardedSystem:
    traced: tuple
    rhs: Mapping[Var, Term]

    def __post_init__(self) -> None:
        object.__setattr__(self, "traced", tuple(self.traced))
        object.__setattr__(self, "rhs", dict(self.rhs))
        if set(self.rhs) != set(self.traced) or len(set(self.traced)) != len(self.traced):
            raise StateError("every traced variable needs exactly one equation")
        # mu-terms on the right (from earlier traces) are brought to canonical
        # form, so one that denotes a bare variable is seen as unguarded
        object.__setattr__(self, "rhs", {y: canonical_term(t) if contains_mu(t) else t
                                         for y, t in self.rhs.items()})

    def is_unguarded(self, y: Var) -> bool:
        t = self.rhs[y]
        return isinstance(t, Var) and t in self.rhs


@dataclass(frozen=True)
class Partition:
    """A guarded system plus the classes of variables identified by ``y = y'`` equations."""

    guarded: GuardedSystem
    classes: tuple  # of (representative, frozenset of members)

    @property
    def representative(self) -> dict:
        return {m: rep for rep, members in self.classes for m in members}

    @property
    def free_representatives(self) -> tuple:
        """Representatives with no guarded equation: they stay free after solving."""
        return tuple(rep for rep, _ in self.classes if rep not in self.guarded.rhs)


def partition_system(sys: GuardedSystem) -> Partition:
    traced = sys.traced
    pos = {v: i for i, v in enumerate(traced)}
    parent = {v: v for v in traced}

    def find(v: Var) -> Var:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    unguarded = [y for y in traced if sys.is_unguarded(y)]
    for y in unguarded:
        a, b = find(y), find(sys.rhs[y])
        if a != b:
            parent[b] = a

    groups: dict = {}
    for v in traced:
        groups.setdefault(find(v), []).append(v)
    touched = {find(y) for y in unguarded}

    def pick_rep(members: list) -> Var:
        agents = [m for m in members if m.sort == AGENT]
        return min(agents or members, key=pos.__getitem__)

    classes = []
    rename: dict = {}
    for root in sorted(touched, key=pos.__getitem__):
        members = groups[root]
        rep = pick_rep(members)
        classes.append((rep, frozenset(members)))
        rename.update({m: rep for m in members if m != rep})
    classes.sort(key=lambda c: pos[c[0]])

    order, rhs = [], {}
    for y in traced:
        if y in unguarded:
            continue
        key = rename.get(y, y)
        order.append(key)
        rhs[key] = substitute(sys.rhs[y], rename)
    return Partition(GuardedSystem(order, rhs), tuple(classes))


@dataclass(frozen=True)
class Solution:
    subst: dict
    nonfinite: bool
    free: tuple  # representatives left free


def solve_iterative(system: Union[Partition, GuardedSystem], order: Sequence[Var] | None = None) -> Solution:
    """Unique solution of a partitioned guarded system.

    Elimination proceeds in ``order`` (default: the system's own order);
    a variable that still occurs in its own right-hand side is closed off
    with ``mu``.  Class members are mapped to their representative's value.
    """
    part = system if isinstance(system, Partition) else Partition(system, ())
    sys = part.guarded
    for y in sys.traced:
        if sys.is_unguarded(y):
            raise StateError(f"equation {y} = {sys.rhs[y]} is unguarded; partition the system first")
    order = list(sys.traced if order is None else order)
    if sorted(order) != sorted(sys.traced):
        raise StateError("elimination order must list the traced variables")

    rhs = dict(sys.rhs)
    done: list = []
    for i, y in enumerate(order):
        s = rhs[y]
        if y in free_vars(s):
            s = Mu(y, s)
        rhs[y] = s
        for z in order[i + 1:]:
            rhs[z] = substitute(rhs[z], {y: s})
        done.append(y)
    sol: dict = {}
    for y in reversed(order):
        sol[y] = substitute(rhs[y], sol)
    out = {y: sol[y] for y in sys.traced}
    for rep, members in part.classes:
        target = out.setdefault(rep, rep)
        for m in members:
            if m != rep:
                out[m] = target
    check_subst(out)
    return Solution(out, any(contains_mu(t) for t in out.values()), part.free_representatives)


# -- rational trees ---------------------------------------------------------

def unfold(t: Term, depth: int) -> Term:
    """Finite approximant: each mu unrolled ``depth`` times, then cut with bottom."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if isinstance(t, App):
        return App(t.op, tuple(unfold(a, depth) for a in t.args))
    if isinstance(t, Mu):
        if depth == 0:
            return BOTTOM
        inner = unfold(t, depth - 1)
        return substitute(unfold(t.body, depth), {t.var: inner})
    return t


def unroll(t: Term) -> Term:
    """Expose the head constructor by unrolling leading mu-binders."""
    while isinstance(t, Mu):
        t = substitute(t.body, {t.var: t})
    return t


def alpha_key(t: Term, env: tuple = ()) -> tuple:
    """Hashable key identifying ``t`` up to renaming of mu-binders."""
    if isinstance(t, Var):
        for i, v in enumerate(reversed(env)):
            if v == t:
                return ("b", i)
        return ("v", t.name, t.sort)
    if isinstance(t, Const):
        return ("c", t.name, t.sort)
    if isinstance(t, App):
        return ("a", t.op, tuple(alpha_key(a, env) for a in t.args))
    if isinstance(t, Mu):
        return ("m", alpha_key(t.body, env + (t.var,)))
    return ("bot",)


_BISIM_LIMIT = 200_000


def _head(t: Term) -> tuple:
    if isinstance(t, Var):
        return ("v", t.name, t.sort)
    if isinstance(t, Const):
        return ("c", t.name, t.sort)
    if isinstance(t, App):
        return ("a", t.op, len(t.args))
    return ("bot",)


def term_equal(t1: Term, t2: Term) -> bool:
    """Equality of the (possibly infinite) trees denoted by two terms."""
    seen = set()
    work = [(t1, t2)]
    while work:
        a, b = work.pop()
        a, b = unroll(a), unroll(b)
        key = (alpha_key(a), alpha_key(b))
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > _BISIM_LIMIT:
            raise StateError("bisimulation did not close; term is not rational")
        if _head(a) != _head(b):
            return False
        if isinstance(a, App):
            work.extend(zip(a.args, b.args))
    return True


def _graph(t: Term) -> tuple:
    """Nodes of the rational tree of ``t``: (root id, labels, children)."""
    ids: dict = {}
    labels: list = []
    children: list = []
    stack = []

    def node(x: Term) -> int:
        x = unroll(x)
        k = alpha_key(x)
        if k not in ids:
            ids[k] = len(labels)
            labels.append(_head(x))
            children.append(None)
            stack.append((ids[k], x))
        return ids[k]

    root = node(t)
    while stack:
        i, x = stack.pop()
        children[i] = [node(a) for a in x.args] if isinstance(x, App) else []
        if len(labels) > _BISIM_LIMIT:
            raise StateError("term graph did not close")
    return root, labels, children


def canonical_term(t: Term) -> Term:
    """A unique representative of the rational tree denoted by ``t``.

    The tree's graph is minimized by partition refinement and printed back
    as a mu-term in depth-first order, binding only nodes revisited on
    the current path.  Two terms are ``term_equal`` iff their canonical
    terms are identical.
    """
    if not contains_mu(t):
        return t
    root, labels, children = _graph(t)
    # Moore-style refinement
    block = {}
    cls = [block.setdefault(lab, len(block)) for lab in labels]
    while True:
        sigs: dict = {}
        new = [sigs.setdefault((cls[i], tuple(cls[c] for c in children[i])), len(sigs)) for i in range(len(labels))]
        if len(sigs) == len(set(cls)):
            break
        cls = new
    rep = {}
    for i, c in enumerate(cls):
        rep.setdefault(c, i)

    avoid = {lab[1] for lab in labels if lab[0] == "v"}
    counter = itertools.count()
    binder: dict = {}

    def emit(c: int, path: list) -> Term:
        if c in path:
            if c not in binder:
                binder[c] = Var(fresh_name(f"_r{next(counter)}", avoid))
            return binder[c]
        i = rep[c]
        lab = labels[i]
        if lab[0] == "v":
            return Var(lab[1], lab[2])
        if lab[0] == "c":
            return Const(lab[1], lab[2])
        if lab[0] == "bot":
            return BOTTOM
        path.append(c)
        body = App(lab[1], tuple(emit(cls[ch], path) for ch in children[i]))
        path.pop()
        v = binder.pop(c, None)
        return Mu(v, body) if v is not None else body

    return emit(cls[root], [])


# -- clones ------------------------------------------------------------------

def clone_var(i: int) -> Var:
    return Var(f"x{i}")


def clone_compose(phis: Sequence[Term], psis: Sequence[Term], arity: int | None = None) -> list:
    """Substitute ``psis`` for the variables ``x1..xn`` of each ``phi``."""
    used = set()
    for phi in phis:
        for v in free_vars(phi):
            if v.name.startswith("x") and v.name[1:].isdigit():
                used.add(int(v.name[1:]))
    n = len(psis) if arity is None else arity
    if len(psis) != n or (used and max(used) > n):
        raise ArityError(f"tuple of {len(psis)} terms cannot feed {max(used, default=0)} variables (arity {n})")
    sigma = {clone_var(i + 1): s for i, s in enumerate(psis)}
    return [substitute(phi, sigma) for phi in phis]
