"""Text syntax for processes, interactions, protocols and goals.

A process is written ``(inputs)[events]<outputs>``::

    process P = (X:agent, kb)
      [ a @ X : new(m),
        b @ X : send(E(k(X), (X, m))) after a ]
      <m>

Interactions prefix a process with their polarized objects::

    int I <_:agent ; _> -> < ; _> = (X:agent, y)[...]<...>

Variables are declared by the interface, by ``new``/``recv``/``match``
binders, or by trailing ``free``/``freed`` clauses; names listed in a
``const`` declaration are constants.  ``:agent`` marks agent sorts, and a
bare name used as a locality or as the argument of ``k``/``kbar`` is
inferred to be an agent.  Operations outside the built-in signature
are uninterpreted function symbols.  A ``match`` pattern entry is a binder unless it
is already bound elsewhere; ``=v`` forces a check.  An output written
``t:data`` is data-sorted even when ``t`` is an agent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cords import CordSpace, Event, Match, New, Recv, Send, bv
from .errors import DSLSyntaxError, StateError
from .interaction import Interaction, IntObject, STRATEGIES, DEFAULT_STRATEGY, int_compose
from .process import CordProcess, alpha_canonical
from .protocols import Protocol, SecurityGoal
from .terms import AGENT, DATA, App, Const, Mu, Term, Var, sort_of, tup

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow>->|<-)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-[A-Za-z0-9_']+)*)
  | (?P<punct>[()\[\]<>,;:@=.{}])
""", re.VERBOSE)

AGENT_ARG_OPS = ("k", "kbar")


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- raw syntax -------------------------------------------------------------------

@dataclass
class RName:
    name: str
    tok: Tok


@dataclass
class RApp:
    op: str
    args: list
    tok: Tok


@dataclass
class RTuple:
    items: list
    tok: Tok


@dataclass
class RMu:
    var: str
    body: object
    tok: Tok


@dataclass
class REvent:
    label: str
    agent: object
    kind: str
    args: list  # terms, or (name, sort) binders, or for match (pattern, against)
    after: list
    tok: Tok


@dataclass
class RProcess:
    inputs: list  # (name, sort)
    events: list
    outputs: list
    free: list = field(default_factory=list)   # (name, sort or None)
    freed: list = field(default_factory=list)
    tok: Optional[Tok] = None
    out_annot: list = field(default_factory=list)  # sort written after an output, or None


@dataclass
class RawGoal:
    name: str
    agreements: list  # (left, right) as int or name
    secrets: list     # (raw term, [raw agent terms])


@dataclass
class RawProtocol:
    name: str
    source: tuple  # ("process", P) or ("int-compose", P, Q, strategy)
    run: dict
    given: list  # (name, raw term)
    tok: Tok


@dataclass
class SourceFile:
    consts: dict = field(default_factory=dict)  # name -> sort
    processes: dict = field(default_factory=dict)
    interactions: dict = field(default_factory=dict)
    protocols: dict = field(default_factory=dict)
    goals: dict = field(default_factory=dict)
    order: list = field(default_factory=list)  # (kind, name) in declaration order

    def protocol(self, name: str) -> Protocol:
        raw = self.protocols[name]
        if raw.source[0] == "process":
            proc = self.processes.get(raw.source[1])
            if proc is None:
                raise KeyError(f"no process named {raw.source[1]}")
        else:
            _, p, q, strategy = raw.source
            proc = int_compose(self.interactions[p], self.interactions[q], strategy).body
        env = {n: _closed_term(t, self.consts) for n, t in raw.given}
        return Protocol(name, proc, (raw.run,), tuple(env.items()))

    def goal(self, name: str, p: CordProcess) -> SecurityGoal:
        return bind_goal(self.goals[name], p, self.consts)


# -- parser -------------------------------------------------------------------------

class Parser:
    def __init__(self, text: str) -> None:
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Tok] = None) -> DSLSyntaxError:
        t = tok or self.tok
        return DSLSyntaxError(msg, t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def eat(self, text: str) -> Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> Tok:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    # terms
    def term(self):
        t = self.tok
        if self.accept("mu"):
            v = self.ident("mu binder").text
            self.eat(".")
            return RMu(v, self.term(), t)
        if self.accept("("):
            items = [self.term()]
            while self.accept(","):
                items.append(self.term())
            self.eat(")")
            return items[0] if len(items) == 1 else RTuple(items, t)
        name = self.ident("term")
        if self.accept("("):
            args = [] if self.at(")") else self.termlist()
            self.eat(")")
            return RApp(name.text, args, name)
        return RName(name.text, name)

    def termlist(self) -> list:
        out = [self.term()]
        while self.accept(","):
            out.append(self.term())
        return out

    def sorted_suffix(self) -> Optional[str]:
        if not self.accept(":"):
            return None
        s = self.ident("sort")
        if s.text not in (AGENT, DATA):
            raise self.error(f"unknown sort {s.text!r}", s)
        return s.text

    def sorted_name(self) -> tuple:
        name = self.ident("variable")
        return name.text, self.sorted_suffix(), name

    def iface(self, close: str) -> list:
        out = []
        if self.at(close):
            return out
        while True:
            n, s, _ = self.sorted_name()
            out.append((n, s))
            if not self.accept(","):
                return out

    def action(self, tok: Tok):
        kw = self.ident("action")
        self.eat("(")
        if kw.text == "send":
            args = [self.term()]
        elif kw.text == "recv":
            args = []
            while True:
                n, s, _ = self.sorted_name()
                args.append((n, s))
                if not self.accept(","):
                    break
        elif kw.text == "new":
            n, s, _ = self.sorted_name()
            args = [(n, s)]
        elif kw.text == "match":
            pattern = []
            while True:
                if self.accept("="):
                    pattern.append(("check", self.term()))
                else:
                    t = self.term()
                    if isinstance(t, RName) and self.at(":"):
                        self.eat(":")
                        s = self.ident("sort").text
                        pattern.append(("sorted", t, s))
                    else:
                        pattern.append(("plain", t))
                if not self.accept(","):
                    break
            self.eat("=")
            args = [pattern, self.termlist()]
        else:
            raise self.error(f"unknown action {kw.text!r}", kw)
        self.eat(")")
        return kw.text, args

    def event(self) -> REvent:
        label = self.ident("event label")
        self.eat("@")
        agent = self.term()
        self.eat(":")
        kind, args = self.action(label)
        after = []
        if self.accept("after"):
            after.append(self.ident("label").text)
            while self.tok.kind == "ident" and not self.at("]") and self._is_label_continuation():
                after.append(self.ident("label").text)
        return REvent(label.text, agent, kind, args, after, label)

    def _is_label_continuation(self) -> bool:
        nxt = self.toks[self.i + 1]
        return nxt.text != "@"

    def process(self) -> RProcess:
        start = self.eat("(")
        inputs = self.iface(")")
        self.eat(")")
        self.eat("[")
        events = []
        if not self.at("]"):
            events.append(self.event())
            while self.accept(","):
                events.append(self.event())
        self.eat("]")
        self.eat("<")
        outputs, annot = [], []
        while not self.at(">"):
            outputs.append(self.term())
            annot.append(self.sorted_suffix())
            if not self.accept(","):
                break
        self.eat(">")
        proc = RProcess(inputs, events, outputs, tok=start, out_annot=annot)
        while self.at("free") or self.at("freed"):
            which = self.ident().text
            target = proc.free if which == "free" else proc.freed
            while True:
                n, s, _ = self.sorted_name()
                target.append((n, s))
                if not self.accept(","):
                    break
        return proc

    def header(self) -> tuple:
        self.eat("<")
        plus = self.iface(";")
        self.eat(";")
        minus = self.iface(">")
        self.eat(">")
        return IntObject(tuple(s or DATA for _, s in plus), tuple(s or DATA for _, s in minus))

    def source(self) -> SourceFile:
        sf = SourceFile()
        raw_procs: dict = {}
        raw_ints: dict = {}

        def declare(kind: str, name: Tok) -> None:
            if (kind, name.text) in sf.order:
                raise self.error(f"duplicate {kind} {name.text!r}", name)
            sf.order.append((kind, name.text))

        while self.tok.kind != "eof":
            kw = self.ident("declaration")
            if kw.text == "const":
                while True:
                    n, s, t = self.sorted_name()
                    if n in sf.consts:
                        raise self.error(f"duplicate constant {n!r}", t)
                    sf.consts[n] = s or DATA
                    if not self.accept(","):
                        break
            elif kw.text == "process":
                name = self.ident("process name")
                declare("process", name)
                self.eat("=")
                raw_procs[name.text] = self.process()
            elif kw.text == "int":
                name = self.ident("interaction name")
                declare("int", name)
                a = self.header()
                self.eat("->")
                b = self.header()
                self.eat("=")
                raw_ints[name.text] = (a, b, self.process(), name)
            elif kw.text == "protocol":
                name = self.ident("protocol name")
                declare("protocol", name)
                self.eat("=")
                if self.accept("int-compose"):
                    p = self.ident("interaction").text
                    q = self.ident("interaction").text
                    strategy = DEFAULT_STRATEGY
                    if self.tok.kind == "ident" and self.tok.text != "run":
                        st = self.ident("strategy")
                        if st.text not in STRATEGIES:
                            raise self.error(f"unknown strategy {st.text!r}; expected one of "
                                             + ", ".join(STRATEGIES), st)
                        strategy = st.text
                    source = ("int-compose", p, q, strategy)
                else:
                    source = ("process", self.ident("process").text)
                self.eat("run")
                self.eat("{")
                run = {}
                while not self.at("}"):
                    r = self.ident("receive label").text
                    self.eat("<-")
                    run[r] = self.ident("send label").text
                    if not self.accept(","):
                        break
                self.eat("}")
                given = []
                if self.accept("given"):
                    self.eat("{")
                    while not self.at("}"):
                        n = self.ident("variable").text
                        self.eat("=")
                        given.append((n, self.term()))
                        if not self.accept(","):
                            break
                    self.eat("}")
                sf.protocols[name.text] = RawProtocol(name.text, source, run, given, kw)
            elif kw.text == "goal":
                name = self.ident("goal name")
                declare("goal", name)
                self.eat("{")
                agreements, secrets = [], []
                while not self.at("}"):
                    what = self.ident("goal clause")
                    if what.text == "agree":
                        left = self._position()
                        self.eat("=")
                        agreements.append((left, self._position()))
                    elif what.text == "secret":
                        value = self.term()
                        self.eat("among")
                        secrets.append((value, self.termlist()))
                    else:
                        raise self.error(f"unknown goal clause {what.text!r}", what)
                    if not self.accept(";"):
                        break
                self.eat("}")
                sf.goals[name.text] = RawGoal(name.text, agreements, secrets)
            else:
                raise self.error(f"unknown declaration {kw.text!r}", kw)

        for name, raw in raw_procs.items():
            sf.processes[name] = build_process(raw, sf.consts)
        for name, (a, b, raw, tok) in raw_ints.items():
            out_sorts = a.minus + b.plus
            body = build_process(raw, sf.consts, out_sorts)
            try:
                sf.interactions[name] = Interaction(a, b, body)
            except TypeError as exc:
                raise DSLSyntaxError(str(exc), tok.line, tok.col) from None
        for raw in sf.protocols.values():
            src = raw.source
            table = sf.processes if src[0] == "process" else sf.interactions
            for n in src[1:3] if src[0] == "int-compose" else src[1:2]:
                if n not in table:
                    raise DSLSyntaxError(f"unknown {src[0]} operand {n!r}", raw.tok.line, raw.tok.col)
        return sf

    def _position(self):
        if self.tok.kind == "int":
            t = self.tok
            self.i += 1
            return int(t.text)
        return self.term()


def _err(msg: str, tok: Tok) -> DSLSyntaxError:
    return DSLSyntaxError(msg, tok.line, tok.col)


# -- from raw syntax to values ------------------------------------------------------------

def _names(t, out: set, bound: frozenset = frozenset()) -> None:
    if isinstance(t, RName):
        if t.name not in bound:
            out.add(t.name)
    elif isinstance(t, (RApp, RTuple)):
        for a in (t.args if isinstance(t, RApp) else t.items):
            _names(a, out, bound)
    elif isinstance(t, RMu):
        _names(t.body, out, bound | {t.var})


def _agent_positions(t, out: set) -> None:
    if isinstance(t, RApp):
        for a in t.args:
            if t.op in AGENT_ARG_OPS and isinstance(a, RName):
                out.add(a.name)
            _agent_positions(a, out)
    elif isinstance(t, RTuple):
        for a in t.items:
            _agent_positions(a, out)
    elif isinstance(t, RMu):
        _agent_positions(t.body, out)


def _event_terms(e: REvent) -> list:
    if e.kind == "send":
        return [e.agent] + e.args
    if e.kind == "match":
        pattern, against = e.args
        return [e.agent] + [p[1] for p in pattern] + against
    return [e.agent]


def _build_term(t, env: dict, consts: dict, mu_env: dict = None) -> Term:
    mu_env = mu_env or {}
    if isinstance(t, RName):
        if t.name in mu_env:
            return mu_env[t.name]
        if t.name in env:
            return env[t.name]
        if t.name in consts:
            return Const(t.name, consts[t.name])
        raise _err(f"unbound variable {t.name!r}", t.tok)
    if isinstance(t, RApp):
        args = [_build_term(a, env, consts, mu_env) for a in t.args]
        try:
            return App(t.op, tuple(args))
        except TypeError as exc:
            raise _err(str(exc), t.tok) from None
    if isinstance(t, RTuple):
        return tup([_build_term(a, env, consts, mu_env) for a in t.items])
    if isinstance(t, RMu):
        v = Var(t.var)
        try:
            return Mu(v, _build_term(t.body, env, consts, {**mu_env, t.var: v}))
        except (ValueError, StateError) as exc:
            raise _err(str(exc), t.tok) from None
    raise TypeError(f"not a term: {t!r}")


def _closed_term(t, consts: dict) -> Term:
    return _build_term(t, {}, consts)


def build_process(raw: RProcess, consts: dict, out_sorts: Optional[Sequence[str]] = None) -> CordProcess:
    declared: dict = {}

    def declare(name: str, sort: Optional[str], tok: Tok) -> None:
        if sort is not None:
            declared[name] = sort if declared.get(name) != AGENT else AGENT
        else:
            declared.setdefault(name, None)

    tok = raw.tok
    input_names = [n for n, _ in raw.inputs]
    if len(set(input_names)) != len(input_names):
        raise _err("repeated input variable", tok)
    for n, s in raw.inputs:
        declare(n, s, tok)
    fresh_bound: set = set()
    for e in raw.events:
        if e.kind in ("recv", "new"):
            for n, s in e.args:
                declare(n, s, e.tok)
                fresh_bound.add(n)
    for n, s in raw.free + raw.freed:
        declare(n, s, tok)
    protected = set(input_names) | fresh_bound | {n for n, _ in raw.free + raw.freed}

    # match binders: first textual match that names an otherwise unbound variable
    match_binders: dict = {}
    claimed: set = set()
    for e in raw.events:
        if e.kind != "match":
            continue
        bs = []
        for entry in e.args[0]:
            if entry[0] == "check":
                continue
            t = entry[1]
            if isinstance(t, RName) and t.name not in protected and t.name not in claimed \
                    and t.name not in consts:
                bs.append(t.name)
                claimed.add(t.name)
                declare(t.name, entry[2] if entry[0] == "sorted" else None, e.tok)
        match_binders[e.label] = bs

    agents = {n for n, s in declared.items() if s == AGENT}
    for e in raw.events:
        if isinstance(e.agent, RName):
            agents.add(e.agent.name)
        for t in _event_terms(e):
            _agent_positions(t, agents)
    for t in raw.outputs:
        _agent_positions(t, agents)
    if out_sorts is not None:
        for t, s in zip(raw.outputs, out_sorts):
            if s == AGENT and isinstance(t, RName):
                agents.add(t.name)
    env = {n: Var(n, AGENT if n in agents else DATA) for n in declared if n not in consts}

    labels = [e.label for e in raw.events]
    if len(set(labels)) != len(labels):
        dup = next(l for l in labels if labels.count(l) > 1)
        second = [e for e in raw.events if e.label == dup][1]
        raise _err(f"duplicate label {dup!r}", second.tok)
    events, order = [], set()
    for e in raw.events:
        agent = _build_term(e.agent, env, consts)
        if e.kind == "send":
            act = Send(_build_term(e.args[0], env, consts))
        elif e.kind == "recv":
            act = Recv(tuple(env[n] for n, _ in e.args))
        elif e.kind == "new":
            act = New(env[e.args[0][0]])
        else:
            pattern = tuple(_build_term(p[1], env, consts) for p in e.args[0])
            against = tuple(_build_term(t, env, consts) for t in e.args[1])
            act = Match(pattern, against, frozenset(env[n] for n in match_binders[e.label]))
        events.append(Event(e.label, act, agent))
        for a in e.after:
            if a not in labels:
                raise _err(f"unknown label {a!r} after {e.label}", e.tok)
            order.add((a, e.label))
    outputs = tuple(_build_term(t, env, consts) for t in raw.outputs)
    if out_sorts is None and any(raw.out_annot):
        out_sorts = [a or sort_of(t) for a, t in zip(raw.out_annot, outputs)]
    inputs = tuple(env[n] for n in input_names)
    freed = frozenset(env[n] for n, _ in raw.freed)
    try:
        return CordProcess(inputs, CordSpace(tuple(events), frozenset(order)), outputs,
                           tuple(out_sorts) if out_sorts is not None else None, freed)
    except TypeError as exc:
        raise _err(str(exc), tok) from None


def bind_goal(raw: RawGoal, p: CordProcess, consts: dict = None) -> SecurityGoal:
    consts = consts or {}
    env = {v.name: v for v in p.local_vars() | p.free_vars()}
    printed = [str(t) for t in p.outputs]

    def pos(x) -> int:
        if isinstance(x, int):
            return x
        s = str(_build_term(x, env, consts))
        if s not in printed:
            raise KeyError(f"{s} is not an output")
        return printed.index(s)

    agreements = tuple((pos(a), pos(b)) for a, b in raw.agreements)
    secrets = tuple(
        (_build_term(v, env, consts), frozenset(_build_term(a, env, consts) for a in allowed))
        for v, allowed in raw.secrets
    )
    return SecurityGoal(agreements, secrets)


def parse(text: str) -> SourceFile:
    return Parser(text).source()


def parse_process(text: str, consts: Optional[dict] = None) -> CordProcess:
    p = Parser(text)
    raw = p.process()
    if p.tok.kind != "eof":
        raise p.error(f"trailing input {p.tok.text!r}")
    return build_process(raw, consts or {})


def parse_file(path) -> SourceFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- printer ----------------------------------------------------------------------------

def _sorted_name(v: Var) -> str:
    return f"{v.name}:agent" if v.sort == AGENT else v.name


def _inferred_binders(p: CordProcess) -> dict:
    """Match binders the parser would infer for ``p`` as printed."""
    protected = set(p.inputs) | p.freed | p.free_vars()
    for e in p.space.events:
        if isinstance(e.action, (Recv, New)):
            protected |= bv(e)
    claimed: set = set()
    out = {}
    for e in p.space.events:
        if isinstance(e.action, Match):
            bs = set()
            for t in e.action.pattern:
                if isinstance(t, Var) and t not in protected and t not in claimed:
                    bs.add(t)
                    claimed.add(t)
            out[e.label] = bs
    return out


def _print_action(e: Event, inferred: set) -> str:
    a = e.action
    if isinstance(a, Send):
        return f"send({a.payload})"
    if isinstance(a, Recv):
        return f"recv({', '.join(_sorted_name(v) for v in a.binders)})"
    if isinstance(a, New):
        return f"new({_sorted_name(a.binder)})"
    parts = []
    for t in a.pattern:
        if t in a.binders:
            if t not in inferred:
                raise ValueError(f"binder {t} of {e.label} cannot be expressed")
            parts.append(_sorted_name(t))
        elif t in inferred:
            parts.append(f"={t}")
        else:
            parts.append(str(t))
    return f"match({', '.join(parts)} = {', '.join(map(str, a.against))})"


def print_process(p: CordProcess, canonical: bool = True, indent: str = "  ") -> str:
    if canonical:
        p = alpha_canonical(p)
    inferred = _inferred_binders(p)
    preds: dict = {l: [] for l in p.space.labels}
    for a, b in p.space.order:
        if a != b:
            preds[b].append(a)
    rank = {l: i for i, l in enumerate(p.space.labels)}
    lines = [f"({', '.join(_sorted_name(v) for v in p.inputs)})"]
    evs = []
    for e in p.space.events:
        s = f"{e.label} @ {e.agent} : {_print_action(e, inferred.get(e.label, set()))}"
        if preds[e.label]:
            s += " after " + " ".join(sorted(preds[e.label], key=rank.get))
        evs.append(s)
    if evs:
        lines.append(f"{indent}[ " + f",\n{indent}  ".join(evs) + " ]")
    else:
        lines.append(f"{indent}[]")
    # an agent term sitting at a data-sorted output says so
    outs = [f"{t}:{DATA}" if s != sort_of(t) else str(t) for t, s in zip(p.outputs, p.out_sorts)]
    lines.append(f"{indent}<{', '.join(outs)}>")
    plain = sorted(p.free_vars() - p.freed)
    freed = sorted(p.freed & p.free_vars())
    if plain:
        lines.append(f"{indent}free {', '.join(_sorted_name(v) for v in plain)}")
    if freed:
        lines.append(f"{indent}freed {', '.join(_sorted_name(v) for v in freed)}")
    return "\n".join(lines)


def _print_header(o: IntObject) -> str:
    def side(sorts):
        return ", ".join("_:agent" if s == AGENT else "_" for s in sorts)

    inner = f"{side(o.plus)} ; {side(o.minus)}".strip()
    return f"<{inner}>" if inner != ";" else "< ; >"


def print_interaction(f: Interaction, canonical: bool = True) -> str:
    return (f"{_print_header(f.dom)} -> {_print_header(f.cod)} =\n"
            + print_process(f.body, canonical))


def _print_raw_term(t) -> str:
    if isinstance(t, int):
        return str(t)
    if isinstance(t, RName):
        return t.name
    if isinstance(t, RApp):
        return f"{t.op}({', '.join(_print_raw_term(a) for a in t.args)})"
    if isinstance(t, RTuple):
        return f"({', '.join(_print_raw_term(a) for a in t.items)})"
    if isinstance(t, RMu):
        return f"mu {t.var}. {_print_raw_term(t.body)}"
    return str(t)


def print_source(sf: SourceFile, canonical: bool = True) -> str:
    out = []
    if sf.consts:
        out.append("const " + ", ".join(f"{n}:agent" if s == AGENT else n for n, s in sf.consts.items()))
    for kind, name in sf.order:
        if kind == "process":
            out.append(f"process {name} =\n" + print_process(sf.processes[name], canonical))
        elif kind == "int":
            out.append(f"int {name} " + print_interaction(sf.interactions[name], canonical))
        elif kind == "protocol":
            raw = sf.protocols[name]
            src = raw.source
            head = src[1] if src[0] == "process" else f"int-compose {src[1]} {src[2]} {src[3]}"
            run = ", ".join(f"{r} <- {s}" for r, s in sorted(raw.run.items()))
            text = f"protocol {name} = {head}\n  run {{ {run} }}"
            if raw.given:
                text += "\n  given { " + ", ".join(f"{n} = {_print_raw_term(t)}" for n, t in raw.given) + " }"
            out.append(text)
        elif kind == "goal":
            g = sf.goals[name]
            clauses = [f"agree {_print_raw_term(a)} = {_print_raw_term(b)}" for a, b in g.agreements]
            clauses += [f"secret {_print_raw_term(v)} among {', '.join(_print_raw_term(a) for a in al)}"
                        for v, al in g.secrets]
            out.append(f"goal {name} {{\n  " + ";\n  ".join(clauses) + "\n}")
    return "\n\n".join(out) + "\n"


def print_value(x, canonical: bool = True) -> str:
    if isinstance(x, CordProcess):
        return print_process(x, canonical)
    if isinstance(x, Interaction):
        return print_interaction(x, canonical)
    if isinstance(x, SourceFile):
        return print_source(x, canonical)
    raise TypeError(f"cannot print {type(x).__name__}")
