"""Protocols as cord processes with desired runs, and their security checks.

Includes the Needham-Schroeder public key protocol, the two halves of the
man-in-the-middle attack on it, and the attack obtained by composing them.
Runs are executed symbolically (:func:`resolve`); the resulting closed
terms are checked for agreement and secrecy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .cords import (CordSpace, Event, Match, New, Recv, Send, check_run_shape, run_extended,
                    validate_run)
from .errors import MatchError, ResolutionError, RunError
from .interaction import Interaction, IntObject, int_compose, DEFAULT_STRATEGY
from .process import CordProcess
from .terms import (AGENT, DATA, App, Const, Term, Var, dec, enc, free_vars, normalize_decr,
                    pair, pk, sk, substitute, term_equal, tup)

Run = Mapping[str, str]


# -- data model ---------------------------------------------------------------------

@dataclass(frozen=True)
class Protocol:
    """A process together with its intended runs and a sample instantiation
    of its interface and context variables by concrete agents and keys."""

    name: str
    process: CordProcess
    runs: tuple
    env: tuple = ()  # (variable name, closed term) pairs

    def __post_init__(self) -> None:
        runs = tuple(tuple(sorted(dict(r).items())) for r in self.runs)
        object.__setattr__(self, "runs", runs)
        object.__setattr__(self, "env", tuple(sorted(dict(self.env).items())))
        if not runs:
            raise RunError(f"protocol {self.name} needs at least one desired run")
        for r in runs:
            bad = validate_run(self.process.space, dict(r))
            if bad is not None:
                raise RunError(f"desired run of {self.name} is invalid: {bad}")

    @property
    def run(self) -> dict:
        return dict(self.runs[0])

    @property
    def environment(self) -> dict:
        return dict(self.env)


@dataclass(frozen=True)
class SecurityGoal:
    """Agreement pairs are output positions; secrets pair a term with the
    agents (as terms over the process variables) allowed to know it."""

    agreements: tuple = ()
    secrets: tuple = ()

    def validate(self, p: CordProcess) -> None:
        n = len(p.outputs)
        for i, j in self.agreements:
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"agreement pair ({i}, {j}) outside {n} outputs")


@dataclass(frozen=True)
class Verdict:
    claim: str
    passed: bool
    witness: str

    def line(self) -> str:
        return f"{self.claim}: {'PASS' if self.passed else 'FAIL'} — {self.witness}"


# -- builders --------------------------------------------------------------------

def _a(name: str) -> Var:
    return Var(name, AGENT)


def _d(name: str) -> Var:
    return Var(name, DATA)


def _column(prefix: str, agent: Var, actions: Sequence) -> list:
    return [Event(f"{prefix}{i + 1}", act, agent) for i, act in enumerate(actions)]


def _chain(events: Sequence[Event]) -> set:
    return {(a.label, b.label) for a, b in zip(events, events[1:])}


def _space(*columns: Sequence[Event], extra: Iterable = ()) -> CordSpace:
    events = [e for col in columns for e in col]
    order = set(extra)
    for col in columns:
        order |= _chain(col)
    return CordSpace(tuple(events), frozenset(order))


def _initiator(X, kbX, Y, m, n, x, prefix="x"):
    """Actions of the initiator column; ``n`` is bound by the final match."""
    return _column(prefix, X, [
        New(m),
        Send(enc(pk(Y), pair(X, m))),
        Recv((x,)),
        Match((m, n), dec(kbX, x), binders=(n,)),
        Send(enc(pk(Y), n)),
    ])


def nspk() -> Protocol:
    """The protocol with its horizontally aligned run."""
    X, Y, Y1, X1 = _a("X"), _a("Y"), _a("Y'"), _a("X'")
    kbX, kbY1 = _d("kb_X"), _d("kb_Y'")
    m, n, x = _d("m"), _d("n"), _d("x")
    u1, w1, m1, n1 = _d("u'"), _d("w'"), _d("m'"), _d("n'")
    init = _initiator(X, kbX, Y, m, n, x)
    resp = _column("y", Y1, [
        Recv((u1,)),
        Match((X1, m1), dec(kbY1, u1)),
        New(n1),
        Send(enc(pk(X1), pair(m1, n1))),
        Recv((w1,)),
        Match((n1,), dec(kbY1, w1), binders=()),
    ])
    space = _space(init, resp)
    p = CordProcess((X, kbX, Y, Y1, kbY1), space, (X, Y, m, n, X1, Y1, m1, n1))
    run = {"y1": "x2", "x3": "y4", "y5": "x5"}
    env = {"X": Const("A", AGENT), "kb_X": sk(Const("A", AGENT)), "Y": Const("B", AGENT),
           "Y'": Const("B", AGENT), "kb_Y'": sk(Const("B", AGENT))}
    return Protocol("NSPK", p, (run,), tuple(env.items()))


NSPK_GOAL = SecurityGoal(
    agreements=((0, 4), (1, 5), (2, 6), (3, 7)),
    secrets=((_d("m"), frozenset({_a("X"), _a("Y'")})), (_d("n"), frozenset({_a("X"), _a("Y'")}))),
)


def nspk1() -> Interaction:
    """The initiator runs as usual with ``Z``; the responder at ``Z'`` takes
    its reply from the right interface and exports what it learned."""
    X, Z, Z1, X1, Y1 = _a("X"), _a("Z"), _a("Z'"), _a("X'"), _a("Y'")
    kbX, kbZ1, z1 = _d("kb_X"), _d("kb_Z'"), _d("z'")
    m, n, x = _d("m"), _d("n"), _d("x")
    u1, w1, m1, n1 = _d("u'"), _d("w'"), _d("m'"), _d("n'")
    init = _initiator(X, kbX, Z, m, n, x, prefix="x")
    resp = _column("z", Z1, [
        Recv((u1,)),
        Match((X1, m1), dec(kbZ1, u1)),
        Send(z1),
        Recv((w1,)),
        Match((n1,), dec(kbZ1, w1)),
    ])
    body = CordProcess((X, kbX, Z, Z1, kbZ1, z1), _space(init, resp),
                       (X, Z, m, n, X1, Z1, m1, n1, kbZ1, Y1))
    a = IntObject((AGENT, DATA, AGENT), (AGENT, AGENT, DATA, DATA))
    b = IntObject((AGENT, AGENT, DATA, DATA, DATA, AGENT), (AGENT, DATA, DATA))
    return Interaction(a, b, body)


def nspk2() -> Interaction:
    """The initiator at ``Z'`` replays what it was handed to ``Y'``; the
    responder runs as usual and its challenge is exported unopened."""
    X1, Z1, Y1, Y2, X2 = _a("X'"), _a("Z'"), _a("Y'"), _a("Y''"), _a("X''")
    m1, n1, kbZ1, kbY2 = _d("m'"), _d("n'"), _d("kb_Z'"), _d("kb_Y''")
    z1, u2, w2, m2, n2 = _d("z'"), _d("u''"), _d("w''"), _d("m''"), _d("n''")
    init = _column("w", Z1, [
        Send(enc(pk(Y1), pair(X1, m1))),
        Recv((z1,)),
        Send(enc(pk(Y1), n1)),
    ])
    resp = _column("y", Y2, [
        Recv((u2,)),
        Match((X2, m2), dec(kbY2, u2)),
        New(n2),
        Send(enc(pk(X2), pair(m2, n2))),
        Recv((w2,)),
        Match((n2,), dec(kbY2, w2), binders=()),
    ])
    body = CordProcess((X1, Z1, m1, n1, kbZ1, Y1, Y2, kbY2), _space(init, resp),
                       (Z1, kbZ1, z1, X2, Y2, m2, n2))
    b = nspk1().cod
    c = IntObject((AGENT, AGENT, DATA, DATA), (AGENT, DATA))
    return Interaction(b, c, body)


ATTACK_RUN = {"z1": "x2", "y1": "w1", "w2": "y4", "x3": "z3", "z4": "x5", "y5": "w3"}

ATTACK_GOAL = SecurityGoal(
    agreements=((0, 4), (1, 5), (2, 6), (3, 7)),
    secrets=((_d("m"), frozenset({_a("X"), _a("Y''")})), (_d("n"), frozenset({_a("X"), _a("Y''")}))),
)


def attack_composite(strategy: str = DEFAULT_STRATEGY) -> Interaction:
    return int_compose(nspk1(), nspk2(), strategy)


def attack_env() -> dict:
    A, B, C = Const("A", AGENT), Const("B", AGENT), Const("C", AGENT)
    return {"X": A, "kb_X": sk(A), "Z": C, "Y''": B, "kb_Y''": sk(B),
            "Z'": C, "kb_Z'": sk(C), "Y'": B}


def attack_protocol(strategy: str = DEFAULT_STRATEGY) -> Protocol:
    """The composite with the run in which ``Z'`` relays between ``X`` and ``Y''``."""
    return Protocol("ATTACK", attack_composite(strategy).body, (ATTACK_RUN,), tuple(attack_env().items()))


def rows(p: CordProcess, run: Run) -> int:
    """Rows of an aligned display: each communication shares a row."""
    return len(p.space.events) - len(run)


# -- running a protocol -------------------------------------------------------------

@dataclass
class Resolution:
    events: dict  # label -> Event with closed, normalized terms
    subst: dict   # Var -> closed term
    order: list
    handled: dict = field(default_factory=dict)  # label -> closed terms as the agent computed them

    def value(self, t: Term) -> Term:
        out = normalize_decr(substitute(t, self.subst))
        if free_vars(out):
            raise ResolutionError(f"{t} does not resolve: {sorted(v.name for v in free_vars(out))} unbound")
        return out


def _env_subst(p: CordProcess, env: Optional[Mapping]) -> dict:
    if not env:
        return {}
    names: dict = {}
    for v in p.local_vars() | p.free_vars():
        names.setdefault(v.name, v)
    out = {}
    for k, t in env.items():
        if isinstance(k, Var):
            out[k] = t
        elif k in names:
            out[names[k]] = t
    return out


def _linearize(space: CordSpace) -> list:
    closure = space.closure
    remaining = set(space.labels)
    out = []
    while remaining:
        ready = sorted(l for l in remaining
                       if not any(m in remaining and m != l and l in closure[m] for m in remaining))
        if not ready:
            raise RunError(f"run leaves a temporal cycle among {sorted(remaining)}")
        out.append(ready[0])
        remaining.discard(ready[0])
    return out


def _check_linear(space: CordSpace, order: Sequence[str]) -> None:
    if sorted(order) != sorted(space.labels):
        raise RunError("custom order must list every event once")
    pos = {l: i for i, l in enumerate(order)}
    for a in space.labels:
        for b in space.closure[a]:
            if a != b and a not in space.closure[b] and pos[a] > pos[b]:
                raise RunError(f"custom order puts {b} before {a}")


def _split(t: Term, n: int, label: str) -> list:
    parts = []
    for _ in range(n - 1):
        if not (isinstance(t, App) and t.op == "pair"):
            raise MatchError(label, f"{t} is not a tuple of {n}")
        parts.append(t.args[0])
        t = t.args[1]
    parts.append(t)
    return parts


def _closed(t: Term, label: str) -> Term:
    t = normalize_decr(t)
    if free_vars(t):
        names = sorted(v.name for v in free_vars(t))
        raise ResolutionError(f"event {label}: {t} still mentions {names}")
    return t


def resolve(p: CordProcess, run: Run, env: Optional[Mapping] = None,
            order: Optional[Sequence[str]] = None) -> Resolution:
    """Execute ``run``: fresh names for ``new``, each receive takes the
    payload of the send it is matched with, matches decrypt and bind."""
    space = p.space
    check_run_shape(space, run)
    bad = validate_run(space, run)
    if bad is not None:
        raise RunError(f"run is invalid: {bad}")
    ext = run_extended(space, run)
    if order is None:
        order = _linearize(ext)
    else:
        order = list(order)
        _check_linear(ext, order)
    sigma = _env_subst(p, env)
    done: dict = {}
    handled: dict = {}
    for label in order:
        e = space.event(label)
        agent = _closed(substitute(e.agent, sigma), label)
        a = e.action
        if isinstance(a, New):
            sigma[a.binder] = Const("~" + a.binder.name, a.binder.sort)
            act = New(sigma[a.binder])
        elif isinstance(a, Send):
            act = Send(_closed(substitute(a.payload, sigma), label))
        elif isinstance(a, Recv):
            msg = done[run[label]].action.payload
            for v, part in zip(a.binders, _split(msg, len(a.binders), label)):
                sigma[v] = part
            act = Recv(tuple(sigma[v] for v in a.binders))
        elif isinstance(a, Match):
            raw = tup([substitute(t, sigma) for t in a.against])
            value = _closed(raw, label)
            parts = _split(value, len(a.pattern), label)
            for entry, part in zip(a.pattern, parts):
                if entry in a.binders:
                    sigma[entry] = part
                else:
                    want = _closed(substitute(entry, sigma), label)
                    if want != part:
                        raise MatchError(label, f"expected {want}, got {part}")
            act = Match(tuple(_closed(substitute(t, sigma), label) for t in a.pattern), value, binders=())
        else:  # pragma: no cover
            raise TypeError(f"unknown action {a!r}")
        done[label] = Event(label, act, agent)
        handled[label] = [raw] if isinstance(a, Match) else _agent_terms(done[label])
    return Resolution(done, sigma, list(order), handled)


# -- verdicts ---------------------------------------------------------------------

def _name(p: CordProcess, i: int) -> str:
    return str(p.outputs[i])


def check_agreement(p: CordProcess, run: Run, pairs: Iterable[tuple], env: Optional[Mapping] = None,
                    resolution: Optional[Resolution] = None) -> list:
    res = resolution or resolve(p, run, env)
    out = []
    for i, j in pairs:
        left, right = res.value(p.outputs[i]), res.value(p.outputs[j])
        ok = term_equal(left, right)
        rel = "=" if ok else "!="
        out.append(Verdict(f"{_name(p, i)} = {_name(p, j)}", ok, f"{left} {rel} {right}"))
    return out


@dataclass
class Knowledge:
    """What one agent can derive, with a justification for each term."""

    agent: Term
    derived: dict = field(default_factory=dict)  # term -> (rule, premises)

    def knows(self, t: Term) -> bool:
        return t in self.derived

    def explain(self, t: Term) -> str:
        rule, prem = self.derived[t]
        if rule == "seen":
            return f"{t} seen"
        return f"{t} by {rule} from " + ", ".join(str(q) for q in prem)


def _agent_terms(e: Event) -> list:
    a = e.action
    if isinstance(a, Send):
        return [a.payload]
    if isinstance(a, Recv):
        return list(a.binders)
    if isinstance(a, New):
        return [a.binder]
    if isinstance(a, Match):
        return list(a.pattern) + [a.against]
    return []


def knowledge(res: Resolution, agent: Term, initial: Iterable[Term] = ()) -> Knowledge:
    """Close what ``agent`` handled under unpairing, opening applications it
    computed, and decrypting ciphertexts for which it holds the private key."""
    k = Knowledge(agent)
    todo = []

    def add(t: Term, rule: str, prem: tuple) -> None:
        if t not in k.derived:
            k.derived[t] = (rule, prem)
            todo.append(t)

    for t in initial:
        add(t, "seen", ())
    for label, e in res.events.items():
        if e.agent == agent:
            for t in res.handled.get(label, _agent_terms(e)):
                add(t, "seen", ())
    while todo:
        changed = False
        while todo:
            t = todo.pop()
            if isinstance(t, App) and t.op == "pair":
                add(t.args[0], "unpair", (t,))
                add(t.args[1], "unpair", (t,))
            elif isinstance(t, App) and t.op == "D":
                add(t.args[0], "argument", (t,))
                add(t.args[1], "argument", (t,))
        for t in list(k.derived):
            if isinstance(t, App) and t.op == "E" and isinstance(t.args[0], App) and t.args[0].op == "k":
                key = sk(t.args[0].args[0])
                if key in k.derived and t.args[1] not in k.derived:
                    add(t.args[1], "decrypt", (t, key))
                    changed = True
        if not changed and not todo:
            break
    return k


NETWORK = Const("net", AGENT)


def check_secrecy(p: CordProcess, run: Run, value: Term, allowed: Iterable[Term],
                  env: Optional[Mapping] = None, resolution: Optional[Resolution] = None,
                  eavesdropper: bool = True) -> Verdict:
    """``value`` must not be derivable by any agent outside ``allowed``.

    With ``eavesdropper`` the public network, which sees every sent payload
    but holds no private key, counts as one more outside agent.
    """
    res = resolution or resolve(p, run, env)
    target = res.value(value)
    allowed_agents = {res.value(a) for a in allowed}
    agents = sorted({e.agent for e in res.events.values()}, key=str)
    observers = [(ag, knowledge(res, ag)) for ag in agents if ag not in allowed_agents]
    if eavesdropper:
        sent = [e.action.payload for e in res.events.values() if isinstance(e.action, Send)]
        observers.append((NETWORK, knowledge(res, NETWORK, sent)))
    claim = f"secret {value} among {', '.join(sorted(str(a) for a in allowed))}"
    for ag, k in observers:
        if k.knows(target):
            steps = _trace(k, target)
            roles = sorted({str(e.agent) for e in p.space.events if res.value(e.agent) == ag})
            who = f"{ag} (as {', '.join(roles)})" if roles else str(ag)
            return Verdict(claim, False, f"derived by {who}: " + "; ".join(steps))
    return Verdict(claim, True, f"{target} underivable by {', '.join(str(a) for a, _ in observers) or 'nobody'}")


def _trace(k: Knowledge, t: Term) -> list:
    steps, seen = [], set()

    def walk(u: Term) -> None:
        if u in seen:
            return
        seen.add(u)
        rule, prem = k.derived[u]
        for q in prem:
            walk(q)
        steps.append(k.explain(u))

    walk(t)
    return steps


def analyze(proto: Protocol, goal: SecurityGoal) -> list:
    """All verdicts as ``(section, verdict)`` pairs, sections in report order."""
    p = proto.process
    goal.validate(p)
    out = []
    try:
        res = resolve(p, proto.run, proto.environment)
        run_verdict = Verdict("run resolves", True, f"{len(res.events)} events, {len(proto.run)} communications")
    except (MatchError, ResolutionError, RunError) as exc:
        run_verdict = Verdict("run resolves", False, str(exc))
        res = None
    if res is not None:
        for v in check_agreement(p, proto.run, goal.agreements, resolution=res):
            out.append(("AGREEMENT", v))
        for value, allowed in goal.secrets:
            out.append(("SECRECY", check_secrecy(p, proto.run, value, allowed, resolution=res)))
    out.append(("RUN", run_verdict))
    return out


def report(proto: Protocol, goal: SecurityGoal) -> tuple:
    """Sections AGREEMENT, SECRECY and RUN; returns ``(text, all_passed)``."""
    verdicts = analyze(proto, goal)
    lines, section = [], None
    for sec, v in verdicts:
        if sec != section:
            lines.append(sec)
            section = sec
        lines.append(v.line())
    if not any(sec == "SECRECY" for sec, _ in verdicts) and any(sec == "AGREEMENT" for sec, _ in verdicts):
        lines.insert(len(lines) - 2, "SECRECY")
    return "\n".join(lines), all(v.passed for _, v in verdicts)
