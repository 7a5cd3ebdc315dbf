"""Interactions: the Int construction over cord processes.

An object is a pair of sort tuples ``(plus, minus)``: ``plus`` flows
forward, ``minus`` flows back.  A morphism ``A -> B`` is a process
``A+ B- -> A- B+``.  Composition closes the loop through ``B`` with a trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ArityError
from .process import (CordProcess, alpha_canonical, alpha_equal, compose, identity, ptype,
                      reorder, swap, tensor, trace, ProcessType)
from .terms import DATA, GuardedSystem

STRATEGIES = ("traceMinus", "traceBoth", "tracePlus")
DEFAULT_STRATEGY = "traceBoth"


def _sorts(x) -> tuple:
    return (DATA,) * x if isinstance(x, int) else tuple(x)


@dataclass(frozen=True)
class IntObject:
    plus: tuple = ()
    minus: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "plus", _sorts(self.plus))
        object.__setattr__(self, "minus", _sorts(self.minus))

    @property
    def types(self) -> tuple:
        return ptype(self.plus), ptype(self.minus)

    def __str__(self) -> str:
        return f"<{len(self.plus)};{len(self.minus)}>"


UNIT = IntObject()


def dual(a: IntObject) -> IntObject:
    return IntObject(a.minus, a.plus)


def obj_tensor(a: IntObject, b: IntObject) -> IntObject:
    return IntObject(a.plus + b.plus, a.minus + b.minus)


@dataclass(frozen=True)
class Interaction:
    dom: IntObject
    cod: IntObject
    body: CordProcess

    def __post_init__(self) -> None:
        want_in = self.dom.plus + self.cod.minus
        want_out = self.dom.minus + self.cod.plus
        if self.body.dom != want_in or self.body.cod != want_out:
            raise ArityError(
                f"body {self.body.dom} -> {self.body.cod} does not fit "
                f"{self.dom} -> {self.cod} (needs {want_in} -> {want_out})"
            )

    def canonical(self) -> "Interaction":
        return Interaction(self.dom, self.cod, alpha_canonical(self.body))

    @property
    def is_scalar(self) -> bool:
        return self.dom == UNIT and self.cod == UNIT


def int_equal(f: Interaction, g: Interaction) -> bool:
    return f.dom == g.dom and f.cod == g.cod and alpha_equal(f.body, g.body)


def int_identity(a: IntObject) -> Interaction:
    """The buffer pair: ``A+`` passes forward, ``A-`` passes back."""
    return Interaction(a, a, swap(a.plus, a.minus))


def eta(a: IntObject) -> Interaction:
    """Unit ``I -> A* (x) A``; its body is a buffer."""
    return Interaction(UNIT, obj_tensor(dual(a), a), swap(a.plus, a.minus))


def epsilon(a: IntObject) -> Interaction:
    """Counit ``A (x) A* -> I``; its body is a buffer."""
    return Interaction(obj_tensor(a, dual(a)), UNIT, swap(a.plus, a.minus))


def _perm(blocks: Sequence[int], order: Sequence[int]) -> list:
    """Index list placing the given blocks (by length) in the given order."""
    starts, pos = [], 0
    for n in blocks:
        starts.append(pos)
        pos += n
    return [starts[b] + i for b in order for i in range(blocks[b])]


def int_tensor(f: Interaction, g: Interaction) -> Interaction:
    a, b, c, d = f.dom, f.cod, g.dom, g.cod
    body = tensor(f.body, g.body)
    # inputs A+ B- C+ D- -> A+ C+ B- D-; outputs A- B+ C- D+ -> A- C- B+ D+
    ins = _perm([len(a.plus), len(b.minus), len(c.plus), len(d.minus)], [0, 2, 1, 3])
    outs = _perm([len(a.minus), len(b.plus), len(c.minus), len(d.plus)], [0, 2, 1, 3])
    return Interaction(obj_tensor(a, c), obj_tensor(b, d), reorder(body, ins, outs))


def int_compose(f: Interaction, g: Interaction, strategy: str = DEFAULT_STRATEGY) -> Interaction:
    """``f : A -> B`` then ``g : B -> C``, closing the ``B`` wires with a trace.

    ``traceBoth`` traces ``B-`` and ``B+`` at once; ``traceMinus`` first
    plugs ``B+`` by composition and traces ``B-``; ``tracePlus`` plugs ``B-``
    and traces ``B+``.
    """
    if f.cod != g.dom:
        raise ArityError(f"cannot compose interactions through {f.cod} and {g.dom}")
    a, b, c = f.dom, f.cod, g.cod
    na_p, na_m = len(a.plus), len(a.minus)
    nb_p, nb_m = len(b.plus), len(b.minus)
    nc_p, nc_m = len(c.plus), len(c.minus)
    if strategy == "traceBoth":
        body = tensor(f.body, g.body)
        # inputs A+ B-(f) B+(g) C-  -> A+ C- B- B+
        ins = _perm([na_p, nb_m, nb_p, nc_m], [0, 3, 1, 2])
        # outputs A- B+(f) B-(g) C+ -> A- C+ B- B+
        outs = _perm([na_m, nb_p, nb_m, nc_p], [0, 3, 2, 1])
        body = trace(reorder(body, ins, outs), nb_m + nb_p)
    elif strategy == "traceMinus":
        # (A+ B- C-) -> (A- B+ C-) -> (A- B- C+)
        body = compose(tensor(f.body, identity(c.minus)), tensor(identity(a.minus), g.body))
        ins = _perm([na_p, nb_m, nc_m], [0, 2, 1])
        outs = _perm([na_m, nb_m, nc_p], [0, 2, 1])
        body = trace(reorder(body, ins, outs), nb_m)
    elif strategy == "tracePlus":
        # (A+ B+ C-) -> (A+ B- C+) -> (A- B+ C+)
        body = compose(tensor(identity(a.plus), g.body), tensor(f.body, identity(c.plus)))
        ins = _perm([na_p, nb_p, nc_m], [0, 2, 1])
        outs = _perm([na_m, nb_p, nc_p], [0, 2, 1])
        body = trace(reorder(body, ins, outs), nb_p)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return Interaction(a, c, body)


def interaction_system(f: Interaction, g: Interaction) -> GuardedSystem:
    """The equations solved when composing: ``B-`` of ``f`` from ``g``'s
    outputs and ``B+`` of ``g`` from ``f``'s outputs (after renaming apart)."""
    from .process import _apart_pair

    p, q = _apart_pair(f.body, g.body)
    na_p, nb_m = len(f.dom.plus), len(f.cod.minus)
    na_m, nb_p = len(f.dom.minus), len(f.cod.plus)
    y_bm = p.inputs[na_p:na_p + nb_m]
    x_bp = q.inputs[:nb_p]
    s_bm = q.outputs[:nb_m]
    t_bp = p.outputs[na_m:na_m + nb_p]
    return GuardedSystem(y_bm + x_bp, dict(zip(y_bm + x_bp, s_bm + t_bp)))


def embed_init(p: CordProcess) -> Interaction:
    """Initiator embedding ``n |-> <n, 0>``, covariant."""
    return Interaction(IntObject(p.dom, ()), IntObject(p.cod, ()), p)


def embed_resp(p: CordProcess) -> Interaction:
    """Responder embedding ``n |-> <0, n>``; ``p : n -> m`` becomes ``<0,m> -> <0,n>``."""
    return Interaction(IntObject((), p.cod), IntObject((), p.dom), p)


def as_scalar(p: CordProcess) -> Interaction:
    """View a closed process ``0 -> 0`` as a scalar interaction."""
    return Interaction(UNIT, UNIT, p)


__all__ = [
    "STRATEGIES", "DEFAULT_STRATEGY", "IntObject", "UNIT", "Interaction", "ProcessType",
    "dual", "obj_tensor", "int_equal", "int_identity", "eta", "epsilon", "int_tensor",
    "int_compose", "interaction_system", "embed_init", "embed_resp", "as_scalar",
]
