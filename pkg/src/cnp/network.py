"""Immutable data model for control-network programs.

A program is a set of named subnets. Each subnet is a small directed graph
whose arrows carry chains of primitive calls; executing the program means
finding a path from the main subnet's initial node to a FINISH node along
which every primitive succeeds.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union

from .errors import NetworkError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Words the textual format reserves; no identifier may use them.
RESERVED = frozenset({"SUBNET", "VARS", "INIT", "NODE", "FINISH", "CONTROL", "ARROW", "call", "eval", "none"})

#: Options a CONTROL node may change while the program runs.
MUTABLE_OPTIONS = ("order", "range", "width", "backtracking", "max_depth")
ORDER_MODES = ("declared", "best", "random")


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Union[int, str]


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Literal, Name, Neg]


@dataclass(frozen=True)
class RangeValue:
    """Inclusive ``[low, high]`` bound used by the ``range`` option."""

    low: Expr
    high: Expr


# -- graph ------------------------------------------------------------------

class NodeKind(str, enum.Enum):
    ORDINARY = "ordinary"
    FINISH = "finish"
    CONTROL = "control"


class CallKind(str, enum.Enum):
    PRIMITIVE = "primitive"
    SUBNET = "subnet-call"


@dataclass(frozen=True)
class OptionMutation:
    """``option = value`` carried by a CONTROL node.

    ``value`` is ``None`` for a cleared optional setting (``width=none``).
    Keyword values such as ``best`` or ``false`` are stored as :class:`Name`.
    """

    option: str
    value: Union[Expr, RangeValue, None]


@dataclass(frozen=True)
class PrimitiveCall:
    name: str
    args: tuple[Expr, ...] = ()
    kind: CallKind = CallKind.PRIMITIVE
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    @property
    def is_subnet_call(self) -> bool:
        return self.kind is CallKind.SUBNET


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind = NodeKind.ORDINARY
    mutations: tuple[OptionMutation, ...] = ()
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Arrow:
    source: str
    target: str
    chain: tuple[PrimitiveCall, ...] = ()
    eval: PrimitiveCall | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Subnet:
    name: str
    params: tuple[str, ...]
    locals: tuple[str, ...]
    nodes: tuple[Node, ...]
    initial: str
    arrows: tuple[Arrow, ...]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    def node(self, node_id: str) -> Node:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise NetworkError(f"subnet {self.name!r} has no node {node_id!r}")

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.params + self.locals


@dataclass(frozen=True)
class ControlNetwork:
    subnets: tuple[Subnet, ...]
    main: str = "Main"

    def subnet(self, name: str) -> Subnet:
        for sub in self.subnets:
            if sub.name == name:
                return sub
        raise NetworkError(f"no subnet named {name!r}")

    def has_subnet(self, name: str) -> bool:
        return any(s.name == name for s in self.subnets)

    def calls(self):
        """Yield ``(subnet, arrow, call)`` for every call, chains and evaluators alike."""
        for sub in self.subnets:
            for arrow in sub.arrows:
                for call in arrow.chain:
                    yield sub, arrow, call
                if arrow.eval is not None:
                    yield sub, arrow, arrow.eval


# -- validation -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    message: str
    subnet: str | None = None
    node: str | None = None
    arrow: int | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False)

    def __str__(self) -> str:
        where = []
        if self.subnet is not None:
            where.append(f"subnet {self.subnet}")
        if self.node is not None:
            where.append(f"node {self.node}")
        if self.arrow is not None:
            where.append(f"arrow #{self.arrow}")
        return f"{', '.join(where)}: {self.message}" if where else self.message


def _bad_ident(name: str) -> bool:
    return not isinstance(name, str) or not _IDENT.match(name) or name in RESERVED


def _check_mutation(mut: OptionMutation) -> str | None:
    if mut.option not in MUTABLE_OPTIONS:
        return f"option {mut.option!r} cannot be changed by a control node"
    value = mut.value
    if mut.option == "order":
        if not (isinstance(value, Name) and value.name in ORDER_MODES):
            return "order must be one of " + ", ".join(ORDER_MODES)
    elif mut.option == "backtracking":
        if not (isinstance(value, Name) and value.name in ("true", "false")):
            return "backtracking must be true or false"
    elif mut.option == "range":
        if value is not None and not isinstance(value, RangeValue):
            return "range must be [low, high] or none"
    elif isinstance(value, RangeValue):
        return f"option {mut.option!r} takes a single value"
    return None


def validate(net: ControlNetwork, registry=None) -> list[Violation]:
    """Return every structural problem found in ``net``; empty means valid.

    When ``registry`` is given, primitive and evaluator names must be
    registered in it as well.
    """
    out: list[Violation] = []
    names = [s.name for s in net.subnets]
    by_name = {s.name: s for s in net.subnets}

    if net.main not in by_name:
        out.append(Violation(f"unknown main subnet {net.main!r}"))
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(Violation(f"duplicate subnet {name!r}", subnet=name))

    for sub in net.subnets:
        if _bad_ident(sub.name):
            out.append(Violation(f"invalid subnet name {sub.name!r}", subnet=sub.name, pos=sub.pos))
        seen: set[str] = set()
        for var in sub.variables:
            if _bad_ident(var):
                out.append(Violation(f"invalid variable name {var!r}", subnet=sub.name, pos=sub.pos))
            if var in seen:
                out.append(Violation(f"variable {var!r} declared twice", subnet=sub.name, pos=sub.pos))
            seen.add(var)

        ids = [n.id for n in sub.nodes]
        declared: set[str] = set()
        for node in sub.nodes:
            if _bad_ident(node.id):
                out.append(Violation(f"invalid node name {node.id!r}", sub.name, node.id, pos=node.pos))
            if node.id in declared:
                out.append(Violation("node declared twice", sub.name, node.id, pos=node.pos))
            declared.add(node.id)
            if node.kind is NodeKind.CONTROL:
                for mut in node.mutations:
                    problem = _check_mutation(mut)
                    if problem:
                        out.append(Violation(problem, sub.name, node.id, pos=node.pos))
            elif node.mutations:
                out.append(Violation("only control nodes carry option changes", sub.name, node.id, pos=node.pos))
        if sub.initial not in ids:
            out.append(Violation(f"initial node {sub.initial!r} is not declared", sub.name, sub.initial, pos=sub.pos))

        kinds = {n.id: n.kind for n in sub.nodes}
        for index, arrow in enumerate(sub.arrows):
            where = dict(subnet=sub.name, node=arrow.source, arrow=index, pos=arrow.pos)
            for end in (arrow.source, arrow.target):
                if end not in kinds:
                    out.append(Violation(f"arrow endpoint {end!r} is not a node of this subnet", **where))
            if kinds.get(arrow.source) is NodeKind.FINISH:
                out.append(Violation("finish node has an outgoing arrow", **where))
            calls = list(arrow.chain) + ([arrow.eval] if arrow.eval is not None else [])
            for call in calls:
                if call.is_subnet_call:
                    callee = by_name.get(call.name)
                    if callee is None:
                        out.append(Violation(f"call to unknown subnet {call.name!r}", **where))
                    elif len(callee.params) != len(call.args):
                        out.append(Violation(
                            f"subnet {call.name!r} takes {len(callee.params)} argument(s), got {len(call.args)}",
                            **where))
                else:
                    if _bad_ident(call.name):
                        out.append(Violation(f"invalid primitive name {call.name!r}", **where))
                    elif registry is not None and call.name not in registry:
                        out.append(Violation(f"unregistered primitive {call.name!r}", **where))
            if arrow.eval is not None and arrow.eval.is_subnet_call:
                out.append(Violation("an evaluator must be a primitive, not a subnet call", **where))
    return out


def arrows_from(net: ControlNetwork, subnet: str, node: str) -> list[Arrow]:
    """Arrows leaving ``node`` in declaration order, the default attempt order."""
    sub = net.subnet(subnet)
    if not sub.has_node(node):
        raise NetworkError(f"subnet {subnet!r} has no node {node!r}")
    return [a for a in sub.arrows if a.source == node]
