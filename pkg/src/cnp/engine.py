"""Extended-backtracking interpreter for control networks.

Execution walks the network depth first from the main subnet's initial node.
At each node the outgoing arrows are put in attempt order (see
:func:`attempt_order`), the first one is taken and the rest are remembered in
a choice point. An arrow's chain runs left to right; a failing primitive, a
dead-end node or a subnet with no remaining way to its FINISH sends control
back to the most recent choice point, and every binding, frame push/pop and
option change made since that point is undone from the trail.

Subnet calls are not opaque: a called subnet leaves its own choice points on
the shared stack, so a failure after the call returns can re-enter the callee
and make it succeed in a different way.

The machine is iterative. Pending work is a persistent linked list of tasks,
so a choice point restores it by keeping a reference.
"""

from __future__ import annotations

import dataclasses
import json
import numbers
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

from .errors import ConfigurationError, InternalConsistencyError, PrimitiveError, SetupError
from .network import (
    MUTABLE_OPTIONS,
    ORDER_MODES,
    Arrow,
    ControlNetwork,
    Literal,
    Name,
    Neg,
    Node,
    NodeKind,
    PrimitiveCall,
    RangeValue,
    arrows_from,
    validate,
)
from .rng import SplitMix64

Trace = Optional[Callable[[str], None]]

_MISSING = object()


# -- options ----------------------------------------------------------------

@dataclass(frozen=True)
class ControlOptions:
    """Search-control settings; CONTROL nodes change some of them mid-run."""

    order: str = "declared"
    range: Optional[tuple[float, float]] = None
    width: Optional[int] = None
    backtracking: bool = True
    max_solutions: int = 1
    max_depth: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.order not in ORDER_MODES:
            raise ConfigurationError(f"order must be one of {', '.join(ORDER_MODES)}, got {self.order!r}")
        if self.range is not None:
            if len(self.range) != 2 or not all(_is_number(v) for v in self.range):
                raise ConfigurationError(f"range must be a (low, high) pair of numbers, got {self.range!r}")
            if self.range[0] > self.range[1]:
                raise ConfigurationError(f"range lower bound {self.range[0]} exceeds upper bound {self.range[1]}")
            object.__setattr__(self, "range", tuple(self.range))
        if self.width is not None and (not _is_int(self.width) or self.width < 1):
            raise ConfigurationError(f"width must be a positive integer, got {self.width!r}")
        if not isinstance(self.backtracking, bool):
            raise ConfigurationError("backtracking must be a boolean")
        if not _is_int(self.max_solutions) or self.max_solutions < 1:
            raise ConfigurationError(f"max_solutions must be a positive integer, got {self.max_solutions!r}")
        if self.max_depth is not None and (not _is_int(self.max_depth) or self.max_depth < 1):
            raise ConfigurationError(f"max_depth must be a positive integer, got {self.max_depth!r}")
        if not _is_int(self.seed) or not 0 <= self.seed < 1 << 64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def replace(self, **changes) -> "ControlOptions":
        return dataclasses.replace(self, **changes)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v) -> bool:
    return isinstance(v, numbers.Real) and not isinstance(v, bool)


# -- primitives -------------------------------------------------------------

@dataclass(frozen=True)
class Primitive:
    func: Callable[..., Any]
    evaluator: bool = False
    backtrackable: bool = True


class PrimitiveRegistry:
    """Name -> implementation table.

    An implementation is called as ``func(env, *args)`` with evaluated
    arguments. It returns ``False`` to fail, ``True`` or ``None`` to succeed,
    or a mapping of variable names to new values to succeed with bindings.
    Primitives must not mutate the environment themselves. Evaluators return
    a number instead and must be free of effects.
    """

    def __init__(self, entries: Mapping[str, Primitive] | None = None):
        self._entries: dict[str, Primitive] = dict(entries or {})

    def add(self, name: str, func: Callable, *, evaluator: bool = False, backtrackable: bool = True) -> None:
        if name in self._entries:
            raise ConfigurationError(f"primitive {name!r} is already registered")
        self._entries[name] = Primitive(func, evaluator, backtrackable)

    def register(self, name: str | None = None, **flags):
        """Decorator form of :meth:`add`; the function name is the default."""

        def deco(func):
            self.add(name or func.__name__, func, **flags)
            return func

        return deco

    def merged(self, *others: "PrimitiveRegistry") -> "PrimitiveRegistry":
        out = PrimitiveRegistry(self._entries)
        for other in others:
            for name, prim in other._entries.items():
                if name in out._entries:
                    raise ConfigurationError(f"primitive {name!r} is registered twice")
                out._entries[name] = prim
        return out

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __getitem__(self, name: str) -> Primitive:
        return self._entries[name]

    def names(self) -> list[str]:
        return sorted(self._entries)


def core_registry() -> PrimitiveRegistry:
    """A handful of generic primitives usable from any program."""
    reg = PrimitiveRegistry()
    reg.add("succeed", lambda env: True)
    reg.add("fail", lambda env: False)
    reg.add("bind", lambda env, name, value: {name: value})
    reg.add("eq", lambda env, a, b: a == b)
    reg.add("ne", lambda env, a, b: a != b)
    reg.add("lt", lambda env, a, b: a < b)
    reg.add("le", lambda env, a, b: a <= b)
    reg.add("gt", lambda env, a, b: a > b)
    reg.add("ge", lambda env, a, b: a >= b)
    reg.add("add", lambda env, name, a, b: {name: a + b})
    reg.add("sub", lambda env, name, a, b: {name: a - b})
    reg.add("value", lambda env, x: x, evaluator=True)
    reg.add("write", _write, backtrackable=False)
    return reg


def _write(env, *args):
    env.output.append(" ".join(str(a) for a in args))
    return True


# -- environment and trail --------------------------------------------------

@dataclass(eq=False)
class Frame:
    subnet: str
    vars: dict[str, Any]
    caller: Optional["Step"] = None


class Environment:
    """Global bindings plus a stack of subnet activation frames.

    Name lookup checks the innermost frame, then the globals.
    """

    def __init__(self, globals: Mapping[str, Any] | None = None):
        self.globals: dict[str, Any] = dict(globals or {})
        self.frames: list[Frame] = []
        self.output: list[str] = []

    @property
    def frame(self) -> Optional[Frame]:
        return self.frames[-1] if self.frames else None

    def _scope(self, name: str) -> dict:
        frame = self.frame
        if frame is not None and name in frame.vars:
            return frame.vars
        return self.globals

    def __getitem__(self, name: str):
        scope = self._scope(name)
        if name not in scope:
            raise KeyError(name)
        return scope[name]

    def __contains__(self, name: str) -> bool:
        return name in self._scope(name)

    def get(self, name: str, default=None):
        return self._scope(name).get(name, default)

    def assign(self, name: str, value, trail: "Trail") -> None:
        scope = self._scope(name)
        trail.bound(scope, name, scope.get(name, _MISSING))
        scope[name] = value

    def snapshot(self):
        return (dict(self.globals), tuple((f.subnet, dict(f.vars)) for f in self.frames))


class Trail:
    """Undo log. Undoing down to a mark restores bindings, frames and options."""

    def __init__(self):
        self.records: list[tuple] = []

    def mark(self) -> int:
        return len(self.records)

    def bound(self, scope: dict, name: str, old) -> None:
        self.records.append(("bind", scope, name, old))

    def frame_pushed(self) -> None:
        self.records.append(("push",))

    def frame_popped(self, frame: Frame) -> None:
        self.records.append(("pop", frame))

    def option_changed(self, option: str, old) -> None:
        self.records.append(("opt", option, old))

    def undo_to(self, mark: int, env: Environment, opts: ControlOptions) -> ControlOptions:
        records = self.records
        while len(records) > mark:
            rec = records.pop()
            tag = rec[0]
            if tag == "bind":
                _, scope, name, old = rec
                if old is _MISSING:
                    scope.pop(name, None)
                else:
                    scope[name] = old
            elif tag == "push":
                env.frames.pop()
            elif tag == "pop":
                env.frames.append(rec[1])
            else:
                opts = opts.replace(**{rec[1]: rec[2]})
        return opts


# -- results ----------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """One traversed arrow: its subnet, source node and index among that node's arrows."""

    subnet: str
    node: str
    arrow: int
    target: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"{self.subnet}.{self.node}#{self.arrow}->{self.target}"


@dataclass(frozen=True)
class Solution:
    steps: tuple[Step, ...]
    bindings: dict

    def __len__(self) -> int:
        return len(self.steps)


@dataclass
class ExecutionStats:
    nodes_visited: int = 0
    backtracks: int = 0
    primitives_executed: int = 0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class ExecutionResult:
    outcome: str
    solutions: list[Solution]
    stats: ExecutionStats
    output: list[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome == "success"


# -- helpers exposed as operations -------------------------------------------

def evaluate(expr, env: Environment):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Name):
        try:
            return env[expr.name]
        except KeyError:
            raise PrimitiveError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, env)
    raise TypeError(f"not an expression: {expr!r}")


def _evaluator_value(arrow: Arrow, env: Environment, registry: PrimitiveRegistry):
    call = arrow.eval
    args = [evaluate(a, env) for a in call.args]
    try:
        value = registry[call.name].func(env, *args)
    except Exception as exc:
        raise PrimitiveError(f"evaluator {call.name} raised {exc!r}") from exc
    if not _is_number(value):
        raise PrimitiveError(f"evaluator {call.name} returned {value!r}, not a number")
    return value


def attempt_order(
    arrows: list[Arrow],
    opts: ControlOptions,
    env: Environment,
    registry: PrimitiveRegistry,
    rng: SplitMix64 | None = None,
) -> list[Arrow]:
    """Order, filter and truncate the arrows leaving one node.

    ``best`` sorts ascending by evaluator value (ties keep declaration
    order), ``random`` shuffles with ``rng``; then ``range`` drops arrows
    whose value lies outside it and ``width`` keeps the first arrows only.
    """
    needs_values = opts.order == "best" or opts.range is not None
    values: dict[int, float] = {}
    if needs_values:
        for arrow in arrows:
            if arrow.eval is None:
                why = "order=best" if opts.order == "best" else "a range filter"
                raise ConfigurationError(
                    f"arrow {arrow.source}->{arrow.target} has no evaluator but {why} is in effect")
            values[id(arrow)] = _evaluator_value(arrow, env, registry)
    ordered = list(arrows)
    if opts.order == "best":
        ordered.sort(key=lambda a: values[id(a)])
    elif opts.order == "random":
        if rng is None:
            rng = SplitMix64(opts.seed)
        rng.shuffle(ordered)
    if opts.range is not None:
        low, high = opts.range
        ordered = [a for a in ordered if low <= values[id(a)] <= high]
    if opts.width is not None:
        ordered = ordered[:opts.width]
    return ordered


def apply_control_node(node: Node, opts: ControlOptions, trail: Trail, env: Environment | None = None) -> ControlOptions:
    """Apply a CONTROL node's option changes, trailing the previous values.

    Numeric values may name variables, so limits can depend on the run.
    """
    if node.kind is not NodeKind.CONTROL:
        return opts
    changes = {}
    for mut in node.mutations:
        if mut.option not in MUTABLE_OPTIONS:
            raise ConfigurationError(f"node {node.id}: option {mut.option!r} cannot be changed at run time")
        changes[mut.option] = _option_value(node, mut.option, mut.value, env)
    try:
        new = opts.replace(**changes)
    except ConfigurationError as exc:
        raise ConfigurationError(f"node {node.id}: {exc}") from None
    for option in changes:
        old = getattr(opts, option)
        if getattr(new, option) != old:
            trail.option_changed(option, old)
    return new


def _option_value(node: Node, option: str, value, env):
    if option == "order":
        if not isinstance(value, Name):
            raise ConfigurationError(f"node {node.id}: order must be one of {', '.join(ORDER_MODES)}")
        return value.name
    if option == "backtracking":
        if not (isinstance(value, Name) and value.name in ("true", "false")):
            raise ConfigurationError(f"node {node.id}: backtracking must be true or false")
        return value.name == "true"
    if value is None:
        return None
    env = env if env is not None else Environment()
    try:
        if isinstance(value, RangeValue):
            return (evaluate(value.low, env), evaluate(value.high, env))
        return evaluate(value, env)
    except PrimitiveError as exc:
        raise ConfigurationError(f"node {node.id}: {option}: {exc}") from None


def format_value(value) -> str:
    if isinstance(value, str):
        return json.dumps(value)
    return str(value)


# -- the machine ------------------------------------------------------------

_SUCCEED = ("succeed",)


@dataclass(eq=False)
class _Choice:
    mark: int
    goals: Any
    path: Any
    subnet: str
    node: str
    remaining: list
    snapshot: Any = None


class _Machine:
    def __init__(self, net, registry, env, trail, opts, rng, trace, check_trail):
        self.net = net
        self.registry = registry
        self.env = env
        self.trail = trail
        self.opts = opts
        self.rng = rng
        self.trace = trace
        self.check_trail = check_trail
        self.stats = ExecutionStats()
        self.choices: list[_Choice] = []
        self.goals = None
        self.path = None
        self._subnets = {s.name: s for s in net.subnets} if net is not None else {}
        self._arrows: dict[tuple[str, str], list[Arrow]] = {}

    def _out(self, line: str) -> None:
        self.trace(line)

    def arrows_at(self, subnet: str, node: str) -> list[Arrow]:
        key = (subnet, node)
        if key not in self._arrows:
            self._arrows[key] = arrows_from(self.net, subnet, node)
        return self._arrows[key]

    def current_path(self) -> tuple[Step, ...]:
        out, cell = [], self.path
        while cell is not None:
            out.append(cell[0])
            cell = cell[1]
        return tuple(reversed(out))

    def _depth(self) -> int:
        return 0 if self.path is None else self.path[2]

    def solve(self, goals) -> Iterator[None]:
        """Yield each time ``goals`` is fully discharged; undo everything on exhaustion."""
        base = len(self.choices)
        base_mark = self.trail.mark()
        self.goals = goals
        while True:
            if self._run(base):
                yield
                if self._backtrack(base):
                    continue
            self.opts = self.trail.undo_to(base_mark, self.env, self.opts)
            return

    def _run(self, base: int) -> bool:
        while True:
            task, self.goals = self.goals
            tag = task[0]
            if tag == "succeed":
                return True
            if tag == "enter":
                ok = self._enter(task[1])
            elif tag == "prim":
                ok = self._primitive(task[1])
            else:
                ok = self._call(task[1], task[2])
            if not ok and not self._backtrack(base):
                return False

    def _enter(self, node_id: str) -> bool:
        frame = self.env.frame
        sub = self._subnets[frame.subnet]
        node = sub.node(node_id)
        self.stats.nodes_visited += 1
        if self.trace:
            self._out(f"ENTER {sub.name}.{node_id}")
        if node.kind is NodeKind.FINISH:
            self.env.frames.pop()
            self.trail.frame_popped(frame)
            return True
        if node.kind is NodeKind.CONTROL:
            before = self.opts
            self.opts = apply_control_node(node, self.opts, self.trail, self.env)
            if self.trace:
                for option in MUTABLE_OPTIONS:
                    old, new = getattr(before, option), getattr(self.opts, option)
                    if old != new:
                        self._out(f"OPTION {option} {_opt_text(old)}->{_opt_text(new)}")
        arrows = self.arrows_at(sub.name, node_id)
        if self.opts.max_depth is not None and self._depth() >= self.opts.max_depth:
            return False
        ordered = attempt_order(arrows, self.opts, self.env, self.registry, self.rng)
        if not ordered:
            return False
        index = {id(a): k for k, a in enumerate(arrows)}
        ordered = [(index[id(a)], a) for a in ordered]
        if len(ordered) > 1 and self.opts.backtracking:
            cp = _Choice(self.trail.mark(), self.goals, self.path, sub.name, node_id, ordered[1:])
            if self.check_trail:
                cp.snapshot = (self.env.snapshot(), self.opts)
            self.choices.append(cp)
        self._take(sub.name, node_id, *ordered[0])
        return True

    def _take(self, subnet: str, node_id: str, k: int, arrow: Arrow) -> None:
        self.path = (Step(subnet, node_id, k, arrow.target), self.path, self._depth() + 1)
        if self.trace:
            self._out(f"TRY arrow#{k} {node_id}->{arrow.target}")
        goals = (("enter", arrow.target), self.goals)
        for call in reversed(arrow.chain):
            goals = (("call", call, subnet) if call.is_subnet_call else ("prim", call), goals)
        self.goals = goals

    def _primitive(self, call: PrimitiveCall) -> bool:
        env = self.env
        args = [evaluate(a, env) for a in call.args]
        try:
            result = self.registry[call.name].func(env, *args)
        except Exception as exc:
            where = f" in subnet {env.frame.subnet}" if env.frame else ""
            raise PrimitiveError(f"primitive {call.name}({', '.join(map(format_value, args))}) raised {exc!r}{where}") from exc
        self.stats.primitives_executed += 1
        if result is False:
            ok = False
        elif result is True or result is None:
            ok = True
        elif isinstance(result, Mapping):
            for name, value in result.items():
                env.assign(name, value, self.trail)
            ok = True
        else:
            raise PrimitiveError(f"primitive {call.name} returned {result!r}; expected a bool, None or a mapping")
        if self.trace:
            self._out(f"PRIM {call.name}({', '.join(map(format_value, args))}) -> {'ok' if ok else 'fail'}")
        return ok

    def _call(self, call: PrimitiveCall, caller_subnet: str) -> bool:
        callee = self._subnets[call.name]
        args = [evaluate(a, self.env) for a in call.args]
        bindings = dict(zip(callee.params, args))
        for name in callee.locals:
            bindings[name] = None
        step = self.path[0] if self.path is not None else None
        self.env.frames.append(Frame(callee.name, bindings, step))
        self.trail.frame_pushed()
        self.goals = (("enter", callee.initial), self.goals)
        return True

    def _backtrack(self, base: int) -> bool:
        if len(self.choices) <= base:
            return False
        cp = self.choices[-1]
        self.opts = self.trail.undo_to(cp.mark, self.env, self.opts)
        if self.check_trail and cp.snapshot != (self.env.snapshot(), self.opts):
            raise InternalConsistencyError(f"trail did not restore the state at {cp.subnet}.{cp.node}")
        k, arrow = cp.remaining.pop(0)
        if not cp.remaining:
            self.choices.pop()
        self.goals, self.path = cp.goals, cp.path
        self.stats.backtracks += 1
        if self.trace:
            self._out(f"BACKTRACK to {cp.subnet}.{cp.node}")
        self._take(cp.subnet, cp.node, k, arrow)
        return True


def _opt_text(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return f"[{value[0]}, {value[1]}]"
    return str(value)


# -- entry points -----------------------------------------------------------

def check_setup(net: ControlNetwork, registry: PrimitiveRegistry) -> None:
    problems = validate(net, registry)
    if problems:
        raise SetupError("cannot run network:\n" + "\n".join(f"  {p}" for p in problems))
    for _, arrow, call in net.calls():
        if call is arrow.eval and not registry[call.name].evaluator:
            raise SetupError(f"{call.name!r} is used as an evaluator but not registered as one")


def execute(
    net: ControlNetwork,
    registry: PrimitiveRegistry,
    opts: ControlOptions | None = None,
    globals: Mapping[str, Any] | None = None,
    *,
    trace: Trace = None,
    check_trail: bool = False,
) -> ExecutionResult:
    """Run ``net`` from its main subnet and collect up to ``max_solutions`` solutions.

    ``check_trail`` snapshots the environment and options at every choice
    point and verifies they are restored exactly when it is resumed.
    """
    opts = opts or ControlOptions()
    check_setup(net, registry)
    env = Environment(globals)
    main = net.subnet(net.main)
    env.frames.append(Frame(main.name, {name: None for name in main.variables}))
    machine = _Machine(net, registry, env, Trail(), opts, SplitMix64(opts.seed), trace, check_trail)
    solutions: list[Solution] = []
    goals = (("enter", main.initial), (_SUCCEED, None))
    for _ in machine.solve(goals):
        solution = Solution(machine.current_path(), dict(env.globals))
        solutions.append(solution)
        if trace:
            trace(f"SOLUTION length={len(solution)}")
        if len(solutions) >= opts.max_solutions:
            break
    outcome = "success" if solutions else "failure"
    return ExecutionResult(outcome, solutions, machine.stats, list(env.output))


def run_chain(
    chain,
    env: Environment,
    registry: PrimitiveRegistry,
    trail: Trail,
    *,
    net: ControlNetwork | None = None,
    opts: ControlOptions | None = None,
    trace: Trace = None,
) -> Iterator[bool]:
    """Run a chain of calls in ``env``, yielding ``True`` once per way it succeeds.

    Asking for the next success retries the remaining choices of any subnet
    the chain called. When the iterator is exhausted every effect of the
    chain has been undone.
    """
    opts = opts or ControlOptions()
    machine = _Machine(net, registry, env, trail, opts, SplitMix64(opts.seed), trace, False)
    goals = (_SUCCEED, None)
    for call in reversed(tuple(chain)):
        caller = env.frame.subnet if env.frame else ""
        goals = (("call", call, caller) if call.is_subnet_call else ("prim", call), goals)
    for _ in machine.solve(goals):
        yield True
