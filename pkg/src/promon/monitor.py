"""Runtime monitor: compile a formula into a four-verdict prefix automaton.

States are formulas kept in a normalized internal form; consuming a symbol
progresses the state formula, and a finished trace is accepted when the
state formula holds on the empty remainder. State colors (permanently
satisfied / permanently violated / undecided) follow from reachability over
the finished transition graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .ltl import (
    And,
    Atom,
    FalseConst,
    Formula,
    Future,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    TrueConst,
    Until,
    atoms,
    evaluate,
)

# Reserved input symbol standing for every activity outside the alphabet.
OTHER = "__other__"

DEFAULT_STATE_BUDGET = 100_000


class CompilationError(RuntimeError):
    """Raised when the state budget is exhausted; fall back to direct
    evaluation of complete traces in that case."""


class MonitorVerdict(Enum):
    PERMANENTLY_SATISFIED = "permanently_satisfied"
    PERMANENTLY_VIOLATED = "permanently_violated"
    TEMPORARILY_SATISFIED = "temporarily_satisfied"
    TEMPORARILY_VIOLATED = "temporarily_violated"

    @property
    def permanent(self) -> bool:
        return self in (MonitorVerdict.PERMANENTLY_SATISFIED, MonitorVerdict.PERMANENTLY_VIOLATED)


COLOR_PERM_SAT = "perm_sat"
COLOR_PERM_VIOL = "perm_viol"
COLOR_TEMP = "temp"


# --- Normalized state formulas -----------------------------------------------
#
# Tuple-encoded formulas with n-ary, set-valued conjunction/disjunction so
# that progression reaches a fixed point: ("atom", name), ("not", x),
# ("and"|"or", frozenset), ("next"|"future"|"globally", x),
# ("until", left, right), and the TRUE/FALSE singletons.

NF_TRUE = ("true",)
NF_FALSE = ("false",)


def _n_not(x):
    if x == NF_TRUE:
        return NF_FALSE
    if x == NF_FALSE:
        return NF_TRUE
    if x[0] == "not":
        return x[1]
    return ("not", x)


def _n_and(items):
    flat = set()
    for item in items:
        if item == NF_FALSE:
            return NF_FALSE
        if item == NF_TRUE:
            continue
        if item[0] == "and":
            flat.update(item[1])
        else:
            flat.add(item)
    if not flat:
        return NF_TRUE
    if len(flat) == 1:
        return next(iter(flat))
    return ("and", frozenset(flat))


def _n_or(items):
    flat = set()
    for item in items:
        if item == NF_TRUE:
            return NF_TRUE
        if item == NF_FALSE:
            continue
        if item[0] == "or":
            flat.update(item[1])
        else:
            flat.add(item)
    if not flat:
        return NF_FALSE
    if len(flat) == 1:
        return next(iter(flat))
    return ("or", frozenset(flat))


def _to_nf(f: Formula):
    match f:
        case TrueConst():
            return NF_TRUE
        case FalseConst():
            return NF_FALSE
        case Atom(name):
            return ("atom", name)
        case Not(g):
            return _n_not(_to_nf(g))
        case And(l, r):
            return _n_and([_to_nf(l), _to_nf(r)])
        case Or(l, r):
            return _n_or([_to_nf(l), _to_nf(r)])
        case Implies(l, r):
            return _n_or([_n_not(_to_nf(l)), _to_nf(r)])
        case Next(g):
            return ("next", _to_nf(g))
        case Future(g):
            return ("future", _to_nf(g))
        case Globally(g):
            return ("globally", _to_nf(g))
        case Until(l, r):
            return ("until", _to_nf(l), _to_nf(r))
    raise TypeError(f"unknown formula node {f!r}")


def _progress(nf, symbol: str):
    """State formula that must hold on the rest of the trace after reading
    one event with the given activity."""
    tag = nf[0]
    if tag == "true" or tag == "false":
        return nf
    if tag == "atom":
        return NF_TRUE if nf[1] == symbol else NF_FALSE
    if tag == "not":
        return _n_not(_progress(nf[1], symbol))
    if tag == "and":
        return _n_and(_progress(item, symbol) for item in nf[1])
    if tag == "or":
        return _n_or(_progress(item, symbol) for item in nf[1])
    if tag == "next":
        # Strong next: the remainder must be nonempty, which F(true) captures.
        return _n_and([("future", NF_TRUE), nf[1]])
    if tag == "future":
        return _n_or([_progress(nf[1], symbol), nf])
    if tag == "globally":
        return _n_and([_progress(nf[1], symbol), nf])
    if tag == "until":
        _, left, right = nf
        return _n_or([_progress(right, symbol), _n_and([_progress(left, symbol), nf])])
    raise TypeError(f"unknown nf node {nf!r}")


def _empty_eval(nf) -> bool:
    """Truth of the state formula on the empty remainder."""
    tag = nf[0]
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "atom":
        return False
    if tag == "not":
        return not _empty_eval(nf[1])
    if tag == "and":
        return all(_empty_eval(item) for item in nf[1])
    if tag == "or":
        return any(_empty_eval(item) for item in nf[1])
    if tag in ("next", "future", "until"):
        return False
    if tag == "globally":
        return True
    raise TypeError(f"unknown nf node {nf!r}")


@dataclass
class MonitorAutomaton:
    """Deterministic prefix monitor over the alphabet plus OTHER.

    ``transitions[s][symbol]`` is total over ``alphabet | {OTHER}``;
    ``accepting[s]`` means a trace ending in s satisfies the formula.
    """

    alphabet: frozenset[str]
    initial: int
    transitions: list[dict[str, int]]
    accepting: list[bool]
    colors: list[str]

    def step(self, state: int, activity: str) -> int:
        symbol = activity if activity in self.alphabet else OTHER
        return self.transitions[state][symbol]

    def run(self, prefix) -> int:
        state = self.initial
        for activity in prefix:
            state = self.step(state, activity)
        return state

    def accepts(self, trace) -> bool:
        return self.accepting[self.run(trace)]

    def __len__(self) -> int:
        return len(self.transitions)


def compile_monitor(
    f: Formula,
    alphabet,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> MonitorAutomaton:
    """Build the monitor automaton for f over the given activity alphabet.

    Activities mentioned in the formula are always part of the effective
    alphabet; every other runtime activity is read as OTHER.
    """
    alphabet = frozenset(alphabet)
    if not alphabet:
        raise ValueError("alphabet must be nonempty")
    effective = sorted(alphabet | atoms(f))
    symbols = effective + [OTHER]

    initial_nf = _to_nf(f)
    index: dict[object, int] = {initial_nf: 0}
    worklist = deque([initial_nf])
    transitions: list[dict[str, int]] = []
    while worklist:
        current = worklist.popleft()
        row: dict[str, int] = {}
        for symbol in symbols:
            succ = _progress(current, symbol)
            if succ not in index:
                if len(index) >= state_budget:
                    raise CompilationError(
                        f"state budget of {state_budget} exceeded while compiling; "
                        "evaluate complete traces directly instead"
                    )
                index[succ] = len(index)
                worklist.append(succ)
            row[symbol] = index[succ]
        transitions.append(row)

    n = len(index)
    accepting = [False] * n
    for nf, i in index.items():
        accepting[i] = _empty_eval(nf)

    # Reverse reachability: a state is permanently violated when no accepting
    # state is reachable from it, permanently satisfied when no non-accepting
    # state is.
    reverse: list[set[int]] = [set() for _ in range(n)]
    for src, row in enumerate(transitions):
        for dst in row.values():
            reverse[dst].add(src)

    def backward(seeds: list[int]) -> set[int]:
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            node = stack.pop()
            for prev in reverse[node]:
                if prev not in seen:
                    seen.add(prev)
                    stack.append(prev)
        return seen

    can_reach_accepting = backward([i for i in range(n) if accepting[i]])
    can_reach_rejecting = backward([i for i in range(n) if not accepting[i]])
    colors = []
    for i in range(n):
        if i not in can_reach_accepting:
            colors.append(COLOR_PERM_VIOL)
        elif i not in can_reach_rejecting:
            colors.append(COLOR_PERM_SAT)
        else:
            colors.append(COLOR_TEMP)

    return MonitorAutomaton(
        alphabet=frozenset(effective),
        initial=0,
        transitions=transitions,
        accepting=accepting,
        colors=colors,
    )


def monitor_verdict(m: MonitorAutomaton, prefix) -> MonitorVerdict:
    """Four-valued status of the goal after the given prefix."""
    state = m.run(prefix)
    color = m.colors[state]
    if color == COLOR_PERM_SAT:
        return MonitorVerdict.PERMANENTLY_SATISFIED
    if color == COLOR_PERM_VIOL:
        return MonitorVerdict.PERMANENTLY_VIOLATED
    if m.accepting[state]:
        return MonitorVerdict.TEMPORARILY_SATISFIED
    return MonitorVerdict.TEMPORARILY_VIOLATED


def goal_satisfied(f: Formula, trace) -> bool:
    """Truth of the goal on a complete trace (direct evaluation)."""
    return evaluate(f, list(trace))
