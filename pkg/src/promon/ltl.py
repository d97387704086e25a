"""Linear temporal logic over finite traces: syntax and evaluation.

Formulas are built from activity atoms with the boolean connectives and the
temporal operators X (strong next), F, G and U, all interpreted on finite
activity sequences. The grammar accepted by :func:`parse_formula`:

    atoms:      bare identifiers  [A-Za-z_][A-Za-z0-9_.-]*  or "quoted text"
    literals:   true, false
    unary:      ! X F G           (prefix)
    binary:     U  &  |  ->       (by increasing looseness; -> right-assoc,
                                   U left-assoc)
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class FormulaError(ValueError):
    """Raised on formula syntax errors; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"at position {position}: {message}")
        self.position = position


class Formula:
    """Base class for formula AST nodes. Nodes are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    activity: str

    def __post_init__(self):
        if not self.activity:
            raise ValueError("atom activity name must be nonempty")


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Future(Formula):
    operand: Formula


@dataclass(frozen=True)
class Globally(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


TRUE = TrueConst()
FALSE = FalseConst()


def atoms(f: Formula) -> frozenset[str]:
    """Activity names mentioned in the formula."""
    match f:
        case Atom(activity):
            return frozenset((activity,))
        case Not(g) | Next(g) | Future(g) | Globally(g):
            return atoms(g)
        case And(l, r) | Or(l, r) | Implies(l, r) | Until(l, r):
            return atoms(l) | atoms(r)
        case _:
            return frozenset()


# --- Parsing ----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_KEYWORDS = {"X", "F", "G", "U", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Token stream of (kind, value, position). Kinds: op, atom, lit, lparen,
    rparen, end."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(("op", "->", i))
            i += 2
            continue
        if c in "!&|()":
            kind = "lparen" if c == "(" else "rparen" if c == ")" else "op"
            tokens.append((kind, c, i))
            i += 1
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise FormulaError("unterminated quoted atom", i)
            tokens.append(("atom", "".join(buf), i))
            i = j + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            # An identifier may contain '-', but never steals the arrow of '->'.
            while word.endswith("-") and i + len(word) < n and text[i + len(word)] == ">":
                word = word[:-1]
            if word in ("true", "false"):
                tokens.append(("lit", word, i))
            elif word in _KEYWORDS:
                tokens.append(("op", word, i))
            else:
                tokens.append(("atom", word, i))
            i += len(word)
            continue
        raise FormulaError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.implies()
        kind, value, at = self.peek()
        if kind != "end":
            raise FormulaError(f"unexpected {value!r}", at)
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        kind, value, _ = self.peek()
        if kind == "op" and value == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        f = self.unary()
        while self.peek()[:2] == ("op", "U"):
            self.take()
            f = Until(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, at = self.peek()
        if kind == "op" and value in ("!", "X", "F", "G"):
            self.take()
            operand = self.unary()
            return {"!": Not, "X": Next, "F": Future, "G": Globally}[value](operand)
        return self.primary()

    def primary(self) -> Formula:
        kind, value, at = self.take()
        if kind == "lit":
            return TRUE if value == "true" else FALSE
        if kind == "atom":
            return Atom(value)
        if kind == "lparen":
            f = self.implies()
            kind, value, at = self.take()
            if kind != "rparen":
                raise FormulaError("expected ')'", at)
            return f
        raise FormulaError(f"expected a formula, found {value!r}" if value else "unexpected end of input", at)


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST; raises FormulaError with position."""
    return _Parser(_tokenize(text)).parse()


# --- Printing ---------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Until: 4}
_UNARY_PREC = 5
_PRIMARY_PREC = 6


def _atom_text(name: str) -> str:
    if _IDENT.fullmatch(name) and name not in _KEYWORDS:
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def pretty_print(f: Formula) -> str:
    """Formula text that parses back to the identical AST."""

    def wrap(child: Formula, prec: int, same_breaks: bool) -> str:
        text = render(child)
        if isinstance(child, (Atom, TrueConst, FalseConst)):
            child_prec = _PRIMARY_PREC
        else:
            child_prec = _PREC.get(type(child), _UNARY_PREC)
        if child_prec < prec or (child_prec == prec and same_breaks):
            return f"({text})"
        return text

    def render(node: Formula) -> str:
        match node:
            case TrueConst():
                return "true"
            case FalseConst():
                return "false"
            case Atom(activity):
                return _atom_text(activity)
            case Not(g):
                return "!" + wrap(g, _UNARY_PREC, False)
            case Next(g):
                return "X " + wrap(g, _UNARY_PREC, False)
            case Future(g):
                return "F " + wrap(g, _UNARY_PREC, False)
            case Globally(g):
                return "G " + wrap(g, _UNARY_PREC, False)
            case _:
                op = {And: "&", Or: "|", Implies: "->", Until: "U"}[type(node)]
                prec = _PREC[type(node)]
                right_assoc = isinstance(node, Implies)
                # Parenthesize the child on the non-associated side when it
                # sits at the same precedence level.
                left = wrap(node.left, prec, right_assoc)
                right = wrap(node.right, prec, not right_assoc)
                return f"{left} {op} {right}"

    return render(f)


# --- Finite-trace evaluation --------------------------------------------------


def _postorder(f: Formula) -> list[Formula]:
    out: list[Formula] = []
    seen: set[Formula] = set()

    def walk(node: Formula) -> None:
        if node in seen:
            return
        match node:
            case Not(g) | Next(g) | Future(g) | Globally(g):
                walk(g)
            case And(l, r) | Or(l, r) | Implies(l, r) | Until(l, r):
                walk(l)
                walk(r)
        seen.add(node)
        out.append(node)

    walk(f)
    return out


def evaluate(f: Formula, trace: list[str] | tuple[str, ...]) -> bool:
    """Truth of f at position 0 of the (possibly empty) finite trace.

    Backward pass: truth of every subformula at position i is derived from
    the truth at i+1, so the whole run is O(len * formula size).
    """
    order = _postorder(f)
    nxt: dict[Formula, bool] = {}
    # Values at position n (just past the trace): the empty-suffix case.
    cur: dict[Formula, bool] = {}
    for node in order:
        match node:
            case TrueConst():
                cur[node] = True
            case FalseConst():
                cur[node] = False
            case Atom(_):
                cur[node] = False
            case Not(g):
                cur[node] = not cur[g]
            case And(l, r):
                cur[node] = cur[l] and cur[r]
            case Or(l, r):
                cur[node] = cur[l] or cur[r]
            case Implies(l, r):
                cur[node] = (not cur[l]) or cur[r]
            case Next(_):
                cur[node] = False
            case Future(_):
                cur[node] = False
            case Globally(_):
                cur[node] = True
            case Until(_, _):
                cur[node] = False
    for i in range(len(trace) - 1, -1, -1):
        nxt = cur
        cur = {}
        symbol = trace[i]
        has_next = i + 1 < len(trace)
        for node in order:
            match node:
                case TrueConst():
                    cur[node] = True
                case FalseConst():
                    cur[node] = False
                case Atom(activity):
                    cur[node] = activity == symbol
                case Not(g):
                    cur[node] = not cur[g]
                case And(l, r):
                    cur[node] = cur[l] and cur[r]
                case Or(l, r):
                    cur[node] = cur[l] or cur[r]
                case Implies(l, r):
                    cur[node] = (not cur[l]) or cur[r]
                case Next(g):
                    cur[node] = has_next and nxt[g]
                case Future(g):
                    cur[node] = cur[g] or nxt[node]
                case Globally(g):
                    cur[node] = cur[g] and nxt[node]
                case Until(l, r):
                    cur[node] = cur[r] or (cur[l] and nxt[node])
    return cur[f]
