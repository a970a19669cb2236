"""Feature models: an indentation-based text format, its parser and printer.

A model file looks like::

    # comments and blank lines are ignored
    Aircraft
      Wing: mandatory xor
        High
        Shoulder
        Low
      Engine: optional xor
        Piston
        Jet
    constraint: Metal & Wood => High

Each feature line is ``name [":" kind...]``.  The kind tokens are an optional
relation to the parent (``mandatory`` or ``optional``, default ``optional``)
and an optional group marker (``or`` or ``xor``) that turns every child of
that feature into a member of one group.  Group members take their relation
from the group and may carry only a group marker of their own.

Features are numbered level by level (root first, then its children, then
grandchildren), children in the order they are written.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

ROOT = "root"
MANDATORY = "mandatory"
OPTIONAL = "optional"
OR_MEMBER = "or-member"
XOR_MEMBER = "xor-member"
KINDS = (ROOT, MANDATORY, OPTIONAL, OR_MEMBER, XOR_MEMBER)

_RELATIONS = {MANDATORY, OPTIONAL}
_GROUPS = {"or", "xor"}
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_RESERVED = {"constraint", *_RELATIONS, *_GROUPS}
INDENT = 2


class FeatureModelError(ValueError):
    """Raised for malformed or inconsistent feature model text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


# -- cross-tree constraint expressions ---------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Implies:
    left: "Expr"
    right: "Expr"


Expr = Var | Not | And | Or | Implies

# binding strength used by the printer, higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Var: 5}


def evaluate(expr: Expr, selected) -> bool:
    """Truth value of ``expr`` when exactly the features in ``selected`` are on."""
    if isinstance(expr, Var):
        return expr.index in selected
    if isinstance(expr, Not):
        return not evaluate(expr.arg, selected)
    if isinstance(expr, And):
        return evaluate(expr.left, selected) and evaluate(expr.right, selected)
    if isinstance(expr, Or):
        return evaluate(expr.left, selected) or evaluate(expr.right, selected)
    return (not evaluate(expr.left, selected)) or evaluate(expr.right, selected)


def variables(expr: Expr) -> list[int]:
    """Feature indices referenced by ``expr``, one entry per occurrence."""
    if isinstance(expr, Var):
        return [expr.index]
    if isinstance(expr, Not):
        return variables(expr.arg)
    return variables(expr.left) + variables(expr.right)


def format_expr(expr: Expr, names) -> str:
    if isinstance(expr, Var):
        return names[expr.index]
    if isinstance(expr, Not):
        inner = format_expr(expr.arg, names)
        if _PREC[type(expr.arg)] < _PREC[Not]:
            inner = f"({inner})"
        return "!" + inner
    op = {And: "&", Or: "|", Implies: "=>"}[type(expr)]
    prec = _PREC[type(expr)]
    left = format_expr(expr.left, names)
    right = format_expr(expr.right, names)
    lp, rp = _PREC[type(expr.left)], _PREC[type(expr.right)]
    # & and | associate left, => associates right
    if lp < prec or (lp == prec and isinstance(expr, Implies)):
        left = f"({left})"
    if rp < prec or (rp == prec and not isinstance(expr, Implies)):
        right = f"({right})"
    return f"{left} {op} {right}"


class _ExprParser:
    def __init__(self, text: str, line: int, offset: int):
        # offset: 0-based column of text[0] within the source line
        self.tokens: list[tuple[str, str, int]] = []
        self.line = line
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            col = offset + pos + 1
            if text.startswith("=>", pos):
                self.tokens.append(("op", "=>", col))
                pos += 2
            elif text[pos] in "!&|()":
                self.tokens.append(("op", text[pos], col))
                pos += 1
            else:
                m = _NAME.match(text, pos)
                if m is None:
                    raise FeatureModelError(f"unexpected character {text[pos]!r}", line, col)
                self.tokens.append(("name", m.group(0), col))
                pos = m.end()
        self.end_col = offset + len(text) + 1
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, value: str | None = None):
        tok = self.peek()
        if tok is None:
            raise FeatureModelError("unexpected end of constraint", self.line, self.end_col)
        if value is not None and tok[1] != value:
            raise FeatureModelError(f"expected {value!r}, found {tok[1]!r}", self.line, tok[2])
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise FeatureModelError("empty constraint", self.line, self.end_col)
        expr = self.implies()
        tok = self.peek()
        if tok is not None:
            raise FeatureModelError(f"unexpected token {tok[1]!r}", self.line, tok[2])
        return expr

    def implies(self):
        left = self.disjunction()
        tok = self.peek()
        if tok is not None and tok[1] == "=>":
            self.take()
            return ("=>", left, self.implies())
        return left

    def disjunction(self):
        left = self.conjunction()
        while (tok := self.peek()) is not None and tok[1] == "|":
            self.take()
            left = ("|", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.negation()
        while (tok := self.peek()) is not None and tok[1] == "&":
            self.take()
            left = ("&", left, self.negation())
        return left

    def negation(self):
        tok = self.peek()
        if tok is not None and tok[1] == "!":
            self.take()
            return ("!", self.negation())
        return self.atom()

    def atom(self):
        tok = self.take()
        if tok[1] == "(":
            inner = self.implies()
            self.take(")")
            return inner
        if tok[0] != "name":
            raise FeatureModelError(f"unexpected token {tok[1]!r}", self.line, tok[2])
        return ("name", tok[1], tok[2])


def _resolve(raw, index: dict[str, int], line: int) -> Expr:
    tag = raw[0]
    if tag == "name":
        if raw[1] not in index:
            raise FeatureModelError(f"constraint references unknown feature {raw[1]!r}", line, raw[2])
        return Var(index[raw[1]])
    if tag == "!":
        return Not(_resolve(raw[1], index, line))
    cls = {"&": And, "|": Or, "=>": Implies}[tag]
    return cls(_resolve(raw[1], index, line), _resolve(raw[2], index, line))


def parse_expr(text: str, names) -> Expr:
    """Parse a standalone constraint expression against a list of feature names."""
    raw = _ExprParser(text, 1, 0).parse()
    return _resolve(raw, {name: i for i, name in enumerate(names)}, 1)


# -- the model ---------------------------------------------------------------


@dataclass(frozen=True)
class Feature:
    index: int
    name: str
    kind: str
    parent: int | None
    group: str | None = None  # "or"/"xor" when this feature's children form a group


@dataclass(frozen=True)
class FeatureModel:
    features: tuple[Feature, ...]
    ctcs: tuple[Expr, ...] = ()
    _by_name: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {f.name: f.index for f in self.features})

    @property
    def n(self) -> int:
        return len(self.features)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    @property
    def root(self) -> int:
        return 0

    def index(self, name: str) -> int:
        return self._by_name[name]

    def children(self, index: int) -> list[int]:
        return [f.index for f in self.features if f.parent == index]

    def is_valid_product(self, selected) -> bool:
        """Tree + constraint semantics evaluated directly on a set of selected indices."""
        selected = set(selected)
        if self.features and self.root not in selected:
            return False
        for f in self.features:
            on = f.index in selected
            if f.parent is not None and on and f.parent not in selected:
                return False
            if not on:
                continue
            kids = self.children(f.index)
            if f.group is not None:
                count = sum(k in selected for k in kids)
                if count == 0 or (f.group == "xor" and count > 1):
                    return False
            else:
                for k in kids:
                    if self.features[k].kind == MANDATORY and k not in selected:
                        return False
        return all(evaluate(c, selected) for c in self.ctcs)


def feature_list(fm: FeatureModel) -> list[tuple[int, str]]:
    return [(f.index, f.name) for f in fm.features]


@dataclass
class _Node:
    name: str
    line: int
    relation: str | None
    group: str | None
    children: list["_Node"] = field(default_factory=list)


def _parse_kinds(tokens: list[tuple[str, int]], line: int):
    relation = group = None
    for tok, col in tokens:
        if tok in _RELATIONS:
            if relation is not None:
                raise FeatureModelError("more than one relation kind", line, col)
            relation = tok
        elif tok in _GROUPS:
            if group is not None:
                raise FeatureModelError("more than one group kind", line, col)
            group = tok
        else:
            raise FeatureModelError(f"unknown kind {tok!r}", line, col)
    return relation, group


def parse_feature_model(text: str) -> FeatureModel:
    root: _Node | None = None
    stack: list[_Node] = []
    raw_ctcs = []
    seen: dict[str, int] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip(" ")
        indent = len(line) - len(stripped)
        if stripped.startswith("\t"):
            raise FeatureModelError("tabs are not allowed for indentation", lineno, indent + 1)
        if stripped.startswith("constraint:"):
            offset = indent + len("constraint:")
            raw_ctcs.append((_ExprParser(stripped[len("constraint:"):], lineno, offset).parse(), lineno))
            continue
        if indent % INDENT:
            raise FeatureModelError(f"indentation must be a multiple of {INDENT} spaces", lineno, indent + 1)
        depth = indent // INDENT
        m = _NAME.match(stripped)
        if m is None:
            raise FeatureModelError("expected a feature name", lineno, indent + 1)
        name = m.group(0)
        if name in _RESERVED:
            raise FeatureModelError(f"{name!r} is a reserved word", lineno, indent + 1)
        rest = stripped[m.end():]
        kind_tokens = []
        if rest.strip():
            colon = rest.find(":")
            if colon < 0 or rest[:colon].strip():
                col = indent + m.end() + len(rest) - len(rest.lstrip()) + 1
                raise FeatureModelError("expected ':' after feature name", lineno, col)
            base = indent + m.end() + colon + 1
            for tm in re.finditer(r"\S+", rest[colon + 1:]):
                kind_tokens.append((tm.group(0), base + tm.start() + 1))
        relation, group = _parse_kinds(kind_tokens, lineno)
        if name in seen:
            raise FeatureModelError(
                f"duplicate feature name {name!r} (first declared on line {seen[name]})", lineno, indent + 1)
        seen[name] = lineno
        node = _Node(name, lineno, relation, group)

        if depth == 0:
            if root is not None:
                raise FeatureModelError(
                    f"multiple roots: {name!r} has no parent but {root.name!r} is already the root",
                    lineno, 1)
            if relation is not None:
                raise FeatureModelError("the root cannot be mandatory or optional", lineno, kind_tokens[0][1])
            root = node
            stack = [node]
            continue
        if depth > len(stack):
            raise FeatureModelError("unexpected indentation", lineno, indent + 1)
        parent = stack[depth - 1]
        if parent.group is not None and relation is not None:
            raise FeatureModelError(
                f"{name!r} is a member of an {parent.group} group and cannot be {relation}", lineno, indent + 1)
        parent.children.append(node)
        del stack[depth:]
        stack.append(node)

    if root is None:
        raise FeatureModelError("no features declared")

    # level-order numbering
    order: list[tuple[_Node, _Node | None]] = []
    queue = deque([(root, None)])
    while queue:
        node, parent = queue.popleft()
        order.append((node, parent))
        if node.group is not None and len(node.children) < 2:
            raise FeatureModelError(
                f"{node.group} group under {node.name!r} needs at least 2 members, has {len(node.children)}",
                node.line)
        queue.extend((child, node) for child in node.children)

    index = {node.name: i for i, (node, _) in enumerate(order)}
    features = []
    for i, (node, parent) in enumerate(order):
        if parent is None:
            kind = ROOT
        elif parent.group is not None:
            kind = OR_MEMBER if parent.group == "or" else XOR_MEMBER
        else:
            kind = node.relation or OPTIONAL
        features.append(Feature(i, node.name, kind, None if parent is None else index[parent.name], node.group))
    ctcs = tuple(_resolve(raw, index, lineno) for raw, lineno in raw_ctcs)
    return FeatureModel(tuple(features), ctcs)


def format_feature_model(fm: FeatureModel) -> str:
    """Inverse of :func:`parse_feature_model` (up to comments and spacing)."""
    lines: list[str] = []

    def emit(i: int, depth: int):
        f = fm.features[i]
        tokens = []
        if f.kind in (MANDATORY, OPTIONAL):
            tokens.append(f.kind)
        if f.group:
            tokens.append(f.group)
        text = " " * (INDENT * depth) + f.name
        if tokens:
            text += ": " + " ".join(tokens)
        lines.append(text)
        for child in fm.children(i):
            emit(child, depth + 1)

    if fm.features:
        emit(fm.root, 0)
    names = fm.names
    for ctc in fm.ctcs:
        lines.append("constraint: " + format_expr(ctc, names))
    return "\n".join(lines) + "\n"


def load_feature_model(path) -> FeatureModel:
    with open(path, encoding="utf-8") as fh:
        return parse_feature_model(fh.read())
