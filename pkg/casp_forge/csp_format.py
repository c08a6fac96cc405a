"""
Text formats
A line-oriented CSP format (with a JSON mirror) and the ground-program
printer used by `casp-forge encode`.

    # comments run to the end of the line
    var x 1..3
    var y {1,3,5}
    alldiff x y z
    neq ne1: x y
    allowed c (x,y) {(1,1),(2,2)} direct soft
    forbidden f (x,y) {(1,1)}

alldiff and neq take an optional `name:`; without one the id is c<position>.
Trailing `direct` lowers a constraint through value atoms, `soft` makes it
non-required.
"""

import json
import re

from .asp_program import BOTTOM, CARDINALITY, CHOICE
from .csp_model import ALL_DIFFERENT, ALLOWED, FORBIDDEN, NOT_EQUAL, Constraint, CspInstance, VariableDecl
from .errors import CspSyntaxError, UnknownVariableError

FLAGS = ("direct", "soft")

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)|(?P<comment>#.*)|(?P<range>\.\.)|(?P<int>-?\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[{}(),:])"
)


class _Line:
    def __init__(self, text, number):
        self.number = number
        self.tokens = []
        pos = 0
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if match is None:
                raise CspSyntaxError(f"unexpected character {text[pos]!r}", number, pos + 1)
            if match.lastgroup not in ("space", "comment"):
                self.tokens.append((match.lastgroup, match.group(), pos + 1))
            pos = match.end()
        self.pos = 0

    def error(self, message):
        column = self.tokens[self.pos][2] if self.pos < len(self.tokens) else (self.tokens[-1][2] + len(self.tokens[-1][1]) if self.tokens else 1)
        return CspSyntaxError(message, self.number, column)

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else (None, None, None)

    def at_end(self):
        return self.pos >= len(self.tokens)

    def take(self, kind, text=None):
        tok_kind, tok_text, _ = self.peek()
        if tok_kind != kind or (text is not None and tok_text != text):
            expected = repr(text) if text else kind
            found = repr(tok_text) if tok_text is not None else "end of line"
            raise self.error(f"expected {expected}, found {found}")
        self.pos += 1
        return tok_text

    def take_int(self):
        return int(self.take("int"))

    def take_name(self):
        name = self.take("name")
        if name in FLAGS:
            self.pos -= 1
            raise self.error(f"{name!r} is a reserved word")
        return name

    def flags(self):
        seen = set()
        while not self.at_end():
            _, text, _ = self.peek()
            if text not in FLAGS or text in seen:
                raise self.error(f"unexpected {text!r}")
            seen.add(text)
            self.pos += 1
        return seen


def _domain(line):
    if line.peek()[1] == "{":
        line.take("punct", "{")
        values = [line.take_int()]
        while line.peek()[1] == ",":
            line.take("punct", ",")
            values.append(line.take_int())
        line.take("punct", "}")
        return frozenset(values)
    lo = line.take_int()
    line.take("range")
    hi = line.take_int()
    return frozenset(range(lo, hi + 1))


def _tuple(line):
    line.take("punct", "(")
    values = [line.take_int()]
    while line.peek()[1] == ",":
        line.take("punct", ",")
        values.append(line.take_int())
    line.take("punct", ")")
    return tuple(values)


def _relation(line):
    line.take("punct", "{")
    tuples = []
    if line.peek()[1] != "}":
        tuples.append(_tuple(line))
        while line.peek()[1] == ",":
            line.take("punct", ",")
            tuples.append(_tuple(line))
    line.take("punct", "}")
    return frozenset(tuples)


def _scope(line):
    line.take("punct", "(")
    names = [line.take_name()]
    while line.peek()[1] == ",":
        line.take("punct", ",")
        names.append(line.take_name())
    line.take("punct", ")")
    return tuple(names)


def parse_csp(text):
    """
    Parse the line format (or its JSON mirror when the text starts with '{')

    Raises:
        CspSyntaxError, UnknownVariableError, ArityMismatchError
    """
    if text.lstrip().startswith("{"):
        return parse_csp_json(text)

    variables = {}
    constraints = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(raw, number)
        if line.at_end():
            continue
        keyword = line.take("name")
        if keyword == "var":
            name = line.take_name()
            if name in variables:
                line.pos -= 1
                raise line.error(f"duplicate variable {name!r}")
            variables[name] = VariableDecl(name, _domain(line))
            if not line.at_end():
                raise line.error(f"unexpected {line.peek()[1]!r}")
            continue

        position = len(constraints) + 1
        if keyword in (ALL_DIFFERENT, NOT_EQUAL):
            cid = f"c{position}"
            if line.peek(1)[1] == ":":
                cid = line.take_name()
                line.take("punct", ":")
            scope = []
            while not line.at_end() and line.peek()[1] not in FLAGS:
                scope.append(line.take_name())
            tuples = frozenset()
        elif keyword in (ALLOWED, FORBIDDEN):
            cid = line.take_name()
            scope = _scope(line)
            tuples = _relation(line)
        else:
            line.pos -= 1
            raise line.error(f"unknown declaration {keyword!r}")
        flags = line.flags()

        if any(c.id == cid for c in constraints):
            raise CspSyntaxError(f"duplicate constraint id {cid!r}", number, 1)
        for name in scope:
            if name not in variables:
                raise UnknownVariableError(name, cid)
        constraints.append(
            Constraint(
                cid,
                tuple(scope),
                keyword,
                tuples,
                required="soft" not in flags,
                lowering="direct" if "direct" in flags else None,
            )
        )
    return CspInstance(tuple(variables.values()), tuple(constraints))


def _flag_suffix(c):
    flags = []
    if c.lowering == "direct":
        flags.append("direct")
    if not c.required:
        flags.append("soft")
    return "".join(f" {flag}" for flag in flags)


def _format_domain(decl):
    if decl.is_interval:
        return f"{decl.lo}..{decl.hi}"
    return "{" + ",".join(str(v) for v in sorted(decl.domain)) + "}"


def serialize_csp(csp):
    lines = [f"var {decl.name} {_format_domain(decl)}" for decl in csp.variables]
    for position, c in enumerate(csp.constraints, start=1):
        if c.kind in (ALL_DIFFERENT, NOT_EQUAL):
            label = "" if c.id == f"c{position}" else f"{c.id}: "
            lines.append(f"{c.kind} {label}{' '.join(c.scope)}{_flag_suffix(c)}")
        else:
            relation = ",".join("(" + ",".join(str(v) for v in t) + ")" for t in sorted(c.tuples))
            lines.append(f"{c.kind} {c.id} ({','.join(c.scope)}) {{{relation}}}{_flag_suffix(c)}")
    return "\n".join(lines) + "\n"


def csp_to_dict(csp):
    return {
        "variables": [{"name": decl.name, "domain": sorted(decl.domain)} for decl in csp.variables],
        "constraints": [
            {
                "id": c.id,
                "kind": c.kind,
                "scope": list(c.scope),
                "tuples": [list(t) for t in sorted(c.tuples)],
                "required": c.required,
                "lowering": c.lowering,
            }
            for c in csp.constraints
        ],
    }


def parse_csp_json(text):
    """The JSON mirror: {"variables": [{name, domain}], "constraints": [{id, kind, scope, ...}]}"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CspSyntaxError(exc.msg, exc.lineno, exc.colno)
    try:
        variables = [VariableDecl(v["name"], frozenset(v["domain"])) for v in data["variables"]]
        names = {decl.name for decl in variables}
        constraints = []
        for c in data.get("constraints", []):
            for name in c["scope"]:
                if name not in names:
                    raise UnknownVariableError(name, c["id"])
            constraints.append(
                Constraint(
                    c["id"],
                    tuple(c["scope"]),
                    c["kind"],
                    frozenset(tuple(t) for t in c.get("tuples", [])),
                    c.get("required", True),
                    c.get("lowering"),
                )
            )
    except (KeyError, TypeError) as exc:
        raise CspSyntaxError(f"malformed JSON instance ({exc})", 1, 1)
    return CspInstance(tuple(variables), tuple(constraints))


def _body(rule):
    return [str(a) for a in rule.body_pos] + [f"not {a}" for a in rule.body_neg]


def format_rule(rule):
    """One rule in the usual ASP surface syntax; the bottom head prints empty."""
    if rule.kind == CHOICE:
        head = "{" + "; ".join(str(a) for a in rule.head) + "}"
    else:
        head = "" if rule.head[0] == BOTTOM else str(rule.head[0])

    if rule.kind == CARDINALITY:
        body = f"{rule.bound} {{{'; '.join(_body(rule))}}}"
    else:
        body = ", ".join(_body(rule))

    if not body:
        return f"{head}." if head else ":- ."
    return f"{head} :- {body}." if head else f":- {body}."


def emit_program(p):
    return "".join(format_rule(rule) + "\n" for rule in p.rules)
