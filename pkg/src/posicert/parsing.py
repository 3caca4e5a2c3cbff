"""Polynomial text grammar, problem documents, and canonical serialization.

Polynomial grammar (whitespace insensitive):

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor (['*'] factor)*        # '*' or juxtaposition
    factor   := atom ['^' natural]
    atom     := rational | name | '(' expr ')'
    rational := natural ['/' natural]
    name     := [a-zA-Z][a-zA-Z0-9_]*

Parenthesized subexpressions are expanded eagerly, so the result is always
a plain term map.  Division only appears inside rational coefficients.

Problem documents are line oriented, ``key = value``, with ``#`` comments:

    vars = x, y, z
    blocks = (x, y | z)          # optional, omitted = one block
    f = "x^4*y^2 + ..."
    g = "x^2 + y^2 + z^2"        # optional, default sum of squared vars
    h = ["x^2 - y^2"]            # optional constraint list
    mode = certify               # certify | check-sos | odd-power | epsilon-margin
    n_max = 10
    m_max = 7                    # odd-power mode only
    h_margin = "x*y"             # epsilon-margin mode only
    homogeneous = true

Unknown keys are errors.  When ``vars`` is omitted the variables are
inferred from the polynomial texts in order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .poly import Grading, Polynomial, grlex_key, sum_of_squared_variables

NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
TOKEN_RE = re.compile(r"\s*(?:(?P<name>[a-zA-Z][a-zA-Z0-9_]*)|(?P<num>\d+)|(?P<op>[-+*/^()]))")

MODES = ("certify", "check-sos", "odd-power", "epsilon-margin")


class ParseError(ValueError):
    """Raised for any malformed polynomial or problem document."""


# ---------------------------------------------------------------------------
# polynomial expressions
# ---------------------------------------------------------------------------


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        pos = m.end()
        if m.group("name"):
            tokens.append(("name", m.group("name")))
        elif m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("op"):
            tokens.append(("op", m.group("op")))
    return tokens


class _ExprParser:
    def __init__(self, tokens, variables: Sequence[str]):
        self.tokens = tokens
        self.pos = 0
        self.variables = list(variables)
        self.index = {name: i for i, name in enumerate(variables)}
        self.n = len(self.variables)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ParseError("empty polynomial expression")
        p = self.expr()
        kind, val = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected trailing {val!r}")
        return p

    def expr(self) -> Polynomial:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        total = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                total = total + (t if val == "+" else -t)
            else:
                return total

    def term(self) -> Polynomial:
        product = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                product = product * self.factor()
            elif kind == "name" or (kind == "op" and val == "("):
                # juxtaposition: 2x^2y, 3(x+y)
                product = product * self.factor()
            else:
                return product

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"malformed exponent: expected a nonnegative integer, found {val!r}")
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            numerator = int(val)
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3 = self.take()
                if k3 != "num":
                    raise ParseError("malformed rational: denominator must be an integer")
                if int(v3) == 0:
                    raise ParseError("malformed rational: zero denominator")
                return Polynomial.constant(self.n, Fraction(numerator, int(v3)))
            return Polynomial.constant(self.n, numerator)
        if kind == "name":
            if val not in self.index:
                raise ParseError(f"unknown variable {val!r}")
            return Polynomial.variable(self.n, self.index[val])
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val = self.take()
            if kind != "op" or val != ")":
                raise ParseError("unbalanced parentheses")
            return inner
        if kind is None:
            raise ParseError("unexpected end of expression")
        raise ParseError(f"unexpected {val!r}")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse an expression over the declared variables into canonical form."""
    if not variables:
        raise ParseError("no variables declared")
    for name in variables:
        if not NAME_RE.fullmatch(name):
            raise ParseError(f"invalid variable name {name!r}")
    tokens = _tokenize(text)
    return _ExprParser(tokens, variables).parse()


def format_polynomial(p: Polynomial, variables: Optional[Sequence[str]] = None) -> str:
    """Canonical text: graded-lex from the top, explicit coefficients.

    ``parse_polynomial(format_polynomial(p), variables) == p`` exactly.
    Default variable names are x0, x1, ...
    """
    if variables is None:
        variables = [f"x{i}" for i in range(p.n_vars)]
    if len(variables) != p.n_vars:
        raise ValueError("variable name count does not match polynomial")
    if p.is_zero():
        return "0"
    pieces = []
    for ev in sorted(p.terms, key=grlex_key, reverse=True):
        c = p.coefficient(ev)
        mono = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(variables, ev)
            if e
        )
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(pieces)


def format_monomial(exponents, variables: Sequence[str]) -> str:
    """Monomial part only, '1' for the constant."""
    mono = "*".join(
        name if e == 1 else f"{name}^{e}" for name, e in zip(variables, exponents) if e
    )
    return mono or "1"


# ---------------------------------------------------------------------------
# problem documents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """A certification task: polynomials, grading, mode and search limits."""

    variables: tuple
    grading: Grading
    f: Polynomial
    g: Polynomial
    constraints: tuple
    mode: str = "check-sos"
    n_max: int = 10
    m_max: int = 11
    h_margin: Optional[Polynomial] = None
    homogeneous_required: bool = False

    @property
    def r(self) -> int:
        return len(self.constraints)


def strip_comment(line: str) -> str:
    """Drop a '#' comment, ignoring '#' inside double quotes."""
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def split_top_level(text: str, sep: str = ",") -> list:
    """Split on sep at bracket depth zero, respecting double quotes."""
    parts = []
    depth = 0
    in_quote = False
    current = []
    for ch in text:
        if ch == '"':
            in_quote = not in_quote
            current.append(ch)
        elif in_quote:
            current.append(ch)
        elif ch in "([{":
            depth += 1
            current.append(ch)
        elif ch in ")]}":
            depth -= 1
            current.append(ch)
        elif ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1]
    return value


def _parse_bool(value: str, key: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ParseError(f"{key}: expected true/false, found {value!r}")


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise ParseError(f"{key}: expected an integer, found {value!r}") from None


def read_key_values(document: str) -> list:
    """All (key, value, line_no) triples of a key=value document."""
    triples = []
    for line_no, raw in enumerate(document.splitlines(), start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {line_no}: expected 'key = value', found {raw.strip()!r}")
        key, _, value = line.partition("=")
        triples.append((key.strip(), value.strip(), line_no))
    return triples

_PROBLEM_KEYS = {"vars", "blocks", "f", "g", "h", "mode", "n_max", "m_max", "h_margin", "homogeneous"}


def _infer_variables(texts: list) -> list:
    seen = []
    for text in texts:
        for name in NAME_RE.findall(text):
            if name not in seen:
                seen.append(name)
    return seen


def _parse_blocks(value: str, variables: Sequence[str]) -> Grading:
    v = value.strip()
    if not (v.startswith("(") and v.endswith(")")):
        raise ParseError("blocks: expected a parenthesized group list, e.g. (x, y | z)")
    groups = [g.strip() for g in v[1:-1].split("|")]
    listed = []
    blocks = []
    start = 0
    for group in groups:
        names = [n.strip() for n in group.split(",") if n.strip()]
        if not names:
            raise ParseError("blocks: empty group")
        blocks.append(tuple(range(start, start + len(names))))
        start += len(names)
        listed.extend(names)
    if listed != list(variables):
        raise ParseError(
            f"blocks: must list the declared variables in order; found {listed}, declared {list(variables)}"
        )
    return Grading(tuple(blocks))


def parse_problem(document: str) -> ProblemSpec:
    """Parse a problem document, filling defaults and validating invariants."""
    values = {}
    for key, value, line_no in read_key_values(document):
        if key not in _PROBLEM_KEYS:
            raise ParseError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ParseError(f"line {line_no}: duplicate key {key!r}")
        values[key] = value

    if "f" not in values:
        raise ParseError("missing f")

    h_texts = []
    if "h" in values:
        v = values["h"].strip()
        if not (v.startswith("[") and v.endswith("]")):
            raise ParseError("h: expected a bracketed list of polynomial strings")
        inner = v[1:-1].strip()
        if inner:
            h_texts = [_unquote(s) for s in split_top_level(inner)]

    if "vars" in values:
        variables = [n.strip() for n in values["vars"].split(",") if n.strip()]
        if not variables:
            raise ParseError("vars: empty variable list")
    else:
        pool = [_unquote(values["f"])] + [_unquote(values.get("g", ""))] + h_texts
        pool.append(_unquote(values.get("h_margin", "")))
        variables = _infer_variables([t for t in pool if t])
        if not variables:
            raise ParseError("vars: no variables declared or inferable")
    for name in variables:
        if not NAME_RE.fullmatch(name):
            raise ParseError(f"vars: invalid variable name {name!r}")
    if len(set(variables)) != len(variables):
        raise ParseError("vars: duplicate variable name")
    n = len(variables)

    grading = _parse_blocks(values["blocks"], variables) if "blocks" in values else Grading.single(n)

    f = parse_polynomial(_unquote(values["f"]), variables)
    g = (
        parse_polynomial(_unquote(values["g"]), variables)
        if "g" in values
        else sum_of_squared_variables(n)
    )
    constraints = tuple(parse_polynomial(t, variables) for t in h_texts)
    if len(constraints) > 16:
        raise ParseError(f"h: at most 16 constraints supported, found {len(constraints)}")
    if any(h.is_zero() for h in constraints):
        raise ParseError("h: constraint polynomials must be nonzero")

    mode = values.get("mode", "check-sos").strip()
    if mode not in MODES:
        raise ParseError(f"mode: expected one of {MODES}, found {mode!r}")

    n_max = _parse_int(values["n_max"], "n_max") if "n_max" in values else 10
    if n_max < 0:
        raise ParseError("n_max: must be nonnegative")

    if "m_max" in values and mode != "odd-power":
        raise ParseError("m_max: only valid in odd-power mode")
    m_max = _parse_int(values["m_max"], "m_max") if "m_max" in values else 11
    if m_max < 1 or m_max % 2 == 0:
        raise ParseError("m_max: must be an odd positive integer")

    if "h_margin" in values and mode != "epsilon-margin":
        raise ParseError("h_margin: only valid in epsilon-margin mode")
    h_margin = None
    if mode == "epsilon-margin":
        if "h_margin" not in values:
            raise ParseError("h_margin: required in epsilon-margin mode")
        h_margin = parse_polynomial(_unquote(values["h_margin"]), variables)

    homogeneous = _parse_bool(values["homogeneous"], "homogeneous") if "homogeneous" in values else False
    if homogeneous:
        if f.is_zero():
            raise ParseError("f: zero polynomial has no degree, invalid under homogeneous = true")
        if f.multidegree(grading) is None:
            raise ParseError("f: not homogeneous w.r.t. the declared blocks")
        if g.multidegree(grading) is None:
            raise ParseError("g: not homogeneous w.r.t. the declared blocks")
        for i, h in enumerate(constraints):
            md = h.multidegree(grading)
            if md is None:
                raise ParseError(f"h[{i}]: not homogeneous w.r.t. the declared blocks")
            if any(d % 2 for d in md):
                raise ParseError(f"h[{i}]: per-block degree {md} must be even")

    return ProblemSpec(
        variables=tuple(variables),
        grading=grading,
        f=f,
        g=g,
        constraints=constraints,
        mode=mode,
        n_max=n_max,
        m_max=m_max,
        h_margin=h_margin,
        homogeneous_required=homogeneous,
    )
