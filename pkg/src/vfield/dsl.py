"""Text format for declaring vector fields.

A system is a sequence of statements separated by semicolons or
newlines: variable declarations (``vars x, y``), parameter
declarations with optional rational values (``params a, b = 2``),
differential parameters with a prescribed derivative
(``param z with z' = b*z``), and one equation per variable
(``x' = x*(a*y + b)``).  Expressions use ``+ - * / ^`` with integer
exponents, parentheses, rational literals, and declared names.

Parsing is total: malformed input raises a structured error carrying
the 1-based line and column, never an unstructured crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .algebra import DiffParam, MultiPoly, RatFunc, Scalar
from .errors import (
    DSLSyntaxError,
    DuplicateEquation,
    UndeclaredName,
    VFieldError,
)
from .vectorfield import VectorField

KEYWORDS = frozenset({"vars", "params", "param", "with"})

MAX_EXPONENT = 64


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUMBER, OP, NEWLINE, END
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("NEWLINE", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("NUMBER", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in "+-*/^()=,;'":
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise DSLSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("END", "", line, col))
    return tokens


@dataclass(frozen=True)
class ParamDecl:
    """A declared parameter, optionally pinned to a rational value."""

    name: str
    value: Optional[Fraction] = None

    def __str__(self) -> str:
        if self.value is None:
            return self.name
        return f"{self.name} = {self.value}"


@dataclass(frozen=True)
class SystemSpec:
    """Parsed system: declarations plus one equation per variable.

    Equations are stored in declaration order of the variables and hold
    canonical rational functions over the space of variables and
    differential parameters, with undetermined parameters as symbolic
    coefficients.
    """

    variables: Tuple[str, ...]
    params: Tuple[ParamDecl, ...]
    diff_params: Tuple[DiffParam, ...]
    equations: Tuple[Tuple[str, RatFunc], ...]

    @property
    def space(self) -> Tuple[str, ...]:
        return self.variables + tuple(p.name for p in self.diff_params)

    def param_values(
        self, overrides: Mapping[str, Union[Fraction, int, Scalar]] = {}
    ) -> Dict[str, Scalar]:
        """Declared parameter values merged with overrides (which win)."""
        declared = {p.name for p in self.params}
        values: Dict[str, Scalar] = {}
        for p in self.params:
            if p.value is not None:
                values[p.name] = Scalar.from_fraction(p.value)
        for name, value in overrides.items():
            if name not in declared:
                raise UndeclaredName(f"cannot set undeclared parameter {name!r}")
            values[name] = Scalar.coerce(value)
        return values

    def to_vector_field(
        self, overrides: Mapping[str, Union[Fraction, int, Scalar]] = {}
    ) -> VectorField:
        """Build the vector field, specializing parameters that carry
        declared or overridden values; the rest stay symbolic."""
        values = self.param_values(overrides)
        components = []
        for _, expr in self.equations:
            components.append(
                RatFunc(expr.num.subst_params(values), expr.den.subst_params(values))
            )
        dps = tuple(
            DiffParam(dp.name, dp.mode, dp.coeff.subst(values))
            for dp in self.diff_params
        )
        return VectorField(self.variables, components, dps)

    def parse_expression(
        self,
        text: str,
        overrides: Mapping[str, Union[Fraction, int, Scalar]] = {},
    ) -> RatFunc:
        """Parse a standalone expression over this system's names."""
        values = self.param_values(overrides)
        parser = _Parser(_tokenize(text), _Scope.from_spec(self))
        expr = parser.parse_expr()
        parser.skip_separators()
        tok = parser.peek()
        if tok.kind != "END":
            raise DSLSyntaxError(
                f"unexpected {tok.text!r} after expression", tok.line, tok.column
            )
        return RatFunc(expr.num.subst_params(values), expr.den.subst_params(values))

    def pretty(self) -> str:
        """Canonical text whose parse equals this spec exactly."""
        lines = [f"vars {', '.join(self.variables)}"]
        if self.params:
            lines.append(f"params {', '.join(str(p) for p in self.params)}")
        for dp in self.diff_params:
            coeff = str(dp.coeff)
            if any(ch in coeff for ch in "+-/") and not coeff.lstrip("-").isdigit():
                coeff = f"({coeff})"
            if dp.mode == "LOG":
                rhs = f"{coeff}*{dp.name}"
            else:
                rhs = coeff
            lines.append(f"param {dp.name} with {dp.name}' = {rhs}")
        for name, expr in self.equations:
            lines.append(f"{name}' = {expr}")
        return "\n".join(lines) + "\n"


class _Scope:
    """Declared names visible to expressions."""

    def __init__(self):
        self.variables: List[str] = []
        self.params: List[ParamDecl] = []
        self.diff_params: List[DiffParam] = []

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "_Scope":
        scope = cls()
        scope.variables = list(spec.variables)
        scope.params = list(spec.params)
        scope.diff_params = list(spec.diff_params)
        return scope

    @property
    def space(self) -> Tuple[str, ...]:
        return tuple(self.variables) + tuple(dp.name for dp in self.diff_params)

    def declared(self, name: str) -> bool:
        return (
            name in self.variables
            or any(p.name == name for p in self.params)
            or any(dp.name == name for dp in self.diff_params)
        )

    def atom(self, name: str) -> Optional[RatFunc]:
        space = self.space
        if name in space:
            return RatFunc.var(space, name)
        if any(p.name == name for p in self.params):
            return RatFunc.const(space, Scalar.sym(name))
        return None


class _Parser:
    def __init__(self, tokens: List[Token], scope: _Scope):
        self.tokens = tokens
        self.pos = 0
        self.scope = scope

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "END":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> DSLSyntaxError:
        tok = tok or self.peek()
        return DSLSyntaxError(message, tok.line, tok.column)

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            shown = tok.text if tok.kind != "END" else "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}", tok)
        return self.next()

    def expect_name(self, what: str = "a name") -> Token:
        tok = self.peek()
        if tok.kind != "NAME":
            shown = tok.text if tok.kind != "END" else "end of input"
            raise self.error(f"expected {what}, found {shown!r}", tok)
        if tok.text in KEYWORDS:
            raise self.error(f"{tok.text!r} is a keyword", tok)
        return self.next()

    def at_separator(self) -> bool:
        tok = self.peek()
        return tok.kind == "NEWLINE" or (tok.kind == "OP" and tok.text == ";")

    def skip_separators(self) -> None:
        while self.at_separator():
            self.next()

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> RatFunc:
        value = self.parse_term()
        while True:
            nxt = self.peek()
            if nxt.kind == "OP" and nxt.text in "+-":
                self.next()
                rhs = self.parse_term()
                value = value + rhs if nxt.text == "+" else value - rhs
            else:
                return value

    def parse_term(self) -> RatFunc:
        value = self.parse_factor()
        while True:
            nxt = self.peek()
            if nxt.kind == "OP" and nxt.text in "*/":
                self.next()
                rhs = self.parse_factor()
                try:
                    value = value * rhs if nxt.text == "*" else value / rhs
                except VFieldError as exc:
                    raise self.error(str(exc), nxt)
            else:
                return value

    def parse_factor(self) -> RatFunc:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.next()
            return -self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> RatFunc:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "^":
            self.next()
            sign = 1
            if self.peek().kind == "OP" and self.peek().text == "-":
                self.next()
                sign = -1
            num = self.peek()
            if num.kind != "NUMBER":
                raise self.error("expected an integer exponent", num)
            self.next()
            exponent = sign * int(num.text)
            if abs(exponent) > MAX_EXPONENT:
                raise self.error(
                    f"exponent {exponent} exceeds the limit {MAX_EXPONENT}", num
                )
            try:
                return base**exponent
            except VFieldError as exc:
                raise self.error(str(exc), num)
        return base

    def parse_atom(self) -> RatFunc:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.next()
            return RatFunc.const(self.scope.space, Fraction(int(tok.text)))
        if tok.kind == "NAME":
            if tok.text in KEYWORDS:
                raise self.error(f"{tok.text!r} is a keyword", tok)
            value = self.scope.atom(tok.text)
            if value is None:
                raise UndeclaredName(
                    f"undeclared name {tok.text!r} at line {tok.line}, "
                    f"column {tok.column}"
                )
            self.next()
            return value
        if tok.kind == "OP" and tok.text == "(":
            self.next()
            value = self.parse_expr()
            self.expect_op(")")
            return value
        shown = tok.text if tok.kind != "END" else "end of input"
        raise self.error(f"expected an expression, found {shown!r}", tok)

    # -- statements ----------------------------------------------------------

    def parse_rational(self) -> Fraction:
        sign = 1
        if self.peek().kind == "OP" and self.peek().text == "-":
            self.next()
            sign = -1
        num = self.peek()
        if num.kind != "NUMBER":
            raise self.error("expected a rational value", num)
        self.next()
        value = Fraction(sign * int(num.text))
        if self.peek().kind == "OP" and self.peek().text == "/":
            self.next()
            den = self.peek()
            if den.kind != "NUMBER":
                raise self.error("expected a denominator", den)
            self.next()
            if int(den.text) == 0:
                raise self.error("zero denominator", den)
            value /= int(den.text)
        return value

    def declare(self, name_tok: Token) -> None:
        if self.scope.declared(name_tok.text):
            raise self.error(f"{name_tok.text!r} is already declared", name_tok)


def parse_system(text: str) -> SystemSpec:
    """Parse system text into a SystemSpec.

    Every declared variable must receive exactly one equation;
    equations and derivative prescriptions may only reference names
    already declared.
    """
    parser = _Parser(_tokenize(text), _Scope())
    scope = parser.scope
    equations: Dict[str, RatFunc] = {}
    order: List[str] = []

    parser.skip_separators()
    while parser.peek().kind != "END":
        tok = parser.peek()
        if tok.kind == "NAME" and tok.text == "vars":
            parser.next()
            while True:
                name = parser.expect_name("a variable name")
                parser.declare(name)
                scope.variables.append(name.text)
                if parser.peek().kind == "OP" and parser.peek().text == ",":
                    parser.next()
                    continue
                break
        elif tok.kind == "NAME" and tok.text == "params":
            parser.next()
            while True:
                name = parser.expect_name("a parameter name")
                parser.declare(name)
                value: Optional[Fraction] = None
                if parser.peek().kind == "OP" and parser.peek().text == "=":
                    parser.next()
                    value = parser.parse_rational()
                scope.params.append(ParamDecl(name.text, value))
                if parser.peek().kind == "OP" and parser.peek().text == ",":
                    parser.next()
                    continue
                break
        elif tok.kind == "NAME" and tok.text == "param":
            parser.next()
            name = parser.expect_name("a parameter name")
            parser.declare(name)
            with_tok = parser.peek()
            if not (with_tok.kind == "NAME" and with_tok.text == "with"):
                raise parser.error("expected 'with'", with_tok)
            parser.next()
            lhs = parser.expect_name("the parameter name")
            if lhs.text != name.text:
                raise parser.error(
                    f"derivative must be given for {name.text!r}", lhs
                )
            parser.expect_op("'")
            parser.expect_op("=")
            # The derivative may reference earlier parameters and the
            # new symbol itself; parse over a temporary scope.
            scope.diff_params.append(DiffParam.const(name.text, 0))
            rhs_tok = parser.peek()
            rhs = parser.parse_expr()
            scope.diff_params.pop()
            dp = _classify_diff_param(name.text, rhs, rhs_tok)
            scope.diff_params.append(dp)
        elif tok.kind == "NAME":
            name = parser.next()
            parser.expect_op("'")
            parser.expect_op("=")
            if name.text in KEYWORDS:
                raise parser.error(f"{name.text!r} is a keyword", name)
            if name.text not in scope.variables:
                if scope.declared(name.text):
                    raise parser.error(
                        f"equations may only be given for variables, and "
                        f"{name.text!r} is not one",
                        name,
                    )
                raise UndeclaredName(
                    f"undeclared name {name.text!r} at line {name.line}, "
                    f"column {name.column}"
                )
            if name.text in equations:
                raise DuplicateEquation(
                    f"variable {name.text!r} already has an equation "
                    f"(line {name.line}, column {name.column})"
                )
            equations[name.text] = parser.parse_expr()
            order.append(name.text)
        else:
            raise parser.error(
                f"expected a statement, found {tok.text!r}", tok
            )
        if parser.peek().kind != "END" and not parser.at_separator():
            raise parser.error(
                f"expected end of statement, found {parser.peek().text!r}"
            )
        parser.skip_separators()

    end = parser.peek()
    if not scope.variables:
        raise DSLSyntaxError("no variables declared", end.line, end.column)
    for v in scope.variables:
        if v not in equations:
            raise DSLSyntaxError(f"variable {v!r} has no equation", end.line, end.column)

    space = scope.space
    fixed = tuple(
        (v, RatFunc(equations[v].num.with_variables(space),
                    equations[v].den.with_variables(space)))
        for v in scope.variables
    )
    return SystemSpec(
        variables=tuple(scope.variables),
        params=tuple(scope.params),
        diff_params=tuple(scope.diff_params),
        equations=fixed,
    )


def _classify_diff_param(name: str, rhs: RatFunc, tok: Token) -> DiffParam:
    """A prescribed derivative must be constant or a constant multiple
    of the parameter itself."""
    if not rhs.is_polynomial():
        raise DSLSyntaxError(
            f"derivative of {name!r} must be polynomial", tok.line, tok.column
        )
    poly = rhs.as_poly()
    others = [
        v for v in poly.variables if v != name and poly.degree_in(v) > 0
    ]
    if others:
        raise DSLSyntaxError(
            f"derivative of {name!r} may not involve {others[0]!r}",
            tok.line,
            tok.column,
        )
    if poly.degree_in(name) == 0:
        return DiffParam.const(name, poly.constant_value())
    if poly.degree_in(name) > 1:
        raise DSLSyntaxError(
            f"derivative of {name!r} must be constant or linear in {name!r}",
            tok.line,
            tok.column,
        )
    idx = poly.variables.index(name)
    coeff = None
    for expo, c in poly.terms.items():
        if expo[idx] == 0 and not c.is_zero():
            raise DSLSyntaxError(
                f"derivative of {name!r} must be a pure multiple of {name!r} "
                "or a constant",
                tok.line,
                tok.column,
            )
        if expo[idx] == 1:
            coeff = c
    return DiffParam.log(name, coeff if coeff is not None else Scalar.zero())
