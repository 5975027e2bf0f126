"""
Expression language module.

This module parses, prints, evaluates and symbolically differentiates the
scalar arithmetic expressions used by scenario files for custom metrics,
contact surfaces, stick rows and force entries.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          right associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Supported functions are sin, cos, sqrt and abs. Derivatives of abs use
sign(x) with sign(0) = 0; ``sign`` only appears in derived trees and cannot
be written in scenario files.
"""
import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional

from impact.core.errors import (
    DifferentiationError,
    EvaluationError,
    ExpressionSyntaxError,
    UnknownFunctionError,
)


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise EvaluationError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


def _sign(x: float) -> float:
    return float((x > 0.0) - (x < 0.0))


FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": _sqrt,
    "abs": abs,
}

_DERIVED_FUNCTIONS: Dict[str, Callable[[float], float]] = {**FUNCTIONS, "sign": _sign}

_TOKEN_RE = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class Expr:
    """Base node of the expression tree."""

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {text[pos]!r}", column=pos + 1, text=text)
        kind = match.lastgroup or "op"
        tokens.append(_Token(kind, match.group(), pos + 1))
        pos = match.end()
    tokens.append(_Token("end", "", len(text.rstrip()) + 1))
    return tokens


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, token: _Token) -> ExpressionSyntaxError:
        if token.kind == "end":
            return ExpressionSyntaxError("Unexpected end of expression", column=token.column, text=self.text)
        return ExpressionSyntaxError(f"Unexpected token {token.text!r}", column=token.column, text=self.text)

    def _expect(self, op: str) -> None:
        if self.current.kind != "op" or self.current.text != op:
            raise self._error(self.current)
        self._advance()

    def parse(self) -> Expr:
        tree = self._expr()
        if self.current.kind != "end":
            raise self._error(self.current)
        return tree

    def _expr(self) -> Expr:
        left = self._term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self._advance().text
            left = BinOp(op, left, self._term())
        return left

    def _term(self) -> Expr:
        left = self._unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self._advance().text
            left = BinOp(op, left, self._unary())
        return left

    def _unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            return BinOp("^", base, self._unary())
        return base

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(
                    f"Number {token.text!r} is out of range", column=token.column, text=self.text
                )
            return Num(value)
        if token.kind == "name":
            self._advance()
            if self.current.kind == "op" and self.current.text == "(":
                if token.text not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"Unknown function {token.text!r}", column=token.column, text=self.text
                    )
                self._advance()
                arg = self._expr()
                self._expect(")")
                return Call(token.text, arg)
            return Var(token.text)
        if token.kind == "op" and token.text == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        raise self._error(token)


def parse(text: str) -> Expr:
    """
    Parse expression text into a tree.

    Args:
        text: Expression source

    Returns:
        Expr: Parsed tree

    Raises:
        ExpressionSyntaxError: With the 1-based column of the offending token
        UnknownFunctionError: For calls outside sin, cos, sqrt, abs
    """
    return _Parser(text).parse()


def to_text(e: Expr) -> str:
    """Print a tree as fully parenthesized, re-parsable text."""
    match e:
        case Num(value=value):
            text = repr(float(value))
            return f"({text})" if value < 0 else text
        case Var(name=name):
            return name
        case Neg(operand=operand):
            return f"(-{to_text(operand)})"
        case BinOp(op=op, left=left, right=right):
            return f"({to_text(left)} {op} {to_text(right)})"
        case Call(func=func, arg=arg):
            return f"{func}({to_text(arg)})"
    raise TypeError(f"Not an expression node: {e!r}")


def free_variables(e: Expr) -> FrozenSet[str]:
    """Names of the variables a tree refers to."""
    match e:
        case Num():
            return frozenset()
        case Var(name=name):
            return frozenset({name})
        case Neg(operand=operand) | Call(arg=operand):
            return free_variables(operand)
        case BinOp(left=left, right=right):
            return free_variables(left) | free_variables(right)
    raise TypeError(f"Not an expression node: {e!r}")


def _power(base: float, exponent: float) -> float:
    try:
        result = base**exponent
    except ZeroDivisionError:
        raise EvaluationError("Zero raised to a negative power")
    except OverflowError:
        raise EvaluationError("Overflow in power")
    if isinstance(result, complex):
        raise EvaluationError(f"Negative base {base!r} with fractional exponent {exponent!r}")
    return float(result)


def evaluate(e: Expr, env: Mapping[str, float]) -> float:
    """
    Evaluate a tree in double precision.

    Args:
        e: Expression tree
        env: Variable bindings

    Returns:
        float: The value

    Raises:
        EvaluationError: On unbound variables, division by zero or domain errors
    """
    match e:
        case Num(value=value):
            return float(value)
        case Var(name=name):
            if name not in env:
                raise EvaluationError(f"Unbound variable {name!r}", data={"variable": name})
            return float(env[name])
        case Neg(operand=operand):
            return -evaluate(operand, env)
        case BinOp(op=op, left=left, right=right):
            a, b = evaluate(left, env), evaluate(right, env)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0.0:
                    raise EvaluationError("Division by zero", data={"expression": to_text(e)})
                return a / b
            return _power(a, b)
        case Call(func=func, arg=arg):
            try:
                return float(_DERIVED_FUNCTIONS[func](evaluate(arg, env)))
            except (ValueError, OverflowError) as exc:
                raise EvaluationError(f"{func} failed: {exc}")
    raise TypeError(f"Not an expression node: {e!r}")


# Constructors with constant folding


def _is_num(e: Expr, value: Optional[float] = None) -> bool:
    return isinstance(e, Num) and (value is None or e.value == value)


def _folded(value: float, op: str, a: Num, b: Num) -> Num:
    if not math.isfinite(value):
        raise EvaluationError(
            f"Folding {a.value!r} {op} {b.value!r} overflowed",
            data={"left": a.value, "right": b.value, "op": op},
        )
    return Num(value)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return _folded(a.value + b.value, "+", a, b)
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return _folded(a.value - b.value, "-", a, b)
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return _folded(a.value * b.value, "*", a, b)
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0.0:
        return _folded(a.value / b.value, "/", a, b)
    if _is_num(a, 0.0):
        return Num(0.0)
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 1.0):
        return a
    if _is_num(b, 0.0):
        return Num(1.0)
    return BinOp("^", a, b)


def differentiate(e: Expr, var: str) -> Expr:
    """
    Symbolic derivative of a tree with respect to one variable.

    Args:
        e: Expression tree
        var: Variable name

    Returns:
        Expr: Derivative tree, constant-folded

    Raises:
        DifferentiationError: For powers whose exponent depends on ``var``
    """
    match e:
        case Num():
            return Num(0.0)
        case Var(name=name):
            return Num(1.0 if name == var else 0.0)
        case Neg(operand=operand):
            return _neg(differentiate(operand, var))
        case BinOp(op="+", left=u, right=v):
            return _add(differentiate(u, var), differentiate(v, var))
        case BinOp(op="-", left=u, right=v):
            return _sub(differentiate(u, var), differentiate(v, var))
        case BinOp(op="*", left=u, right=v):
            return _add(_mul(differentiate(u, var), v), _mul(u, differentiate(v, var)))
        case BinOp(op="/", left=u, right=v):
            numerator = _sub(_mul(differentiate(u, var), v), _mul(u, differentiate(v, var)))
            return _div(numerator, _pow(v, Num(2.0)))
        case BinOp(op="^", left=u, right=n):
            if var in free_variables(n):
                raise DifferentiationError(
                    f"Exponent of {to_text(e)} depends on {var!r}", data={"expression": to_text(e)}
                )
            return _mul(_mul(n, _pow(u, _sub(n, Num(1.0)))), differentiate(u, var))
        case Call(func=func, arg=u):
            du = differentiate(u, var)
            if func == "sin":
                return _mul(Call("cos", u), du)
            if func == "cos":
                return _neg(_mul(Call("sin", u), du))
            if func == "sqrt":
                return _div(du, _mul(Num(2.0), Call("sqrt", u)))
            if func == "abs":
                return _mul(Call("sign", u), du)
            if func == "sign":
                return Num(0.0)
            raise DifferentiationError(f"No derivative for function {func!r}")
    raise DifferentiationError(f"Unsupported construct {e!r}")


@dataclass(frozen=True)
class CompiledExpression:
    """Parsed expression together with its source text."""

    source: str
    tree: Expr

    @classmethod
    def from_text(cls, text: str) -> "CompiledExpression":
        return cls(source=text, tree=parse(text))

    def __call__(self, env: Mapping[str, float]) -> float:
        return evaluate(self.tree, env)

    def derivative(self, var: str) -> Expr:
        return differentiate(self.tree, var)
