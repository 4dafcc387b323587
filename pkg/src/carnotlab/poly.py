"""Exact multivariate polynomials over Q for step-2 group calculus.

Variables are ordered (z_1, ..., z_m, s_1, ..., s_m2, t): horizontal first,
then vertical, then time.  Horizontal variables carry weight 1, vertical
variables and t carry weight 2 (parabolic scaling), so the weighted degree of
a monomial z^a s^b t^c is |a| + 2|b| + 2c.

A Poly is a dict {exponent tuple: Fraction} that never stores a zero
coefficient.  Terms are reported in graded-lex order: higher weighted degree
first, ties broken lexicographically with earlier variables more significant.

Example:

    >>> from carnotlab.groups import heisenberg
    >>> from carnotlab.poly import parse_poly
    >>> p = parse_poly("x + 6*y*s - x^3", heisenberg(1))
    >>> str(p)
    '-x^3 + 6*y*s + x'
    >>> str(p.derivative(0))
    '-3*x^2 + 1'

The parser accepts integer literals, + - * ^ and parentheses; there is no
division and exponents must be literal nonnegative integers, so "x^(-1)" is
a syntax error that reports its position.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Exponents = tuple[int, ...]


def var_names(nz: int, ns: int) -> list[str]:
    if nz == 2:
        zs = ["x", "y"]
    else:
        zs = [f"z{i + 1}" for i in range(nz)]
    if ns == 1:
        ss = ["s"]
    else:
        ss = [f"s{i + 1}" for i in range(ns)]
    return zs + ss + ["t"]


class Poly:
    __slots__ = ("terms", "nz", "ns")

    def __init__(self, terms: dict[Exponents, Fraction], nz: int, ns: int):
        self.nz = nz
        self.ns = ns
        width = nz + ns + 1
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            if len(exps) != width or any(e < 0 or not isinstance(e, int) for e in exps):
                raise ValueError(f"bad exponent tuple {exps!r} for shape ({nz},{ns})")
            c = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
            if c != 0:
                clean[tuple(exps)] = c
        self.terms = clean

    # construction helpers

    @classmethod
    def zero(cls, nz: int, ns: int) -> "Poly":
        return cls({}, nz, ns)

    @classmethod
    def constant(cls, value, nz: int, ns: int) -> "Poly":
        width = nz + ns + 1
        return cls({(0,) * width: Fraction(value)}, nz, ns)

    @classmethod
    def variable(cls, index: int, nz: int, ns: int) -> "Poly":
        width = nz + ns + 1
        if not 0 <= index < width:
            raise ValueError(f"variable index {index} out of range for shape ({nz},{ns})")
        exps = [0] * width
        exps[index] = 1
        return cls({tuple(exps): Fraction(1)}, nz, ns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nz, self.ns)

    def _check_shape(self, other: "Poly"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    # ring operations

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.nz, self.ns)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_shape(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            out[exps] = out.get(exps, Fraction(0)) + coeff
        return Poly(out, self.nz, self.ns)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.nz, self.ns)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.nz, self.ns)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Poly.zero(self.nz, self.ns)
            return Poly({e: c * other for e, c in self.terms.items()}, self.nz, self.ns)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check_shape(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return Poly(out, self.nz, self.ns)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Poly.constant(1, self.nz, self.ns)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(other, self.nz, self.ns)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.shape == other.shape and self.terms == other.terms

    def __hash__(self):
        return hash((self.shape, frozenset(self.terms.items())))

    # calculus and structure

    def derivative(self, index: int) -> "Poly":
        if not 0 <= index <= self.nz + self.ns:
            raise ValueError(
                f"variable index {index} out of range for shape {self.shape}"
            )
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            k = exps[index]
            if k == 0:
                continue
            e = list(exps)
            e[index] = k - 1
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + coeff * k
        return Poly(out, self.nz, self.ns)

    def weight(self, exps: Exponents) -> int:
        nz = self.nz
        return sum(exps[:nz]) + 2 * sum(exps[nz:])

    def weighted_degree(self):
        """Max weighted degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(self.weight(e) for e in self.terms)

    def homogeneous_components(self) -> dict[int, "Poly"]:
        buckets: dict[int, dict[Exponents, Fraction]] = {}
        for exps, coeff in self.terms.items():
            buckets.setdefault(self.weight(exps), {})[exps] = coeff
        return {d: Poly(t, self.nz, self.ns) for d, t in sorted(buckets.items())}

    def is_homogeneous(self) -> bool:
        return len(self.homogeneous_components()) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        width = self.nz + self.ns + 1
        return self.terms.get((0,) * width, Fraction(0))

    def eval_exact(self, space_vals: Sequence, t=Fraction(0)) -> Fraction:
        vals = [Fraction(v) if not isinstance(v, Fraction) else v for v in space_vals]
        if len(vals) != self.nz + self.ns:
            raise ValueError(f"expected {self.nz + self.ns} space coordinates")
        vals.append(Fraction(t) if not isinstance(t, Fraction) else t)
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(vals, exps):
                if e:
                    term *= v**e
            total += term
        return total

    def scale_vars(self, factors: Sequence) -> "Poly":
        """Substitute v_i -> factors[i] * v_i for every variable."""
        fr = [Fraction(f) if not isinstance(f, Fraction) else f for f in factors]
        if len(fr) != self.nz + self.ns + 1:
            raise ValueError("need one factor per variable (including t)")
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            c = coeff
            for f, e in zip(fr, exps):
                if e:
                    c *= f**e
            if c != 0:
                out[exps] = out.get(exps, Fraction(0)) + c
        return Poly(out, self.nz, self.ns)

    def depends_on(self, index: int) -> bool:
        return any(exps[index] > 0 for exps in self.terms)

    # canonical ordering and printing

    def _order_key(self, exps: Exponents):
        return (-self.weight(exps), tuple(-e for e in exps))

    def terms_sorted(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: self._order_key(item[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        names = var_names(self.nz, self.ns)
        pieces = []
        for exps, coeff in self.terms_sorted():
            mono = "*".join(
                f"{name}^{e}" if e > 1 else name for name, e in zip(names, exps) if e
            )
            mag = abs(coeff)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"{' - ' if coeff < 0 else ' + '}{body}")
        return "".join(pieces)

    def __repr__(self):
        return f"Poly({self})"


def monomials_of_weighted_degree(nz: int, ns: int, kappa: int) -> Iterator[Exponents]:
    """All space monomial exponent tuples (t exponent 0) of weighted degree kappa."""

    def rec(remaining: int, weights: list[int]) -> Iterator[tuple[int, ...]]:
        if not weights:
            if remaining == 0:
                yield ()
            return
        w = weights[0]
        for k in range(remaining // w + 1):
            for rest in rec(remaining - k * w, weights[1:]):
                yield (k,) + rest

    weights = [1] * nz + [2] * ns
    for exps in rec(kappa, weights):
        yield exps + (0,)


# parser


class PolyParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(?:(?P<INT>\d+)|(?P<NAME>[A-Za-z][A-Za-z0-9_]*)|(?P<OP>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            bad_at = len(text) - len(rest)
            raise PolyParseError(f"unexpected character {rest[0]!r}", bad_at)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("END", "", len(text)))
    return tokens


def _variable_index(name: str, nz: int, ns: int, position: int) -> int:
    if name == "t":
        return nz + ns
    if name == "x" and nz >= 2:
        return 0
    if name == "y" and nz >= 2:
        return 1
    if name == "s" and ns == 1:
        return nz
    zm = re.fullmatch(r"z(\d+)", name)
    if zm:
        idx = int(zm.group(1)) - 1
        if 0 <= idx < nz:
            return idx
        raise PolyParseError(f"variable {name!r} out of range (group has {nz} horizontal coordinates)", position)
    sm = re.fullmatch(r"s(\d+)", name)
    if sm:
        idx = int(sm.group(1)) - 1
        if 0 <= idx < ns:
            return nz + idx
        raise PolyParseError(f"variable {name!r} out of range (group has {ns} vertical coordinates)", position)
    raise PolyParseError(f"unknown variable {name!r}", position)


class _Parser:
    def __init__(self, tokens, nz: int, ns: int):
        self.tokens = tokens
        self.i = 0
        self.nz = nz
        self.ns = ns

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self) -> Poly:
        kind, value, pos = self.peek()
        negate = False
        if kind == "OP" and value in "+-":
            self.advance()
            negate = value == "-"
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            kind, value, pos = self.peek()
            if kind == "OP" and value in "+-":
                self.advance()
                rhs = self.term()
                acc = acc - rhs if value == "-" else acc + rhs
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "OP" and value == "*":
                self.advance()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Poly:
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "OP" and value == "^":
            self.advance()
            ekind, evalue, epos = self.peek()
            if ekind != "INT":
                raise PolyParseError("exponent must be a literal nonnegative integer", epos)
            self.advance()
            return base ** int(evalue)
        return base

    def atom(self) -> Poly:
        kind, value, pos = self.advance()
        if kind == "INT":
            return Poly.constant(int(value), self.nz, self.ns)
        if kind == "NAME":
            return Poly.variable(_variable_index(value, self.nz, self.ns, pos), self.nz, self.ns)
        if kind == "OP" and value in "+-":
            inner = self.atom()
            return -inner if value == "-" else inner
        if kind == "OP" and value == "(":
            inner = self.expr()
            ckind, cvalue, cpos = self.advance()
            if not (ckind == "OP" and cvalue == ")"):
                raise PolyParseError("expected ')'", cpos)
            return inner
        if kind == "END":
            raise PolyParseError("unexpected end of input", pos)
        raise PolyParseError(f"unexpected {value!r}", pos)


def parse_poly(text: str, spec_or_shape) -> Poly:
    """Parse polynomial text for a group (or an explicit (nz, ns) shape)."""
    if isinstance(spec_or_shape, tuple):
        nz, ns = spec_or_shape
    else:
        nz, ns = spec_or_shape.m, spec_or_shape.m2
    parser = _Parser(_tokenize(text), nz, ns)
    result = parser.expr()
    kind, value, pos = parser.peek()
    if kind != "END":
        raise PolyParseError(f"unexpected {value!r}", pos)
    return result
