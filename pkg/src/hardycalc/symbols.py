"""Structured symbols g: bounded analytic functions on the open left
half-plane Re(s) < 0.

The expression tree is built from rational partial-fraction atoms c/(alpha-s)
with Re(alpha) > 0, delays e^{s tau} (tau >= 0), complex constants, and
sums/products/scalings of those.  The module evaluates boundary traces
g(i omega), estimates the sup norm on the imaginary axis, and converts
expressions to their one-sided convolution-kernel representation, which is
what both the quadrature route to g(A) and the discrete Toeplitz realization
consume.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Constant",
    "Delay",
    "KernelRep",
    "Product",
    "RationalPF",
    "Scale",
    "Sum",
    "SymbolExpr",
    "add",
    "atom",
    "eval_at",
    "eval_boundary",
    "hinf_norm",
    "kernel",
    "multiply",
    "parse",
    "to_text",
]


@dataclass(frozen=True)
class Constant:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class RationalPF:
    """Sum of simple-pole atoms: sum_k c_k / (alpha_k - s), Re(alpha_k) > 0."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(c), complex(a)) for c, a in self.terms)
        for _, a in terms:
            if a.real <= 0:
                raise ValueError(f"pole {a} must have positive real part")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True)
class Delay:
    """g(s) = e^{s tau}: modulus one on the axis, a pure shift in time."""

    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("delay must be nonnegative")
        object.__setattr__(self, "tau", float(self.tau))


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Scale:
    factor: complex
    inner: "SymbolExpr"

    def __post_init__(self):
        object.__setattr__(self, "factor", complex(self.factor))


SymbolExpr = Union[Constant, RationalPF, Delay, Sum, Product, Scale]


def atom(c, alpha):
    """Shorthand for the single-pole symbol c/(alpha - s)."""
    return RationalPF(((c, alpha),))


# ---------------------------------------------------------------------------
# evaluation


def eval_at(g, s):
    """g(s) by structural recursion; s may be a scalar or an ndarray.

    Valid on the closed left half-plane (and anywhere off the poles); the
    boundary trace is the s = i omega case.
    """
    scalar = np.ndim(s) == 0
    sv = np.atleast_1d(np.asarray(s, dtype=complex))
    out = _eval(g, sv)
    return complex(out[0]) if scalar else out


def _eval(g, sv):
    if isinstance(g, Constant):
        return np.full(sv.shape, g.value)
    if isinstance(g, RationalPF):
        out = np.zeros(sv.shape, dtype=complex)
        for c, a in g.terms:
            out += c / (a - sv)
        return out
    if isinstance(g, Delay):
        return np.exp(sv * g.tau)
    if isinstance(g, Sum):
        out = np.zeros(sv.shape, dtype=complex)
        for term in g.terms:
            out += _eval(term, sv)
        return out
    if isinstance(g, Product):
        out = np.ones(sv.shape, dtype=complex)
        for f in g.factors:
            out *= _eval(f, sv)
        return out
    if isinstance(g, Scale):
        return g.factor * _eval(g.inner, sv)
    raise TypeError(f"not a symbol expression: {g!r}")


def eval_boundary(g, omega):
    """Boundary trace g(i omega); omega scalar or ndarray."""
    return eval_at(g, 1j * np.asarray(omega, dtype=float))


# ---------------------------------------------------------------------------
# sup norm on the axis


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, iters=120):
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a <= 1e-12 * (1.0 + abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return max(f1, f2)


def hinf_norm(g):
    """sup over the axis of |g(i omega)|.

    Log-spaced sampling of |omega| up to 1e6 (2048 points plus the origin)
    followed by golden-section refinement around the grid maximum.  One-sided
    error is at the percent level in the worst case for the rational/delay
    class; exact whenever the sup sits at omega = 0 or the symbol is flat.
    """
    pos = np.logspace(-4.0, 6.0, 1024)
    grid = np.concatenate([-pos[::-1], [0.0], pos])
    vals = np.abs(eval_boundary(g, grid))
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    if b > a:
        refined = _golden_max(lambda w: float(np.abs(eval_boundary(g, w))), a, b)
        best = max(best, refined)
    return best


# ---------------------------------------------------------------------------
# algebra


def _flatten(cls, parts, attr):
    out = []
    for p in parts:
        if isinstance(p, cls):
            out.extend(getattr(p, attr))
        else:
            out.append(p)
    return tuple(out)


def multiply(g1, g2):
    return Product(_flatten(Product, (g1, g2), "factors"))


def add(g1, g2):
    return Sum(_flatten(Sum, (g1, g2), "terms"))


# ---------------------------------------------------------------------------
# kernel representation


@dataclass(frozen=True)
class KernelRep:
    """One-sided kernel of a symbol.

    modes: tuple of (c, alpha, power, offset) meaning the kernel piece

        t |-> c * (t - offset)^{power-1} e^{-alpha (t - offset)} / (power-1)!

    supported on t >= offset, whose transform restores
    c e^{i omega offset} / (alpha - i omega)^power on the boundary.
    delays: tuple of (weight, tau) point masses; constant: multiple of the
    identity.  Simple-pole rationals have power = 1 and offset = 0; higher
    powers only arise from products with repeated poles.
    """

    modes: tuple = ()
    delays: tuple = ()
    constant: complex = 0.0

    def __post_init__(self):
        modes = tuple((complex(c), complex(a), int(p), float(o))
                      for c, a, p, o in self.modes)
        for _, a, p, _ in modes:
            if a.real <= 0:
                raise ValueError(f"kernel mode pole {a} must have Re > 0")
            if p < 1:
                raise ValueError("kernel mode power must be >= 1")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "delays",
                           tuple((complex(w), float(t)) for w, t in self.delays))
        object.__setattr__(self, "constant", complex(self.constant))

    def boundary_values(self, omega):
        """Transform of the kernel on the axis (matches eval_boundary of the
        originating symbol)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.full(w.shape, self.constant, dtype=complex)
        for c, a, p, off in self.modes:
            out += c * np.exp(1j * w * off) / (a - 1j * w) ** p
        for weight, tau in self.delays:
            out += weight * np.exp(1j * w * tau)
        return out


def _merge(modes, delays, constant):
    acc = {}
    for c, a, p, off in modes:
        key = (a, p, off)
        acc[key] = acc.get(key, 0.0) + c
    merged_modes = tuple((c, a, p, off) for (a, p, off), c in acc.items()
                         if c != 0.0)
    dacc = {}
    for w, tau in delays:
        dacc[tau] = dacc.get(tau, 0.0) + w
    merged_delays = tuple((w, tau) for tau, w in dacc.items() if w != 0.0)
    return KernelRep(merged_modes, merged_delays, constant)


def _same_pole(a, b):
    return abs(a - b) <= 1e-12 * (1.0 + max(abs(a), abs(b)))


def _convolve_modes(m1, m2):
    """Kernel of the product of two single-mode symbols."""
    c1, a1, p1, o1 = m1
    c2, a2, p2, o2 = m2
    off = o1 + o2
    coeff = c1 * c2
    if _same_pole(a1, a2):
        # equal poles: powers add, the polynomial factor absorbs the
        # factorials exactly
        return [(coeff, a1, p1 + p2, off)]
    out = []
    # generalized partial fractions of 1/((z+a1)^p1 (z+a2)^p2)
    for k in range(p1):
        A = (-1.0) ** k * math.comb(p2 + k - 1, k) / (a2 - a1) ** (p2 + k)
        out.append((coeff * A, a1, p1 - k, off))
    for k in range(p2):
        B = (-1.0) ** k * math.comb(p1 + k - 1, k) / (a1 - a2) ** (p1 + k)
        out.append((coeff * B, a2, p2 - k, off))
    return out


def _convolve(k1, k2):
    modes = []
    delays = []
    constant = k1.constant * k2.constant
    for c, a, p, off in k1.modes:
        if k2.constant != 0.0:
            modes.append((c * k2.constant, a, p, off))
    for c, a, p, off in k2.modes:
        if k1.constant != 0.0:
            modes.append((c * k1.constant, a, p, off))
    for w, tau in k1.delays:
        if k2.constant != 0.0:
            delays.append((w * k2.constant, tau))
    for w, tau in k2.delays:
        if k1.constant != 0.0:
            delays.append((w * k1.constant, tau))
    for w, tau in k1.delays:
        for c, a, p, off in k2.modes:
            modes.append((w * c, a, p, off + tau))
    for w, tau in k2.delays:
        for c, a, p, off in k1.modes:
            modes.append((w * c, a, p, off + tau))
    for w1, t1 in k1.delays:
        for w2, t2 in k2.delays:
            delays.append((w1 * w2, t1 + t2))
    for m1 in k1.modes:
        for m2 in k2.modes:
            modes.extend(_convolve_modes(m1, m2))
    return _merge(modes, delays, constant)


def _scale_kernel(k, c):
    return KernelRep(tuple((c * cc, a, p, off) for cc, a, p, off in k.modes),
                     tuple((c * w, tau) for w, tau in k.delays),
                     c * k.constant)


def kernel(g):
    """Closed-form kernel representation of a symbol.

    Atoms map to single modes, delays to point masses, constants to the
    identity part; sums concatenate and products convolve.  Products of
    rationals re-expand by partial fractions; equal-pole products raise the
    mode power (they never error out, since pair batteries of atoms
    legitimately square a pole).
    """
    if isinstance(g, Constant):
        return KernelRep(constant=g.value)
    if isinstance(g, RationalPF):
        return _merge([(c, a, 1, 0.0) for c, a in g.terms], [], 0.0)
    if isinstance(g, Delay):
        return KernelRep(delays=((1.0, g.tau),))
    if isinstance(g, Scale):
        return _scale_kernel(kernel(g.inner), g.factor)
    if isinstance(g, Sum):
        modes, delays, constant = [], [], 0.0
        for term in g.terms:
            k = kernel(term)
            modes.extend(k.modes)
            delays.extend(k.delays)
            constant += k.constant
        return _merge(modes, delays, constant)
    if isinstance(g, Product):
        k = KernelRep(constant=1.0)
        for f in g.factors:
            k = _convolve(k, kernel(f))
        return k
    raise TypeError(f"not a symbol expression: {g!r}")


# ---------------------------------------------------------------------------
# small DSL: "1/(2-s)", "exp(0.5*s)", "0.3*(1/(1-s))*(1/(3-s))"


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>exp|s)"
    r"|(?P<op>[()+\-*/]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize symbol text at {text[pos:]!r}")
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ValueError("unexpected end of symbol text")
        if kind is not None and tok[0] != kind:
            raise ValueError(f"expected {kind}, got {tok}")
        if value is not None and tok[1] != value:
            raise ValueError(f"expected {value!r}, got {tok}")
        self.pos += 1
        return tok

    def parse_expr(self):
        node = self.parse_term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take("op")[1]
            rhs = self.parse_term()
            node = add(node, rhs if op == "+" else Scale(-1.0, rhs))
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek() == ("op", "*"):
            self.take("op", "*")
            node = multiply(node, self.parse_factor())
        return node

    def parse_factor(self):
        kind, value = self.peek()
        if (kind, value) == ("op", "-"):
            self.take("op", "-")
            return Scale(-1.0, self.parse_factor())
        if (kind, value) == ("name", "exp"):
            self.take("name", "exp")
            self.take("op", "(")
            tau = self.take("num")[1]
            self.take("op", "*")
            self.take("name", "s")
            self.take("op", ")")
            return Delay(tau)
        if (kind, value) == ("op", "("):
            self.take("op", "(")
            node = self.parse_expr()
            self.take("op", ")")
            return node
        if kind == "num":
            c = self.take("num")[1]
            if self.peek() == ("op", "/"):
                self.take("op", "/")
                return self.parse_rational(c)
            return Constant(c)
        raise ValueError(f"unexpected token {(kind, value)} in symbol text")

    def parse_rational(self, numerator):
        self.take("op", "(")
        if self.peek() == ("op", "("):
            poles = []
            while self.peek() == ("op", "("):
                poles.append(self.parse_pole_group())
            self.take("op", ")")
        else:
            poles = [self.parse_pole_body()]
        if len(poles) == 1:
            return atom(numerator, poles[0])
        expr = Product(tuple(atom(1.0, p) for p in poles))
        return expr if numerator == 1.0 else Scale(numerator, expr)

    def parse_pole_group(self):
        self.take("op", "(")
        return self.parse_pole_body()

    def parse_pole_body(self):
        alpha = self.take("num")[1]
        self.take("op", "-")
        self.take("name", "s")
        self.take("op", ")")
        return alpha


def parse(text):
    """Parse the small symbol DSL into an expression tree."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    if parser.peek()[0] is not None:
        raise ValueError(f"trailing tokens in symbol text {text!r}")
    return node


def _fmt_scalar(z):
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    return f"({z.real:g}{z.imag:+g}j)"


def to_text(g):
    """Compact one-line rendering, mainly for report witness strings."""
    if isinstance(g, Constant):
        return _fmt_scalar(g.value)
    if isinstance(g, RationalPF):
        return " + ".join(f"{_fmt_scalar(c)}/({_fmt_scalar(a)}-s)"
                          for c, a in g.terms)
    if isinstance(g, Delay):
        return f"exp({g.tau:g}*s)"
    if isinstance(g, Sum):
        return " + ".join(to_text(t) for t in g.terms)
    if isinstance(g, Product):
        return "*".join(f"({to_text(f)})" for f in g.factors)
    if isinstance(g, Scale):
        return f"{_fmt_scalar(g.factor)}*({to_text(g.inner)})"
    raise TypeError(f"not a symbol expression: {g!r}")
