"""Generator alphabet of the tame groups, words over it, and their action.

Letters use 1-based variable indices to match the usual notation.  The +1
action of a transvection letter T(i,j,e,r) on an affine point adds
r * a_j^e to coordinate i; sign -1 subtracts.  Words act left to right:
apply_word(u + v, a) == apply_word(v, apply_word(u, a)).

Points are tuples of field-element indices (see ff); bulk application
operates on per-coordinate numpy index arrays via the context tables.

Ring automorphisms act on points through inverse precomposition, which
flips the sign of the transvection coefficient; the +1 convention here
absorbs that flip, so the generated permutation group is unchanged and
the letters act by the explicit additive formulas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import prod

from .errors import DimensionMismatch
from .ff import is_prime
from .polyring import GradingSpec, MultiPoly, PolyEndo, compose


@dataclass(frozen=True)
class Transvection:
    """x_i -> x_i + r*x_j^e (point action on coordinate i)."""
    i: int
    j: int
    e: int
    r: int

    def __post_init__(self):
        if self.i == self.j or self.e < 0:
            raise ValueError("need i != j and e >= 0")


@dataclass(frozen=True)
class BiTransvection:
    """x_i -> x_i + r*x_j^c*x_k^d."""
    i: int
    j: int
    k: int
    c: int
    d: int
    r: int

    def __post_init__(self):
        if self.i in (self.j, self.k) or self.j == self.k:
            raise ValueError("need i not in {j,k} and j != k")
        if self.c < 0 or self.d < 0:
            raise ValueError("exponents must be >= 0")


@dataclass(frozen=True)
class PolyTransvection:
    """x_i -> x_i + x_j^t * P(x_j^nexp); coeffs holds P low-to-high over F_p.

    t and nexp are stored on the letter (they are t_{i,j} and E-1 of the
    owning group) so the letter acts without further context.
    """
    i: int
    j: int
    coeffs: tuple
    t: int
    nexp: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("need i != j")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))


@dataclass(frozen=True)
class CoordCycle:
    """Point action (a_1, ..., a_n) -> (a_2, ..., a_n, a_1)."""


GenLetter = (Transvection, BiTransvection, PolyTransvection, CoordCycle)


class Word:
    """Sequence of (letter, sign) pairs; the empty word is the identity."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        self.letters = tuple(letters)

    @classmethod
    def of(cls, *letters):
        return cls((let, +1) for let in letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other):
        return Word(self.letters + other.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def inverse(self):
        return Word((let, -s) for let, s in reversed(self.letters))

    def conjugated_by(self, h):
        """h * self * h^-1: apply h first, then self, then h^-1."""
        return h + self + h.inverse()

    def commutator_with(self, other):
        """self * other * self^-1 * other^-1 with left-to-right application."""
        return self + other + self.inverse() + other.inverse()

    def text(self):
        return " ".join(_letter_text(let, s) for let, s in self.letters)

    def __repr__(self):
        return f"Word({self.text()!r})" if self.letters else "Word()"


def _letter_text(let, sign):
    if isinstance(let, Transvection):
        base = f"T({let.i},{let.j},{let.e},{let.r})"
    elif isinstance(let, BiTransvection):
        base = f"B({let.i},{let.j},{let.k},{let.c},{let.d},{let.r})"
    elif isinstance(let, PolyTransvection):
        base = f"P({let.i},{let.j},[{','.join(str(c) for c in let.coeffs)}])"
    elif isinstance(let, CoordCycle):
        base = "S"
    else:
        raise TypeError(f"unknown letter {let!r}")
    return base + ("^-1" if sign < 0 else "")


_LETTER_RE = re.compile(
    r"(T\((\d+),(\d+),(\d+),(\d+)\)|B\((\d+),(\d+),(\d+),(\d+),(\d+),(\d+)\)"
    r"|P\((\d+),(\d+),\[([0-9,]*)\]\)|S)(\^-1)?$")


def parse_word(text, params=None):
    """Parse the whitespace-separated text format.

    P letters need `params` to recover t_{i,j} and E-1.
    """
    out = []
    for tok in text.split():
        m = _LETTER_RE.match(tok)
        if not m:
            raise ValueError(f"cannot parse letter {tok!r}")
        sign = -1 if m.group(15) else +1
        if tok.startswith("T"):
            let = Transvection(int(m.group(2)), int(m.group(3)),
                               int(m.group(4)), int(m.group(5)))
        elif tok.startswith("B"):
            let = BiTransvection(*(int(m.group(k)) for k in range(6, 12)))
        elif tok.startswith("P"):
            if params is None:
                raise ValueError("P letters need group parameters to parse")
            i, j = int(m.group(12)), int(m.group(13))
            coeffs = tuple(int(c) for c in m.group(14).split(",") if c != "")
            let = poly_transvection_letter(params, i, j, coeffs)
        else:
            let = CoordCycle()
        out.append((let, sign))
    return Word(out)


@dataclass(frozen=True)
class GroupParams:
    """Parameters p, n, (e_1, ..., e_n) of a tame transvection group."""
    p: int
    n: int
    e: tuple

    def __post_init__(self):
        object.__setattr__(self, "e", tuple(self.e))
        if self.n < 3:
            raise ValueError("need n >= 3")
        if len(self.e) != self.n or any(x < 1 for x in self.e):
            raise ValueError("need n positive exponents")
        if not is_prime(self.p):
            raise ValueError("p must be prime")

    @property
    def E(self):
        return prod(self.e)

    @property
    def grading(self):
        return GradingSpec(self.e)

    def tij(self, i, j):
        """t_{i,j} = e_i * e_{i+1} * ... * e_{j-1}, indices cyclic, i != j."""
        if i == j:
            raise ValueError("t_{i,j} needs i != j")
        t = 1
        k = i
        while k != j:
            t *= self.e[k - 1]
            k = k % self.n + 1
        return t


def tau(params, i, r=1):
    """Standard generator: adds r * a_{i+1}^{e_i} to coordinate i."""
    j = i % params.n + 1
    return Transvection(i, j, params.e[i - 1], r % params.p)


def standard_generators(params, all_r=False):
    """The n cyclic generator letters.

    With all_r, every nonzero prime-field coefficient appears; by default
    only r = 1, which generates the same cyclic subgroups over F_p.
    """
    rs = range(1, params.p) if all_r else (1,)
    return [tau(params, i, r) for i in range(1, params.n + 1) for r in rs]


def poly_transvection_letter(params, i, j, coeffs):
    return PolyTransvection(i, j, tuple(c % params.p for c in coeffs),
                            params.tij(i, j), params.E - 1)


# ---------------------------------------------------------------------------
# actions


def _poly_eval_scalar(ctx, coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def apply_letter(letter, sign, point, ctx):
    """Image of one point under a single signed letter."""
    n = len(point)
    if isinstance(letter, Transvection):
        i, j = letter.i - 1, letter.j - 1
        if i >= n or j >= n:
            raise DimensionMismatch("letter index exceeds point dimension")
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        delta = ctx.mul(r, ctx.pow(point[j], letter.e))
        return point[:i] + (ctx.add(point[i], delta),) + point[i + 1:]
    if isinstance(letter, BiTransvection):
        i, j, k = letter.i - 1, letter.j - 1, letter.k - 1
        if max(i, j, k) >= n:
            raise DimensionMismatch("letter index exceeds point dimension")
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        delta = ctx.mul(r, ctx.mul(ctx.pow(point[j], letter.c),
                                   ctx.pow(point[k], letter.d)))
        return point[:i] + (ctx.add(point[i], delta),) + point[i + 1:]
    if isinstance(letter, PolyTransvection):
        i, j = letter.i - 1, letter.j - 1
        if max(i, j) >= n:
            raise DimensionMismatch("letter index exceeds point dimension")
        val = _poly_eval_scalar(ctx, letter.coeffs, ctx.pow(point[j], letter.nexp))
        delta = ctx.mul(ctx.pow(point[j], letter.t), val)
        if sign < 0:
            delta = ctx.neg(delta)
        return point[:i] + (ctx.add(point[i], delta),) + point[i + 1:]
    if isinstance(letter, CoordCycle):
        return point[1:] + point[:1] if sign > 0 else point[-1:] + point[:-1]
    raise TypeError(f"unknown letter {letter!r}")


def apply_word(word, point, ctx):
    for let, s in word:
        point = apply_letter(let, s, point, ctx)
    return point


def apply_letter_arrays(letter, sign, coords, ctx):
    """Same action on a list of per-coordinate numpy index arrays."""
    coords = list(coords)
    if isinstance(letter, Transvection):
        i, j = letter.i - 1, letter.j - 1
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        if r:
            delta = ctx.mul_const_table(r)[ctx.pow_table(letter.e)[coords[j]]]
            coords[i] = ctx.add_arrays(coords[i], delta)
        return coords
    if isinstance(letter, BiTransvection):
        i, j, k = letter.i - 1, letter.j - 1, letter.k - 1
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        if r:
            t = ctx.mul_arrays(ctx.pow_table(letter.c)[coords[j]],
                               ctx.pow_table(letter.d)[coords[k]])
            coords[i] = ctx.add_arrays(coords[i], ctx.mul_const_table(r)[t])
        return coords
    if isinstance(letter, PolyTransvection):
        import numpy as np
        i, j = letter.i - 1, letter.j - 1
        u = ctx.pow_table(letter.nexp)[coords[j]]
        val = np.zeros_like(coords[j])
        for c in reversed(letter.coeffs):
            val = ctx.add_arrays(ctx.mul_arrays(val, u),
                                 np.full_like(val, c))
        delta = ctx.mul_arrays(ctx.pow_table(letter.t)[coords[j]], val)
        if sign < 0:
            delta = ctx.neg_table()[delta]
        coords[i] = ctx.add_arrays(coords[i], delta)
        return coords
    if isinstance(letter, CoordCycle):
        return coords[1:] + coords[:1] if sign > 0 else coords[-1:] + coords[:-1]
    raise TypeError(f"unknown letter {letter!r}")


def apply_word_arrays(word, coords, ctx):
    for let, s in word:
        coords = apply_letter_arrays(let, s, coords, ctx)
    return coords


# ---------------------------------------------------------------------------
# symbolic bridge


def letter_endo(letter, sign, ctx, n):
    """The letter's action as a polynomial endomorphism."""
    images = [MultiPoly.variable(ctx, n, i + 1) for i in range(n)]
    if isinstance(letter, CoordCycle):
        if sign > 0:
            images = images[1:] + images[:1]
        else:
            images = images[-1:] + images[:-1]
        return PolyEndo(images)
    if isinstance(letter, Transvection):
        i = letter.i - 1
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        xj = MultiPoly.variable(ctx, n, letter.j)
        images[i] = images[i] + xj.power(letter.e).scaled(r)
        return PolyEndo(images)
    if isinstance(letter, BiTransvection):
        i = letter.i - 1
        r = letter.r % ctx.p
        r = r if sign > 0 else ctx.neg(r)
        xj = MultiPoly.variable(ctx, n, letter.j)
        xk = MultiPoly.variable(ctx, n, letter.k)
        images[i] = images[i] + (xj.power(letter.c) * xk.power(letter.d)).scaled(r)
        return PolyEndo(images)
    if isinstance(letter, PolyTransvection):
        i = letter.i - 1
        xj = MultiPoly.variable(ctx, n, letter.j)
        acc = MultiPoly.zero(ctx, n)
        u = xj.power(letter.nexp)
        for c in reversed(letter.coeffs):
            acc = acc * u + MultiPoly.constant(ctx, n, c)
        delta = xj.power(letter.t) * acc
        if sign < 0:
            delta = -delta
        images[i] = images[i] + delta
        return PolyEndo(images)
    raise TypeError(f"unknown letter {letter!r}")


def word_to_endo(word, ctx, n):
    """Endomorphism whose evaluation at any point equals apply_word there."""
    acc = PolyEndo.identity(ctx, n)
    for let, s in word:
        acc = compose(letter_endo(let, s, ctx, n), acc)
    return acc
