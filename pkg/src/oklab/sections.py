"""Polynomial section spaces in flag-adapted coordinates.

A section is a polynomial with exact rational coefficients.  ``eliminate``
brings a basis to the distinguished normal form: one section per leading
exponent, unit leading coefficient, no other leading exponent in its support.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from oklab.errors import DependenceError, DimensionError, InputError
from oklab.order import LEX, Exponent, Order
from oklab.polytope import RatPolytope, fmt_rational, lattice_points


class PolySection:
    """Polynomial in n variables with Fraction coefficients; zero terms are never stored."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponent, Fraction] = {}
        for exp, coef in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise DimensionError(f"exponent {exp} in a polynomial of {n} variables")
            if min(exp, default=0) < 0:
                raise InputError(f"negative exponent {exp}")
            c = clean.get(exp, Fraction(0)) + Fraction(coef)
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self.terms = clean

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1) -> "PolySection":
        return cls(len(exp), {tuple(exp): coef})

    @classmethod
    def variable(cls, n: int, i: int) -> "PolySection":
        return cls.monomial(tuple(int(j == i) for j in range(n)))

    @classmethod
    def constant(cls, n: int, c=1) -> "PolySection":
        return cls(n, {(0,) * n: c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, PolySection):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __repr__(self):
        return f"PolySection({format_section(self) or '0'})"

    def _check(self, other):
        if self.n != other.n:
            raise DimensionError(f"polynomials in {self.n} and {other.n} variables")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return PolySection(self.n, out)

    def __neg__(self):
        return PolySection(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolySection):
            other = Fraction(other)
            return PolySection(self.n, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return PolySection(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = PolySection.constant(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def truncated(self, degree: int) -> "PolySection":
        return PolySection(self.n, {e: c for e, c in self.terms.items() if sum(e) <= degree})

    def substitute(self, images: Sequence["PolySection"], degree: int | None = None) -> "PolySection":
        """Compose with ``x_i -> images[i]``; optionally drop terms above ``degree``."""
        if len(images) != self.n:
            raise DimensionError(f"{len(images)} images for {self.n} variables")
        m = images[0].n if images else 0
        powers: list[dict[int, PolySection]] = [{0: PolySection.constant(m)} for _ in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                prev = power(i, k - 1)
                nxt = prev * images[i]
                cache[k] = nxt.truncated(degree) if degree is not None else nxt
            return cache[k]

        out = PolySection(m)
        for exp, coef in self.terms.items():
            term = PolySection.constant(m, coef)
            for i, k in enumerate(exp):
                if k:
                    term = term * power(i, k)
                    if degree is not None:
                        term = term.truncated(degree)
            out = out + term
        return out

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Numeric evaluation at points ``z`` of shape (..., n) (real or complex)."""
        z = np.asarray(z)
        out = np.zeros(z.shape[:-1], dtype=np.result_type(z.dtype, float))
        for exp, coef in self.terms.items():
            out = out + float(coef) * np.prod(z ** np.asarray(exp), axis=-1)
        return out


def valuation(order: Order, s: PolySection) -> Exponent:
    """Order-minimal exponent carrying a nonzero coefficient."""
    if not s:
        raise InputError("the zero section has no valuation")
    return min(s.terms, key=order.key)


def multiply(s: PolySection, t: PolySection) -> PolySection:
    return s * t


@dataclass(frozen=True)
class SectionSpace:
    level: int
    basis: tuple[PolySection, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if self.level < 1:
            raise InputError(f"level must be positive, got {self.level}")
        if not self.basis:
            raise InputError("a section space needs at least one basis element")
        for s in self.basis:
            if s.n != self.n:
                raise DimensionError(f"basis element in {s.n} variables, space has n={self.n}")

    @property
    def max_degree(self) -> int:
        return max(s.degree for s in self.basis)


@dataclass(frozen=True)
class LeadingSet:
    """The leading exponents A(kL), ascending in ``order``, with their distinguished sections."""

    level: int
    exponents: tuple[Exponent, ...]
    distinguished: tuple[PolySection, ...]
    order: Order = LEX

    @property
    def n(self) -> int:
        return len(self.exponents[0])

    def section(self, alpha: Sequence[int]) -> PolySection:
        return self.distinguished[self.exponents.index(tuple(alpha))]

    def as_space(self) -> SectionSpace:
        return SectionSpace(self.level, self.distinguished, self.n)


def eliminate(order: Order, space: SectionSpace) -> LeadingSet:
    """Gauss-Jordan reduction with columns sorted by ``order``.

    Raises DependenceError naming the first basis element that lies in the
    span of the earlier ones.
    """
    columns = sorted({e for s in space.basis for e in s.terms}, key=order.key)
    col_of = {e: i for i, e in enumerate(columns)}
    pivots: dict[int, dict[int, Fraction]] = {}

    for index, s in enumerate(space.basis):
        row = {col_of[e]: c for e, c in s.terms.items()}
        while row:
            lead = min(row)
            if lead not in pivots:
                break
            f = row[lead]
            for c, v in pivots[lead].items():
                val = row.get(c, 0) - f * v
                if val:
                    row[c] = val
                else:
                    row.pop(c, None)
        if not row:
            raise DependenceError(
                f"basis element {index} ({format_section(s)}) is a combination of earlier ones",
                index=index,
            )
        lead = min(row)
        inv = 1 / row[lead]
        pivots[lead] = {c: v * inv for c, v in row.items()}

    for p in sorted(pivots, reverse=True):
        row = pivots[p]
        for q in sorted(c for c in row if c != p and c in pivots):
            f = row.get(q)
            if not f:
                continue
            for c, v in pivots[q].items():
                val = row.get(c, 0) - f * v
                if val:
                    row[c] = val
                else:
                    row.pop(c, None)

    leads = sorted(pivots)
    exps = tuple(columns[p] for p in leads)
    dist = tuple(PolySection(space.n, {columns[c]: v for c, v in pivots[p].items()}) for p in leads)
    return LeadingSet(space.level, exps, dist, order)


# ------------------------------------------------------------ coordinate changes


@dataclass(frozen=True)
class CoordinateChange:
    """New coordinates ``w = forward(z)`` with old coordinates ``z = inverse(w)``."""

    forward: tuple[PolySection, ...]
    inverse: tuple[PolySection, ...]
    name: str = "custom"

    @property
    def n(self) -> int:
        return len(self.forward)

    def check(self, degree: int) -> None:
        n = self.n
        if len(self.inverse) != n or any(p.n != n for p in self.forward + self.inverse):
            raise InputError("coordinate change and inverse must be n polynomials in n variables")
        degree = max(degree, 1)
        for label, outer, inner in (("forward(inverse)", self.forward, self.inverse),
                                    ("inverse(forward)", self.inverse, self.forward)):
            for i, p in enumerate(outer):
                comp = p.substitute(list(inner), degree=degree).truncated(degree)
                if comp != PolySection.variable(n, i):
                    raise InputError(f"{label} is not the identity in coordinate {i} up to degree {degree}")


def conic_flag(n: int = 2) -> CoordinateChange:
    """w1 = z2 - z1^2, w2 = z1: the first flag divisor is the smooth conic {z2 = z1^2}."""
    if n != 2:
        raise InputError("the conic flag is defined for n=2")
    z1, z2 = PolySection.variable(2, 0), PolySection.variable(2, 1)
    forward = (z2 - z1 * z1, z1)
    w1, w2 = z1, z2
    inverse = (w2, w1 + w2 * w2)
    return CoordinateChange(forward, inverse, "conic")


def change_coordinates(space: SectionSpace, change: CoordinateChange) -> SectionSpace:
    if change.n != space.n:
        raise DimensionError(f"coordinate change in {change.n} variables for a space with n={space.n}")
    change.check(space.max_degree)
    basis = tuple(s.substitute(list(change.inverse)) for s in space.basis)
    return SectionSpace(space.level, basis, space.n)


# ---------------------------------------------------------------------- models


@dataclass(frozen=True)
class ModelSpec:
    """A built-in or file-backed family of section spaces.

    family is one of ``projective_space``, ``toric``, ``curve``, ``custom``.
    """

    family: str
    n: int = 1
    d: int = 1
    polytope: RatPolytope | None = None
    path: str | None = None
    flag: CoordinateChange | None = None
    label: str = field(default="", compare=False)

    @classmethod
    def projective_space(cls, n: int, d: int, flag=None) -> "ModelSpec":
        return cls("projective_space", n=n, d=d, flag=flag, label=f"P{n}:d={d}")

    @classmethod
    def curve(cls, d: int) -> "ModelSpec":
        return cls("curve", n=1, d=d, label=f"curve:d={d}")

    @classmethod
    def toric(cls, polytope: RatPolytope, flag=None) -> "ModelSpec":
        return cls("toric", n=polytope.n, polytope=polytope, flag=flag, label="toric")

    @classmethod
    def custom(cls, path) -> "ModelSpec":
        return cls("custom", path=str(path), label=f"custom:{path}")

    def self_intersection(self) -> int | None:
        """(L^n) when the model knows it."""
        if self.family == "projective_space":
            return self.d**self.n
        if self.family == "curve":
            return self.d
        if self.family == "toric":
            return int(math.factorial(self.n) * self.polytope.volume())
        return None


def _monomials_up_to(n: int, degree: int) -> list[Exponent]:
    return [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]


def toric_exponents(P: RatPolytope, k: int) -> list[Exponent]:
    """Lattice points of kP shifted so that k times the lex-smallest vertex sits at the origin."""
    if any(x.denominator != 1 for v in P.vertices for x in v):
        raise InputError("toric model needs a lattice polytope")
    base = P.vertices[0]
    pts = lattice_points(P.scaled(k))
    shifted = [tuple(int(x - k * b) for x, b in zip(p, base)) for p in pts]
    if any(x < 0 for p in shifted for x in p):
        raise InputError(
            "the cone at the lex-smallest vertex is not inside the orthant; "
            "give the polytope in standard position"
        )
    return shifted


def model_sections(model: ModelSpec, k: int) -> SectionSpace:
    if k < 1:
        raise InputError(f"level k must be positive, got {k}")
    if model.family == "projective_space":
        exps = _monomials_up_to(model.n, k * model.d)
        n = model.n
    elif model.family == "curve":
        exps = [(j,) for j in range(k * model.d + 1)]
        n = 1
    elif model.family == "toric":
        exps = toric_exponents(model.polytope, k)
        n = model.n
    elif model.family == "custom":
        space = read_sections(model.path)
        if space.level != k:
            raise InputError(f"{model.path} holds level {space.level}, not {k}")
        return change_coordinates(space, model.flag) if model.flag else space
    else:
        raise InputError(f"unknown model family {model.family!r}")
    space = SectionSpace(k, tuple(PolySection.monomial(e) for e in exps), n)
    if model.flag is not None:
        space = change_coordinates(space, model.flag)
    return space


def leading_set(model: ModelSpec, k: int, order: Order = LEX) -> LeadingSet:
    return eliminate(order, model_sections(model, k))


# ------------------------------------------------------------------ file format


def format_section(s: PolySection) -> str:
    return ";".join(
        ",".join(map(str, e)) + ":" + fmt_rational(c) for e, c in sorted(s.terms.items())
    )


def format_sections(space: SectionSpace) -> str:
    lines = [f"n={space.n} k={space.level}"]
    lines += [format_section(s) for s in space.basis]
    return "\n".join(lines) + "\n"


def parse_sections(text: str) -> SectionSpace:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise InputError("empty section file")
    header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    if "trunc" in header or "truncation" in header:
        raise InputError("truncated power series are not accepted; sections must be polynomials")
    try:
        n, k = int(header["n"]), int(header["k"])
    except (KeyError, ValueError):
        raise InputError(f"bad section file header {lines[0]!r}") from None
    basis = []
    for ln in lines[1:]:
        terms = {}
        for tok in ln.split(";"):
            try:
                exp_txt, coef_txt = tok.split(":")
                exp = tuple(int(x) for x in exp_txt.split(","))
                coef = Fraction(coef_txt)
            except (ValueError, ZeroDivisionError):
                raise InputError(f"bad term {tok!r}") from None
            if len(exp) != n:
                raise InputError(f"term {tok!r} does not have {n} exponents")
            if exp in terms:
                raise InputError(f"repeated exponent in {ln!r}")
            terms[exp] = coef
        basis.append(PolySection(n, terms))
    return SectionSpace(k, tuple(basis), n)


def read_sections(path) -> SectionSpace:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read section file {path}: {exc}") from None
    return parse_sections(text)
