"""Exact rationals, presented metric spaces and sampled axiom checks.

Every base-space distance in this package is a :class:`fractions.Fraction`.
Approximation only enters one layer up, in :mod:`cauchycomp.completion`.
"""
from __future__ import annotations

import itertools
import operator
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Sequence

Rational = Fraction

_ARITH = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


class DescriptorError(ValueError):
    """Malformed or unsupported input (space, generator or element encoding)."""


def parse_rational(text: Any) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a reduced Fraction.

    Decimal and float spellings are refused so that no rounding can sneak in.
    """
    if isinstance(text, bool):
        raise DescriptorError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise DescriptorError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise DescriptorError(f"not a rational: {text!r}") from None
    if d == 0:
        raise DescriptorError(f"zero denominator in {text!r}")
    return Fraction(n, d)


def render_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def rational_arith(a: Fraction, b: Fraction, op: str) -> Fraction | int:
    """Exact binary arithmetic; ``cmp`` returns -1, 0 or 1."""
    a, b = Fraction(a), Fraction(b)
    if op == "cmp":
        return (a > b) - (a < b)
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    if op == "div" and b == 0:
        raise ZeroDivisionError("division by zero rational")
    return fn(a, b)


def dyadic(k: int) -> Fraction:
    """2^-k as an exact rational (k may be negative)."""
    return Fraction(1, 2**k) if k >= 0 else Fraction(2 ** (-k))


class MetricHandle(ABC):
    """Anything that can report a distance at precision ``k``.

    ``slack(k)`` is the largest possible gap between ``distance(p, q, k)``
    and the true distance.
    """

    @abstractmethod
    def distance(self, p: Any, q: Any, k: int) -> Fraction: ...

    @abstractmethod
    def slack(self, k: int) -> Fraction: ...


class SpacePresentation(MetricHandle):
    """A metric space given by an element encoding and an exact distance.

    Subclasses implement :meth:`dist`, :meth:`sample`, :meth:`parse`,
    :meth:`render` and :meth:`descriptor`.  Finite carriers also expose
    :attr:`elements`, which switches axiom checks to exhaustive mode.
    """

    kind: str = "abstract"
    elements: tuple | None = None
    is_ultrametric = False

    @abstractmethod
    def dist(self, x: Any, y: Any) -> Fraction: ...

    @abstractmethod
    def sample(self, seed: int, count: int) -> list: ...

    @abstractmethod
    def parse(self, obj: Any) -> Any: ...

    @abstractmethod
    def render(self, x: Any) -> Any: ...

    @abstractmethod
    def descriptor(self) -> dict: ...

    def distance(self, p, q, k):
        return self.dist(p, q)

    def slack(self, k):
        return Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, SpacePresentation):
            return NotImplemented
        return self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(repr(sorted(self.descriptor().items(), key=str)))

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor()})"


@dataclass
class Check:
    passed: bool
    witness: list | None = None
    detail: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict = {"status": "pass" if self.passed else "fail", **self.extra}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class AxiomReport:
    """Named pass/fail checks; serializes to ``{axiom: {status, witness?}}``."""

    checks: dict[str, Check] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name: str) -> Check:
        return self.checks[name]

    def failures(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {name: c.to_dict() for name, c in self.checks.items()}


@dataclass
class IsometryMap:
    """A distance-preserving map from a presented space into ``target``.

    ``target`` is any :class:`MetricHandle`: a base presentation or a
    completion.  Distance preservation is a contract of the catalogue maps,
    and :func:`check_isometry` spot-checks it.
    """

    source: SpacePresentation
    target: MetricHandle
    apply: Callable[[Any], Any]
    name: str = "isometry"

    def __call__(self, x):
        return self.apply(x)


def check_isometry(phi: IsometryMap, xs: Sequence, k: int) -> AxiomReport:
    """Compare source and target distances on all pairs drawn from ``xs``."""
    tol = 2 * phi.target.slack(k)
    images = [phi.apply(x) for x in xs]
    worst = Fraction(0)
    for (x, fx), (y, fy) in itertools.combinations(zip(xs, images), 2):
        gap = abs(phi.target.distance(fx, fy, k) - phi.source.dist(x, y))
        worst = max(worst, gap)
        if gap > tol:
            return AxiomReport({"distance_preservation": Check(
                False,
                [phi.source.render(x), phi.source.render(y)],
                "distance not preserved",
                {"deviation": render_rational(gap)},
            )})
    return AxiomReport({"distance_preservation": Check(
        True, extra={"max_deviation": render_rational(worst)})})


def _triples(space: SpacePresentation, seed: int, n: int) -> Iterator[tuple]:
    if space.elements is not None:
        yield from itertools.product(space.elements, repeat=3)
        return
    pts = space.sample(seed, 3 * n)
    for i in range(n):
        yield tuple(pts[3 * i:3 * i + 3])


def verify_metric_axioms(space: SpacePresentation, seed: int = 0,
                         n_samples: int = 1000) -> AxiomReport:
    """Check the metric axioms exactly on sampled triples.

    Finite carriers are checked exhaustively (``seed``/``n_samples`` are then
    ignored), including the converse of ``d(x, x) = 0``.  Each axiom records
    its first counterexample.
    """
    if n_samples < 3:
        raise ValueError("n_samples must be at least 3")
    axioms = ["zero_self", "nonnegativity", "symmetry", "triangle"]
    if space.is_ultrametric:
        axioms.append("ultrametric")
    if space.elements is not None:
        axioms.append("indiscernibles")
    witness: dict[str, list | None] = {a: None for a in axioms}
    r = space.render

    def fail(name, *pts):
        if witness[name] is None:
            witness[name] = [r(p) for p in pts]

    for x, y, z in _triples(space, seed, n_samples):
        dxy, dyz, dxz = space.dist(x, y), space.dist(y, z), space.dist(x, z)
        if space.dist(x, x) != 0:
            fail("zero_self", x)
        if min(dxy, dyz, dxz) < 0:
            fail("nonnegativity", x, y, z)
        if dxy != space.dist(y, x):
            fail("symmetry", x, y)
        if dxz > dxy + dyz:
            fail("triangle", x, y, z)
        if space.is_ultrametric and dxz > max(dxy, dyz):
            fail("ultrametric", x, y, z)
        if space.elements is not None and dxy == 0 and x != y:
            fail("indiscernibles", x, y)
    return AxiomReport({a: Check(witness[a] is None, witness[a]) for a in axioms})
