"""Concrete presented spaces and the built-in regular sequences over them."""
from __future__ import annotations

import math
import random
from fractions import Fraction
from math import isqrt
from typing import Any, Callable

from .completion import CPoint
from .metric import (
    DescriptorError,
    SpacePresentation,
    parse_rational,
    render_rational,
    verify_metric_axioms,
)

INFINITY = math.inf

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# Miller-Rabin with the bases above is exact below this bound
_MR_LIMIT = 3317044064679887385961981


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    if n >= _MR_LIMIT:
        raise ValueError("primality check is only deterministic below 3.3e24")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p: Any) -> int:
    if isinstance(p, bool) or not isinstance(p, int):
        raise DescriptorError(f"p must be an integer prime, got {p!r}")
    if not is_prime(p):
        raise DescriptorError(f"p must be prime, got {p}")
    return p


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(q: Fraction | int, p: int) -> int | float:
    """Exponent of ``p`` in ``q``; ``math.inf`` for zero."""
    _require_prime(p)
    q = Fraction(q)
    if q == 0:
        return INFINITY
    return _int_valuation(abs(q.numerator), p) - _int_valuation(q.denominator, p)


def padic_abs(q: Fraction, p: int) -> Fraction:
    """``p^-v(q)`` as an exact rational, zero for zero."""
    if q == 0:
        return Fraction(0)
    v = _int_valuation(abs(q.numerator), p) - _int_valuation(q.denominator, p)
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


class RationalsAbs(SpacePresentation):
    kind = "rationals_abs"

    def dist(self, x, y):
        return abs(x - y)

    def sample(self, seed, count):
        rng = random.Random(seed)
        return [Fraction(rng.randint(-40, 40), rng.randint(1, 12)) for _ in range(count)]

    def parse(self, obj):
        return parse_rational(obj)

    def render(self, x):
        return render_rational(x)

    def descriptor(self):
        return {"kind": self.kind}


class RationalsPAdic(SpacePresentation):
    kind = "rationals_padic"
    is_ultrametric = True

    def __init__(self, p: int):
        self.p = _require_prime(p)

    def dist(self, x, y):
        return padic_abs(x - y, self.p)

    def sample(self, seed, count):
        # small numerators and p-power factors so valuations actually collide
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            e = rng.randint(-2, 5)
            scale = Fraction(self.p) ** e
            out.append(scale * Fraction(rng.randint(-30, 30), rng.randint(1, 30)))
        return out

    def parse(self, obj):
        return parse_rational(obj)

    def render(self, x):
        return render_rational(x)

    def descriptor(self):
        return {"kind": self.kind, "p": self.p}


class FiniteSpace(SpacePresentation):
    """Labelled points with a tabled distance.

    With ``validate`` the table is checked exhaustively and rejected on any
    axiom failure, which also forces off-diagonal entries to be positive.
    """

    kind = "finite"

    def __init__(self, labels, distances, validate: bool = True):
        labels = [str(lbl) for lbl in labels]
        n = len(labels)
        if n == 0:
            raise DescriptorError("finite space needs at least one label")
        if len(set(labels)) != n:
            raise DescriptorError("duplicate labels in finite space")
        rows = list(distances)
        if len(rows) == n * n and not any(isinstance(r, (list, tuple)) for r in rows):
            rows = [rows[i * n:(i + 1) * n] for i in range(n)]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DescriptorError(f"distance matrix must be {n}x{n}")
        self.labels = tuple(labels)
        self.elements = self.labels
        self._index = {lbl: i for i, lbl in enumerate(labels)}
        self.table = tuple(tuple(parse_rational(v) for v in r) for r in rows)
        if validate:
            report = verify_metric_axioms(self)
            if not report.passed:
                name = report.failures()[0]
                raise DescriptorError(
                    f"finite table violates {name}: witness {report[name].witness}")

    @property
    def min_distance(self) -> Fraction:
        off = [d for i, r in enumerate(self.table) for j, d in enumerate(r) if i != j]
        return min(off) if off else Fraction(0)

    def dist(self, x, y):
        return self.table[self._index[x]][self._index[y]]

    def sample(self, seed, count):
        rng = random.Random(seed)
        return [rng.choice(self.labels) for _ in range(count)]

    def parse(self, obj):
        if obj not in self._index:
            raise DescriptorError(f"unknown label {obj!r}")
        return obj

    def render(self, x):
        return x

    def descriptor(self):
        return {
            "kind": self.kind,
            "labels": list(self.labels),
            "distances": [[render_rational(d) for d in r] for r in self.table],
        }


class ProductSpace(SpacePresentation):
    """Binary product with the max metric."""

    kind = "product"

    def __init__(self, first: SpacePresentation, second: SpacePresentation):
        self.components = (first, second)
        self.is_ultrametric = first.is_ultrametric and second.is_ultrametric
        if first.elements is not None and second.elements is not None:
            self.elements = tuple((a, b) for a in first.elements for b in second.elements)

    def dist(self, x, y):
        a, b = self.components
        return max(a.dist(x[0], y[0]), b.dist(x[1], y[1]))

    def sample(self, seed, count):
        a, b = self.components
        return list(zip(a.sample(seed, count), b.sample(seed + 1, count)))

    def parse(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 2:
            raise DescriptorError(f"product element must be a pair, got {obj!r}")
        return tuple(c.parse(v) for c, v in zip(self.components, obj))

    def render(self, x):
        return [c.render(v) for c, v in zip(self.components, x)]

    def descriptor(self):
        return {"kind": self.kind, "components": [c.descriptor() for c in self.components]}


def make_space(descriptor: dict, validate: bool = True) -> SpacePresentation:
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise DescriptorError("space descriptor must be an object with a 'kind'")
    kind = descriptor["kind"]
    if kind == "rationals_abs":
        return RationalsAbs()
    if kind == "rationals_padic":
        if "p" not in descriptor:
            raise DescriptorError("rationals_padic needs field 'p'")
        return RationalsPAdic(descriptor["p"])
    if kind == "finite":
        try:
            return FiniteSpace(descriptor["labels"], descriptor["distances"], validate)
        except KeyError as e:
            raise DescriptorError(f"finite space missing field {e}") from None
    if kind == "product":
        comps = descriptor.get("components")
        if not isinstance(comps, list) or len(comps) != 2:
            raise DescriptorError("product needs exactly two component descriptors")
        return ProductSpace(*(make_space(c, validate) for c in comps))
    raise DescriptorError(f"unknown space kind {kind!r}")


# -- regular sequences ------------------------------------------------------


def constant(space: SpacePresentation, x: Any) -> CPoint:
    return CPoint(space, lambda n: x, label=f"constant({space.render(x)!r})")


def sqrt_bisection(space: SpacePresentation, q: Fraction) -> CPoint:
    """Square root of ``q`` by bisection, starting from ``[a, a+1]``.

    ``at(n)`` is the midpoint after ``n+1`` halvings, so the bracketing
    interval has width ``2^-(n+1)``.
    """
    if not isinstance(space, RationalsAbs):
        raise DescriptorError("sqrt generator needs a rationals_abs space")
    q = Fraction(q)
    if q < 0:
        raise DescriptorError(f"sqrt of negative rational {render_rational(q)}")
    a = isqrt(q.numerator // q.denominator)

    def at(n: int) -> Fraction:
        lo, hi = Fraction(a), Fraction(a + 1)
        for _ in range(n + 1):
            mid = (lo + hi) / 2
            if mid * mid <= q:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    return CPoint(space, at, label=f"sqrt({render_rational(q)})")


def _padic_space(space: SpacePresentation, name: str) -> RationalsPAdic:
    if not isinstance(space, RationalsPAdic):
        raise DescriptorError(f"{name} generator needs a rationals_padic space")
    return space


def geometric_series(space: SpacePresentation, ratio: Fraction | None = None) -> CPoint:
    """Partial sums ``1 + r + ... + r^n``; needs ``v_p(r) >= 1``."""
    sp = _padic_space(space, "geometric_series")
    r = Fraction(sp.p if ratio is None else ratio)
    if padic_valuation(r, sp.p) < 1:
        raise DescriptorError("geometric_series ratio must have positive p-adic valuation")

    def at(n: int) -> Fraction:
        return sum((r**i for i in range(n + 1)), Fraction(0))

    return CPoint(space, at, label=f"geometric_series({render_rational(r)})")


def partial_sums(space: SpacePresentation, coefficients, tail: str = "cycle") -> CPoint:
    """``at(n) = c_0 + c_1 p + ... + c_n p^n`` for p-integral coefficients.

    The coefficient stream repeats the list (``tail="cycle"``) or is padded
    with zeros (``tail="zero"``).  The n-th term has valuation at least n,
    which gives the modulus.
    """
    sp = _padic_space(space, "partial_sums")
    coeffs = [parse_rational(c) for c in coefficients]
    if not coeffs:
        raise DescriptorError("partial_sums needs at least one coefficient")
    if tail not in ("cycle", "zero"):
        raise DescriptorError(f"unknown tail {tail!r}")
    for c in coeffs:
        if padic_valuation(c, sp.p) < 0:
            raise DescriptorError(f"coefficient {render_rational(c)} is not p-integral")

    def coeff(i: int) -> Fraction:
        if i < len(coeffs):
            return coeffs[i]
        return coeffs[i % len(coeffs)] if tail == "cycle" else Fraction(0)

    def at(n: int) -> Fraction:
        return sum((coeff(i) * sp.p**i for i in range(n + 1)), Fraction(0))

    return CPoint(space, at, label="partial_sums")


def pair(space: SpacePresentation, first: CPoint, second: CPoint) -> CPoint:
    if not isinstance(space, ProductSpace):
        raise DescriptorError("pair generator needs a product space")
    if (first.base, second.base) != space.components:
        raise DescriptorError("pair components do not match the product factors")
    return CPoint(space, lambda n: (first.at(n), second.at(n)), label="pair")


def builtin_generators(space: SpacePresentation, name: str, params: dict | None = None) -> CPoint:
    """Build a named regular sequence from JSON-style parameters."""
    params = params or {}
    if name == "constant":
        if "value" not in params:
            raise DescriptorError("constant generator needs 'value'")
        return constant(space, space.parse(params["value"]))
    if name == "sqrt":
        return sqrt_bisection(space, parse_rational(params.get("of", "2")))
    if name == "geometric_series":
        ratio = params.get("ratio")
        return geometric_series(space, None if ratio is None else parse_rational(ratio))
    if name == "partial_sums":
        if "coefficients" not in params:
            raise DescriptorError("partial_sums generator needs 'coefficients'")
        return partial_sums(space, params["coefficients"], params.get("tail", "cycle"))
    if name == "pair":
        comps = params.get("components")
        if not isinstance(space, ProductSpace) or not isinstance(comps, list) or len(comps) != 2:
            raise DescriptorError("pair generator needs a product space and two components")
        first, second = (make_generator(s, g) for s, g in zip(space.components, comps))
        return pair(space, first, second)
    raise DescriptorError(f"unknown generator {name!r}")


def make_generator(space: SpacePresentation, descriptor: dict) -> CPoint:
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise DescriptorError("generator descriptor must be an object with a 'kind'")
    params = {k: v for k, v in descriptor.items() if k != "kind"}
    return builtin_generators(space, descriptor["kind"], params)


def make_cpoint(descriptor: dict, validate: bool = True) -> CPoint:
    """``{"base": <space>, "generator": <generator>}`` to a CPoint."""
    if not isinstance(descriptor, dict) or "base" not in descriptor or "generator" not in descriptor:
        raise DescriptorError("point descriptor needs 'base' and 'generator'")
    return make_generator(make_space(descriptor["base"], validate), descriptor["generator"])


# -- seeded samplers for property suites -----------------------------------


def _signed_digit_series(space: RationalsAbs, start: Fraction, seed: int) -> CPoint:
    # start + sum_{i<=n} s_i 2^-(i+1) with s_i in {-1, 0, 1}
    def at(n: int) -> Fraction:
        rng = random.Random(seed)
        total = start
        for i in range(n + 1):
            total += Fraction(rng.choice((-1, 0, 1)), 2 ** (i + 1))
        return total

    return CPoint(space, at, label=f"digits({render_rational(start)}, seed={seed})")


def _sample_point(space: SpacePresentation, rng: random.Random) -> CPoint:
    seed = rng.randrange(2**32)
    if isinstance(space, RationalsAbs):
        choice = rng.randrange(3)
        if choice == 0:
            return constant(space, space.sample(seed, 1)[0])
        if choice == 1:
            return sqrt_bisection(space, Fraction(rng.randint(1, 60), rng.randint(1, 9)))
        return _signed_digit_series(space, space.sample(seed, 1)[0], seed)
    if isinstance(space, RationalsPAdic):
        choice = rng.randrange(3)
        if choice == 0:
            return constant(space, space.sample(seed, 1)[0])
        if choice == 1:
            unit = Fraction(rng.choice([u for u in range(1, 20) if u % space.p]),
                            rng.choice([u for u in range(1, 20) if u % space.p]))
            return geometric_series(space, unit * space.p ** rng.randint(1, 2))
        coeffs = [rng.randrange(space.p) for _ in range(rng.randint(1, 6))]
        return partial_sums(space, coeffs, rng.choice(("cycle", "zero")))
    if isinstance(space, ProductSpace):
        a, b = space.components
        return pair(space, _sample_point(a, rng), _sample_point(b, rng))
    if isinstance(space, FiniteSpace):
        c = rng.choice(space.labels)
        # the first term may sit anywhere the modulus allows
        near = [lbl for lbl in space.labels if space.dist(lbl, c) <= 1]
        first = rng.choice(near)
        return CPoint(space, lambda n: first if n == 0 else c, label=f"eventually({c})")
    raise DescriptorError(f"no sampler for space kind {space.kind!r}")


def sample_points(space: SpacePresentation, seed: int, count: int) -> list[CPoint]:
    """Deterministic mix of regular sequences over ``space``."""
    rng = random.Random(seed)
    return [_sample_point(space, rng) for _ in range(count)]


def truncations(y: CPoint) -> Callable[[int], CPoint]:
    """``i -> embed(y.at(i+1))``: a regular sequence of points converging to y."""
    return lambda i: constant(y.base, y.at(i + 1))


SHIPPED_SPACES: dict[str, dict] = {
    "rationals_abs": {"kind": "rationals_abs"},
    "rationals_2adic": {"kind": "rationals_padic", "p": 2},
    "rationals_3adic": {"kind": "rationals_padic", "p": 3},
    "product_abs_abs": {
        "kind": "product",
        "components": [{"kind": "rationals_abs"}, {"kind": "rationals_abs"}],
    },
    "finite_path3": {
        "kind": "finite",
        "labels": ["a", "b", "c"],
        "distances": [["0", "1", "2"], ["1", "0", "1"], ["2", "1", "0"]],
    },
    "finite_ultra4": {
        "kind": "finite",
        "labels": ["p", "q", "r", "s"],
        "distances": [
            ["0", "1", "3", "3"],
            ["1", "0", "3", "3"],
            ["3", "3", "0", "2"],
            ["3", "3", "2", "0"],
        ],
    },
}

CORRUPTED_TABLE: dict = {
    "kind": "finite",
    "labels": ["a", "b", "c"],
    "distances": [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]],
}
