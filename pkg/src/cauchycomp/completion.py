"""Cauchy-sequence completion of a presented metric space.

A point of the completion is a *regular* sequence: ``d(at(m), at(n)) <=
2^-m + 2^-n``.  Equality of such points is undecidable, so everything here
is phrased through :func:`dist_approx`, which is accurate to ``2^-k``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .metric import (
    IsometryMap,
    MetricHandle,
    SpacePresentation,
    dyadic,
    render_rational,
)

DEFAULT_CHECK_INDEX = 24
# extra precision used when certifying a modulus violation
_CHECK_MARGIN = 4


class RegularityError(ValueError):
    """A sampled index pair broke the 2^-m + 2^-n modulus."""

    def __init__(self, i: int, j: int, observed: Fraction, bound: Fraction):
        self.pair = (i, j)
        self.observed = observed
        self.bound = bound
        super().__init__(
            f"regularity violated at pair ({i}, {j}): distance "
            f">= {render_rational(observed)} exceeds {render_rational(bound)}"
        )


class SpaceMismatchError(ValueError):
    pass


class CPoint:
    """A point of the completion of ``base``, given by its regular sequence.

    ``at`` must be pure; results are memoized behind a lock so concurrent
    readers see one consistent sequence.
    """

    __slots__ = ("base", "_fn", "_cache", "_lock", "label")

    def __init__(self, base: SpacePresentation, at: Callable[[int], Any],
                 label: str | None = None):
        self.base = base
        self._fn = at
        self._cache: dict[int, Any] = {}
        self._lock = threading.Lock()
        self.label = label

    def at(self, n: int) -> Any:
        if n < 0:
            raise ValueError("sequence index must be non-negative")
        with self._lock:
            try:
                return self._cache[n]
            except KeyError:
                pass
        value = self._fn(n)
        with self._lock:
            return self._cache.setdefault(n, value)

    def __repr__(self):
        return f"CPoint({self.label or '<sequence>'} over {self.base.kind})"


def check_regularity(y: CPoint, max_index: int = DEFAULT_CHECK_INDEX) -> None:
    """Exact spot check of the modulus on all pairs ``m < n <= max_index``."""
    d = y.base.dist
    for m in range(max_index + 1):
        for n in range(m + 1, max_index + 1):
            bound = dyadic(m) + dyadic(n)
            observed = d(y.at(m), y.at(n))
            if observed > bound:
                raise RegularityError(m, n, observed, bound)


class Completion(MetricHandle):
    """The complete space of regular sequences over ``base``.

    ``reindex`` picks which raw terms a presentation reads: the n-th
    approximation of a point ``p`` is ``p.at(reindex(n))``.  Any
    ``reindex(n) >= n`` yields a presentation of the same completion; the
    default is the identity.
    """

    def __init__(self, base: SpacePresentation,
                 reindex: Callable[[int], int] | None = None,
                 name: str = "canonical",
                 check_index: int | None = DEFAULT_CHECK_INDEX):
        self.base = base
        self.reindex = reindex or (lambda n: n)
        self.name = name
        self.check_index = check_index

    def __repr__(self):
        return f"Completion({self.base!r}, name={self.name!r})"

    def _own(self, *points: CPoint) -> None:
        for p in points:
            if p.base is not self.base and p.base != self.base:
                raise SpaceMismatchError(
                    f"point over {p.base.kind} used in completion of {self.base.kind}")

    def approx(self, p: CPoint, n: int) -> Any:
        """The n-th base approximation; within 2^-n of ``p``."""
        return p.at(self.reindex(n))

    def embed(self, x: Any) -> CPoint:
        return CPoint(self.base, lambda n: x, label=f"embed({self.base.render(x)!r})")

    def dist_approx(self, p: CPoint, q: CPoint, k: int) -> Fraction:
        if k < 0:
            raise ValueError("precision must be non-negative")
        self._own(p, q)
        return self.base.dist(self.approx(p, k + 1), self.approx(q, k + 1))

    def distance(self, p, q, k):
        return self.dist_approx(p, q, k)

    def slack(self, k):
        return dyadic(k)

    def apart(self, p: CPoint, q: CPoint, k: int) -> bool:
        """True certifies ``p != q``; False is inconclusive."""
        return self.dist_approx(p, q, k) > 2 * dyadic(k)

    def approximate_by_base(self, p: CPoint, k: int) -> Any:
        """A base element within 2^-k of ``p`` (density witness)."""
        if k < 0:
            raise ValueError("precision must be non-negative")
        self._own(p)
        return self.approx(p, k + 1)

    def check_modulus(self, ys: Callable[[int], CPoint], max_index: int) -> None:
        for i in range(max_index + 1):
            for j in range(i + 1, max_index + 1):
                k = j + _CHECK_MARGIN
                bound = dyadic(i) + dyadic(j)
                # true distance >= observed - 2^-k
                lower = self.dist_approx(ys(i), ys(j), k) - dyadic(k)
                if lower > bound:
                    raise RegularityError(i, j, lower, bound)

    def limit(self, ys: Callable[[int], CPoint],
              check_index: int | None = None) -> CPoint:
        """Limit of a regular sequence of completion points.

        The result reads ``ys(n+1)`` at approximation index ``n+1``; the
        triangle inequality then gives a regular sequence at distance at most
        ``2^-i`` from every ``ys(i)``.  The modulus of ``ys`` is spot-checked
        on index pairs up to ``check_index`` (``0`` disables the check).
        """
        if check_index is None:
            check_index = self.check_index
        ys = _memoized(ys)
        if check_index is not None:
            self.check_modulus(ys, check_index)

        def at(n: int) -> Any:
            y = ys(n + 1)
            self._own(y)
            return self.approx(y, n + 1)

        return CPoint(self.base, at, label="limit")


def _memoized(fn: Callable[[int], CPoint]) -> Callable[[int], CPoint]:
    cache: dict[int, CPoint] = {}
    lock = threading.Lock()

    def get(i: int) -> CPoint:
        with lock:
            if i in cache:
                return cache[i]
        value = fn(i)
        with lock:
            return cache.setdefault(i, value)

    return get


def embed(space: SpacePresentation, x: Any) -> CPoint:
    return Completion(space).embed(x)


def dist_approx(y: CPoint, y2: CPoint, k: int) -> Fraction:
    if y.base != y2.base:
        raise SpaceMismatchError("points live over different base spaces")
    return Completion(y.base).dist_approx(y, y2, k)


def approximate_by_base(y: CPoint, k: int) -> Any:
    return Completion(y.base).approximate_by_base(y, k)


def limit(space: Completion, ys: Callable[[int], CPoint],
          check_index: int | None = None) -> CPoint:
    return space.limit(ys, check_index)


def canonical_embedding(space: Completion) -> IsometryMap:
    return IsometryMap(space.base, space, space.embed, name="embedding")


def extend_isometry(phi_z: IsometryMap, y: CPoint,
                    source: Completion | None = None) -> Any:
    """Extend ``phi_z: X -> Z`` to the point ``y`` of a completion of X.

    The images ``phi_z(x_i)`` of the approximating sequence are again regular
    because ``phi_z`` preserves distances, so ``Z.limit`` applies.
    """
    if source is None:
        source = Completion(y.base)
    if phi_z.source != source.base or y.base != source.base:
        raise SpaceMismatchError("isometry source does not match the point's base space")
    target = phi_z.target
    if not hasattr(target, "limit"):
        raise SpaceMismatchError("extension target must be a complete space handle")
    return target.limit(lambda i: phi_z.apply(source.approx(y, i)))


def extension(phi_z: IsometryMap, source: Completion | None = None) -> Callable[[CPoint], Any]:
    return lambda y: extend_isometry(phi_z, y, source)


@dataclass
class DeviationReport:
    """Outcome of a bounded-deviation check over samples."""

    bound: Fraction
    max_observed: Fraction = Fraction(0)
    samples: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, label: Any, observed: Fraction) -> None:
        self.samples += 1
        self.max_observed = max(self.max_observed, observed)
        if observed > self.bound:
            self.violations.append({"at": label, "observed": render_rational(observed)})

    def to_dict(self) -> dict:
        return {
            "status": "pass" if self.passed else "fail",
            "bound": render_rational(self.bound),
            "max_observed": render_rational(self.max_observed),
            "samples": self.samples,
            "violations": self.violations,
        }


def check_commutes(phi_y: IsometryMap, phi_z: IsometryMap,
                   phi: Callable[[Any], Any], xs: Sequence, k: int) -> DeviationReport:
    """Spot-check ``phi(phi_y(x)) == phi_z(x)`` to within 2^-k."""
    if phi_y.source != phi_z.source:
        raise SpaceMismatchError("both legs of the triangle must start at the same space")
    report = DeviationReport(bound=dyadic(k))
    z = phi_z.target
    for x in xs:
        report.record(phi_y.source.render(x), z.distance(phi(phi_y.apply(x)), phi_z.apply(x), k))
    return report


def completion_iso_roundtrip(a: Completion, b: Completion, a_points: Sequence[CPoint],
                             b_points: Sequence[CPoint], k: int) -> DeviationReport:
    """Build A->B and B->A by extension and measure both round trips."""
    if a.base != b.base:
        raise SpaceMismatchError("completions of different spaces")
    to_b = extension(IsometryMap(a.base, b, b.embed, "B.embed"), a)
    to_a = extension(IsometryMap(b.base, a, a.embed, "A.embed"), b)
    report = DeviationReport(bound=2 * dyadic(k))
    for idx, p in enumerate(a_points):
        report.record(f"A[{idx}]", a.dist_approx(to_a(to_b(p)), p, k))
    for idx, q in enumerate(b_points):
        report.record(f"B[{idx}]", b.dist_approx(to_b(to_a(q)), q, k))
    return report
