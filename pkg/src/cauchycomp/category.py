"""Finite categories given by composition tables, with exhaustive checks.

Morphisms are named; ``compose(g, f)`` is ``g o f`` (``f`` first).  The
universal-object search in :func:`find_ption` reads "1-1 morphism" as
monomorphism and "Y contains X" as "there is a mono X -> Y".
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .metric import AxiomReport, Check, DescriptorError

DEFAULT_HOM_CAP = 64

PropertyPredicate = Callable[[str], bool]


class RigidityError(ValueError):
    def __init__(self, obj: str, morphism: str):
        self.object = obj
        self.morphism = morphism
        super().__init__(
            f"object {obj!r} has a mono endomorphism {morphism!r} other than its identity")


class FiniteCategory:
    def __init__(self, objects: Iterable[str], morphisms: Mapping[str, tuple[str, str]],
                 composition: Mapping[tuple[str, str], str], identities: Mapping[str, str],
                 hom_cap: int = DEFAULT_HOM_CAP):
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise DescriptorError("duplicate object labels")
        self.morphisms = dict(morphisms)
        self.composition = dict(composition)
        self.identities = dict(identities)
        obj_set = set(self.objects)
        for name, (src, dst) in self.morphisms.items():
            if src not in obj_set or dst not in obj_set:
                raise DescriptorError(f"morphism {name!r} has unknown endpoint")
        for (g, f), gf in self.composition.items():
            for m in (g, f, gf):
                if m not in self.morphisms:
                    raise DescriptorError(f"composition mentions unknown morphism {m!r}")
        for obj in self.objects:
            if obj not in self.identities:
                raise DescriptorError(f"object {obj!r} has no identity")
            if self.identities[obj] not in self.morphisms:
                raise DescriptorError(f"identity of {obj!r} is not a morphism")
        self._hom: dict[tuple[str, str], list[str]] = {}
        for name, ends in self.morphisms.items():
            self._hom.setdefault(ends, []).append(name)
        for (a, b), ms in self._hom.items():
            if len(ms) > hom_cap:
                raise DescriptorError(
                    f"Hom({a}, {b}) has {len(ms)} morphisms, above the cap of {hom_cap}")

    def src(self, f: str) -> str:
        return self.morphisms[f][0]

    def dst(self, f: str) -> str:
        return self.morphisms[f][1]

    def hom(self, a: str, b: str) -> list[str]:
        return list(self._hom.get((a, b), ()))

    def compose(self, g: str, f: str) -> str:
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise KeyError(f"no composite recorded for {g} o {f}") from None

    def composable_pairs(self):
        for f, (_, b) in self.morphisms.items():
            for g in self.morphisms:
                if self.src(g) == b:
                    yield g, f

    @classmethod
    def from_descriptor(cls, desc: dict, fill_identities: bool = True,
                        hom_cap: int = DEFAULT_HOM_CAP) -> "FiniteCategory":
        """Parse the JSON form.

        Composites with an identity on either side may be omitted; they are
        filled in as the identity laws dictate unless ``fill_identities`` is
        off.  Explicit entries are never overwritten.
        """
        try:
            objects = [str(o) for o in desc["objects"]]
            morphisms = {}
            for m in desc["morphisms"]:
                if m["name"] in morphisms:
                    raise DescriptorError(f"duplicate morphism {m['name']!r}")
                morphisms[m["name"]] = (str(m["src"]), str(m["dst"]))
            composition = {}
            for triple in desc.get("composition", []):
                g, f, gf = triple
                composition[(g, f)] = gf
            identities = {str(k): v for k, v in desc["identities"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            if isinstance(e, DescriptorError):
                raise
            raise DescriptorError(f"malformed category descriptor: {e!r}") from None
        if fill_identities:
            for f, (a, b) in morphisms.items():
                if b in identities:
                    composition.setdefault((identities[b], f), f)
                if a in identities:
                    composition.setdefault((f, identities[a]), f)
        return cls(objects, morphisms, composition, identities, hom_cap)

    def to_descriptor(self) -> dict:
        return {
            "objects": list(self.objects),
            "morphisms": [{"name": n, "src": s, "dst": d} for n, (s, d) in self.morphisms.items()],
            "composition": [[g, f, gf] for (g, f), gf in self.composition.items()],
            "identities": dict(self.identities),
        }


def poset_category(elements: Iterable[str], leq: Callable[[str, str], bool]) -> FiniteCategory:
    """One morphism ``a->b`` exactly when ``leq(a, b)``."""
    elements = list(elements)
    name = {(a, b): f"{a}->{b}" for a in elements for b in elements if leq(a, b)}
    morphisms = {n: ends for ends, n in name.items()}
    composition = {}
    for (a, b), f in name.items():
        for (b2, c), g in name.items():
            if b2 == b:
                composition[(g, f)] = name[(a, c)]
    identities = {a: name[(a, a)] for a in elements}
    return FiniteCategory(elements, morphisms, composition, identities)


def chain_category(elements: Iterable[str]) -> FiniteCategory:
    order = {e: i for i, e in enumerate(elements)}
    return poset_category(order, lambda a, b: order[a] <= order[b])


def monoid_category(elements: Iterable[str], mult: Callable[[str, str], str], unit: str,
                    obj: str = "*") -> FiniteCategory:
    """One-object category; ``mult(g, f)`` is the composite ``g o f``."""
    elements = list(elements)
    morphisms = {e: (obj, obj) for e in elements}
    composition = {(g, f): mult(g, f) for g in elements for f in elements}
    return FiniteCategory([obj], morphisms, composition, {obj: unit})


def cyclic_group_category(n: int) -> FiniteCategory:
    elems = [str(i) for i in range(n)]
    return monoid_category(elems, lambda g, f: str((int(g) + int(f)) % n), "0")


def metric_category(spaces: Mapping[str, object]) -> FiniteCategory:
    """Finite metric spaces with every distance-preserving map between them.

    Morphism names spell out the image of each point, e.g. ``A->B[x,y]``.
    """
    morphisms: dict[str, tuple[str, str]] = {}
    maps: dict[str, dict] = {}
    identities = {}
    for a, sa in spaces.items():
        for b, sb in spaces.items():
            for images in itertools.product(sb.labels, repeat=len(sa.labels)):
                fn = dict(zip(sa.labels, images))
                if all(sb.dist(fn[x], fn[y]) == sa.dist(x, y)
                       for x, y in itertools.combinations(sa.labels, 2)):
                    name = f"{a}->{b}[{','.join(images)}]"
                    morphisms[name] = (a, b)
                    maps[name] = fn
                    if a == b and all(fn[x] == x for x in sa.labels):
                        identities[a] = name
    by_fn = {(morphisms[n], tuple(sorted(fn.items()))): n for n, fn in maps.items()}
    composition = {}
    for f, (a, b) in morphisms.items():
        for g, (b2, c) in morphisms.items():
            if b2 != b:
                continue
            gf = {x: maps[g][maps[f][x]] for x in maps[f]}
            composition[(g, f)] = by_fn[((a, c), tuple(sorted(gf.items())))]
    return FiniteCategory(list(spaces), morphisms, composition, identities)


def verify_category_axioms(cat: FiniteCategory) -> AxiomReport:
    """Exhaustive check of the table, the identity laws and associativity."""
    checks: dict[str, Check] = {}

    bad_id = next((o for o, i in cat.identities.items() if cat.morphisms[i] != (o, o)), None)
    checks["identities"] = Check(bad_id is None, None if bad_id is None else [bad_id])

    pairs = set(cat.composable_pairs())
    missing = next((list(p) for p in sorted(pairs) if p not in cat.composition), None)
    extra = next((list(p) for p in sorted(cat.composition) if p not in pairs), None)
    if missing is not None:
        checks["totality"] = Check(False, missing, "composable pair without a composite")
    elif extra is not None:
        checks["totality"] = Check(False, extra, "composite recorded for a non-composable pair")
    else:
        checks["totality"] = Check(True)

    mistyped = None
    for g, f in sorted(pairs):
        gf = cat.composition.get((g, f))
        if gf is not None and cat.morphisms[gf] != (cat.src(f), cat.dst(g)):
            mistyped = [g, f, gf]
            break
    checks["typing"] = Check(mistyped is None, mistyped)

    id_fail = None
    for f, (a, b) in cat.morphisms.items():
        left = cat.composition.get((cat.identities[b], f))
        right = cat.composition.get((f, cat.identities[a]))
        if left != f or right != f:
            id_fail = [f]
            break
    checks["identity_laws"] = Check(id_fail is None, id_fail)

    assoc = None
    table = cat.composition
    for f, (_, b) in cat.morphisms.items():
        for g in cat.morphisms:
            if cat.src(g) != b or (g, f) not in table:
                continue
            gf = table[(g, f)]
            for h in cat.morphisms:
                if cat.src(h) != cat.dst(g) or (h, g) not in table:
                    continue
                lhs = table.get((h, gf))
                rhs = table.get((table[(h, g)], f))
                if lhs != rhs:
                    assoc = [f, g, h]
                    break
            if assoc:
                break
        if assoc:
            break
    checks["associativity"] = Check(assoc is None, assoc)
    return AxiomReport(checks)


def is_mono(cat: FiniteCategory, f: str) -> bool:
    """Left-cancellable: ``f o g == f o h`` forces ``g == h``."""
    a = cat.src(f)
    for w in cat.objects:
        seen: dict[str, str] = {}
        for g in cat.hom(w, a):
            fg = cat.compose(f, g)
            if fg in seen:
                return False
            seen[fg] = g
    return True


def _predicate(s: PropertyPredicate | Iterable[str]) -> PropertyPredicate:
    if callable(s):
        return s
    members = frozenset(s)
    return members.__contains__


@dataclass
class RigidityReport:
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"status": "pass" if self.passed else "fail", "violations": self.violations}


def check_rigidity(cat: FiniteCategory, s: PropertyPredicate | Iterable[str]) -> RigidityReport:
    """Every mono endomorphism of an object in S must be its identity."""
    member = _predicate(s)
    report = RigidityReport()
    for a in cat.objects:
        if not member(a):
            continue
        for e in cat.hom(a, a):
            if e != cat.identities[a] and is_mono(cat, e):
                report.violations.append({"object": a, "morphism": e})
    return report


def monos(cat: FiniteCategory, a: str, b: str) -> list[str]:
    return [f for f in cat.hom(a, b) if is_mono(cat, f)]


def find_ption(cat: FiniteCategory, s: PropertyPredicate | Iterable[str],
               x: str) -> list[tuple[str, str]]:
    """All ``(Y, f_Y)`` with Y in S through which every mono X -> Z in S factors.

    The factoring map must itself be mono.  Raises :class:`RigidityError`
    when some object of S has a non-identity mono endomorphism.
    """
    member = _predicate(s)
    rigid = check_rigidity(cat, member)
    if not rigid.passed:
        v = rigid.violations[0]
        raise RigidityError(v["object"], v["morphism"])
    if x not in cat.objects:
        raise DescriptorError(f"unknown object {x!r}")
    in_s = [o for o in cat.objects if member(o)]
    cones = [(z, fz) for z in in_s for fz in monos(cat, x, z)]
    found = []
    for y in in_s:
        for fy in monos(cat, x, y):
            if all(any(cat.compose(f, fy) == fz for f in monos(cat, y, z)) for z, fz in cones):
                found.append((y, fy))
    return found


def shipped_categories() -> dict[str, FiniteCategory]:
    trivial = FiniteCategory(["*"], {"id": ("*", "*")}, {("id", "id"): "id"}, {"*": "id"})
    poset3 = chain_category(["x", "y", "z"])
    chain4 = chain_category(["a", "b", "c", "d"])
    z2 = cyclic_group_category(2)
    # u, v: A -> B coequalised by w: B -> C
    parallel = FiniteCategory.from_descriptor({
        "objects": ["A", "B", "C"],
        "morphisms": [
            {"name": "1A", "src": "A", "dst": "A"},
            {"name": "1B", "src": "B", "dst": "B"},
            {"name": "1C", "src": "C", "dst": "C"},
            {"name": "u", "src": "A", "dst": "B"},
            {"name": "v", "src": "A", "dst": "B"},
            {"name": "w", "src": "B", "dst": "C"},
            {"name": "t", "src": "A", "dst": "C"},
        ],
        "composition": [["w", "u", "t"], ["w", "v", "t"]],
        "identities": {"A": "1A", "B": "1B", "C": "1C"},
    })
    return {"trivial": trivial, "poset3": poset3, "chain4": chain4, "z2": z2,
            "parallel": parallel}


def corrupted_category() -> FiniteCategory:
    """Z/3 with the composite ``1 o 1`` rerouted from 2 to 0."""
    cat = cyclic_group_category(3)
    table = dict(cat.composition)
    table[("1", "1")] = "0"
    return FiniteCategory(cat.objects, cat.morphisms, table, cat.identities)
