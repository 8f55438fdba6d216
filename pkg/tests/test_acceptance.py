"""Exit criteria.  Each test records one PASS/FAIL line, printed at the end
of the pytest run under "acceptance criteria"."""
import json
import random
import time
from fractions import Fraction

from cauchycomp.category import (
    check_rigidity,
    chain_category,
    corrupted_category,
    find_ption,
    shipped_categories,
    verify_category_axioms,
)
from cauchycomp.cli import main
from cauchycomp.completion import (
    Completion,
    CPoint,
    canonical_embedding,
    check_commutes,
    check_regularity,
    completion_iso_roundtrip,
    dist_approx,
    embed,
    extension,
)
from cauchycomp.metric import IsometryMap, dyadic, parse_rational, verify_metric_axioms
from cauchycomp.spaces import (
    CORRUPTED_TABLE,
    SHIPPED_SPACES,
    builtin_generators,
    make_space,
    sample_points,
    truncations,
)

from acceptance_log import record
from oracles import bisection_midpoint, newton_sqrt2, valuation

SEED = 20240611
QABS = make_space({"kind": "rationals_abs"})
Q2 = make_space({"kind": "rationals_padic", "p": 2})
SPACES = {name: make_space(desc) for name, desc in SHIPPED_SPACES.items()}


def _maps(comp):
    embedding = canonical_embedding(comp)
    shift = IsometryMap(QABS, comp, lambda x: comp.embed(x + Fraction(5, 3)), "shift(5/3)")
    return [embedding, shift]


def test_01_sqrt2_eval(capsys):
    start = time.perf_counter()
    code = main(["eval", "--input",
                 json.dumps({"base": {"kind": "rationals_abs"},
                             "generator": {"kind": "sqrt", "of": "2"}}),
                 "--precision", "20", "--format", "json"])
    elapsed = time.perf_counter() - start
    q = parse_rational(json.loads(capsys.readouterr().out)["value"])
    err = abs(q * q - 2)
    bound = 3 * dyadic(20) + dyadic(40)
    oracle_ok = q == bisection_midpoint(Fraction(2), 22)
    ok = code == 0 and err <= bound and elapsed < 1.0 and oracle_ok
    record("1", "sqrt(2) eval at k=20", ok,
           f"|q^2-2| = {float(err):.3e} <= {float(bound):.3e}, {elapsed * 1000:.1f} ms")
    assert ok


def test_02_two_adic_geometric_series():
    start = time.perf_counter()
    s = builtin_generators(Q2, "partial_sums", {"coefficients": ["1"]})
    q = dist_approx(s, embed(Q2, Fraction(-1)), 16)
    elapsed = time.perf_counter() - start
    # oracle: v2((2^(n+1) - 1) + 1) = n + 1 at the read index n = 17
    expected = Fraction(1, 2 ** (valuation(Fraction(2**18), 2)))
    ok = q <= dyadic(16) and q == expected and elapsed < 1.0
    record("2", "2-adic geometric series", ok, f"d = {q} <= 2^-16, {elapsed * 1000:.1f} ms")
    assert ok


def test_03_extension_isometry():
    comp = Completion(QABS)
    k = 12
    pts = sample_points(QABS, SEED, 100)
    pairs = list(zip(pts[::2], pts[1::2]))
    assert len(pairs) == 50
    violations, worst = 0, Fraction(0)
    for phi in _maps(comp):
        ext = extension(phi)
        for y, y2 in pairs:
            gap = abs(comp.dist_approx(ext(y), ext(y2), k) - comp.dist_approx(y, y2, k))
            worst = max(worst, gap)
            violations += gap > 2 * dyadic(k)
    ok = violations == 0
    record("3", "extension isometry, 50 pairs x 2 maps", ok,
           f"max gap {float(worst):.3e} <= {float(2 * dyadic(k)):.3e}, {violations} violations")
    assert ok


def test_04_diagram_commutes():
    comp = Completion(QABS)
    phi_y = canonical_embedding(comp)
    xs = QABS.sample(SEED, 100)
    reports = [check_commutes(phi_y, phi, extension(phi), xs, 12) for phi in _maps(comp)]
    ok = all(r.passed and r.samples == 100 for r in reports)
    record("4", "diagram commutes at k=12 (embedding, shift)", ok,
           ", ".join(f"max {float(r.max_observed):.3e}" for r in reports))
    assert ok


def test_05_well_definedness():
    comp = Completion(QABS)
    bisect = builtin_generators(QABS, "sqrt", {"of": "2"})
    newton = CPoint(QABS, newton_sqrt2, label="newton")
    check_regularity(newton, 24)
    k = 14
    dists = []
    for phi in _maps(comp):
        ext = extension(phi)
        dists.append(comp.dist_approx(ext(bisect), ext(newton), k))
    ok = all(d <= 3 * dyadic(k) for d in dists)
    record("5", "well-definedness, bisection vs Newton at k=14", ok,
           f"max {float(max(dists)):.3e} <= {float(3 * dyadic(k)):.3e}")
    assert ok


def test_06_density():
    violations = 0
    for name, sp in SPACES.items():
        comp = Completion(sp)
        for y in sample_points(sp, SEED, 20):
            for k in range(17):
                x = comp.approximate_by_base(y, k)
                violations += comp.dist_approx(comp.embed(x), y, k + 1) > dyadic(k)
    ok = violations == 0
    record("6", f"density, 20 points x {len(SPACES)} spaces x k<=16", ok,
           f"{violations} violations")
    assert ok


def _regular_sequences(sp, count):
    rng = random.Random(SEED)
    out = []
    for idx, y in enumerate(sample_points(sp, SEED + 1, count)):
        if idx % 2 == 0:
            out.append(truncations(y))
        else:
            # tails of y, each read further along the same sequence
            lag = rng.randint(0, 3)
            out.append(lambda i, y=y, lag=lag: CPoint(sp, lambda n: y.at(n + i + lag)))
    return out


def test_07_completeness():
    violations, checked = 0, 0
    for name, sp in SPACES.items():
        comp = Completion(sp)
        for ys in _regular_sequences(sp, 20):
            z = comp.limit(ys)
            check_regularity(z, 16)
            for i in range(13):
                for k in range(17):
                    checked += 1
                    violations += comp.dist_approx(z, ys(i), k) > 3 * dyadic(i) + dyadic(k)
    ok = violations == 0
    record("7", "completeness, 20 sequences per space, i<=12, k<=16", ok,
           f"{checked} checks, {violations} violations")
    assert ok


def test_08_uniqueness_round_trip():
    k = 12
    a = Completion(QABS, reindex=lambda n: n + 1, name="shifted")
    b = Completion(QABS)
    pts = sample_points(QABS, SEED, 10)
    seqs = [a.limit(truncations(y)) for y in sample_points(QABS, SEED + 2, 5)]
    a_pts = pts + seqs + [a.embed(x) for x in QABS.sample(SEED, 5)]
    b_pts = pts + seqs + [b.embed(x) for x in QABS.sample(SEED + 3, 5)]
    report = completion_iso_roundtrip(a, b, a_pts, b_pts, k)
    ok = report.passed
    record("8", "completion round trip, shifted vs canonical", ok,
           f"{report.samples} samples, max {float(report.max_observed):.3e} "
           f"<= {float(2 * dyadic(k)):.3e}")
    assert ok


def test_09_metric_axioms():
    sampled = ["rationals_abs", "rationals_2adic", "rationals_3adic", "product_abs_abs"]
    results = {n: verify_metric_axioms(SPACES[n], SEED, 1000).passed for n in sampled}
    results.update({n: verify_metric_axioms(SPACES[n]).passed
                    for n in ("finite_path3", "finite_ultra4")})
    corrupted = verify_metric_axioms(make_space(CORRUPTED_TABLE, validate=False))
    rejected = (not corrupted.passed) and corrupted["triangle"].witness == ["a", "b", "c"]
    ok = all(results.values()) and rejected
    record("9", "metric axioms", ok,
           f"{sum(results.values())}/{len(results)} spaces pass, corrupted table "
           f"{'rejected with witness a,b,c' if rejected else 'NOT rejected'}")
    assert ok


def _least_above(order, s, x):
    # independent order-theoretic brute force on a chain
    rank = {e: i for i, e in enumerate(order)}
    above = [e for e in order if e in s and rank[e] >= rank[x]]
    return {e for e in above if all(rank[e] <= rank[z] for z in above)}


def test_10_category_kit():
    start = time.perf_counter()
    order = ["a", "b", "c", "d"]
    found = find_ption(chain_category(order), {"c", "d"}, "a")
    ption_ok = found == [("c", "a->c")] and {y for y, _ in found} == _least_above(
        order, {"c", "d"}, "a")
    cats = shipped_categories()
    axioms_ok = all(verify_category_axioms(c).passed for c in cats.values())
    bad = verify_category_axioms(corrupted_category())
    corrupted_ok = not bad.passed and bad["associativity"].witness is not None
    rigidity_ok = not check_rigidity(cats["z2"], cats["z2"].objects).passed
    elapsed = time.perf_counter() - start
    ok = ption_ok and axioms_ok and corrupted_ok and rigidity_ok
    record("10", "category kit", ok,
           f"P-tion {found}, {len(cats)} categories pass, corrupted witness "
           f"{bad['associativity'].witness}, Z/2 rigidity rejected={rigidity_ok}, "
           f"{elapsed * 1000:.1f} ms")
    assert ok
