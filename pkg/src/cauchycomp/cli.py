"""Command-line entry point: ``cauchycomp {eval,verify,extend,category}``.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import Any

from .category import (
    FiniteCategory,
    RigidityError,
    check_rigidity,
    find_ption,
    verify_category_axioms,
)
from .completion import (
    Completion,
    DeviationReport,
    RegularityError,
    SpaceMismatchError,
    canonical_embedding,
    check_commutes,
    check_regularity,
    extension,
)
from .metric import (
    AxiomReport,
    Check,
    DescriptorError,
    IsometryMap,
    check_isometry,
    dyadic,
    parse_rational,
    render_rational,
    verify_metric_axioms,
)
from .spaces import RationalsAbs, make_cpoint, make_generator, make_space, sample_points

DEFAULT_SEED = 1729
DEFAULT_PRECISION = 12
MAX_PRECISION = 64
MAX_SAMPLES = 10_000
DENSITY_MAX_K = 16
POINT_SAMPLES = 12

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def load_input(spec: str) -> Any:
    """Read JSON from a path, ``-`` (stdin) or an inline ``{...}`` string."""
    if spec == "-":
        text = sys.stdin.read()
    elif spec.lstrip().startswith(("{", "[")):
        text = spec
    else:
        try:
            text = Path(spec).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read {spec}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from None


def _bound_text(k: int) -> str:
    return f"2^-{k} = {render_rational(dyadic(k))}"


# -- eval -------------------------------------------------------------------


def cmd_eval(args, data) -> tuple[int, dict]:
    y = make_cpoint(data)
    comp = Completion(y.base)
    value = comp.approximate_by_base(y, args.precision)
    return EXIT_OK, {
        "command": "eval",
        "space": y.base.descriptor(),
        "generator": data["generator"],
        "precision": args.precision,
        "value": y.base.render(value),
        "bound": render_rational(dyadic(args.precision)),
    }


# -- verify -----------------------------------------------------------------


def cmd_verify(args, data) -> tuple[int, dict]:
    if isinstance(data, dict) and "base" in data:
        space_desc, gen_descs = data["base"], data.get("generators")
    else:
        space_desc, gen_descs = data, None
    space = make_space(space_desc, validate=False)
    k = args.precision
    checks: dict[str, dict] = {}
    axioms = verify_metric_axioms(space, args.seed, args.samples)
    checks["metric_axioms"] = axioms.to_dict()
    passed = axioms.passed
    if passed:
        comp = Completion(space)
        if gen_descs is None:
            points = sample_points(space, args.seed, POINT_SAMPLES)
        else:
            points = [make_generator(space, g) for g in gen_descs]
        checks["completion"] = _completion_suite(space, comp, points, args.seed, k)
        passed = all(c["status"] == "pass" for c in checks["completion"].values())
    return (EXIT_OK if passed else EXIT_FAIL), {
        "command": "verify",
        "space": space.descriptor(),
        "seed": args.seed,
        "precision": k,
        "status": "pass" if passed else "fail",
        "checks": checks,
    }


def _completion_suite(space, comp: Completion, points, seed: int, k: int) -> dict:
    out: dict[str, dict] = {}
    reg_fail = None
    for idx, y in enumerate(points):
        try:
            check_regularity(y)
        except RegularityError as e:
            reg_fail = Check(False, [idx, *e.pair], str(e))
            break
    out["regularity"] = (reg_fail or Check(True)).to_dict()

    density_fail = []
    for idx, y in enumerate(points):
        for j in range(DENSITY_MAX_K + 1):
            x = comp.approximate_by_base(y, j)
            if comp.dist_approx(comp.embed(x), y, j + 1) > dyadic(j):
                density_fail.append([idx, j])
    out["density"] = {"status": "fail" if density_fail else "pass",
                      "max_k": DENSITY_MAX_K, "violations": density_fail}

    xs = space.sample(seed, 16)
    out["embedding_isometry"] = check_isometry(canonical_embedding(comp), xs, k).to_dict()[
        "distance_preservation"]

    phi_z = canonical_embedding(comp)
    ext = extension(phi_z)
    iso = DeviationReport(bound=2 * dyadic(k))
    images = [ext(y) for y in points]
    for (i, y), (j, y2) in itertools.combinations(enumerate(points), 2):
        gap = abs(comp.dist_approx(images[i], images[j], k) - comp.dist_approx(y, y2, k))
        iso.record(f"{i},{j}", gap)
    out["extension_isometry"] = iso.to_dict()
    out["diagram_commutes"] = check_commutes(phi_z, phi_z, ext, xs, k).to_dict()
    return out


# -- extend -----------------------------------------------------------------


def _catalogue_map(entry: dict, source, comp: Completion) -> IsometryMap:
    kind = entry.get("kind") if isinstance(entry, dict) else None
    if kind == "embedding":
        if source != comp.base:
            raise SpaceMismatchError("embedding needs target space equal to source space")
        return canonical_embedding(comp)
    if kind in ("shift", "scale"):
        if not (isinstance(source, RationalsAbs) and isinstance(comp.base, RationalsAbs)):
            raise SpaceMismatchError(f"{kind} is only catalogued on rationals_abs")
        if kind == "shift":
            c = parse_rational(entry.get("by", "1"))
            return IsometryMap(source, comp, lambda x: comp.embed(x + c),
                               f"shift({render_rational(c)})")
        a = parse_rational(entry.get("factor", "2"))
        return IsometryMap(source, comp, lambda x: comp.embed(a * x),
                           f"scale({render_rational(a)})")
    raise DescriptorError(f"unknown isometry {kind!r}; catalogue: embedding, shift, scale")


def cmd_extend(args, data) -> tuple[int, dict]:
    if not isinstance(data, dict) or "source" not in data:
        raise DescriptorError("extend input needs 'source' (and optionally 'target')")
    source = make_space(data["source"])
    comp_z = Completion(make_space(data.get("target", data["source"])))
    phi_z = _catalogue_map(data.get("isometry", {"kind": "embedding"}), source, comp_z)
    if "points" in data:
        xs = [source.parse(p) for p in data["points"]]
    else:
        xs = source.sample(args.seed, 8)
    if not xs:
        raise DescriptorError("extend needs at least one sample point")
    k = args.precision
    result: dict[str, Any] = {
        "command": "extend",
        "isometry": phi_z.name,
        "precision": k,
        "bound": render_rational(dyadic(k)),
    }
    pre = check_isometry(phi_z, xs + source.sample(args.seed, 4), k)
    result["isometry_precheck"] = pre["distance_preservation"].to_dict()
    if not pre.passed:
        result["status"] = "fail"
        return EXIT_FAIL, result
    comp_y = Completion(source)
    phi_y = canonical_embedding(comp_y)
    ext = extension(phi_z, comp_y)
    commutes = check_commutes(phi_y, phi_z, ext, xs, k)
    result["diagram_commutes"] = commutes.to_dict()
    result["max_deviation"] = render_rational(commutes.max_observed)
    result["status"] = "pass" if commutes.passed else "fail"
    return (EXIT_OK if commutes.passed else EXIT_FAIL), result


# -- category ---------------------------------------------------------------


def cmd_category(args, data) -> tuple[int, dict]:
    if not isinstance(data, dict):
        raise DescriptorError("category input must be a JSON object")
    desc = data.get("category", data)
    cat = FiniteCategory.from_descriptor(desc)
    result: dict[str, Any] = {"command": "category"}
    axioms: AxiomReport = verify_category_axioms(cat)
    result["axioms"] = axioms.to_dict()
    ok = axioms.passed
    s = data.get("S")
    if s == "all":
        s = list(cat.objects)
    if s is not None:
        unknown = [o for o in s if o not in cat.objects]
        if unknown:
            raise DescriptorError(f"S names unknown objects {unknown}")
        rigid = check_rigidity(cat, s)
        result["rigidity"] = rigid.to_dict()
        ok = ok and rigid.passed
        if ok and "X" in data:
            try:
                found = find_ption(cat, s, data["X"])
            except RigidityError as e:  # pragma: no cover - guarded by check above
                result["error"] = str(e)
                ok = False
            else:
                result["candidates"] = [{"object": y, "morphism": f} for y, f in found]
    result["status"] = "pass" if ok else "fail"
    return (EXIT_OK if ok else EXIT_FAIL), result


COMMANDS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "extend": cmd_extend,
    "category": cmd_category,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cauchycomp",
        description="Exact Cauchy-sequence completions and finite universal objects.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in [
        ("eval", "approximate a completion point to within 2^-k"),
        ("verify", "run metric-axiom and completion property suites on a space"),
        ("extend", "extend a catalogued isometry and check the commuting triangle"),
        ("category", "check a finite category and search for universal objects"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True,
                       help="descriptor file, '-' for stdin, or inline JSON")
        p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--no-limits", action="store_true",
                       help=f"lift the precision cap ({MAX_PRECISION}) "
                            f"and sample cap ({MAX_SAMPLES})")
    return parser


def _render_text(result: dict) -> str:
    lines = []
    cmd = result.get("command")
    if cmd == "eval":
        lines.append(f"value: {result['value']}")
        lines.append(f"guarantee: d(value, limit) <= {_bound_text(result['precision'])}")
        return "\n".join(lines)

    def walk(obj, prefix=""):
        if isinstance(obj, dict):
            for key, val in obj.items():
                if isinstance(val, (dict, list)) and val:
                    if isinstance(val, list) and not any(isinstance(v, (dict, list)) for v in val):
                        lines.append(f"{prefix}{key}: {', '.join(map(str, val))}")
                    else:
                        lines.append(f"{prefix}{key}:")
                        walk(val, prefix + "  ")
                else:
                    lines.append(f"{prefix}{key}: {val}")
        elif isinstance(obj, list):
            for item in obj:
                if isinstance(item, (dict, list)):
                    lines.append(f"{prefix}-")
                    walk(item, prefix + "  ")
                else:
                    lines.append(f"{prefix}- {item}")

    walk(result)
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 0 or (args.precision > MAX_PRECISION and not args.no_limits):
        print(f"error: precision must be in [0, {MAX_PRECISION}]", file=sys.stderr)
        return EXIT_INPUT
    if args.samples < 3 or (args.samples > MAX_SAMPLES and not args.no_limits):
        print(f"error: samples must be in [3, {MAX_SAMPLES}]", file=sys.stderr)
        return EXIT_INPUT
    try:
        data = load_input(args.input)
        code, result = COMMANDS[args.subcommand](args, data)
    except (InputError, DescriptorError, SpaceMismatchError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RegularityError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        print(json.dumps(result, sort_keys=True, indent=2))
    else:
        print(_render_text(result))
    return code


def run() -> None:
    sys.exit(main())
