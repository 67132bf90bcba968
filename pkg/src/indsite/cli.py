"""Command line front end.

Subcommands: validate, axioms, apply, claim, acfg-demo, diagram.
Exit codes: 0 for success or confirmed verdicts, 1 for refuted or
failed verdicts, 2 for usage and file errors.  All output is
byte-deterministic given the same inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import claims as claims_mod
from .axioms import axiom_profile
from .diagram import diagram_dot
from .fplinalg import acfg_bmon_failure_instance
from .operators import apply_expr, parse_expr
from .relations import (
    builtin_a_indep,
    dump_relation,
    load_relation,
    relation_to_obj,
)
from .sites import (
    CapExceeded,
    ClosureOperator,
    Site,
    SymmetryGroup,
    closure_from_map,
    load_site,
    validate_site,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="indsite", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a site file")
    p_validate.add_argument("site_file")

    p_axioms = sub.add_parser("axioms", help="full axiom profile of a relation")
    p_axioms.add_argument("--site", required=True)
    p_axioms.add_argument("--relation")
    p_axioms.add_argument("--out")

    p_apply = sub.add_parser("apply", help="apply an operator expression")
    p_apply.add_argument("--site", required=True)
    p_apply.add_argument("--relation")
    p_apply.add_argument("--op", required=True)
    p_apply.add_argument("--out")

    p_claim = sub.add_parser("claim", help="verify or search one claim")
    p_claim.add_argument("claim_id")
    p_claim.add_argument("--site")
    p_claim.add_argument("--relation")
    p_claim.add_argument("--search", action="store_true")
    p_claim.add_argument("--n", default="3")
    p_claim.add_argument("--samples", type=int, default=50)
    p_claim.add_argument("--seed", type=int, default=0)
    p_claim.add_argument("--densities", default="0.2,0.5,0.8")
    p_claim.add_argument("--jobs", type=int, default=1)
    p_claim.add_argument("--out")

    p_demo = sub.add_parser("acfg-demo",
                            help="the base-monotonicity failure instance")
    p_demo.add_argument("--p", type=int, default=2)
    p_demo.add_argument("--out")

    p_diagram = sub.add_parser("diagram", help="implication diagram as DOT")
    p_diagram.add_argument("--site", required=True)
    p_diagram.add_argument("--relation")
    p_diagram.add_argument("--out")
    return parser


def _parse_n_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise _UsageError(f"empty ground-size range {text!r}")
        return tuple(range(lo, hi + 1))
    return (int(text),)


def _load_relation_arg(args, site):
    if args.relation:
        return load_relation(args.relation, site=site)
    return builtin_a_indep(site)


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_validate(args, out) -> int:
    with open(args.site_file, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    n = obj["n"]
    try:
        if "closure_map" in obj:
            closure = closure_from_map(n, obj["closure_map"])
        else:
            closure = ClosureOperator(n, obj.get("closed_sets", []))
        group = SymmetryGroup(n, obj.get("group_generators", []))
        site = Site(n, closure, group, obj.get("models"))
    except CapExceeded:
        raise
    except ValueError as exc:
        print(f"INVALID: {exc}", file=out)
        return 1
    report = validate_site(site)
    if report.ok:
        print("OK", file=out)
        return 0
    for violation in report.violations:
        print(f"INVALID [{violation.kind}]: {violation.message}", file=out)
    return 1


def _cmd_axioms(args, out) -> int:
    site = load_site(args.site)
    rel = _load_relation_arg(args, site)
    profile = axiom_profile(rel)
    print(f"axiom profile of {rel.name} on {args.site}", file=out)
    out.write(profile.to_text())
    if args.out:
        _write_json(args.out, {"relation": rel.name, "profile": profile.to_obj()})
    return 0


def _cmd_apply(args, out) -> int:
    site = load_site(args.site)
    rel = _load_relation_arg(args, site)
    result = apply_expr(parse_expr(args.op), rel)
    text = dump_relation(result, args.out)
    if not args.out:
        out.write(text)
    else:
        print(f"wrote {result.name} to {args.out}", file=out)
    return 0


def _cmd_claim(args, out) -> int:
    claim = claims_mod.claim_by_id(args.claim_id)
    if args.search:
        params = claims_mod.SearchParams(
            n_values=_parse_n_range(args.n),
            samples=args.samples,
            densities=tuple(float(d) for d in args.densities.split(",")),
            seed=args.seed,
            jobs=args.jobs,
        )
        report = claims_mod.search(claim, params)
        out.write(report.to_text())
        if args.out:
            _write_json(args.out, report.to_obj())
        bundle_dir = os.path.dirname(args.out) if args.out else "."
        for i, bundle in enumerate(report.refutations):
            path = os.path.join(bundle_dir, f"refutation-{claim.id}-{i}.json")
            _write_json(path, bundle)
            print(f"refutation witness bundle written to {path}", file=out)
        return 1 if report.refuted else 0
    if not args.site:
        raise _UsageError("claim verification needs --site (or use --search)")
    site = load_site(args.site)
    rel = _load_relation_arg(args, site)
    verdict = claims_mod.verify_claim(claim, site, rel)
    print(f"claim {claim.id} ({claim.title}): {verdict.status}", file=out)
    print(f"  rules fired: {verdict.rules_fired}, "
          f"skipped: {verdict.rules_skipped}", file=out)
    for reason in verdict.skip_reasons:
        print(f"  skip: {reason}", file=out)
    if verdict.refutation is not None:
        print(f"  refuted at rule {verdict.refutation['rule']}: "
              f"{verdict.refutation['subject']}", file=out)
    if args.out:
        _write_json(args.out, {
            "claim": claim.id,
            "status": verdict.status,
            "rules_fired": verdict.rules_fired,
            "rules_skipped": verdict.rules_skipped,
            "skip_reasons": verdict.skip_reasons,
            "refutation": verdict.refutation,
        })
    return 1 if verdict.status == "refuted" else 0


def _cmd_acfg_demo(args, out) -> int:
    report = acfg_bmon_failure_instance(args.p)
    out.write(report.to_text())
    if args.out:
        _write_json(args.out, report.to_obj())
    if report.pattern_ok() and report.replay():
        return 0
    print("unexpected pattern: the constructed instance did not reproduce "
          "the base/intermediate split", file=out)
    return 1


def _cmd_diagram(args, out) -> int:
    site = load_site(args.site)
    rel = _load_relation_arg(args, site)
    dot = diagram_dot(rel)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dot)
        print(f"wrote diagram to {args.out}", file=out)
    else:
        out.write(dot)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "axioms": _cmd_axioms,
    "apply": _cmd_apply,
    "claim": _cmd_claim,
    "acfg-demo": _cmd_acfg_demo,
    "diagram": _cmd_diagram,
}


def run(argv, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
