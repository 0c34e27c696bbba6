"""``palg``: command-line access to every engine.

Each command prints one JSON run report on stdout.  Exit status is 0 when
every check passes, 1 when a violation is found and 2 for usage, input or
capacity errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import re
import sys
import time

from . import __version__
from .algebra import degree_report, neat_reduct, partition_algebra, subalgebra_bao, to_bao
from .atomstruct import atom_structure, canonical_embedding_check, complex_algebra
from .core import parse_mask
from .dilation import CARDINAL_NOTE, Dilation
from .errors import PalgError
from .io import algebra_to_json, digest, dump_json, load_algebra, read_json
from .laws import additivity_sweep, axiom_suite, psi_schema_check, schema_sweep
from .lofin import (CofiniteTransformation, fresh_witness_identity, lf_axiom_sweep, lf_cyl,
                    lf_subst, parse_coords, parse_literal, to_literal)
from .represent import (RepresentationMap, henkin_construct, oracle_complete_representability,
                        verify_representation)
from .termlang import check_equation, evaluate, parse, parse_equation, parse_equation_file

log = logging.getLogger("palg")


class UsageError(PalgError):
    pass


# --- argument helpers --------------------------------------------------------------

def _int_list(text: str, what: str) -> list[int]:
    body = text.strip()
    if body[:1] in "[{(" and body[-1:] in "]})":
        body = body[1:-1]
    body = body.strip()
    try:
        return [int(v) for v in body.split(",")] if body else []
    except ValueError:
        raise UsageError(f"{what} must be a list of naturals, got {text!r}") from None


def _mask_or_full(text: str, A) -> int:
    if text.strip().lower() in ("full", "1", "unit"):
        return A.unit
    return parse_mask(text)


def _witness(text: str):
    m = re.fullmatch(r"\s*y0\s*=\s*(\[[^\]]*\])\s*,\s*atom\s*=\s*(\S+)\s*", text)
    if not m:
        raise UsageError("--witness must look like y0=[0,1,0],atom=0x2")
    return _int_list(m.group(1), "y0"), parse_mask(m.group(2))


def _assignments(items) -> dict:
    env = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--assign expects name=mask, got {item!r}")
        k, v = item.split("=", 1)
        env[k.strip()] = parse_mask(v)
    return env


# --- commands ------------------------------------------------------------------------

def cmd_axioms(args, A):
    reports = axiom_suite(A, args.mode, args.seed, args.samples)
    return all(r.passed for r in reports), {"laws": [r.to_json() for r in reports]}


def cmd_additivity(args, A):
    verdicts = additivity_sweep(A, args.op or None)
    return all(v.passed for v in verdicts), {"verdicts": [v.to_json() for v in verdicts]}


def cmd_schema(args, A):
    if args.tau:
        verdicts = [psi_schema_check(A, _int_list(args.tau, "--tau"))]
    else:
        verdicts = schema_sweep(A, args.include_bijections)
    return all(v.passed for v in verdicts), {"verdicts": [v.to_json() for v in verdicts]}


def cmd_atoms(args, A):
    S = atom_structure(A)
    return True, {"atom_structure": S.to_json(), "total": S.total(),
                  "atom_masks": [hex(m) for m in S.masks]}


def cmd_cm(args, A):
    B = to_bao(A)
    cm = complex_algebra(atom_structure(A))
    mismatched = [op.key() for op in B.operators() if not (cm.table(op) == B.table(op)).all()]
    v = canonical_embedding_check(A)
    return v.passed, {"round_trip": not mismatched, "mismatched_tables": mismatched,
                      "tables": len(B.operators()), "canonical_embedding": v.to_json()}


def cmd_nr(args, A):
    if args.J is None:
        raise UsageError("nr needs --J")
    J = _int_list(args.J, "--J")
    N = neat_reduct(A, J)
    body = algebra_to_json(N)
    if args.out:
        dump_json(body, args.out)
    return True, {"J": sorted(J), "atoms": N.atom_count,
                  "embedding": [hex(int(e)) for e in N.meta["embedding"]], "algebra": body}


def cmd_degrees(args, A):
    return True, {"degrees": degree_report(A).to_json()}


def _dilation(args, A):
    if args.beta is None:
        raise UsageError("--beta is required")
    return Dilation(A, args.beta)


def cmd_dilate(args, A):
    D = _dilation(args, A)
    out = {"dilation": {"beta": D.beta, **D.describe()}}
    ok = True
    if not args.no_sweep:
        sweep = D.rho_independence_sweep()
        out["rho_independence"] = sweep
        ok = sweep["passed"]
    if args.p is not None:
        out["embedded"] = D.embed(parse_mask(args.p)).to_json()
    print(f"note: {CARDINAL_NOTE}", file=sys.stderr)
    return ok, out


def cmd_eq1(args, A):
    D = _dilation(args, A)
    gammas = [_int_list(args.gamma, "--gamma")] if args.gamma else [g.to_list() for g in A.gammas()]
    ps = [parse_mask(args.p)] if args.p is not None else [int(x) for x in A.carrier()]
    reports = [D.check_eq1(g, p) for g in gammas for p in ps]
    # A finite-beta defect is the expected inequality; only an excess (join above
    # the cylindrification) would contradict the algebra's postulates.
    ok = all(r.excess.is_zero() for r in reports)
    return ok, {"reports": [r.to_json() for r in reports],
                "equal": sum(r.equal for r in reports), "total": len(reports),
                "note": CARDINAL_NOTE}


def cmd_eq2(args, A):
    D = _dilation(args, A)
    if args.tau:
        taus = [tuple(_int_list(args.tau, "--tau"))]
    else:
        taus = list(itertools.product(range(D.beta), repeat=D.alpha))
        if args.all_maps:
            taus += list(itertools.product(range(D.beta), repeat=D.beta))
    verdicts = [D.check_eq2(t) for t in taus]
    return all(v.passed for v in verdicts), {"instances": len(verdicts),
                                             "verdicts": [v.to_json() for v in verdicts]}


def cmd_represent(args, A):
    if args.beta is None or args.c is None:
        raise UsageError("represent needs --beta and --c")
    c = _mask_or_full(args.c, A)
    witness = _witness(args.witness) if args.witness else None
    rep = henkin_construct(A, args.beta, c, witness)
    report = verify_representation(A, rep)
    if args.out:
        dump_json(rep.to_json(), args.out)
    meta = {k: v for k, v in rep.meta.items()}
    meta["c"] = hex(meta["c"])
    meta["atom"] = hex(meta["atom"])
    meta["ultrafilter"] = {"y_index": meta["ultrafilter"]["y_index"], "atom": meta["atom"]}
    return report.is_complete_representation, {"construction": meta, "verification": report.to_json(),
                                               "representation": rep.to_json()}


def cmd_verify_rep(args, A):
    rep = RepresentationMap.from_json(A, read_json(args.rep))
    report = verify_representation(A, rep)
    return report.is_complete_representation, {"verification": report.to_json()}


def cmd_oracle(args, A):
    res = oracle_complete_representability(A, args.max_base)
    return res.found, {"oracle": res.to_json()}


def cmd_eval(args, A):
    env = _assignments(args.assign)
    if args.equations:
        eqs = parse_equation_file(open(args.equations).read())
        verdicts = [check_equation(A, eq, args.mode, args.seed, args.samples) for eq in eqs]
        return all(v.passed for v in verdicts), {"verdicts": [v.to_json() for v in verdicts]}
    if not args.e:
        raise UsageError("eval needs -e EXPR or --equations FILE")
    if "=" in args.e:
        eq = parse_equation(args.e)
        lhs, rhs = evaluate(A, eq.lhs, env), evaluate(A, eq.rhs, env)
        return lhs == rhs, {"lhs": hex(lhs), "rhs": hex(rhs), "holds": lhs == rhs}
    value = evaluate(A, parse(args.e), env)
    return True, {"value": hex(value), "bits": A.nbits}


def cmd_lofin(args):
    u = args.base
    if args.action == "sweep":
        reports = lf_axiom_sweep(u, args.samples, args.seed)
        return all(r.passed for r in reports), {"laws": [r.to_json() for r in reports]}
    if args.x is None:
        raise UsageError(f"lofin {args.action} needs -x LITERAL")
    x = parse_literal(args.x, u)
    out = {"x": to_literal(x), "support": list(x.support)}
    if args.action == "parse":
        return True, {**out, "element": x.to_json()}
    if args.action == "cyl":
        if args.gamma is None:
            raise UsageError("lofin cyl needs --gamma")
        y = lf_cyl(parse_coords(args.gamma), x)
        return True, {**out, "result": to_literal(y), "element": y.to_json()}
    if args.action == "subst":
        if args.tau is None:
            raise UsageError("lofin subst needs --tau JSON")
        y = lf_subst(CofiniteTransformation.from_json(json.loads(args.tau)), x)
        return True, {**out, "result": to_literal(y), "element": y.to_json()}
    if args.action == "fresh":
        if args.gamma is None or args.fresh is None:
            raise UsageError("lofin fresh needs --gamma and --fresh JSON")
        v = fresh_witness_identity(x, parse_coords(args.gamma), json.loads(args.fresh))
        return v.passed, {**out, "verdict": v.to_json()}
    raise UsageError(f"unknown lofin action {args.action!r}")


def cmd_partition(args):
    desc = read_json(args.blocks)
    u = args.u if args.u is not None else desc.get("u")
    principal = args.principal if args.principal is not None else desc.get("principal")
    if u is None or principal is None:
        raise UsageError("partition-algebra needs u and principal (flags or file)")
    P = partition_algebra(int(u), desc["blocks"] if isinstance(desc, dict) else desc, int(principal))
    out = {"algebra": algebra_to_json(P.algebra),
           "generators": [hex(g) for g in P.generators],
           "subalgebra": [hex(e) for e in P.subalgebra]}
    B = subalgebra_bao(P.algebra, P.subalgebra)
    ok = True
    if B.atom_count <= 4 and B.dim <= 2:
        res = oracle_complete_representability(B, 3)
        out["complete_representation"] = res.to_json()
        ok = res.found
    if args.out:
        dump_json(out["algebra"], args.out)
    return ok, out


ALGEBRA_COMMANDS = {
    "axioms": cmd_axioms, "additivity": cmd_additivity, "schema": cmd_schema, "atoms": cmd_atoms,
    "cm": cmd_cm, "nr": cmd_nr, "degrees": cmd_degrees, "dilate": cmd_dilate, "eq1": cmd_eq1,
    "eq2": cmd_eq2, "represent": cmd_represent, "verify-rep": cmd_verify_rep, "oracle": cmd_oracle,
    "eval": cmd_eval,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="palg", description="Polyadic algebra workbench.")
    p.add_argument("--version", action="version", version=f"palg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=256)
    common.add_argument("--out")
    common.add_argument("--timing", action="store_true", help="include wall-clock duration in the report")
    common.add_argument("-v", "--verbose", action="store_true")

    def alg(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("algebra", help="algebra description file (JSON)")
        return sp

    alg("axioms", "check postulates 1-10")
    sp = alg("additivity", "normality and additivity of each operator")
    sp.add_argument("--op", action="append", help="operator key such as c{0} or s[0,0]")
    sp = alg("schema", "the psi_tau schema")
    sp.add_argument("--tau")
    sp.add_argument("--include-bijections", action="store_true")
    alg("atoms", "atom structure")
    alg("cm", "complex algebra round trip and canonical embedding")
    sp = alg("nr", "neat reduct")
    sp.add_argument("--J")
    alg("degrees", "effective and local degree")
    sp = alg("dilate", "functional dilation and rho-independence sweep")
    sp.add_argument("--beta", type=int)
    sp.add_argument("--p")
    sp.add_argument("--no-sweep", action="store_true")
    sp = alg("eq1", "cylindrification versus the join of substitutions")
    sp.add_argument("--beta", type=int)
    sp.add_argument("--gamma")
    sp.add_argument("--p")
    sp = alg("eq2", "substituted atoms cover the unit")
    sp.add_argument("--beta", type=int)
    sp.add_argument("--tau")
    sp.add_argument("--all-maps", action="store_true", help="also sweep every map beta -> beta")
    sp = alg("represent", "ultrafilter representation construction")
    sp.add_argument("--beta", type=int)
    sp.add_argument("--c")
    sp.add_argument("--witness")
    sp = alg("verify-rep", "verify a representation file")
    sp.add_argument("rep")
    sp = alg("oracle", "brute-force complete representability")
    sp.add_argument("--max-base", type=int, default=3)
    sp = alg("eval", "evaluate a term or check equations")
    sp.add_argument("-e")
    sp.add_argument("--assign", action="append")
    sp.add_argument("--equations")

    sp = sub.add_parser("lofin", parents=[common], help="omega-dimensional finite-support engine")
    sp.add_argument("action", choices=("sweep", "parse", "cyl", "subst", "fresh"))
    sp.add_argument("--base", type=int, default=2)
    sp.add_argument("-x")
    sp.add_argument("--gamma")
    sp.add_argument("--tau")
    sp.add_argument("--fresh")

    sp = sub.add_parser("partition-algebra", parents=[common], help="finite partition algebra")
    sp.add_argument("blocks", help='JSON file: {"u": n, "principal": k, "blocks": [[[x, y], ...], ...]}')
    sp.add_argument("--u", type=int)
    sp.add_argument("--principal", type=int)
    return p


def _echo(argv) -> list[str]:
    return list(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    start = time.perf_counter()
    inputs = {}
    try:
        if args.command in ALGEBRA_COMMANDS:
            inputs[args.algebra] = digest(args.algebra)
            if args.command == "verify-rep":
                inputs[args.rep] = digest(args.rep)
            A = load_algebra(args.algebra)
            ok, body = ALGEBRA_COMMANDS[args.command](args, A)
        elif args.command == "lofin":
            ok, body = cmd_lofin(args)
        else:
            inputs[args.blocks] = digest(args.blocks)
            ok, body = cmd_partition(args)
    except (PalgError, OSError) as exc:
        print(f"palg {args.command}: error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    report = {"command": ["palg", *_echo(argv)], "inputs": inputs, "seed": args.seed,
              "passed": bool(ok), **body}
    if args.timing:
        report["duration_s"] = round(elapsed, 6)
    log.info("%s finished in %.3fs", args.command, elapsed)
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    if args.out and args.command not in ("represent", "nr", "partition-algebra"):
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0 if ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
