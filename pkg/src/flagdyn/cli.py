"""Command line interface.

Subcommands: analyze, bounds (noetherian | torsion), witness (build |
verify), density, padic.  Exit codes: 0 success or pass, 1 verification
or search failure, 2 usage or format error.  Human-readable text by
default; --json switches every subcommand to a machine-readable document.

Note on hypotheses: triviality of the amenable radical of the input group
is not decidable here and is treated as a user-supplied assumption; the
density report lists necessary conditions only.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .certreal import Interval
from .config import RunConfig
from .dynamics import attracting_repelling, cartan, is_loxodromic, jordan
from .errors import InputError, SearchError
from .groupinfo import density_evidence, padic_boundedness
from .position import NoetherianParams, noetherian_bound
from .qlinalg import parse_rat, rat_str
from .rp1 import RP1Point
from .serialize import canonical_dumps, load_group, load_witness, save_witness, write_canonical
from .witness import PhpInstance, construct_witness, verify_witness
from .words import enumerate_ball, torsion_bound

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _iv_str(iv: Interval) -> str:
    return f"[{float(iv.lo):.10g}, {float(iv.hi):.10g}]"


def _emit(args, doc: dict, human: str) -> None:
    if args.json:
        print(canonical_dumps(doc))
    else:
        print(human)


def _cmd_analyze(args) -> int:
    group = load_group(args.group)
    eps = Fraction(1, 2**args.eps_bits)
    if args.element is None:
        lines = [f"group: dimension {group.dim}, {len(group.generators)} generators"]
        doc = {"dimension": group.dim, "generators": [lab for lab, _ in group.generators]}
        _emit(args, doc, "\n".join(lines))
        return EXIT_OK
    mat = group.word_matrix(args.element)
    kappa = cartan(mat, "real", eps)
    lam = jordan(mat, eps)
    lox = is_loxodromic(mat)
    doc = {
        "element": args.element,
        "matrix": mat.to_json(),
        "cartan_real": kappa.to_json(),
        "jordan": lam.to_json(),
        "loxodromic": lox,
    }
    lines = [
        f"element {args.element!r}: {mat.to_json()}",
        "cartan (real):  " + "  ".join(_iv_str(e) for e in kappa.entries),
        "jordan:         " + "  ".join(_iv_str(e) for e in lam.entries),
        f"loxodromic:     {lox}",
    ]
    for p in args.padic or []:
        kp = cartan(mat, ("padic", p), eps)
        doc.setdefault("cartan_padic", {})[str(p)] = kp.to_json()
        lines.append(f"cartan (p={p}):  valuations {list(kp.valuations)}")
    if lox:
        prox = attracting_repelling(mat)
        if isinstance(prox.attracting, RP1Point):
            att, rep = repr(prox.attracting), repr(prox.repelling)
            doc["fixed_points"] = {"attracting": att, "repelling": rep}
        else:
            doc["fixed_points"] = {
                "attracting": prox.attracting.to_json(),
                "repelling": prox.repelling.to_json(),
            }
            att, rep = "attracting flag", "repelling flag"
        doc["gap"] = prox.gap.to_json()
        lines.append(f"attracting: {att}")
        lines.append(f"repelling:  {rep}")
        lines.append(f"spectral gap: {_iv_str(prox.gap)}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _cmd_bounds_noetherian(args) -> int:
    k = noetherian_bound(NoetherianParams(args.dproj, args.deg))
    _emit(args, {"K": k, "proj_dim": args.dproj, "max_deg": args.deg}, str(k))
    return EXIT_OK


def _cmd_bounds_torsion(args) -> int:
    m = torsion_bound(args.dim)
    _emit(args, {"m": m, "dim": args.dim}, str(m))
    return EXIT_OK


def _cmd_witness_build(args) -> int:
    group = load_group(args.group)
    eps = parse_rat(args.eps)
    ball = enumerate_ball(group, args.f_radius, args.cache_dir)
    f_words = tuple(w for w, _m in ball if w)
    if not f_words:
        raise InputError("F-radius ball contains no nontrivial elements")
    cfg = RunConfig(seed=args.seed, cache_dir=args.cache_dir)
    instance = PhpInstance(group, f_words, eps)
    witness = construct_witness(instance, seed=args.seed, config=cfg)
    save_witness(args.out, witness)
    report = verify_witness(witness)
    doc = {
        "witness": args.out,
        "n": witness.n,
        "K": witness.provenance.get("K"),
        "report": report.to_json(),
    }
    lines = [
        f"witness written to {args.out}",
        f"n = {witness.n}, K = {witness.provenance.get('K')}, powers = {witness.provenance.get('powers')}",
        _report_text(report),
    ]
    if args.report:
        write_canonical(args.report, report.to_json())
        lines.append(f"report written to {args.report}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_FAIL


def _report_text(report) -> str:
    c1 = "pass" if report.condition1.passed else f"FAIL {report.condition1.to_json()['overlap']}"
    c2j = report.condition2.to_json()
    c2 = (
        f"{'pass' if report.condition2.passed else 'FAIL'} "
        f"(max multiplicity {c2j['max_multiplicity']} vs eps*sqrt(n) = "
        f"sqrt({c2j['bound_sqrt_of']}) ~ {c2j['bound_approx']:.4f})"
    )
    return f"condition 1: {c1}\ncondition 2: {c2}\ncertification: {report.certification}"


def _cmd_witness_verify(args) -> int:
    witness = load_witness(args.witness)
    report = verify_witness(witness)
    doc = {"witness": args.witness, "report": report.to_json()}
    lines = [_report_text(report)]
    if args.report:
        write_canonical(args.report, report.to_json())
        lines.append(f"report written to {args.report}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_density(args) -> int:
    group = load_group(args.group)
    ev = density_evidence(group, args.radius, args.cache_dir)
    human = (
        f"span_dim = {ev.span_dim} of {ev.dim ** 2}; burnside_full = {ev.burnside_full}; "
        f"loxodromic_found = {ev.loxodromic_found}; infinite = {ev.infinite}\n"
        f"note: {ev.disclaimer}"
    )
    _emit(args, ev.to_json(), human)
    return EXIT_OK


def _cmd_padic(args) -> int:
    group = load_group(args.group)
    rep = padic_boundedness(group, args.p, args.radius, args.cache_dir)
    human = f"max |entry|_{args.p} over ball radius {args.radius}: {rat_str(rep.max_abs)} (trend: {rep.trend})"
    _emit(args, rep.to_json(), human)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagdyn",
        description="Certified flag-variety dynamics and pigeonhole witnesses for subgroups of SL_d(Q).",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--cache-dir", default=None, help="directory for word-ball caching")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="Cartan/Jordan data of a group element")
    p_an.add_argument("group", help="group JSON file")
    p_an.add_argument("--element", default=None, help="word over generator labels (uppercase = inverse)")
    p_an.add_argument("--padic", type=int, action="append", help="also report the Cartan data at this prime")
    p_an.add_argument("--eps-bits", type=int, default=30, help="enclosure width 2^-bits")
    p_an.set_defaults(func=_cmd_analyze)

    p_bounds = sub.add_parser("bounds", help="combinatorial bounds")
    bsub = p_bounds.add_subparsers(dest="bound_kind", required=True)
    p_noe = bsub.add_parser("noetherian", help="descending-chain bound for bounded-degree subvarieties")
    p_noe.add_argument("--dproj", type=int, required=True)
    p_noe.add_argument("--deg", type=int, required=True)
    p_noe.set_defaults(func=_cmd_bounds_noetherian)
    p_tor = bsub.add_parser("torsion", help="torsion exponent of GL_d(Q)")
    p_tor.add_argument("--dim", type=int, required=True)
    p_tor.set_defaults(func=_cmd_bounds_torsion)

    p_w = sub.add_parser("witness", help="build or verify pigeonhole witnesses")
    wsub = p_w.add_subparsers(dest="witness_kind", required=True)
    p_wb = wsub.add_parser("build", help="construct and verify a witness")
    p_wb.add_argument("--group", required=True)
    p_wb.add_argument("--eps", required=True, help="tolerance as a rational, e.g. 1 or 1/2")
    p_wb.add_argument("--F-radius", dest="f_radius", type=int, default=1, help="F = nontrivial ball of this radius")
    p_wb.add_argument("--seed", type=int, default=0)
    p_wb.add_argument("--out", required=True, help="witness output file")
    p_wb.add_argument("--report", default=None, help="also write the verification report here")
    p_wb.set_defaults(func=_cmd_witness_build)
    p_wv = wsub.add_parser("verify", help="verify a stored witness")
    p_wv.add_argument("witness", help="witness JSON file")
    p_wv.add_argument("--report", default=None, help="write the verification report here")
    p_wv.set_defaults(func=_cmd_witness_verify)

    p_d = sub.add_parser("density", help="Zariski-density evidence report")
    p_d.add_argument("group")
    p_d.add_argument("--radius", type=int, default=3)
    p_d.set_defaults(func=_cmd_density)

    p_p = sub.add_parser("padic", help="p-adic boundedness evidence")
    p_p.add_argument("group")
    p_p.add_argument("--p", type=int, required=True)
    p_p.add_argument("--radius", type=int, default=4)
    p_p.set_defaults(func=_cmd_padic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 on --help
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SearchError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
