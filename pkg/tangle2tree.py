import argparse
import json
import logging
import sys

from tangleforge import config
from tangleforge.brambles import bramble_order, bramble_to_tangle, tangle_to_bramble
from tangleforge.certificates import (bramble_certificate, canonical_json, duality_certificate, limits_payload,
                                      loads, report_certificate, stree_certificate, tangle_certificate,
                                      td_certificate, theorem4_payload, treewidth_payload, verify)
from tangleforge.corpus import default_corpus, run_corpus
from tangleforge.duality import duality
from tangleforge.errors import (CertificateError, ConfigError, GraphParseError, InvalidArgument,
                                NotASeparationError, Refusal, SoundnessError, StarAxiomError, StructureError)
from tangleforge.families import FAMILY_BUILDERS, augmented, explicit, uk
from tangleforge.graph import emit_edgelist, load_graph, vset
from tangleforge.limits import truncate
from tangleforge.orientations import find_f_tangles
from tangleforge.refinement import (build_tree_of_tangles, corollary_6_3_check, refine_inessential_star,
                                    refine_tree_of_tangles)
from tangleforge.separations import (Separation, enumerate_separations, is_separation, make_separation,
                                     sort_separations)

logger = logging.getLogger("tangle2tree")

OK, FAILED, USAGE, UNSOUND = 0, 1, 2, 3


def read_text(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def read_graph(args, position=0):
    if len(args.inputs) <= position:
        raise ConfigError("missing graph file")
    return load_graph(read_text(args.inputs[position]), args.format)


def read_separations(g, path):
    seps = [Separation.from_lists(pair) for pair in json.loads(read_text(path))]
    for s in seps:
        if not is_separation(g, s):
            raise NotASeparationError(f"{s.describe(g)} is not a separation")
    return seps


def build_family(args, k):
    if args.family == "custom":
        if args.stars is None:
            raise ConfigError("--family custom needs --stars")
        stars = [{Separation.from_lists(s) for s in star} for star in json.loads(read_text(args.stars))]
        return explicit(k, stars)
    return FAMILY_BUILDERS[args.family](k)


def need_k(args):
    if args.k is None:
        raise ConfigError(f"{args.command} needs --k")
    return args.k


def separations_cmd(args):
    g = read_graph(args)
    k = need_k(args)
    rows = []
    for m in enumerate_separations(g, k):
        info = make_separation(g, m.a, m.b)
        rows.append({"separation": m.as_lists(), "order": info.order, "proper": info.proper,
                     "left_tight": info.left_tight, "right_tight": info.right_tight})
    return {"kind": "separations", "k": k, "count": len(rows), "separations": rows}


def tangles_cmd(args):
    g = read_graph(args)
    k = need_k(args)
    family = build_family(args, k)
    found = find_f_tangles(g, k, family, limit=args.limit)
    return {"kind": "tangles", "k": k, "count": len(found),
            "tangles": [tangle_certificate(g, k, family, t) for t in found]}


def duality_cmd(args):
    g = read_graph(args)
    k = need_k(args)
    family = build_family(args, k)
    return duality_certificate(g, k, family, duality(g, k, family))


def treewidth_cmd(args):
    g = read_graph(args)
    return report_certificate(g, treewidth_payload(g))


def bramble_cmd(args):
    g = read_graph(args)
    if args.theorem4:
        k = need_k(args)
        return report_certificate(g, theorem4_payload(g, k), k)
    if args.bramble is not None:
        bramble = [vset(e) for e in json.loads(read_text(args.bramble))]
        report = bramble_order(g, bramble)
        if not report.valid:
            raise InvalidArgument(f"not a bramble: {report.violation}")
        doc = {"kind": "bramble", "bramble": bramble_certificate(g, bramble, report, args.k)}
        if args.k is not None:
            doc["tangle"] = tangle_certificate(g, args.k, uk(args.k), bramble_to_tangle(g, args.k, bramble))
        return doc
    k = need_k(args)
    found = find_f_tangles(g, k, uk(k), limit=1)
    if not found:
        raise Refusal(f"no U_{k}-tangle, so no bramble of order {k}", status="impossible")
    bramble = tangle_to_bramble(g, k, found[0])
    return bramble_certificate(g, bramble, bramble_order(g, bramble), k)


def refine_cmd(args):
    g = read_graph(args)
    if args.w is not None:
        sigma = read_separations(g, args.sigma) if args.sigma else []
        result = corollary_6_3_check(g, args.w, sigma, args.budget)
        return {"kind": "torso", "w": args.w, "width": result.width, "ell": result.ell,
                "torso_vertices": list(result.torso_vertices), "decomposition": result.decomposition.as_dict()}
    k = need_k(args)
    family = build_family(args, k)
    if args.sigma is None:
        tree = build_tree_of_tangles(g, k)
        refined = refine_tree_of_tangles(g, k, family, tree.decomposition, args.budget)
        return {"kind": "tree_of_tangles", "input": td_certificate(g, tree.decomposition, k),
                "refined": td_certificate(g, refined.decomposition, k),
                "essential": {str(t): {"star": [s.as_lists() for s in sort_separations(found.star)],
                                       "interior": found.interior_size}
                              for t, found in sorted(refined.essential.items())}}
    sigma = frozenset(read_separations(g, args.sigma))
    result = refine_inessential_star(g, k, family, sigma, args.budget)
    if result.tangle is not None:
        return tangle_certificate(g, k, family, result.tangle)
    return stree_certificate(g, k, augmented(family, sigma), result.stree)


def limits_cmd(args):
    if args.name is None or args.n is None:
        raise ConfigError("limits needs --name and --n")
    params = dict(p.split("=", 1) for p in args.param)
    params = {key: int(value) for key, value in params.items()}
    t = truncate(args.name, args.n, **params)
    cert = report_certificate(t.graph, limits_payload(args.name, args.n, args.k, params), args.k)
    return {"kind": "limits", "graph": emit_edgelist(t.graph), "certificate": cert}


def verify_cmd(args):
    if len(args.inputs) < 2:
        raise ConfigError("verify needs a certificate file and a graph file")
    doc = loads(read_text(args.inputs[0]))
    g = read_graph(args, position=1)
    verify(doc, g)
    return {"kind": "verification", "verified": True, "certificate": doc.get("kind")}


def corpus_cmd(args):
    if args.out is None:
        raise ConfigError("corpus needs --out")
    ks = [int(k) for k in args.ks.split(",")]
    families = args.families.split(",")
    for name in families:
        if name not in ("tstar", "uk", "ustar"):
            raise ConfigError(f"corpus sweeps tstar and uk only, got {name}")
    records = run_corpus(default_corpus(args.max_n, args.samples), ks, families, args.out, args.jobs)
    failed = sum(r["status"] == "failed" for r in records)
    return {"kind": "corpus", "records": len(records), "failed": failed, "out": args.out}


CommandMap = {
    'separations': separations_cmd,
    'tangles': tangles_cmd,
    'duality': duality_cmd,
    'treewidth': treewidth_cmd,
    'bramble': bramble_cmd,
    'refine': refine_cmd,
    'limits': limits_cmd,
    'verify': verify_cmd,
    'corpus': corpus_cmd,
}


def parse_args(args):
    parser = argparse.ArgumentParser(prog="tangle2tree")
    parser.add_argument("command", choices=CommandMap.keys(), help="subcommand")
    parser.add_argument("inputs", nargs="*", help="graph file, or certificate file then graph file for verify")
    parser.add_argument("--k", type=int, help="separation order bound")
    parser.add_argument("--family", default="tstar", choices=list(FAMILY_BUILDERS) + ["custom"],
                        help="forbidden star family, default tstar")
    parser.add_argument("--stars", help="JSON file of stars for --family custom")
    parser.add_argument("--limit", type=int, default=config.DEFAULT_TANGLE_LIMIT,
                        help=f"tangle limit, default {config.DEFAULT_TANGLE_LIMIT}")
    parser.add_argument("--jobs", type=int, default=config.DEFAULT_JOBS, help="worker processes")
    parser.add_argument("--format", choices=["edgelist", "graph6"], help="graph format, detected by default")
    parser.add_argument("--budget", type=int, default=config.DEFAULT_ROBUST_BUDGET,
                        help=f"robustness search budget, default {config.DEFAULT_ROBUST_BUDGET}")
    parser.add_argument("--sigma", help="JSON file of separations [[A, B], ...] forming a star")
    parser.add_argument("--w", type=int, help="treewidth bound for the torso check")
    parser.add_argument("--bramble", help="JSON file of vertex lists")
    parser.add_argument("--theorem4", action="store_true", help="report the four equivalent clauses")
    parser.add_argument("--name", help="truncation family for limits")
    parser.add_argument("--n", type=int, help="truncation level for limits")
    parser.add_argument("--param", action="append", default=[], help="family parameter key=value")
    parser.add_argument("--max_n", "--max-n", dest="max_n", type=int, default=4, help="corpus: all graphs up to n")
    parser.add_argument("--samples", type=int, default=0, help="corpus: sampled graphs on 6-8 vertices")
    parser.add_argument("--ks", default="1,2,3", help="corpus: comma separated orders")
    parser.add_argument("--families", default="tstar,uk", help="corpus: comma separated families")
    parser.add_argument("--out", help="corpus: output jsonl path")
    parser.add_argument("--log-level", dest="log_level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser.parse_args(args)


def emit(out, doc):
    doc.setdefault("version", config.CERTIFICATE_VERSION)
    out.write(canonical_json(doc) + "\n")


def run(argv, out=None):
    out = sys.stdout if out is None else out
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=args.log_level, stream=sys.stderr)
    try:
        config.reject_seed_env()
        doc = CommandMap[args.command](args)
    except ConfigError as exc:
        logger.error("%s", exc)
        return USAGE
    except Refusal as exc:
        logger.warning("refused: %s", exc.reason)
        emit(out, {"refused": exc.reason, "status": exc.status, "details": exc.details})
        return FAILED
    except CertificateError as exc:
        logger.warning("verification failed: %s", exc.clause)
        emit(out, {"kind": "verification", "verified": False, "clause": exc.clause})
        return FAILED
    except SoundnessError as exc:
        logger.error("soundness failure: %s", exc)
        return UNSOUND
    except (GraphParseError, NotASeparationError, StarAxiomError, StructureError, InvalidArgument,
            OSError, ValueError) as exc:
        logger.error("%s", exc)
        return FAILED
    emit(out, doc)
    return OK


def main(arg=None):
    sys.exit(run(sys.argv[1:] if arg is None else arg))


if __name__ == "__main__":
    main()
