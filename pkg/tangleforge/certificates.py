"""Version-stamped JSON certificates and their from-scratch verification.

A certificate carries the graph hash and a digest of its canonical payload,
so a mutated document fails before any semantic check runs. ``verify`` never
looks at anything but the document and the graph it is given.
"""
import hashlib
import json
import logging

from tangleforge import config
from tangleforge.brambles import bramble_order, theorem4_report
from tangleforge.decompositions import STree, TreeDecomposition, validate_stree, validate_td
from tangleforge.errors import CertificateError, InvalidArgument, StructureError
from tangleforge.families import AUGMENTED, EXPLICIT, FAMILY_BUILDERS, augmented, explicit
from tangleforge.graph import emit_edgelist, members, vset
from tangleforge.limits import edgeless_tangle_count, end_degree_proxy, example_5_4_chain, sequence_report, truncate
from tangleforge.orientations import Orientation, is_f_tangle
from tangleforge.separations import Separation, enumerate_separations, sort_separations
from tangleforge.treewidth import exact_treewidth

logger = logging.getLogger(__name__)

TANGLE = "tangle"
STREE = "stree"
TD = "td"
BRAMBLE = "bramble"
DUALITY = "duality"
REPORT = "report"
KINDS = (TANGLE, STREE, TD, BRAMBLE, DUALITY, REPORT)


def canonical_json(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def sha256(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def graph_hash(g):
    return sha256(emit_edgelist(g))


def make_certificate(kind, payload, g, k=None, family=None):
    if kind not in KINDS:
        raise InvalidArgument(f"unknown certificate kind {kind}")
    params = {"k": k, "family": family, "graph_hash": graph_hash(g)}
    return {
        "version": config.CERTIFICATE_VERSION,
        "kind": kind,
        "params": params,
        "payload": payload,
        "digest": sha256(canonical_json({"kind": kind, "params": params, "payload": payload})),
    }


def dumps(cert):
    return canonical_json(cert)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise CertificateError("certificate is not an object")
    return doc


def family_doc(family):
    if family.kind == AUGMENTED:
        doc = family_doc(family.base)
        doc["sigma"] = [s.as_lists() for s in sort_separations(family.sigma)]
        return doc
    doc = {"name": family.label}
    if family.kind == EXPLICIT:
        doc["stars"] = [[s.as_lists() for s in sort_separations(star)] for star in family.explicit]
    return doc


def family_from_doc(k, doc):
    if doc is None:
        return None
    name = doc["name"]
    if name in FAMILY_BUILDERS:
        family = FAMILY_BUILDERS[name](k)
    elif "stars" in doc:
        family = explicit(k, [{Separation.from_lists(s) for s in star} for star in doc["stars"]], name=name)
    else:
        raise CertificateError(f"family {name} cannot be rebuilt")
    if "sigma" in doc:
        family = augmented(family, {Separation.from_lists(s) for s in doc["sigma"]})
    return family


def tangle_payload(tangle):
    return {"separations": tangle.as_lists()}


def tangle_certificate(g, k, family, tangle):
    return make_certificate(TANGLE, tangle_payload(tangle), g, k, family_doc(family))


def stree_certificate(g, k, family, st):
    return make_certificate(STREE, st.as_dict(), g, k, family_doc(family))


def td_certificate(g, td, k=None):
    return make_certificate(TD, td.as_dict(), g, k)


def bramble_payload(bramble, report):
    return {"elements": [list(members(m)) for m in bramble], "order": report.order,
            "cover": list(members(report.cover))}


def bramble_certificate(g, bramble, report, k=None):
    return make_certificate(BRAMBLE, bramble_payload(bramble, report), g, k)


def duality_certificate(g, k, family, cert):
    payload = {"verdict": cert.verdict, "hang_set": [s.as_lists() for s in cert.hang_set],
               "provenance": cert.provenance}
    if cert.tangle is not None:
        payload["tangle"] = tangle_payload(cert.tangle)
    if cert.stree is not None:
        payload["stree"] = cert.stree.as_dict()
    return make_certificate(DUALITY, payload, g, k, family_doc(family))


def theorem4_payload(g, k):
    report = theorem4_report(g, k)
    return {"report": "theorem4", "clauses": list(report.clauses), "bramble_provenance": report.bramble_provenance}


def treewidth_payload(g):
    result = exact_treewidth(g)
    return {"report": "treewidth", "tw": result.tw, "decomposition": result.decomposition.as_dict()}


def limits_payload(name, n, k=None, params=None):
    params = params or {}
    degree = end_degree_proxy(name, n, k, **params) if name != "edgeless" else None
    doc = {"report": "limits", "family": name, "n": n, "k": k, "params": params}
    if degree is not None:
        doc["paths"] = degree.paths
        doc["declared_degree"] = degree.declared_degree
        doc["passed"] = degree.passed
        if degree.proxy is not None:
            doc["proxy"] = {"oriented": degree.proxy.oriented, "consistent": degree.proxy.consistent,
                            "avoids_tk": degree.proxy.avoids_tk}
    if name == "edgeless" and k == 1:
        doc["tangles"] = edgeless_tangle_count(n)
    if name == "example_5_4" and 2 <= n <= config.CHAIN_COLUMN_BOUND:
        chain = example_5_4_chain(n)
        doc["chain"] = {"members": chain.members, "labels": chain.labels, "avoiding": list(chain.avoiding),
                        "first_violation": {str(j): i for j, i in chain.first_violation.items()},
                        "boundary_ward": chain.boundary_ward}
    if name in ("ray_clique", "example_5_4"):
        seq = sequence_report(name, n, **params)
        doc["sequence"] = {"orders": list(seq.orders), "increasing": seq.increasing,
                           "intersection": list(members(seq.intersection)), "core_persists": seq.core_persists,
                           "empty": seq.empty}
    return doc


def report_certificate(g, payload, k=None):
    return make_certificate(REPORT, payload, g, k)


def _check(condition, clause):
    if not condition:
        raise CertificateError(clause)


def _verify_tangle(g, k, family, payload):
    system = enumerate_separations(g, k)
    try:
        elements = frozenset(Separation.from_lists(p) for p in payload["separations"])
    except (KeyError, TypeError, IndexError) as exc:
        raise CertificateError(f"tangle payload malformed: {exc}") from exc
    _check(all(s in system for s in elements), "tangle: a separation lies outside S_k")
    _check(is_f_tangle(Orientation(system, elements), family), "tangle: not a consistent orientation avoiding F")


def _verify_stree(g, family, payload):
    try:
        st = STree.from_dict(payload)
        report = validate_stree(g, st, family)
    except (KeyError, TypeError, IndexError, StructureError) as exc:
        raise CertificateError(f"stree: {exc}") from exc
    _check(report.valid, "stree: some node is not associated with a star")
    _check(family is None or report.over_F, "stree: some node star is outside the family")


def _verify_td(g, payload):
    try:
        td = TreeDecomposition.from_dict(payload)
        report = validate_td(g, td)
    except (KeyError, TypeError, IndexError, StructureError) as exc:
        raise CertificateError(f"td: {exc}") from exc
    _check(report.valid, f"td: {report.witness}")
    return report


def _verify_bramble(g, payload):
    bramble = [vset(e) for e in payload["elements"]]
    report = bramble_order(g, bramble)
    _check(report.valid, f"bramble: {report.violation}")
    _check(report.order == payload["order"], "bramble: stated order is not the minimum cover size")
    cover = vset(payload["cover"])
    _check(len(payload["cover"]) == report.order and all(cover & m for m in bramble),
           "bramble: stated cover does not meet every element")


def _verify_report(g, k, payload):
    name = payload.get("report")
    if name == "theorem4":
        _check(theorem4_payload(g, k) == payload, "report: theorem4 clauses do not recompute")
    elif name == "treewidth":
        _check(treewidth_payload(g)["tw"] == payload["tw"], "report: treewidth does not recompute")
        report = _verify_td(g, payload["decomposition"])
        _check(report.width == payload["tw"], "report: decomposition width differs from treewidth")
    elif name == "limits":
        t = truncate(payload["family"], payload["n"], **payload["params"])
        _check(graph_hash(t.graph) == graph_hash(g), "report: graph is not the named truncation")
        _check(limits_payload(payload["family"], payload["n"], payload["k"], payload["params"]) == payload,
               "report: truncation proxies do not recompute")
    else:
        raise CertificateError(f"report: unknown report {name}")


def verify(doc, g):
    """Re-check ``doc`` against ``g``; raises CertificateError naming the failed clause."""
    _check(doc.get("version") == config.CERTIFICATE_VERSION, "version: unsupported certificate version")
    kind = doc.get("kind")
    _check(kind in KINDS, f"kind: unknown kind {kind}")
    params = doc.get("params") or {}
    payload = doc.get("payload")
    digest = sha256(canonical_json({"kind": kind, "params": params, "payload": payload}))
    _check(doc.get("digest") == digest, "digest: payload does not match its digest")
    _check(params.get("graph_hash") == graph_hash(g), "graph_hash: certificate was made for another graph")
    k = params.get("k")
    try:
        _verify_payload(g, kind, k, family_from_doc(k, params.get("family")), payload)
    except (KeyError, TypeError, IndexError, AttributeError) as exc:
        raise CertificateError(f"{kind}: malformed payload ({exc!r})") from exc
    logger.info("%s certificate verified", kind)
    return True


def _verify_payload(g, kind, k, family, payload):
    if kind == TANGLE:
        _verify_tangle(g, k, family, payload)
    elif kind == STREE:
        _verify_stree(g, family, payload)
    elif kind == TD:
        _verify_td(g, payload)
    elif kind == BRAMBLE:
        _verify_bramble(g, payload)
    elif kind == DUALITY:
        _check(payload.get("verdict") in (TANGLE, STREE), "duality: unknown verdict")
        _check((TANGLE in payload) != (STREE in payload), "duality: exactly one witness expected")
        if payload["verdict"] == TANGLE:
            _check(TANGLE in payload, "duality: tangle verdict without a tangle")
            _verify_tangle(g, k, family, payload[TANGLE])
        else:
            _check(STREE in payload, "duality: stree verdict without an S-tree")
            _verify_stree(g, family, payload[STREE])
    else:
        _verify_report(g, k, payload)
