"""Deterministic graph corpora and the property sweep over them."""
import logging
from itertools import combinations
from multiprocessing import Pool

import jsonlines
import networkx as nx
from tqdm import tqdm

from tangleforge import config
from tangleforge.brambles import theorem4_report
from tangleforge.certificates import duality_certificate, verify
from tangleforge.decompositions import stree_to_td
from tangleforge.duality import STREE, duality
from tangleforge.errors import CertificateError, Refusal, SoundnessError
from tangleforge.families import FAMILY_BUILDERS, TSTAR
from tangleforge.graph import Graph, emit_graph6

logger = logging.getLogger(__name__)

SAMPLE_SEED = 20240101


def all_graphs(max_n):
    """Every edge subset on 1..max_n vertices."""
    for n in range(1, max_n + 1):
        pairs = list(combinations(range(n), 2))
        for bits in range(1 << len(pairs)):
            yield Graph(n, [e for i, e in enumerate(pairs) if bits >> i & 1])


def atlas_graphs(max_n):
    """One graph per isomorphism class on 1..max_n vertices (max_n <= 7)."""
    return [Graph.from_networkx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= max_n]


def two_k4():
    """Two K4s on {0,1,2,3} and {2,3,4,5} sharing the edge 2-3."""
    edges = set(combinations(range(4), 2)) | set(combinations(range(2, 6), 2))
    return Graph(6, sorted(edges))


def selected_graphs():
    graphs = [
        nx.path_graph(5), nx.path_graph(6), nx.cycle_graph(5), nx.cycle_graph(6),
        nx.complete_graph(5), nx.star_graph(4), nx.grid_2d_graph(2, 3), nx.complete_bipartite_graph(2, 3),
    ]
    return [Graph.from_networkx(h) for h in graphs] + [two_k4()]


def sampled_graphs(count, low=6, high=8, p=0.4, seed=SAMPLE_SEED):
    out = []
    for i in range(count):
        n = low + i % (high - low + 1)
        out.append(Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed + i)))
    return out


def default_corpus(max_n=4, samples=0):
    return list(all_graphs(max_n)) + selected_graphs() + sampled_graphs(samples)


def check_instance(task):
    """One record: duality verdict and re-verification, four-clause agreement, width bounds."""
    graph6, n, edges, k, name = task
    g = Graph(n, edges)
    family = FAMILY_BUILDERS[name](k)
    record = {"graph": graph6, "n": n, "k": k, "family": name}
    try:
        cert = duality(g, k, family)
        verify(duality_certificate(g, k, family, cert), g)
        record["verdict"] = cert.verdict
        if cert.verdict == STREE and family.kind == TSTAR:
            td = stree_to_td(g, cert.stree)
            record["bags_ok"] = td.bags_at_most(max(3 * k - 3, 0))
            record["degree_ok"] = max((d for _, d in cert.stree.tree.degree), default=0) <= 3
        report = theorem4_report(g, k)
        record["theorem4"] = list(report.clauses)
        record["tw"] = report.witnesses["tw"].tw
        if cert.verdict != STREE and family.kind == TSTAR and n >= k:
            record["width_ok"] = report.witnesses["tw"].tw >= k - 1
        record["status"] = "ok"
    except Refusal as exc:
        record["status"] = "refused"
        record["reason"] = exc.reason
    except (SoundnessError, CertificateError) as exc:
        record["status"] = "failed"
        record["reason"] = str(exc)
    return record


def tasks(graphs, ks, families):
    for g in graphs:
        for k in ks:
            for name in families:
                yield emit_graph6(g), g.n, list(g.edges), k, name


def record_key(record):
    return (record["n"], record["graph"], record["k"], record["family"])


def run_corpus(graphs, ks, families, out_path, jobs=config.DEFAULT_JOBS):
    work = list(tasks(graphs, ks, families))
    if jobs > 1:
        with Pool(jobs) as pool:
            records = list(tqdm(pool.imap(check_instance, work), total=len(work)))
    else:
        records = [check_instance(t) for t in tqdm(work)]
    records.sort(key=record_key)
    with jsonlines.open(out_path, mode="w") as writer:
        writer.write_all(records)
    failed = [r for r in records if r["status"] == "failed"]
    logger.info("corpus: %d records, %d failed", len(records), len(failed))
    return records
