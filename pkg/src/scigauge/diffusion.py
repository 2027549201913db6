"""Typed diffusion graph over postings, articles, papers, and science
domains, plus its pruning, duplicate merging, and centrality measures.

Edges point along the citation chain: Posting -> Article -> Paper or
ScienceDomain. The personalized walk runs on the reversed edges so
authority flows from science outward.
"""
from __future__ import annotations

import json
import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field

POSTING = "Posting"
ARTICLE = "Article"
PAPER = "Paper"
DOMAIN = "ScienceDomain"

_EDGE_RULES = {
    (POSTING, ARTICLE),
    (ARTICLE, PAPER),
    (ARTICLE, DOMAIN),
}


@dataclass
class DiffusionGraph:
    nodes: dict[str, str] = field(default_factory=dict)       # id -> kind
    edges: set[tuple[str, str]] = field(default_factory=set)
    parse_ok: dict[str, bool] = field(default_factory=dict)   # record nodes

    def add_node(self, node_id: str, kind: str, parse_ok: bool = True) -> None:
        if kind not in (POSTING, ARTICLE, PAPER, DOMAIN):
            raise ValueError(f"unknown node kind: {kind!r}")
        existing = self.nodes.get(node_id)
        if existing is not None and existing != kind:
            raise ValueError(f"node {node_id!r} already has kind {existing}")
        self.nodes[node_id] = kind
        self.parse_ok[node_id] = parse_ok

    def add_edge(self, src: str, dst: str) -> None:
        if src not in self.nodes or dst not in self.nodes:
            raise ValueError(f"edge endpoint missing: {src!r} -> {dst!r}")
        pair = (self.nodes[src], self.nodes[dst])
        if pair not in _EDGE_RULES:
            raise ValueError(f"edge kind not allowed: {pair[0]} -> {pair[1]}")
        self.edges.add((src, dst))

    def copy(self) -> "DiffusionGraph":
        return DiffusionGraph(dict(self.nodes), set(self.edges), dict(self.parse_ok))

    def out_adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for src, dst in sorted(self.edges):
            adj[src].append(dst)
        return adj

    def in_adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for src, dst in sorted(self.edges):
            adj[dst].append(src)
        return adj

    def remove_nodes(self, doomed) -> None:
        doomed = set(doomed)
        self.edges = {(s, d) for s, d in self.edges
                      if s not in doomed and d not in doomed}
        for n in doomed:
            self.nodes.pop(n, None)
            self.parse_ok.pop(n, None)


def build(links, postings, articles, papers) -> DiffusionGraph:
    """Graph with a node per record plus one node per referenced science
    domain, and the edges of the link table."""
    g = DiffusionGraph()
    for p in postings:
        g.add_node(p.id, POSTING)
    for a in articles:
        g.add_node(a.id, ARTICLE, parse_ok=a.parse_ok)
    for p in papers:
        g.add_node(p.id, PAPER, parse_ok=p.parse_ok)
    for _, dom in links.article_domain:
        g.add_node(dom, DOMAIN)
    for src, dst in links.posting_article | links.article_paper | links.article_domain:
        g.add_edge(src, dst)
    return g


def prune(g: DiffusionGraph) -> DiffusionGraph:
    """Drop unparsable records, then articles that reference no science,
    then postings left pointing at nothing, repeating to a fixed point."""
    g = g.copy()
    g.remove_nodes([n for n, ok in g.parse_ok.items() if not ok])
    while True:
        out = g.out_adjacency()
        doomed = set()
        for n, kind in g.nodes.items():
            if kind == ARTICLE and not any(g.nodes[d] in (PAPER, DOMAIN)
                                           for d in out[n]):
                doomed.add(n)
        # postings whose every target is gone after this round's article cut
        for n, kind in g.nodes.items():
            if kind == POSTING and all(d in doomed for d in out[n]):
                doomed.add(n)
        if not doomed:
            return g
        g.remove_nodes(doomed)


_WORD_RE = re.compile(r"[A-Za-z]+")


def bag_of_words(text: str) -> Counter:
    return Counter(_WORD_RE.findall(text.lower()))


def bow_cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(cnt * b[w] for w, cnt in a.items() if w in b)
    na = math.sqrt(sum(c * c for c in a.values()))
    nb = math.sqrt(sum(c * c for c in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def merge_duplicates(g: DiffusionGraph, articles, threshold: float = 0.9):
    """Single-link clustering of near-identical article bodies; the article
    with the most out-links survives each cluster (ties to the smallest id)
    and absorbs the postings of the rest. Returns (graph, removed->survivor
    map)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    g = g.copy()
    in_graph = [a for a in articles if a.id in g.nodes]
    in_graph.sort(key=lambda a: a.id)
    bows = {a.id: bag_of_words(a.body_text()) for a in in_graph}

    parent = {a.id: a.id for a in in_graph}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for i, a in enumerate(in_graph):
        for b in in_graph[i + 1:]:
            if bow_cosine(bows[a.id], bows[b.id]) > threshold:
                union(a.id, b.id)

    clusters: dict[str, list] = {}
    for a in in_graph:
        clusters.setdefault(find(a.id), []).append(a)

    merge_map: dict[str, str] = {}
    for members in clusters.values():
        if len(members) < 2:
            continue
        survivor = min(members, key=lambda a: (-len(a.out_links), a.id))
        for a in members:
            if a.id != survivor.id:
                merge_map[a.id] = survivor.id

    if merge_map:
        rewired = set()
        for src, dst in g.edges:
            if dst in merge_map:
                rewired.add((src, merge_map[dst]))
            elif src in merge_map:
                continue  # the duplicate's own reference edges die with it
            else:
                rewired.add((src, dst))
        g.edges = rewired
        for gone in merge_map:
            g.nodes.pop(gone, None)
            g.parse_ok.pop(gone, None)
    return g, merge_map


def personalized_pagerank(g: DiffusionGraph, damping: float = 0.85,
                          tol: float = 1e-9, max_iter: int = 100000) -> dict[str, float]:
    """Power iteration on the edge-reversed graph with restart mass spread
    uniformly over Paper and ScienceDomain nodes; dangling mass returns to
    the restart set."""
    if not g.nodes:
        raise ValueError("empty graph")
    roots = sorted(n for n, k in g.nodes.items() if k in (PAPER, DOMAIN))
    if not roots:
        raise ValueError("no Paper or ScienceDomain nodes to restart from")
    order = sorted(g.nodes)
    restart = {n: 0.0 for n in order}
    for r in roots:
        restart[r] = 1.0 / len(roots)

    # reversed orientation: walk follows original edges backwards
    rev_out: dict[str, list[str]] = {n: [] for n in order}
    for src, dst in sorted(g.edges):
        rev_out[dst].append(src)

    x = dict(restart)
    for _ in range(max_iter):
        contrib: dict[str, list[float]] = {n: [] for n in order}
        dangling = []
        for n in order:
            succ = rev_out[n]
            if succ:
                share = x[n] / len(succ)
                for s in succ:
                    contrib[s].append(share)
            else:
                dangling.append(x[n])
        dangling_mass = math.fsum(dangling)
        nxt = {}
        for n in order:
            flow = math.fsum(contrib[n]) + dangling_mass * restart[n]
            nxt[n] = (1.0 - damping) * restart[n] + damping * flow
        delta = math.fsum(abs(nxt[n] - x[n]) for n in order)
        x = nxt
        if delta < tol:
            return x
    raise ArithmeticError("pagerank did not converge")


def betweenness(g: DiffusionGraph) -> dict[str, float]:
    """Directed betweenness by Brandes' accumulation, normalized by
    (n-1)(n-2) when n > 2."""
    order = sorted(g.nodes)
    out = g.out_adjacency()
    cb = {n: 0.0 for n in order}
    for s in order:
        stack = []
        pred: dict[str, list[str]] = {n: [] for n in order}
        sigma = {n: 0.0 for n in order}
        dist = {n: -1 for n in order}
        sigma[s] = 1.0
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in out[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    pred[w].append(v)
        delta = {n: 0.0 for n in order}
        while stack:
            w = stack.pop()
            for v in pred[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    n = len(order)
    if n > 2:
        scale = (n - 1) * (n - 2)
        for v in order:
            cb[v] /= scale
    return cb


@dataclass
class CentralityScores:
    pagerank: dict[str, float]
    betweenness: dict[str, float]
    in_degree: dict[str, int]
    out_degree: dict[str, int]


def centralities(g: DiffusionGraph, damping: float = 0.85,
                 tol: float = 1e-9) -> CentralityScores:
    """All per-node scores in one pass. A graph with no science nodes gets
    the uniform distribution instead of the personalized walk."""
    roots = any(k in (PAPER, DOMAIN) for k in g.nodes.values())
    if g.nodes and roots:
        pr = personalized_pagerank(g, damping=damping, tol=tol)
    else:
        pr = {n: 1.0 / len(g.nodes) for n in g.nodes} if g.nodes else {}
    bt = betweenness(g)
    in_deg = {n: 0 for n in g.nodes}
    out_deg = {n: 0 for n in g.nodes}
    for src, dst in g.edges:
        out_deg[src] += 1
        in_deg[dst] += 1
    return CentralityScores(pr, bt, in_deg, out_deg)


def export_graph(g: DiffusionGraph, edges_path, nodes_path) -> None:
    with open(edges_path, "w", encoding="utf-8") as fh:
        for src, dst in sorted(g.edges):
            fh.write(f"{src}\t{dst}\t{g.nodes[src]}\t{g.nodes[dst]}\n")
    with open(nodes_path, "w", encoding="utf-8") as fh:
        for n in sorted(g.nodes):
            fh.write(json.dumps({"id": n, "kind": g.nodes[n],
                                 "parse_ok": g.parse_ok.get(n, True)},
                                sort_keys=True) + "\n")


def import_graph(edges_path, nodes_path) -> DiffusionGraph:
    g = DiffusionGraph()
    with open(nodes_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                g.add_node(obj["id"], obj["kind"], obj.get("parse_ok", True))
    with open(edges_path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                src, dst = line.rstrip("\n").split("\t")[:2]
                g.add_edge(src, dst)
    return g
