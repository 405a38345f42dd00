"""Anchor selection and anchor-centered knowledge entry extraction.

An anchor is any vertex incident to at least one cross-modal edge (attribute
and relation words never are, since alignments only target object words).
An entry unions three relationship sets around its anchor: the cross-modal
neighbors, the intra-modal neighbors, and the intra-modal neighbors of each
cross-modal neighbor.  Only edges licensed by those three sets enter the
entry's similarity matrix; every vertex is reachable from the anchor within
two hops by construction.
"""

from dataclasses import dataclass

import numpy as np

from .graph import EDGE_CROSS


@dataclass
class KnowledgeEntry:
    anchor: int  # graph vertex id
    vertex_ids: list  # anchor first
    S_hat: np.ndarray  # entry-local similarity matrix
    edge_kinds: dict  # (local_i, local_j) canonical -> edge kind
    modalities: list  # per local vertex
    payloads: list  # per local vertex (region or token index)

    @property
    def size(self):
        return len(self.vertex_ids)

    @property
    def anchor_modality(self):
        return self.modalities[0]

    def cross_edge_count(self):
        return sum(1 for kind in self.edge_kinds.values() if kind == EDGE_CROSS)


def select_anchors(graph, require=EDGE_CROSS):
    """Vertex ids eligible as anchors.

    With the default requirement these are exactly the vertices with at
    least one cross-modal edge.  ``require`` may name another edge kind (or
    None for "any edge") for ablations that ignore cross-modal knowledge;
    in that case attribute/relation words are still excluded, mirroring the
    object-only anchor definition.
    """
    anchors = []
    for v in graph.vertices:
        if v.role in ("attribute-word", "relation-word"):
            continue
        if require is None:
            if graph.incident(v.id):
                anchors.append(v.id)
        elif graph.incident(v.id, require):
            anchors.append(v.id)
    return anchors


def extract_entry(graph, anchor, use_cross=True, use_intra=True):
    """Extract the knowledge entry centered at ``anchor``.

    ``use_cross``/``use_intra`` disable the corresponding relationship sets
    for ablation variants; with both enabled the anchor must be a
    cross-edge-incident vertex.
    """
    if use_cross and not graph.incident(anchor, EDGE_CROSS):
        raise ValueError(f"vertex {anchor} is not an anchor (no cross-modal edge)")
    if not use_cross and not use_intra:
        raise ValueError("at least one relationship set must be enabled")

    licensed = {}  # canonical (u,v) in graph-id space -> kind

    def license_edges(vertex_id, kind):
        for e in graph.incident(vertex_id, kind):
            licensed[(min(e.u, e.v), max(e.u, e.v))] = e.kind

    cross_neighbors = []
    if use_cross:
        license_edges(anchor, EDGE_CROSS)
        cross_neighbors = graph.neighbors(anchor, EDGE_CROSS)
    if use_intra:
        for kind in ("intra-image", "intra-text"):
            license_edges(anchor, kind)
        for c in cross_neighbors:
            for kind in ("intra-image", "intra-text"):
                license_edges(c, kind)

    members = {anchor}
    for u, v in licensed:
        members.add(u)
        members.add(v)

    # Deterministic ordering: anchor, cross neighbors by descending anchor
    # similarity, then remaining context vertices by descending best
    # licensed-edge similarity; ties break on vertex id.
    cross_set = set(cross_neighbors)
    rest = sorted(members - {anchor} - cross_set)
    best = {r: 0.0 for r in rest}
    for (u, v), _ in licensed.items():
        s = graph.S[u, v]
        for end in (u, v):
            if end in best and s > best[end]:
                best[end] = s
    ordered = [anchor]
    ordered += sorted(cross_set, key=lambda c: (-graph.S[anchor, c], c))
    ordered += sorted(rest, key=lambda r: (-best[r], r))

    index = {vid: i for i, vid in enumerate(ordered)}
    n = len(ordered)
    S_hat = np.zeros((n, n))
    edge_kinds = {}
    for (u, v), kind in licensed.items():
        i, j = index[u], index[v]
        S_hat[i, j] = S_hat[j, i] = graph.S[u, v]
        edge_kinds[(min(i, j), max(i, j))] = kind

    return KnowledgeEntry(
        anchor=anchor,
        vertex_ids=ordered,
        S_hat=S_hat,
        edge_kinds=edge_kinds,
        modalities=[graph.vertex(v).modality for v in ordered],
        payloads=[graph.vertex(v).payload for v in ordered],
    )


def entry_reachable_within(entry, hops=2):
    """BFS check that the anchor reaches every entry vertex in <= hops."""
    n = entry.size
    adj = [[] for _ in range(n)]
    for (i, j) in entry.edge_kinds:
        adj[i].append(j)
        adj[j].append(i)
    dist = [None] * n
    dist[0] = 0
    frontier = [0]
    for d in range(1, hops + 1):
        nxt = []
        for i in frontier:
            for j in adj[i]:
                if dist[j] is None:
                    dist[j] = d
                    nxt.append(j)
        frontier = nxt
    return all(d is not None for d in dist)
