"""Unified scene graph over one image-text pair.

Vertices are the image regions plus the scene-relevant words; edges come in
three kinds with raw similarities from three sources:

* intra-image: region pairs with IoU > 0, weighted by IoU;
* intra-text: scene-triple word pairs, weighted by dataset co-occurrence;
* cross-modal: region-tag / object-word pairs whose embedding similarity
  reaches the alignment threshold, weighted by that similarity.

Intra-modal similarities are normalized per vertex within each modality and
symmetrized by averaging; cross-modal scores are kept raw (they are already
calibrated cosines in [threshold, 1]).
"""

from dataclasses import dataclass

import numpy as np

from .embeddings import ALIGNMENT_THRESHOLD, match_tag_to_words
from .textgraph import (
    KIND_REL,
    ROLE_ATTRIBUTE,
    ROLE_OBJECT,
    ROLE_OTHER,
    ROLE_RELATION,
    pair_triples,
    triple_similarity,
)

MODALITY_IMAGE = "image"
MODALITY_TEXT = "text"

EDGE_INTRA_IMAGE = "intra-image"
EDGE_INTRA_TEXT = "intra-text"
EDGE_CROSS = "cross-modal"

ROLE_OBJECT_REGION = "object-region"
ROLE_OBJECT_WORD = "object-word"
ROLE_ATTRIBUTE_WORD = "attribute-word"
ROLE_RELATION_WORD = "relation-word"


@dataclass(frozen=True)
class Vertex:
    id: int
    modality: str
    payload: int  # region index or token index
    role: str
    label: str  # region tag or token surface, for display


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    kind: str
    raw_similarity: float


class UnifiedGraph:
    def __init__(self, vertices, edges, S):
        self.vertices = vertices
        self.edges = edges
        self.S = S
        self._adj = {v.id: [] for v in vertices}
        for e in edges:
            self._adj[e.u].append(e)
            self._adj[e.v].append(e)

    def __len__(self):
        return len(self.vertices)

    def incident(self, vertex_id, kind=None):
        edges = self._adj[vertex_id]
        if kind is None:
            return list(edges)
        return [e for e in edges if e.kind == kind]

    def neighbors(self, vertex_id, kind=None):
        out = []
        for e in self.incident(vertex_id, kind):
            out.append(e.v if e.u == vertex_id else e.u)
        return out

    def vertex(self, vertex_id):
        return self.vertices[vertex_id]


def iou(box_a, box_b):
    """Intersection over union of two (x1,y1,x2,y2) boxes."""
    ax1, ay1, ax2, ay2 = box_a
    bx1, by1, bx2, by2 = box_b
    if ax1 >= ax2 or ay1 >= ay2 or bx1 >= bx2 or by1 >= by2:
        raise ValueError("degenerate box")
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union


def build_image_block(regions):
    """(region_i, region_j, iou) for every overlapping region pair."""
    out = []
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            score = iou(regions[i].box, regions[j].box)
            if score > 0.0:
                out.append((i, j, score))
    return out


def _text_vertex_roles(pair, lexicon, triples):
    """token index -> role for tokens that become graph vertices.

    Lexicon roles win; tokens the lexicon calls 'other' still join when a
    triple uses them, with the role the triple implies.
    """
    roles = {}
    for tok in pair.tokens:
        role = lexicon.role(tok.surface)
        if role != ROLE_OTHER:
            roles[tok.index] = role
    for t in triples:
        roles.setdefault(t.head, ROLE_OBJECT)
        roles.setdefault(t.dependent,
                         ROLE_RELATION if t.kind == KIND_REL else ROLE_ATTRIBUTE)
        if t.object2 is not None:
            roles.setdefault(t.object2, ROLE_OBJECT)
    return roles


def build_text_block(triples, surfaces, stats):
    """(token_i, token_j, weight) edges implied by scene triples."""
    out = []
    for t in triples:
        out.append((t.head, t.dependent, triple_similarity(t, surfaces, stats)))
        if t.kind == KIND_REL and t.object2 is not None:
            w = max(stats.count(surfaces[t.object2], surfaces[t.dependent], t.kind), 1)
            out.append((t.dependent, t.object2, w))
    return out


def build_cross_edges(regions, object_word_tokens, table, threshold=ALIGNMENT_THRESHOLD):
    """(region_i, token_j, score) for tag-word pairs at or above threshold.

    ``object_word_tokens`` is a list of (token_index, surface).
    """
    out = []
    surfaces = [s for _, s in object_word_tokens]
    for r_idx, region in enumerate(regions):
        for w_pos, score in match_tag_to_words(table, region.tag, surfaces, threshold):
            out.append((r_idx, object_word_tokens[w_pos][0], score))
    return out


def normalize_and_assemble(vertices, intra_edges, cross_edges):
    """Build the final graph with per-modality normalized similarities.

    ``intra_edges`` and ``cross_edges`` are (u, v, raw) lists in vertex-id
    space.  Duplicate edges keep the maximum raw similarity.  Each vertex's
    incident intra-modal weights are divided by their sum, and the two
    directed values are averaged into a symmetric S.
    """
    n = len(vertices)
    dedup = {}
    for u, v, raw, kind in (
        [(u, v, raw, _intra_kind(vertices[u])) for u, v, raw in intra_edges]
        + [(u, v, raw, EDGE_CROSS) for u, v, raw in cross_edges]
    ):
        if u == v:
            raise ValueError(f"self-loop on vertex {u}")
        same_modality = vertices[u].modality == vertices[v].modality
        if same_modality == (kind == EDGE_CROSS):
            raise ValueError(f"edge ({u},{v}) kind {kind} inconsistent with "
                             f"endpoint modalities")
        if raw <= 0:
            raise ValueError(f"edge ({u},{v}) has non-positive similarity {raw}")
        key = (min(u, v), max(u, v))
        if key not in dedup or raw > dedup[key][0]:
            dedup[key] = (raw, kind)

    intra_sum = np.zeros(n)
    for (u, v), (raw, kind) in dedup.items():
        if kind != EDGE_CROSS:
            intra_sum[u] += raw
            intra_sum[v] += raw

    S = np.zeros((n, n))
    edges = []
    for (u, v), (raw, kind) in sorted(dedup.items()):
        if kind == EDGE_CROSS:
            s = raw
        else:
            s = 0.5 * (raw / intra_sum[u] + raw / intra_sum[v])
        S[u, v] = S[v, u] = s
        edges.append(Edge(u=u, v=v, kind=kind, raw_similarity=raw))
    return UnifiedGraph(vertices=vertices, edges=edges, S=S)


def _intra_kind(vertex):
    return EDGE_INTRA_IMAGE if vertex.modality == MODALITY_IMAGE else EDGE_INTRA_TEXT


def build_unified_graph(pair, stats, lexicon, table, threshold=ALIGNMENT_THRESHOLD):
    """Construct the unified scene graph for one pair."""
    triples = pair_triples(pair, lexicon)
    token_roles = _text_vertex_roles(pair, lexicon, triples)
    surfaces = [t.surface for t in pair.tokens]

    vertices = []
    for r_idx, region in enumerate(pair.regions):
        vertices.append(Vertex(id=len(vertices), modality=MODALITY_IMAGE,
                               payload=r_idx, role=ROLE_OBJECT_REGION,
                               label=region.tag))
    token_to_vertex = {}
    role_names = {ROLE_OBJECT: ROLE_OBJECT_WORD, ROLE_ATTRIBUTE: ROLE_ATTRIBUTE_WORD,
                  ROLE_RELATION: ROLE_RELATION_WORD}
    for t_idx in sorted(token_roles):
        token_to_vertex[t_idx] = len(vertices)
        vertices.append(Vertex(id=len(vertices), modality=MODALITY_TEXT,
                               payload=t_idx, role=role_names[token_roles[t_idx]],
                               label=surfaces[t_idx]))

    intra = [(u, v, w) for u, v, w in build_image_block(pair.regions)]
    for ti, tj, w in build_text_block(triples, surfaces, stats):
        intra.append((token_to_vertex[ti], token_to_vertex[tj], w))

    object_tokens = [(t_idx, surfaces[t_idx]) for t_idx in sorted(token_roles)
                     if token_roles[t_idx] == ROLE_OBJECT]
    cross = [(r, token_to_vertex[t], s)
             for r, t, s in build_cross_edges(pair.regions, object_tokens, table,
                                              threshold)]
    return normalize_and_assemble(vertices, intra, cross)


def dump_graph(graph):
    """Human-readable dump of vertices, edges and S for golden-file tests."""
    lines = ["# vertices\tid\tmodality\tpayload\trole\tlabel"]
    for v in graph.vertices:
        lines.append(f"vertex\t{v.id}\t{v.modality}\t{v.payload}\t{v.role}\t{v.label}")
    lines.append("# edges\tu\tv\tkind\traw\tnormalized")
    for e in graph.edges:
        lines.append(f"edge\t{e.u}\t{e.v}\t{e.kind}\t{e.raw_similarity:.10g}"
                     f"\t{graph.S[e.u, e.v]:.10g}")
    lines.append("# S")
    for row in graph.S:
        lines.append("\t".join(f"{x:.10g}" for x in row))
    return "\n".join(lines) + "\n"
