"""Word-embedding table used to establish pseudo region-word alignments.

The table is loaded from a text file with one ``word v1 v2 ... vD`` line per
entry (GloVe text format).  Lookups are case-insensitive; similarities are
cosines clamped to [0, 1] because downstream code treats them as edge
weights with probability semantics.
"""

import numpy as np

ALIGNMENT_THRESHOLD = 0.5


class EmbeddingError(ValueError):
    pass


class EmbeddingTable:
    def __init__(self, words, vectors):
        self.words = list(words)
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.dim = self.vectors.shape[1]
        self._index = {}
        for i, w in enumerate(self.words):
            key = w.lower()
            if key in self._index:
                raise EmbeddingError(f"duplicate word {w!r}")
            self._index[key] = i
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms == 0):
            bad = self.words[int(np.argmin(norms))]
            raise EmbeddingError(f"zero-norm vector for word {bad!r}")
        self._norms = norms

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word.lower() in self._index

    def lookup(self, word):
        """Vector for ``word`` (case-insensitive), or None if absent."""
        i = self._index.get(word.lower())
        return None if i is None else self.vectors[i]

    def _key(self, word):
        return self._index.get(word.lower())


def load_embeddings(path):
    words = []
    rows = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise EmbeddingError(f"line {line_no}: no vector components")
            elif len(values) != dim:
                raise EmbeddingError(
                    f"line {line_no}: expected {dim} components, got {len(values)}")
            try:
                rows.append([float(v) for v in values])
            except ValueError as exc:
                raise EmbeddingError(f"line {line_no}: {exc}") from exc
            words.append(word)
    if not words:
        raise EmbeddingError("empty embedding file")
    return EmbeddingTable(words, np.array(rows, dtype=np.float64))


def _clamped_cos(u, v):
    cos = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return min(max(cos, 0.0), 1.0)


def cosine_similarity(table, word_a, word_b):
    """Clamped cosine between two words, or None when either is absent.

    Negative cosines clamp to 0 so the value can be used directly as an
    alignment edge weight; identical words always score exactly 1.
    """
    ia, ib = table._key(word_a), table._key(word_b)
    if ia is None or ib is None:
        return None
    if ia == ib:
        return 1.0
    return _clamped_cos(table.vectors[ia], table.vectors[ib])


def tag_vector(table, tag):
    """Vector for a (possibly multi-word) region tag.

    Multi-word tags average their resolvable component vectors; returns None
    when no component resolves.
    """
    parts = [table.lookup(p) for p in tag.split()]
    parts = [p for p in parts if p is not None]
    if not parts:
        return None
    return np.mean(parts, axis=0)


def match_tag_to_words(table, tag, object_words, threshold=ALIGNMENT_THRESHOLD):
    """All object words whose similarity to ``tag`` reaches ``threshold``.

    Returns [(word_index, score), ...]; unresolvable words simply do not
    match.  Single-word tags identical to an object word score exactly 1.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0,1]")
    tag_parts = tag.split()
    tvec = tag_vector(table, tag)
    matches = []
    for idx, word in enumerate(object_words):
        if len(tag_parts) == 1 and word.lower() == tag_parts[0].lower():
            score = 1.0
        else:
            wvec = table.lookup(word)
            if tvec is None or wvec is None:
                continue
            score = _clamped_cos(tvec, wvec)
        if score >= threshold:
            matches.append((idx, score))
    return matches
