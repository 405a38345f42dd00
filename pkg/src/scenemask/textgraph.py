"""Heuristic text scene-graph extraction and co-occurrence statistics.

Triples come either from pre-parsed input (always preferred when a pair
carries them) or from a small rule parser driven by a word-role lexicon:

* an attribute word immediately before an object word yields an
  object-attribute triple;
* an object ... relation ... object pattern spanning at most four token
  positions yields an object-relation triple.

Edge similarities are dataset-level co-occurrence counts of the referred
word pairs, with a floor of 1 for pairs that were parsed but never counted.
"""

from collections import Counter
from dataclasses import dataclass, field

from .corpus import SceneTriple

ROLE_OBJECT = "object"
ROLE_ATTRIBUTE = "attribute"
ROLE_RELATION = "relation"
ROLE_OTHER = "other"
ROLES = (ROLE_OBJECT, ROLE_ATTRIBUTE, ROLE_RELATION, ROLE_OTHER)

KIND_ATTR = "object-attribute"
KIND_REL = "object-relation"

# An object...relation...object pattern must fit in a window of 4 tokens,
# i.e. the two object positions are at most 3 apart.
RELATION_SPAN = 3


class LexiconError(ValueError):
    pass


class Lexicon:
    """word -> role map; unknown words are 'other'."""

    def __init__(self, roles):
        self._roles = {w.lower(): r for w, r in roles.items()}
        for w, r in self._roles.items():
            if r not in ROLES:
                raise LexiconError(f"unknown role {r!r} for word {w!r}")

    def role(self, word):
        return self._roles.get(word.lower(), ROLE_OTHER)


def load_lexicon(path):
    roles = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"line {line_no}: expected 'word<TAB>role'")
            roles[parts[0]] = parts[1]
    return Lexicon(roles)


def parse_text(tokens, lexicon):
    """Extract scene triples from a token list via the adjacency rules."""
    roles = [lexicon.role(t.surface) for t in tokens]
    triples = []
    for i in range(len(tokens) - 1):
        if roles[i] == ROLE_ATTRIBUTE and roles[i + 1] == ROLE_OBJECT:
            triples.append(SceneTriple(head=i + 1, dependent=i, kind=KIND_ATTR))
    object_positions = [i for i, r in enumerate(roles) if r == ROLE_OBJECT]
    for j, role in enumerate(roles):
        if role != ROLE_RELATION:
            continue
        before = [i for i in object_positions if i < j]
        after = [k for k in object_positions if k > j]
        if not before or not after:
            continue
        i, k = before[-1], after[0]
        if k - i <= RELATION_SPAN:
            triples.append(SceneTriple(head=i, dependent=j, kind=KIND_REL, object2=k))
    return triples


def pair_triples(pair, lexicon):
    """Triples for a pair: pre-parsed ones win over the heuristic parser."""
    if pair.pre_parsed_triples is not None:
        return list(pair.pre_parsed_triples)
    return parse_text(pair.tokens, lexicon)


@dataclass
class CooccurrenceStats:
    """Counts of (object word, dependent word, kind) across a corpus."""

    counts: Counter = field(default_factory=Counter)
    totals: Counter = field(default_factory=Counter)

    def add(self, head_word, dep_word, kind):
        self.counts[(head_word.lower(), dep_word.lower(), kind)] += 1
        self.totals[kind] += 1

    def count(self, head_word, dep_word, kind):
        return self.counts.get((head_word.lower(), dep_word.lower(), kind), 0)

    def merge(self, other):
        merged = CooccurrenceStats()
        merged.counts = self.counts + other.counts
        merged.totals = self.totals + other.totals
        return merged

    def __len__(self):
        return len(self.counts)


def accumulate_cooccurrence(corpus, lexicon):
    """Count word-pair co-occurrences over a whole corpus.

    Relation triples contribute one count per incident object, so both the
    (object1, relation) and (object2, relation) edges have statistics.
    """
    stats = CooccurrenceStats()
    for pair in corpus.pairs:
        surfaces = [t.surface for t in pair.tokens]
        for triple in pair_triples(pair, lexicon):
            stats.add(surfaces[triple.head], surfaces[triple.dependent], triple.kind)
            if triple.kind == KIND_REL and triple.object2 is not None:
                stats.add(surfaces[triple.object2], surfaces[triple.dependent], triple.kind)
    return stats


def triple_similarity(triple, surfaces, stats):
    """Edge weight for a parsed triple's (head, dependent) pair.

    Dataset count with a floor of 1: an edge that was parsed in this text
    never vanishes just because the pair is globally unseen.
    """
    return max(stats.count(surfaces[triple.head], surfaces[triple.dependent],
                           triple.kind), 1)
