"""Canonical word lists shared by the synthetic corpus generator and the
shipped toy embedding/lexicon files.

The synthetic generator draws class labels, attributes, relations and filler
words from these pools, so any corpus it emits can be processed with the
packaged toy embedding table and lexicon without extra configuration.
"""

# Object nouns. The first entries double as detector class labels in
# synthetic corpora, so keep them common and visually concrete.
OBJECT_WORDS = [
    "dog", "car", "tree", "house", "bird",
    "boat", "horse", "chair", "bottle", "clock",
    "train", "flower", "window", "mountain", "lamp",
    "truck", "sheep", "kite", "bridge", "river",
    "grass", "cat", "table", "road", "cloud",
    "fence", "tower", "garden", "plane", "wheel",
    "door", "book", "shoe", "hat", "cup",
    "plate", "spoon", "bench", "wall", "roof",
    "stone", "leaf", "branch", "nest", "barn",
    "field", "hill", "pond", "gate", "path",
]

# Tag-side synonyms for the first ten object words. These only ever appear
# as detector tags; the embedding table places each at cosine 0.8 from its
# base word so tag/word matching still clears the 0.5 alignment threshold.
SYNONYMS = {
    "dog": "hound",
    "car": "automobile",
    "tree": "sapling",
    "house": "cottage",
    "bird": "fowl",
    "boat": "vessel",
    "horse": "stallion",
    "chair": "seat",
    "bottle": "flask",
    "clock": "timepiece",
}

# A standalone engineered pair: "steppe" sits at cosine 0.62 from "grass".
NEAR_SYNONYM_PAIR = ("grass", "steppe", 0.62)

ATTRIBUTE_WORDS = [
    "red", "blue", "green", "small", "large",
    "old", "young", "bright", "dark", "tall",
    "short", "round", "square", "fast", "slow",
    "heavy", "light", "clean", "dirty", "wide",
    "narrow", "soft", "hard", "warm", "cold",
    "quiet", "loud", "smooth", "rough", "shiny",
    "vast",
]

RELATION_WORDS = [
    "chases", "holds", "rides", "carries", "pulls",
    "watches", "follows", "touches", "faces", "crosses",
    "passes", "guards",
]

FILLER_WORDS = [
    "the", "a", "an", "of", "in", "on", "at", "with", "and", "or",
    "but", "near", "very", "quite", "some", "many", "few", "this",
    "that", "those", "these", "it", "is", "was", "are", "were", "be",
    "been", "to", "for",
]


def all_words():
    """Every word the toy data files must cover, in a stable order."""
    words = list(OBJECT_WORDS)
    words.append(NEAR_SYNONYM_PAIR[1])
    words.extend(SYNONYMS[w] for w in OBJECT_WORDS[:10])
    words.extend(ATTRIBUTE_WORDS)
    words.extend(RELATION_WORDS)
    words.extend(FILLER_WORDS)
    return words


def word_role(word):
    """Lexicon role for a word bank entry."""
    if word in OBJECT_WORDS or word == NEAR_SYNONYM_PAIR[1] or word in SYNONYMS.values():
        return "object"
    if word in ATTRIBUTE_WORDS:
        return "attribute"
    if word in RELATION_WORDS:
        return "relation"
    return "other"
