"""Image-text pair data model and corpus file IO.

A corpus file is line-oriented JSON: the first line is a header record with
the shared vocabulary and detector class list, and every following line is
one image-text pair.  All numbers are decimal text.  See the README for the
exact field names.
"""

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

OOV_TOKEN = "<unk>"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class CorpusError(ValueError):
    """Invariant violation, carrying the offending pair and field."""

    def __init__(self, message, pair_id=None, field_name=None):
        detail = message
        if pair_id is not None:
            detail = f"pair {pair_id!r}: {detail}"
        if field_name is not None:
            detail = f"{detail} (field: {field_name})"
        super().__init__(detail)
        self.pair_id = pair_id
        self.field_name = field_name


class CorpusFormatError(ValueError):
    """Unparseable corpus file, carrying the line number."""

    def __init__(self, message, line_no):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def tokenize(text):
    """Lowercase whitespace/punctuation tokenizer; returns surfaces."""
    return _TOKEN_RE.findall(text.lower())


def positional_feature(box, image_w, image_h):
    """5-d positional feature: normalized corners plus relative area.

    Returns (x1/W, y1/H, x2/W, y2/H, area/(W*H)) as a float array; every
    component lies in [0, 1] for a box inside the image.
    """
    if image_w <= 0 or image_h <= 0:
        raise ValueError(f"image dimensions must be positive, got {image_w}x{image_h}")
    x1, y1, x2, y2 = box
    if not all(math.isfinite(v) for v in (x1, y1, x2, y2)):
        raise ValueError(f"box coordinates must be finite, got {box}")
    if x1 >= x2 or y1 >= y2:
        raise ValueError(f"degenerate box {box}: coordinates must satisfy x1<x2, y1<y2")
    if x1 < 0 or y1 < 0 or x2 > image_w or y2 > image_h:
        raise ValueError(f"box {box} outside image bounds {image_w}x{image_h}")
    area = (x2 - x1) * (y2 - y1)
    return np.array(
        [x1 / image_w, y1 / image_h, x2 / image_w, y2 / image_h, area / (image_w * image_h)],
        dtype=np.float64,
    )


@dataclass(eq=False)
class Region:
    """Detected image region with features and detector outputs."""

    box: tuple
    visual_feature: np.ndarray
    positional_feature: np.ndarray
    tag: str
    tag_confidence: float
    class_distribution: np.ndarray


@dataclass(frozen=True)
class Token:
    surface: str
    vocab_id: int
    index: int


@dataclass(frozen=True)
class SceneTriple:
    """Text scene-graph triple over token indices.

    ``head`` is the object word; ``dependent`` is the attribute or relation
    word; relation triples also carry the second object in ``object2``.
    """

    head: int
    dependent: int
    kind: str  # "object-attribute" | "object-relation"
    object2: int | None = None


@dataclass(eq=False)
class ImageTextPair:
    pair_id: str
    image_size: tuple  # (width, height)
    regions: list
    tokens: list
    raw_text: str
    pre_parsed_triples: list | None = None
    gold_alignments: list | None = None


@dataclass(eq=False)
class Corpus:
    pairs: list
    vocab: list
    detector_classes: list
    visual_dim: int
    _vocab_index: dict = field(default=None, repr=False)

    def vocab_id(self, surface):
        if self._vocab_index is None:
            self._vocab_index = {w: i for i, w in enumerate(self.vocab)}
        return self._vocab_index.get(surface, self._vocab_index[OOV_TOKEN])

    def pair_by_id(self, pair_id):
        for pair in self.pairs:
            if pair.pair_id == pair_id:
                return pair
        raise KeyError(f"no pair with id {pair_id!r}")


def _validate_region(region, pair_id, idx, detector_classes, visual_dim):
    x1, y1, x2, y2 = region.box
    if not all(math.isfinite(v) for v in region.box):
        raise CorpusError("box coordinates not finite", pair_id, f"regions[{idx}].box")
    if x1 >= x2 or y1 >= y2:
        raise CorpusError("box coordinates not ordered", pair_id, f"regions[{idx}].box")
    if region.visual_feature.shape != (visual_dim,):
        raise CorpusError(
            f"visual feature has dim {region.visual_feature.shape}, expected ({visual_dim},)",
            pair_id,
            f"regions[{idx}].visual_feature",
        )
    dist = region.class_distribution
    if dist.shape != (len(detector_classes),):
        raise CorpusError(
            f"class distribution has {dist.shape[0]} entries, expected {len(detector_classes)}",
            pair_id,
            f"regions[{idx}].class_distribution",
        )
    if np.any(dist < 0):
        raise CorpusError("class distribution has negative entries", pair_id,
                          f"regions[{idx}].class_distribution")
    total = float(dist.sum())
    if abs(total - 1.0) > 1e-6:
        raise CorpusError(f"class distribution sums to {total:.6g}, expected 1",
                          pair_id, f"regions[{idx}].class_distribution")
    if not 0.0 <= region.tag_confidence <= 1.0:
        raise CorpusError(f"tag confidence {region.tag_confidence} outside [0,1]",
                          pair_id, f"regions[{idx}].tag_confidence")


def _validate_pair(pair, vocab, detector_classes, visual_dim):
    if not pair.regions:
        raise CorpusError("pair has no regions", pair.pair_id, "regions")
    if not pair.tokens:
        raise CorpusError("pair has no tokens", pair.pair_id, "tokens")
    for idx, region in enumerate(pair.regions):
        _validate_region(region, pair.pair_id, idx, detector_classes, visual_dim)
    for tok in pair.tokens:
        if not 0 <= tok.vocab_id < len(vocab):
            raise CorpusError(f"token {tok.surface!r} has vocab id {tok.vocab_id} "
                              f"outside [0,{len(vocab)})", pair.pair_id, "tokens")
    n_tokens = len(pair.tokens)
    n_regions = len(pair.regions)
    for triple in pair.pre_parsed_triples or []:
        for name, value in (("head", triple.head), ("dependent", triple.dependent),
                            ("object2", triple.object2)):
            if value is not None and not 0 <= value < n_tokens:
                raise CorpusError(f"triple {name} index {value} out of range",
                                  pair.pair_id, "triples")
    for r_idx, t_idx in pair.gold_alignments or []:
        if not (0 <= r_idx < n_regions and 0 <= t_idx < n_tokens):
            raise CorpusError(f"gold alignment ({r_idx},{t_idx}) out of range",
                              pair.pair_id, "gold_alignments")


def _trim_regions(regions, gold_alignments, max_regions):
    """Keep the max_regions highest-confidence regions in original order."""
    if len(regions) <= max_regions:
        return regions, gold_alignments
    order = sorted(range(len(regions)), key=lambda i: (-regions[i].tag_confidence, i))
    keep = sorted(order[:max_regions])
    remap = {old: new for new, old in enumerate(keep)}
    kept_regions = [regions[i] for i in keep]
    if gold_alignments is not None:
        gold_alignments = [(remap[r], t) for r, t in gold_alignments if r in remap]
    return kept_regions, gold_alignments


def _pair_from_record(rec, vocab_index, line_no):
    try:
        pair_id = rec["pair_id"]
        image = rec["image"]
        width, height = image["width"], image["height"]
        regions = []
        for reg in image["regions"]:
            box = tuple(float(v) for v in reg["box"])
            regions.append(Region(
                box=box,
                visual_feature=np.asarray(reg["visual_feature"], dtype=np.float64),
                positional_feature=positional_feature(box, width, height),
                tag=reg["tag"],
                tag_confidence=float(reg["tag_confidence"]),
                class_distribution=np.asarray(reg["class_distribution"], dtype=np.float64),
            ))
        text = rec["text"]
        surfaces = text.get("tokens")
        if surfaces is None:
            surfaces = tokenize(text["raw"])
        tokens = [
            Token(surface=s, vocab_id=vocab_index.get(s, vocab_index[OOV_TOKEN]), index=i)
            for i, s in enumerate(surfaces)
        ]
        triples = None
        if rec.get("triples") is not None:
            triples = [
                SceneTriple(head=t["head"], dependent=t["relation_or_attribute"],
                            kind=t["kind"], object2=t.get("object2"))
                for t in rec["triples"]
            ]
        gold = None
        if rec.get("gold_alignments") is not None:
            gold = [(int(r), int(t)) for r, t in rec["gold_alignments"]]
    except (KeyError, TypeError, IndexError) as exc:
        raise CorpusFormatError(f"malformed pair record: {exc}", line_no) from exc
    except ValueError as exc:
        raise CorpusFormatError(str(exc), line_no) from exc
    return ImageTextPair(
        pair_id=pair_id, image_size=(width, height), regions=regions, tokens=tokens,
        raw_text=text.get("raw", " ".join(s for s in surfaces)),
        pre_parsed_triples=triples, gold_alignments=gold,
    )


def load_corpus(path, max_regions=36, max_tokens=50):
    """Load and validate a corpus file.

    Pairs with more than ``max_regions`` regions keep the highest-confidence
    ones; token lists are cut to the first ``max_tokens``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CorpusFormatError("empty corpus file", 1)
    try:
        header = json.loads(lines[0])
        vocab = list(header["vocab"])
        detector_classes = list(header["detector_classes"])
        visual_dim = int(header["visual_dim"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorpusFormatError(f"malformed header: {exc}", 1) from exc
    if OOV_TOKEN not in vocab:
        raise CorpusFormatError(f"vocab must contain the OOV token {OOV_TOKEN!r}", 1)
    vocab_index = {w: i for i, w in enumerate(vocab)}

    pairs = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"invalid JSON: {exc}", line_no) from exc
        pair = _pair_from_record(rec, vocab_index, line_no)
        pair.regions, pair.gold_alignments = _trim_regions(
            pair.regions, pair.gold_alignments, max_regions)
        if len(pair.tokens) > max_tokens:
            pair.tokens = pair.tokens[:max_tokens]
            if pair.pre_parsed_triples is not None:
                pair.pre_parsed_triples = [
                    t for t in pair.pre_parsed_triples
                    if t.head < max_tokens and t.dependent < max_tokens
                    and (t.object2 is None or t.object2 < max_tokens)
                ]
            if pair.gold_alignments is not None:
                pair.gold_alignments = [(r, t) for r, t in pair.gold_alignments
                                        if t < max_tokens]
        pairs.append(pair)

    corpus = Corpus(pairs=pairs, vocab=vocab, detector_classes=detector_classes,
                    visual_dim=visual_dim)
    for pair in corpus.pairs:
        _validate_pair(pair, vocab, detector_classes, visual_dim)
    return corpus


def _region_to_record(region):
    return {
        "box": [float(v) for v in region.box],
        "tag": region.tag,
        "tag_confidence": float(region.tag_confidence),
        "class_distribution": [float(v) for v in region.class_distribution],
        "visual_feature": [float(v) for v in region.visual_feature],
    }


def _pair_to_record(pair):
    rec = {
        "pair_id": pair.pair_id,
        "image": {
            "width": pair.image_size[0],
            "height": pair.image_size[1],
            "regions": [_region_to_record(r) for r in pair.regions],
        },
        "text": {
            "raw": pair.raw_text,
            "tokens": [t.surface for t in pair.tokens],
        },
    }
    if pair.pre_parsed_triples is not None:
        rec["triples"] = [
            {"head": t.head, "relation_or_attribute": t.dependent, "kind": t.kind,
             "object2": t.object2}
            for t in pair.pre_parsed_triples
        ]
    if pair.gold_alignments is not None:
        rec["gold_alignments"] = [[r, t] for r, t in pair.gold_alignments]
    return rec


def serialize_corpus(corpus):
    """Render a corpus in the line-oriented file format (exact round-trip)."""
    lines = [json.dumps({
        "vocab": corpus.vocab,
        "detector_classes": corpus.detector_classes,
        "visual_dim": corpus.visual_dim,
    }, sort_keys=True)]
    lines.extend(json.dumps(_pair_to_record(p), sort_keys=True) for p in corpus.pairs)
    return "\n".join(lines) + "\n"


def save_corpus(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_corpus(corpus))
