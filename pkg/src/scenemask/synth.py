"""Synthetic corpus generation with known region-word alignments.

Every pair is built so the cross-modal signal is learnable and the
intra-modal context is deliberately leaky:

* visual features are class-conditional Gaussian clusters, so masked-region
  classification has signal;
* detector classes are organized in fixed co-occurring couples whose boxes
  overlap, so a visible neighbor region leaks the identity of an overlapped
  one;
* each class owns two attribute words, so a visible attribute leaks the
  identity of an adjacent object word.

Generation is a pure function of (spec, seed).
"""

import json
from dataclasses import dataclass, fields

import numpy as np

from . import wordbank
from .corpus import OOV_TOKEN, Corpus, ImageTextPair, Region, Token, positional_feature

RELATIONS_IN_VOCAB = 4


class SynthSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    vocab_size: int = 50
    class_count: int = 10
    pair_count: int = 200
    regions_per_pair: int = 5
    tokens_per_pair: int = 12
    alignment_rate: float = 0.8
    image_size: int = 96
    visual_dim: int = 16
    feature_noise: float = 0.1
    attr_rate: float = 0.8
    relation_rate: float = 0.5
    synonym_rate: float = 0.25

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise SynthSpecError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**raw)


def _check_spec(spec):
    if not 0.0 <= spec.alignment_rate <= 1.0:
        raise SynthSpecError(f"alignment_rate {spec.alignment_rate} outside [0,1]")
    if spec.class_count < 2:
        raise SynthSpecError("need at least 2 detector classes")
    if spec.class_count > len(wordbank.OBJECT_WORDS):
        raise SynthSpecError(f"class_count {spec.class_count} exceeds word bank "
                             f"({len(wordbank.OBJECT_WORDS)} object words)")
    if 2 * spec.class_count > len(wordbank.ATTRIBUTE_WORDS) - 1:
        raise SynthSpecError("not enough attribute words for this class count")
    if spec.regions_per_pair < 1 or spec.regions_per_pair > spec.class_count:
        raise SynthSpecError(f"regions_per_pair must be in [1, class_count="
                             f"{spec.class_count}]")
    n_align = _alignment_count(spec)
    if n_align > spec.tokens_per_pair:
        raise SynthSpecError(f"{n_align} aligned words cannot fit in "
                             f"{spec.tokens_per_pair} tokens")
    fixed = 1 + 3 * spec.class_count + RELATIONS_IN_VOCAB
    fillers = spec.vocab_size - fixed
    if fillers < 1:
        raise SynthSpecError(f"vocab_size {spec.vocab_size} too small; need at "
                             f"least {fixed + 1}")
    if fillers > len(wordbank.FILLER_WORDS):
        raise SynthSpecError(f"vocab_size {spec.vocab_size} too large; word bank "
                             f"has only {len(wordbank.FILLER_WORDS)} filler words")


def _alignment_count(spec):
    return min(int(round(spec.alignment_rate * spec.regions_per_pair)),
               spec.tokens_per_pair)


def build_vocab(spec):
    """Vocabulary for a synthetic corpus: OOV, classes, attributes,
    relations, then fillers up to vocab_size."""
    classes = wordbank.OBJECT_WORDS[: spec.class_count]
    attrs = wordbank.ATTRIBUTE_WORDS[: 2 * spec.class_count]
    rels = wordbank.RELATION_WORDS[:RELATIONS_IN_VOCAB]
    fillers = wordbank.FILLER_WORDS[: spec.vocab_size - 1 - len(classes) - len(attrs) - len(rels)]
    return [OOV_TOKEN] + classes + attrs + rels + fillers


def class_attributes(spec, class_idx):
    """The two attribute words owned by a detector class."""
    attrs = wordbank.ATTRIBUTE_WORDS[: 2 * spec.class_count]
    return attrs[2 * class_idx: 2 * class_idx + 2]


def _couples(spec):
    return [(2 * i, 2 * i + 1) for i in range(spec.class_count // 2)]


def _sample_region_classes(spec, rng):
    """Distinct classes for one pair: overlapping couples first, then solos."""
    groups = []
    used = set()
    remaining = spec.regions_per_pair
    couples = list(_couples(spec))
    rng.shuffle(couples)
    for couple in couples:
        if remaining < 2:
            break
        groups.append(tuple(couple))
        used.update(couple)
        remaining -= 2
    free = [c for c in range(spec.class_count) if c not in used]
    if remaining > 0:
        solos = rng.choice(len(free), size=remaining, replace=False)
        for s in solos:
            groups.append((free[s],))
    return groups


def _sample_group_boxes(spec, group_size, rng):
    """Boxes for one overlap group; partners are shifted copies of the base
    so every within-group pair keeps IoU > 0."""
    w = spec.image_size
    size = rng.uniform(0.25, 0.45) * w
    x1 = rng.uniform(0, w - size)
    y1 = rng.uniform(0, w - size)
    boxes = [(x1, y1, x1 + size, y1 + size)]
    for _ in range(group_size - 1):
        dx = rng.uniform(0.3, 0.6) * size * rng.choice([-1.0, 1.0])
        dy = rng.uniform(0.3, 0.6) * size * rng.choice([-1.0, 1.0])
        bx1 = min(max(x1 + dx, 0.0), w - size)
        by1 = min(max(y1 + dy, 0.0), w - size)
        boxes.append((bx1, by1, bx1 + size, by1 + size))
    return boxes


def _make_region(spec, class_idx, box, centers, classes, rng):
    feat = centers[class_idx] + spec.feature_noise * rng.standard_normal(spec.visual_dim)
    main = rng.uniform(0.7, 0.95)
    dist = np.full(spec.class_count, (1.0 - main) / (spec.class_count - 1))
    dist[class_idx] = main
    dist = dist / dist.sum()
    word = classes[class_idx]
    tag = word
    if rng.random() < spec.synonym_rate and word in wordbank.SYNONYMS:
        tag = wordbank.SYNONYMS[word]
    return Region(
        box=box,
        visual_feature=feat,
        positional_feature=positional_feature(box, spec.image_size, spec.image_size),
        tag=tag,
        tag_confidence=float(dist.max()),
        class_distribution=dist,
    )


def _assemble_tokens(spec, aligned, classes, rng):
    """Token surfaces for one pair plus the position of each aligned word.

    ``aligned`` maps region slot -> class index.  Returns (surfaces,
    {region_slot: token_index}).
    """
    budget = spec.tokens_per_pair - len(aligned)
    segments = []  # lists of surfaces; aligned word flagged by parallel index
    seg_slots = []
    for slot, class_idx in aligned:
        seg = []
        if budget > 0 and rng.random() < spec.attr_rate:
            attrs = class_attributes(spec, class_idx)
            seg.append(attrs[int(rng.integers(len(attrs)))])
            budget -= 1
        seg.append(classes[class_idx])
        segments.append(seg)
        seg_slots.append(slot)

    rels = wordbank.RELATION_WORDS[:RELATIONS_IN_VOCAB]
    if len(segments) >= 2 and budget > 0 and rng.random() < spec.relation_rate:
        rel = rels[int(rng.integers(len(rels)))]
        segments[0] = segments[0] + [rel] + segments[1]
        del segments[1]
        merged_slots = [seg_slots[0], seg_slots[1]]
        seg_slots = [merged_slots] + seg_slots[2:]
        budget -= 1

    fillers = build_vocab(spec)[1 + 3 * spec.class_count + RELATIONS_IN_VOCAB:]
    gap_counts = np.zeros(len(segments) + 1, dtype=int)
    for _ in range(budget):
        gap_counts[int(rng.integers(len(gap_counts)))] += 1

    surfaces = []
    positions = {}
    for gi in range(len(segments) + 1):
        for _ in range(gap_counts[gi]):
            surfaces.append(fillers[int(rng.integers(len(fillers)))])
        if gi < len(segments):
            slot_entry = seg_slots[gi]
            for surface in segments[gi]:
                if surface in classes:
                    class_idx = classes.index(surface)
                    slots = slot_entry if isinstance(slot_entry, list) else [slot_entry]
                    for slot in slots:
                        if dict(aligned)[slot] == class_idx and slot not in positions:
                            positions[slot] = len(surfaces)
                            break
                surfaces.append(surface)
    return surfaces, positions


def generate_synthetic(spec, seed):
    """Generate a corpus; byte-identical output for identical (spec, seed)."""
    _check_spec(spec)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5CEE]))
    classes = wordbank.OBJECT_WORDS[: spec.class_count]
    vocab = build_vocab(spec)
    vocab_index = {w: i for i, w in enumerate(vocab)}
    centers = rng.standard_normal((spec.class_count, spec.visual_dim))

    pairs = []
    n_align = _alignment_count(spec)
    for pair_no in range(spec.pair_count):
        groups = _sample_region_classes(spec, rng)
        region_classes = []
        boxes = []
        for group in groups:
            for class_idx, box in zip(group, _sample_group_boxes(spec, len(group), rng)):
                region_classes.append(class_idx)
                boxes.append(box)
        regions = [
            _make_region(spec, c, box, centers, classes, rng)
            for c, box in zip(region_classes, boxes)
        ]
        slots = sorted(rng.choice(len(regions), size=n_align, replace=False).tolist())
        aligned = [(slot, region_classes[slot]) for slot in slots]
        surfaces, positions = _assemble_tokens(spec, aligned, classes, rng)
        tokens = [Token(surface=s, vocab_id=vocab_index.get(s, 0), index=i)
                  for i, s in enumerate(surfaces)]
        gold = [(slot, positions[slot]) for slot, _ in aligned]
        pairs.append(ImageTextPair(
            pair_id=f"synth-{pair_no:05d}",
            image_size=(spec.image_size, spec.image_size),
            regions=regions,
            tokens=tokens,
            raw_text=" ".join(surfaces),
            gold_alignments=gold,
        ))
    return Corpus(pairs=pairs, vocab=vocab, detector_classes=list(classes),
                  visual_dim=spec.visual_dim)
