"""Template rendering of object attributes into caption text.

The wording is fixed: hyphenated position names ("top-center"), British
"colours" in the color sentence, counts as lowercase words up to twelve,
percentages with exactly two decimals (ties round away from zero). The
salient-parts list takes no serial comma; the colours list does.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .attributes import ObjectAttributes

_COUNT_WORDS = {
    1: "one", 2: "two", 3: "three", 4: "four", 5: "five", 6: "six",
    7: "seven", 8: "eight", 9: "nine", 10: "ten", 11: "eleven", 12: "twelve",
}

_VOWELS = "aeiou"


@dataclass(frozen=True)
class Caption:
    text: str
    per_object: tuple[ObjectAttributes, ...]


def format_percent(fraction: float) -> str:
    """fraction * 100 with exactly two decimals, half away from zero."""
    return str(
        (Decimal(repr(float(fraction))) * 100).quantize(
            Decimal("0.01"), rounding=ROUND_HALF_UP
        )
    )


def _count_word(n: int) -> str:
    return _COUNT_WORDS.get(n, str(n))


def _join_no_serial_comma(items) -> str:
    items = list(items)
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def _join_serial_comma(items) -> str:
    items = list(items)
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return items[0] + " and " + items[1]
    return ", ".join(items[:-1]) + ", and " + items[-1]


def render_caption(objects, an_before_vowel: bool = False) -> Caption:
    """Render the caption for an ordered list of ObjectAttributes.

    Sentences for empty attributes (no salient cells, no foreground colors)
    are omitted whole. an_before_vowel switches "a" to "an" before
    vowel-initial labels; off by default to match the plain template.
    """
    objects = tuple(objects)
    n = len(objects)
    if n == 0:
        return Caption("In this image, no objects are detected under the heatmap.", ())
    noun = "object is" if n == 1 else "objects are"
    sentences = [
        f"In this image, {_count_word(n)} {noun} detected under the heatmap."
    ]
    for o in objects:
        sentences.append(
            f"Object {o.object_id} is located on the {o.position} side of the image."
        )
        sentences.append(f"It occupies {format_percent(o.area_fraction)}% of the image.")
        article = "an" if an_before_vowel and o.label[:1].lower() in _VOWELS else "a"
        sentences.append(f"It is {article} {o.label}.")
        if o.salient_regions:
            parts = _join_no_serial_comma(o.salient_regions)
            sentences.append(
                f"Its {parts} parts are mostly considered important by the model."
            )
        if o.dominant_colors:
            colours = _join_serial_comma([name for name, _ in o.dominant_colors])
            sentences.append(
                f"The main colours of it and its background are {colours}."
            )
    return Caption(" ".join(sentences), objects)


def caption_to_json(caption: Caption) -> dict:
    """Structured dump; area fractions and percentages stay raw numbers."""
    return {
        "text": caption.text,
        "objects": [
            {
                "id": o.object_id,
                "label": o.label,
                "score": o.score,
                "position": o.position,
                "area_fraction": o.area_fraction,
                "salient_regions": list(o.salient_regions),
                "dominant_colors": [
                    {"name": name, "pct": pct} for name, pct in o.dominant_colors
                ],
            }
            for o in caption.per_object
        ],
    }


def caption_from_json(doc: dict) -> Caption:
    """Inverse of caption_to_json (lossless round-trip)."""
    objects = tuple(
        ObjectAttributes(
            object_id=o["id"],
            label=o["label"],
            score=o["score"],
            position=o["position"],
            area_fraction=o["area_fraction"],
            salient_regions=tuple(o["salient_regions"]),
            dominant_colors=tuple(
                (c["name"], c["pct"]) for c in o["dominant_colors"]
            ),
        )
        for o in doc["objects"]
    )
    return Caption(doc["text"], objects)
