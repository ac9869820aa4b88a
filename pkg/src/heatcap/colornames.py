"""Total mapping from HSV colors to a fixed vocabulary of 93 semantic names.

The vocabulary is 3 achromatic names (black, grey, white) plus 10 hue bins
crossed with 3 saturation tiers and 3 value tiers (10 * 9 = 90 chromatic
names). The table ships as a JSON data file and can be replaced via config;
any replacement must still produce exactly 93 distinct names.

Naming rule: very dark pixels are black; desaturated pixels are white or
grey depending on value; everything else is "<sat-word> <val-word> <hue>"
with empty modifier words omitted (the middle tier of each axis is unworded,
so e.g. "orange", "pale orange", "vivid dark red", "pale bright orange").
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import ColorTableError
from .raster import HsvColor

ACHROMATIC_NAMES = ("black", "grey", "white")


@dataclass(frozen=True)
class HueBin:
    name: str
    start: float  # degrees, inclusive
    end: float  # degrees, exclusive; start > end means the bin wraps 360

    def contains(self, hue: float) -> bool:
        if self.start <= self.end:
            return self.start <= hue < self.end
        return hue >= self.start or hue < self.end

    def span(self) -> float:
        if self.start <= self.end:
            return self.end - self.start
        return (360.0 - self.start) + self.end


@dataclass(frozen=True)
class Tier:
    word: str
    max: float  # inclusive upper bound


@dataclass(frozen=True)
class ColorTable:
    v_black: float
    s_grey: float
    v_white: float
    hue_bins: tuple[HueBin, ...]
    sat_tiers: tuple[Tier, ...]
    val_tiers: tuple[Tier, ...]

    def __post_init__(self):
        _validate(self)


def _validate(table: ColorTable) -> None:
    if not table.hue_bins:
        raise ColorTableError("table has no hue bins")
    total = sum(b.span() for b in table.hue_bins)
    if abs(total - 360.0) > 1e-9:
        raise ColorTableError(f"hue bins span {total} degrees, expected 360")
    # partition check on a fine grid: every hue in exactly one bin
    for k in range(0, 3600):
        h = k / 10.0
        hits = sum(1 for b in table.hue_bins if b.contains(h))
        if hits != 1:
            raise ColorTableError(f"hue {h} falls in {hits} bins, expected 1")
    for tiers, axis in ((table.sat_tiers, "saturation"), (table.val_tiers, "value")):
        if not tiers:
            raise ColorTableError(f"no {axis} tiers")
        uppers = [t.max for t in tiers]
        if uppers != sorted(uppers) or uppers[-1] != 1.0:
            raise ColorTableError(f"{axis} tier bounds must ascend and end at 1.0")
    names = list_names(table)
    if len(names) != 93:
        raise ColorTableError(f"table yields {len(names)} names, expected 93")
    if len(set(names)) != len(names):
        raise ColorTableError("table yields duplicate names")


def _compose(sat_word: str, val_word: str, hue_name: str) -> str:
    return " ".join(w for w in (sat_word, val_word, hue_name) if w)


def _tier(tiers: tuple[Tier, ...], x: float) -> Tier:
    for t in tiers:
        if x <= t.max:
            return t
    return tiers[-1]


def name_color(c: HsvColor, table: ColorTable | None = None) -> str:
    """Name one HSV color; total and deterministic."""
    if table is None:
        table = default_table()
    h, s, v = c
    if v <= table.v_black:
        return "black"
    if s <= table.s_grey:
        return "white" if v >= table.v_white else "grey"
    hue = h % 360.0
    for b in table.hue_bins:
        if b.contains(hue):
            return _compose(_tier(table.sat_tiers, s).word,
                            _tier(table.val_tiers, v).word, b.name)
    raise AssertionError("hue bins do not cover the circle")  # unreachable


def list_names(table: ColorTable | None = None) -> list[str]:
    """All names in canonical order: achromatics, then hue-major, tier-minor.

    This order doubles as the tie-break order for dominant-color ranking.
    """
    if table is None:
        table = default_table()
    names = list(ACHROMATIC_NAMES)
    for b in table.hue_bins:
        for st in table.sat_tiers:
            for vt in table.val_tiers:
                names.append(_compose(st.word, vt.word, b.name))
    return names


def table_from_dict(doc: dict) -> ColorTable:
    try:
        ach = doc["achromatic"]
        bins = tuple(
            HueBin(str(b["name"]), float(b["start"]), float(b["end"]))
            for b in doc["hue_bins"]
        )
        sats = tuple(Tier(str(t["word"]), float(t["max"])) for t in doc["saturation_tiers"])
        vals = tuple(Tier(str(t["word"]), float(t["max"])) for t in doc["value_tiers"])
        return ColorTable(
            v_black=float(ach["v_black"]),
            s_grey=float(ach["s_grey"]),
            v_white=float(ach["v_white"]),
            hue_bins=bins,
            sat_tiers=sats,
            val_tiers=vals,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ColorTableError(f"malformed color table: {e}") from e


def load_table(path: str) -> ColorTable:
    """Load and validate a user-supplied color table JSON file."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ColorTableError(f"{path}: invalid JSON: {e}") from e
    return table_from_dict(doc)


_DEFAULT: ColorTable | None = None


def default_table() -> ColorTable:
    """The bundled 93-name table (validated once, then cached)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("heatcap.data").joinpath("color_table.json").read_text()
        _DEFAULT = table_from_dict(json.loads(text))
    return _DEFAULT
