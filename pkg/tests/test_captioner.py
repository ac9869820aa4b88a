import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heatcap import ObjectAttributes, caption_from_json, caption_to_json, render_caption
from heatcap.captioner import format_percent


def attrs(
    object_id=1,
    label="dog",
    position="center",
    area_fraction=0.25,
    salient=("center", "center-right", "top-center"),
    colors=(("pale orange", 0.5), ("orange", 0.3), ("pale bright orange", 0.2)),
    score=1.0,
):
    return ObjectAttributes(
        object_id=object_id,
        label=label,
        score=score,
        position=position,
        area_fraction=area_fraction,
        salient_regions=tuple(salient),
        dominant_colors=tuple(colors),
    )


# golden caption strings and the attribute sets that regenerate them
GOLDEN_A = (
    "In this image, one object is detected under the heatmap. Object 1 is "
    "located on the top-center side of the image. It occupies 13.33% of the "
    "image. It is a dog. Its center, center-right and top-center parts are "
    "mostly considered important by the model. The main colours of it and its "
    "background are pale orange, orange, and pale bright orange."
)
GOLDEN_B = (
    "In this image, one object is detected under the heatmap. Object 1 is "
    "located on the bottom-center side of the image. It occupies 23.79% of the "
    "image. It is a cat. Its bottom-left, center-left and center-right parts "
    "are mostly considered important by the model. The main colours of it and "
    "its background are pale orange, orange, and pale yellow."
)
GOLDEN_C = (
    "In this image, one object is detected under the heatmap. Object 1 is "
    "located on the center side of the image. It occupies 68.44% of the image. "
    "It is a go-kart with a human driver. Its top-center, bottom-center and "
    "center parts are mostly considered important by the model. The main "
    "colours of it and its background are pale yellow, pale orange, and black."
)
GOLDEN_D = (
    "In this image, two objects are detected under the heatmap. Object 1 is "
    "located on the center-left side of the image. It occupies 12.28% of the "
    "image. It is a bird. Its center, center-right and top-center parts are "
    "mostly considered important by the model. The main colours of it and its "
    "background are blue, pale yellow, and grey. Object 2 is located on the "
    "center-right side of the image. It occupies 8.93% of the image. It is a "
    "bird. Its center, center-right and top-center parts are mostly considered "
    "important by the model. The main colours of it and its background are "
    "blue, pale yellow, and white."
)

ATTRS_A = attrs(
    position="top-center",
    area_fraction=0.1333,
    label="dog",
    salient=("center", "center-right", "top-center"),
    colors=(("pale orange", 0.5), ("orange", 0.3), ("pale bright orange", 0.2)),
)
ATTRS_B = attrs(
    position="bottom-center",
    area_fraction=0.2379,
    label="cat",
    salient=("bottom-left", "center-left", "center-right"),
    colors=(("pale orange", 0.5), ("orange", 0.3), ("pale yellow", 0.2)),
)
ATTRS_C = attrs(
    position="center",
    area_fraction=0.6844,
    label="go-kart with a human driver",
    salient=("top-center", "bottom-center", "center"),
    colors=(("pale yellow", 0.5), ("pale orange", 0.3), ("black", 0.2)),
)
ATTRS_D1 = attrs(
    object_id=1,
    position="center-left",
    area_fraction=0.1228,
    label="bird",
    salient=("center", "center-right", "top-center"),
    colors=(("blue", 0.5), ("pale yellow", 0.3), ("grey", 0.2)),
)
ATTRS_D2 = attrs(
    object_id=2,
    position="center-right",
    area_fraction=0.0893,
    label="bird",
    salient=("center", "center-right", "top-center"),
    colors=(("blue", 0.5), ("pale yellow", 0.3), ("white", 0.2)),
)


class TestGoldenCaptions:
    def test_caption_a(self):
        assert render_caption([ATTRS_A]).text == GOLDEN_A

    def test_caption_b(self):
        assert render_caption([ATTRS_B]).text == GOLDEN_B

    def test_caption_c(self):
        assert render_caption([ATTRS_C]).text == GOLDEN_C

    def test_caption_d(self):
        assert render_caption([ATTRS_D1, ATTRS_D2]).text == GOLDEN_D


class TestHeaderAndOmissions:
    def test_zero_objects(self):
        caption = render_caption([])
        assert caption.text == "In this image, no objects are detected under the heatmap."
        assert caption.per_object == ()

    def test_count_words(self):
        assert "two objects are" in render_caption([ATTRS_D1, ATTRS_D2]).text
        many = [attrs(object_id=i) for i in range(1, 14)]
        assert render_caption(many).text.startswith(
            "In this image, 13 objects are detected"
        )
        twelve = [attrs(object_id=i) for i in range(1, 13)]
        assert render_caption(twelve).text.startswith(
            "In this image, twelve objects are detected"
        )

    def test_empty_salient_sentence_omitted(self):
        text = render_caption([attrs(salient=())]).text
        assert "considered important" not in text
        assert "main colours" in text

    def test_empty_colors_sentence_omitted(self):
        text = render_caption([attrs(colors=())]).text
        assert "main colours" not in text
        assert "considered important" in text

    def test_short_lists(self):
        text = render_caption(
            [attrs(salient=("center", "top-left"), colors=(("blue", 1.0),))]
        ).text
        assert "Its center and top-left parts" in text
        assert "background are blue." in text

    def test_one_salient(self):
        text = render_caption([attrs(salient=("center",))]).text
        assert "Its center parts are mostly" in text

    def test_two_colors_no_comma(self):
        text = render_caption([attrs(colors=(("blue", 0.6), ("grey", 0.4)))]).text
        assert "are blue and grey." in text

    def test_vowel_flag_off_by_default(self):
        assert "It is a orange." in render_caption([attrs(label="orange")]).text

    def test_vowel_flag_on(self):
        text = render_caption([attrs(label="orange")], an_before_vowel=True).text
        assert "It is an orange." in text


class TestPercentFormatting:
    @pytest.mark.parametrize(
        "fraction,expected",
        [
            (0.1333, "13.33"),
            (0.6844, "68.44"),
            (0.0893, "8.93"),
            (1.0, "100.00"),
            (0.01005, "1.01"),  # tie rounds away from zero
            (0.12345, "12.35"),  # 12.345 -> 12.35, not banker's 12.34
            (0.005, "0.50"),
            (1e-7, "0.00"),
        ],
    )
    def test_cases(self, fraction, expected):
        assert format_percent(fraction) == expected

    @given(st.floats(0, 1))
    def test_two_decimals_and_close(self, fraction):
        rendered = format_percent(fraction)
        whole, dec = rendered.split(".")
        assert len(dec) == 2
        assert abs(float(rendered) / 100 - fraction) <= 0.00005 + 1e-15


class TestJson:
    def test_shape(self):
        doc = caption_to_json(render_caption([ATTRS_A]))
        assert set(doc) == {"text", "objects"}
        assert len(doc["objects"]) == 1
        assert set(doc["objects"][0]) == {
            "id",
            "label",
            "score",
            "position",
            "area_fraction",
            "salient_regions",
            "dominant_colors",
        }
        assert doc["objects"][0]["area_fraction"] == 0.1333  # raw, not formatted

    def test_zero_objects(self):
        doc = caption_to_json(render_caption([]))
        assert doc["objects"] == []

    def test_roundtrip(self):
        caption = render_caption([ATTRS_D1, ATTRS_D2])
        doc = json.loads(json.dumps(caption_to_json(caption)))
        assert caption_from_json(doc) == caption


class TestDeterminism:
    def test_identical_runs(self):
        objs = [ATTRS_A, ATTRS_D2]
        assert render_caption(objs).text == render_caption(objs).text
