import pathlib
import sys

import numpy as np
import pytest
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "scripts"))

import mock_llm  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def echo_llm():
    """Echo chat-completions server on an ephemeral port."""
    server, base_url = mock_llm.start_background()
    yield base_url
    server.shutdown()


@pytest.fixture
def no_backoff(monkeypatch):
    """Make retry backoff instantaneous for tests."""
    import heatcap.reasoning as reasoning

    sleeps = []
    monkeypatch.setattr(reasoning.time, "sleep", sleeps.append)
    return sleeps


def write_png(path, array):
    Image.fromarray(array).save(path)
    return str(path)


def make_rgb(width, height, color=(255, 0, 0)):
    arr = np.zeros((height, width, 3), dtype=np.uint8)
    arr[:, :] = color
    return arr


@pytest.fixture
def stub_config(fixtures_dir):
    """PipelineConfig matching the committed fixtures (stub classifier)."""
    from heatcap import ClassifierRef, PipelineConfig, coco_labels

    return PipelineConfig(
        classifier=ClassifierRef(
            kind="stub",
            label_set=coco_labels(),
            sidecar=str(fixtures_dir / "sidecar.json"),
        )
    )


@pytest.fixture
def fixture_image(fixtures_dir):
    from heatcap import load_image

    return load_image(str(fixtures_dir / "image.png"))


@pytest.fixture
def fixture_heatmaps(fixtures_dir):
    from heatcap import load_heatmap

    return [
        ("Heatmap1", load_heatmap(str(fixtures_dir / "heatmap1.png"))),
        ("Heatmap2", load_heatmap(str(fixtures_dir / "heatmap2.csv"))),
    ]


GOLDEN_HEATMAP1 = (
    "In this image, one object is detected under the heatmap. "
    "Object 1 is located on the top-center side of the image. "
    "It occupies 13.33% of the image. It is a dog. "
    "Its center, center-right and top-center parts are mostly considered "
    "important by the model. "
    "The main colours of it and its background are pale orange, orange, "
    "and pale bright orange."
)
