import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def corpus_manifest() -> list[dict]:
    with open(CORPUS_DIR / "manifest.json", encoding="utf-8") as handle:
        return json.load(handle)


@pytest.fixture(scope="session")
def hello_source() -> str:
    return (CORPUS_DIR / "hello.mc").read_text(encoding="utf-8")


def corpus_sources() -> list[tuple[str, str]]:
    """(name, source) for every corpus program; used for parametrized tests."""
    with open(CORPUS_DIR / "manifest.json", encoding="utf-8") as handle:
        manifest = json.load(handle)
    out = []
    for entry in manifest:
        path = CORPUS_DIR / entry["file"]
        out.append((entry["file"], path.read_text(encoding="utf-8")))
    return out
