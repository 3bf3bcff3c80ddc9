"""The built-in catalogue of models.

Each entry is a canonical document shipped with the package, loaded and
validated through the ordinary parser, so the catalogue exercises the same
code path as user files.
"""

from __future__ import annotations

from importlib import resources

from .documents import ModelDocument, parse_model
from .errors import UnknownCorpusEntryError

CORPUS_NAMES = (
    "bell",
    "hardy",
    "pr-box",
    "ghz-mermin",
    "specker-triangle",
    "liar-4",
    "box-25",
    "peres-mermin-square",
    "ks-18",
)


def corpus_names() -> tuple[str, ...]:
    return CORPUS_NAMES


def corpus_text(name: str) -> str:
    """The entry's canonical document text, byte for byte as shipped."""
    if name not in CORPUS_NAMES:
        raise UnknownCorpusEntryError(
            f"no corpus entry {name!r}; available: {', '.join(CORPUS_NAMES)}"
        )
    return (
        resources.files("contextuality")
        .joinpath("corpus")
        .joinpath(f"{name}.json")
        .read_text(encoding="utf-8")
    )


def corpus(name: str) -> ModelDocument:
    return parse_model(corpus_text(name))
