"""Canonical JSON I/O for every artifact the CLI reads or writes.

All documents are dumped with sorted keys and a trailing newline so that
byte-identical reruns are diffable; digests are over those canonical bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .fortify import ConcatenatedGame, concatenate
from .games import Game
from .graphs import BipartiteGraph

TOOL_VERSION = "0.1.0"


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_json(path: str | Path, doc: Any) -> str:
    """Write canonical JSON; returns the content digest."""
    text = canonical_json(doc)
    Path(path).write_text(text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_graph(path: str | Path) -> BipartiteGraph:
    return BipartiteGraph.from_json_dict(load_json(path))


def load_game(path: str | Path) -> Game:
    return Game.from_json_dict(load_json(path))


def concatenated_to_json(cg: ConcatenatedGame) -> dict:
    return {
        "base": cg.base.to_json_dict(),
        "h1": cg.h1.to_json_dict(),
        "h2": cg.h2.to_json_dict(),
        "derived": cg.derived.to_json_dict(),
    }


def load_concatenated(path: str | Path) -> ConcatenatedGame:
    doc = load_json(path)
    cg = concatenate(
        BipartiteGraph.from_json_dict(doc["h1"]),
        Game.from_json_dict(doc["base"]),
        BipartiteGraph.from_json_dict(doc["h2"]),
    )
    if "derived" in doc:
        stored = Game.from_json_dict(doc["derived"])
        if stored != cg.derived:
            raise ValueError("stored derived game disagrees with reconcatenation")
    return cg
