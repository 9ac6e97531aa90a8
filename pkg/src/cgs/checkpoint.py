"""Named-set checkpoints and per-ply statistics.

A checkpoint directory holds ``manifest.json``, one ``<name>.cgs`` file per
completed set, and ``stats.csv``. Set files are written to a temporary name
and renamed into place before the manifest mentions them, so a killed run
never leaves a half-written set that the manifest claims is complete.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from .dfa import PositionSet, deserialize, serialize
from .errors import CheckpointError

if TYPE_CHECKING:
    from .games import Player

INF = math.inf
MANIFEST = "manifest.json"
STATS = "stats.csv"
STATS_HEADER = ("set", "player", "ply_forward", "ply_backward", "positions", "states", "seconds")
MANIFEST_FORMAT = "cgs-checkpoint/1"


def _ply_text(ply):
    if ply is None:
        return ""
    if ply == INF:
        return "inf"
    return str(int(ply))


def _ply_value(text):
    if text is None or text == "":
        return None
    if text == "inf":
        return INF
    return int(text)


@dataclass
class TaggedSet:
    """A position set with its side to move and ply indices."""

    set: PositionSet
    player: "Player"
    kind: str
    forward_ply: int | None = None
    backward_ply: int | float | None = None

    def __post_init__(self):
        if self.kind == "R" and (self.forward_ply is None or self.backward_ply is not None):
            raise ValueError("R sets carry only a forward ply")
        if self.kind in ("W", "L") and (self.backward_ply is None or self.forward_ply is not None):
            raise ValueError("W/L sets carry only a backward ply")
        if self.kind in ("RW", "RL", "RU") and (self.forward_ply is None or self.backward_ply is None):
            raise ValueError(f"{self.kind} sets carry both plies")

    @property
    def name(self) -> str:
        if self.kind == "R":
            return f"R_{self.forward_ply:04d}"
        if self.kind in ("W", "L"):
            return f"{self.kind}_{self.backward_ply:04d}_{self.player.tag}"
        j = "inf" if self.backward_ply == INF else f"{self.backward_ply:04d}"
        return f"{self.kind}_{self.forward_ply:04d}_{j}"


@dataclass
class PlyStat:
    kind: str
    player: str
    forward_ply: int | None
    backward_ply: int | float | None
    positions: int
    states: int
    seconds: float = field(default=0.0, compare=False)

    def row(self):
        return (
            self.kind,
            self.player,
            _ply_text(self.forward_ply),
            _ply_text(self.backward_ply),
            str(self.positions),
            str(self.states),
            f"{self.seconds:.6f}",
        )


class StatsWriter:
    """Append-only ``stats.csv`` writer; ``path=None`` only collects rows."""

    def __init__(self, path=None, append=False):
        self.path = Path(path) if path else None
        self.rows: list[PlyStat] = []
        if self.path is not None and not (append and self.path.exists()):
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", newline="") as fh:
                csv.writer(fh).writerow(STATS_HEADER)

    def add(self, stat: PlyStat):
        self.rows.append(stat)
        if self.path is not None:
            with open(self.path, "a", newline="") as fh:
                csv.writer(fh).writerow(stat.row())


def read_stats(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _atomic_write(path: Path, data: bytes):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class Checkpoint:
    """Manifest-backed store of completed named sets for one solve."""

    def __init__(self, directory, game, config: dict, resume=False):
        self.directory = Path(directory)
        self.game = game
        self.config = dict(config)
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / MANIFEST
        if resume and path.exists():
            try:
                manifest = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise CheckpointError(f"corrupt manifest: {exc}") from None
            if manifest.get("format") != MANIFEST_FORMAT:
                raise CheckpointError("unknown manifest format")
            if manifest.get("game") != game.description() or manifest.get("config") != self.config:
                raise CheckpointError(
                    "checkpoint belongs to a different game or configuration; "
                    "rerun without --resume to start over"
                )
            self.manifest = manifest
        else:
            if not resume:
                self._clear()
            self.manifest = {
                "format": MANIFEST_FORMAT,
                "game": game.description(),
                "config": self.config,
                "sets": {},
                "order": [],
                "result": None,
            }
            self._write_manifest()

    @classmethod
    def open_existing(cls, directory, game):
        """Open a finished or partial checkpoint for read-only use.

        ``game`` may be a :class:`GameDef` or just its description dict;
        without a full game, sets load with a default alphabet.
        """
        path = Path(directory) / MANIFEST
        if not path.exists():
            raise CheckpointError(f"no checkpoint manifest in {directory}")
        try:
            manifest = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"corrupt manifest: {exc}") from None
        description = game if isinstance(game, dict) else game.description()
        if manifest.get("game") != description:
            raise CheckpointError("checkpoint was written for a different game")
        if isinstance(game, dict):
            game = None
        self = cls.__new__(cls)
        self.directory = Path(directory)
        self.game = game
        self.config = manifest.get("config", {})
        self.manifest = manifest
        return self

    def _clear(self):
        for child in self.directory.iterdir():
            if child.suffix in (".cgs", ".tmp") or child.name in (MANIFEST, STATS):
                child.unlink()

    def _write_manifest(self):
        text = json.dumps(self.manifest, indent=1, sort_keys=True) + "\n"
        _atomic_write(self.directory / MANIFEST, text.encode())

    # -- sets ------------------------------------------------------------
    def has(self, name: str) -> bool:
        return name in self.manifest["sets"]

    def entry(self, name: str) -> dict:
        return self.manifest["sets"][name]

    def names(self) -> list[str]:
        return list(self.manifest["order"])

    def load(self, name: str) -> PositionSet:
        entry = self.manifest["sets"].get(name)
        if entry is None:
            raise CheckpointError(f"set {name} is not in the checkpoint")
        data = (self.directory / f"{name}.cgs").read_bytes()
        if hashlib.sha256(data).hexdigest() != entry["sha256"]:
            raise CheckpointError(f"content hash mismatch for {name}")
        return deserialize(data, self.game.alphabet if self.game is not None else None)

    def load_tagged(self, name: str) -> TaggedSet:
        from .games import Player
        entry = self.entry(name)
        return TaggedSet(
            self.load(name),
            Player.parse(entry["player"]),
            entry["kind"],
            _ply_value(entry["ply_forward"]),
            _ply_value(entry["ply_backward"]),
        )

    def save(self, tagged: TaggedSet, stat_ply=None):
        data = serialize(tagged.set)
        _atomic_write(self.directory / f"{tagged.name}.cgs", data)
        self.manifest["sets"][tagged.name] = {
            "kind": tagged.kind,
            "player": tagged.player.tag,
            "ply_forward": _ply_text(tagged.forward_ply),
            "ply_backward": _ply_text(tagged.backward_ply),
            "stat_ply_backward": _ply_text(tagged.backward_ply if stat_ply is None else stat_ply),
            "positions": str(tagged.set.count()),
            "states": tagged.set.num_states(),
            "sha256": hashlib.sha256(data).hexdigest(),
        }
        if tagged.name not in self.manifest["order"]:
            self.manifest["order"].append(tagged.name)
        self._write_manifest()

    # -- result ------------------------------------------------------------
    @property
    def result(self):
        return self.manifest.get("result")

    def set_result(self, result: dict):
        self.manifest["result"] = result
        self._write_manifest()
