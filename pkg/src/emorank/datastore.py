"""File-backed storage for responses, profiles, models, and sessions.

Layout under the store root::

    responses.jsonl      one response per line
    profiles/<id>.json   candidate profiles
    models/<name>.json   cluster models
    sessions/<id>.json   elicitation sessions

Every write goes to a temp file in the same directory and is renamed into
place, so readers never observe a torn document. The store serializes its
own writes (single-writer contract); reads need no lock.

Response line format: ``{"candidate", "stimulus", "variant", "context",
"rating"}``. Published-table fixtures live under ``fixtures/paper/`` in
the package and preserve raw printed values; out-of-scale ratings are
flagged and clamped only on conversion to responses.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .config import EngineConfig
from .core import CandidateProfile, EmotionVector, PersonalityVector, ResponseExpression
from .errors import DuplicateResponse, ParseError, StorageError, ValidationError
from .evaluation import RankComparison
from .learning import ClusterModel, model_from_dict, model_to_dict
from .validation import clamp_rating

STORE_SCHEMA_VERSION = 1


def response_to_dict(resp: ResponseExpression) -> dict:
    return {
        "candidate": resp.candidate_id,
        "stimulus": resp.stimulus_id,
        "variant": resp.variant_id,
        "context": resp.context_id,
        "rating": resp.rating,
    }


def response_from_dict(raw: dict) -> ResponseExpression:
    try:
        return ResponseExpression(
            candidate_id=raw["candidate"],
            stimulus_id=raw["stimulus"],
            variant_id=raw["variant"],
            context_id=raw["context"],
            rating=int(raw["rating"]),
        )
    except KeyError as exc:
        raise ParseError(f"response line missing key {exc}") from exc


def profile_to_dict(profile: CandidateProfile) -> dict:
    return {
        "version": STORE_SCHEMA_VERSION,
        "candidate_id": profile.candidate_id,
        "pv": list(profile.pv.values),
        "support": list(profile.pv.support),
        "ev": list(profile.ev.values),
        "emotional_class": profile.emotional_class,
    }


def profile_from_dict(raw: dict) -> CandidateProfile:
    if raw.get("version") != STORE_SCHEMA_VERSION:
        raise ValidationError("profile document must declare a known version")
    return CandidateProfile(
        candidate_id=raw["candidate_id"],
        pv=PersonalityVector(
            values=tuple(float(v) for v in raw["pv"]),
            support=tuple(bool(s) for s in raw["support"]),
        ),
        ev=EmotionVector(tuple(float(v) for v in raw["ev"])),
        emotional_class=raw.get("emotional_class"),
    )


class ProfileStore:
    """Directory-backed store with atomic writes and duplicate checking."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._write_lock = threading.Lock()
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            for sub in ("profiles", "models", "sessions"):
                (self.root / sub).mkdir(exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot initialize store at {self.root}: {exc}") from exc

    # -- low-level ---------------------------------------------------------

    def _atomic_write(self, path: Path, text: str) -> None:
        try:
            fd, tmp_name = tempfile.mkstemp(
                dir=path.parent, prefix=path.name + ".", suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(text)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp_name, path)
            except BaseException:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise
        except OSError as exc:
            raise StorageError(f"cannot write {path}: {exc}") from exc

    def _read_json(self, path: Path) -> dict | None:
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed document {path}: {exc}") from exc

    # -- responses ---------------------------------------------------------

    @property
    def responses_path(self) -> Path:
        return self.root / "responses.jsonl"

    def load_responses(self) -> list[ResponseExpression]:
        """All stored responses in insertion order."""
        if not self.responses_path.exists():
            return []
        out = []
        try:
            with self.responses_path.open(encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    out.append(response_from_dict(json.loads(line)))
        except OSError as exc:
            raise StorageError(f"cannot read responses: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed responses file: {exc}") from exc
        return out

    def append_responses(self, responses: list[ResponseExpression]) -> int:
        """Durably append responses; duplicates leave the store unchanged."""
        with self._write_lock:
            existing = self.load_responses()
            seen = {(r.candidate_id, *r.stimulus_key) for r in existing}
            for resp in responses:
                key = (resp.candidate_id, *resp.stimulus_key)
                if key in seen:
                    raise DuplicateResponse(f"response already stored for {key}")
                seen.add(key)
            lines = [json.dumps(response_to_dict(r)) for r in existing + list(responses)]
            text = "\n".join(lines) + ("\n" if lines else "")
            self._atomic_write(self.responses_path, text)
            return len(responses)

    # -- profiles ----------------------------------------------------------

    def save_profile(self, profile: CandidateProfile) -> None:
        with self._write_lock:
            path = self.root / "profiles" / f"{profile.candidate_id}.json"
            self._atomic_write(path, json.dumps(profile_to_dict(profile), indent=2))

    def load_profile(self, candidate_id: str) -> CandidateProfile | None:
        raw = self._read_json(self.root / "profiles" / f"{candidate_id}.json")
        return profile_from_dict(raw) if raw is not None else None

    # -- models ------------------------------------------------------------

    def save_model(self, name: str, model: ClusterModel) -> None:
        with self._write_lock:
            path = self.root / "models" / f"{name}.json"
            self._atomic_write(path, json.dumps(model_to_dict(model), indent=2))

    def load_model(self, name: str) -> ClusterModel | None:
        raw = self._read_json(self.root / "models" / f"{name}.json")
        return model_from_dict(raw) if raw is not None else None

    # -- sessions ----------------------------------------------------------

    def save_session(self, session_id: str, document: dict) -> None:
        if "version" not in document:
            raise ValidationError("session document must carry a version")
        with self._write_lock:
            path = self.root / "sessions" / f"{session_id}.json"
            self._atomic_write(path, json.dumps(document, indent=2))

    def load_session(self, session_id: str) -> dict | None:
        return self._read_json(self.root / "sessions" / f"{session_id}.json")

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "sessions").glob("*.json"))


# -- published-table fixtures ------------------------------------------------


@dataclass(frozen=True)
class Table1Fixture:
    """Raw printed ratings of 10 candidates over five word clusters."""

    context_id: str
    rating_max: int
    groups: dict[str, tuple[int, ...]]
    rows: tuple[tuple[int, tuple[int, ...]], ...]  # (candidate number, ratings)

    def out_of_range_cells(self) -> list[tuple[int, int, int]]:
        """(candidate, cluster, raw value) cells outside the printed scale."""
        flagged = []
        for candidate, ratings in self.rows:
            for cluster, value in enumerate(ratings, start=1):
                if not 0 <= value <= self.rating_max:
                    flagged.append((candidate, cluster, value))
        return flagged

    def to_responses(self, config: EngineConfig) -> list[ResponseExpression]:
        """Clamped responses: one per (candidate, cluster) cell."""
        out = []
        for candidate, ratings in self.rows:
            for cluster, value in enumerate(ratings, start=1):
                out.append(
                    ResponseExpression(
                        candidate_id=f"candidate-{candidate:02d}",
                        stimulus_id="news-title",
                        variant_id=f"cluster-{cluster}",
                        context_id=self.context_id,
                        rating=clamp_rating(value, config),
                    )
                )
        return out


@dataclass(frozen=True)
class TableFixtures:
    """Parsed bundle of the three published result tables."""

    table1: Table1Fixture
    table2: RankComparison
    table3: dict[int, int]


def fixtures_root() -> Path:
    """Directory of the packaged fixture files."""
    return Path(resources.files("emorank") / "fixtures")


def load_table_fixtures(path: str | Path | None = None) -> TableFixtures:
    """Load the published-table fixture bundle (packaged copy by default)."""
    root = Path(path) if path is not None else fixtures_root() / "paper"

    def read(name: str) -> dict:
        target = root / name
        try:
            raw = json.loads(target.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ParseError(f"cannot read fixture {target}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed fixture {target}: {exc}") from exc
        if raw.get("version") != STORE_SCHEMA_VERSION:
            raise ValidationError(f"fixture {name} must declare version 1")
        return raw

    t1 = read("table1.json")
    try:
        table1 = Table1Fixture(
            context_id=t1["context"],
            rating_max=int(t1["rating_max"]),
            groups={name: tuple(members) for name, members in t1["groups"].items()},
            rows=tuple(
                (int(row["candidate"]), tuple(int(v) for v in row["ratings"]))
                for row in t1["rows"]
            ),
        )
        t2 = read("table2.json")
        table2 = RankComparison(
            tuple((int(r["expected"]), int(r["actual"])) for r in t2["rows"])
        )
        t3 = read("table3.json")
        table3 = {int(c["label"]): int(c["accuracy"]) for c in t3["classes"]}
    except (KeyError, TypeError) as exc:
        raise ParseError(f"fixture bundle malformed: {exc}") from exc
    for label, pct in table3.items():
        if not 0 <= pct <= 100:
            raise ValidationError(f"table3 class {label} accuracy {pct} out of range")
    return TableFixtures(table1=table1, table2=table2, table3=table3)
