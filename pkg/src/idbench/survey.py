"""Survey sessions: question sampling, answer recording, crash-safe storage,
and export of pipeline-ready ratings CSVs.

Each session asks 18 direct questions (Likert relatedness + similarity) and
15 indirect ones (forced choice against a blanked code context). Storage is
an append-only JSONL event log per session; export replays the log.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import ConfigError, ConflictError, NotFoundError, ValidationError
from .model import (
    CodeContext,
    DirectRating,
    Identifier,
    IdentifierPair,
    IndirectRating,
    write_direct_ratings,
    write_indirect_ratings,
)

DIRECT_QUESTIONS = 18
INDIRECT_QUESTIONS = 15

BLANK_RENDERING = "____"


@dataclass
class QuestionPool:
    """Candidate pairs plus per-identifier context pools."""

    pairs: list[IdentifierPair]
    contexts: dict[str, list[CodeContext]] = field(default_factory=dict)

    def context_eligible(self) -> list[IdentifierPair]:
        return [
            pair for pair in self.pairs
            if self.contexts.get(pair.id1.text) or self.contexts.get(pair.id2.text)
        ]


@dataclass
class IndirectQuestion:
    pair: IdentifierPair
    context_owner: str  # "id1" | "id2"
    context: CodeContext


@dataclass
class SurveySession:
    session_id: str
    participant: str
    direct_questions: list[IdentifierPair]
    indirect_questions: list[IndirectQuestion]
    direct_answers: list[tuple[int, int] | None] = field(default_factory=list)
    indirect_answers: list[str | None] = field(default_factory=list)

    def __post_init__(self):
        if not self.direct_answers:
            self.direct_answers = [None] * len(self.direct_questions)
        if not self.indirect_answers:
            self.indirect_answers = [None] * len(self.indirect_questions)

    @property
    def state(self) -> str:
        done = all(a is not None for a in self.direct_answers) and \
            all(a is not None for a in self.indirect_answers)
        return "complete" if done else "in_progress"


def create_session(pool: QuestionPool, participant: str, seed: int | None = None,
                   session_id: str | None = None) -> SurveySession:
    """Sample a session's questions from the pool (without replacement within
    the session). The context owner is drawn uniformly among the pair's
    identifiers that have contexts, then one of the owner's contexts uniformly."""
    import random

    rng = random.Random(seed)
    if len(pool.pairs) < DIRECT_QUESTIONS:
        raise ConfigError(
            f"pool has {len(pool.pairs)} pairs, {DIRECT_QUESTIONS} needed for the direct survey")
    eligible = pool.context_eligible()
    if len(eligible) < INDIRECT_QUESTIONS:
        raise ConfigError(
            f"pool has {len(eligible)} pairs with contexts, {INDIRECT_QUESTIONS} needed")

    direct = rng.sample(pool.pairs, DIRECT_QUESTIONS)
    indirect = []
    for pair in rng.sample(eligible, INDIRECT_QUESTIONS):
        owners = [
            slot for slot in ("id1", "id2")
            if pool.contexts.get(getattr(pair, slot).text)
        ]
        owner = rng.choice(owners)
        context = rng.choice(pool.contexts[getattr(pair, owner).text])
        indirect.append(IndirectQuestion(pair=pair, context_owner=owner, context=context))

    return SurveySession(
        session_id=session_id or uuid.uuid4().hex[:16],
        participant=participant,
        direct_questions=direct,
        indirect_questions=indirect,
    )


def submit_direct(session: SurveySession, index: int, relatedness: int, similarity: int) -> None:
    if not 0 <= index < len(session.direct_questions):
        raise NotFoundError(f"no direct question {index}")
    for name, value in (("relatedness", relatedness), ("similarity", similarity)):
        if not isinstance(value, int) or not 1 <= value <= 5:
            raise ValidationError(f"{name} must be an integer in 1..5, got {value!r}")
    if session.direct_answers[index] is not None:
        raise ConflictError(f"direct question {index} already answered")
    session.direct_answers[index] = (relatedness, similarity)


def submit_indirect(session: SurveySession, index: int, chosen: str) -> None:
    if not 0 <= index < len(session.indirect_questions):
        raise NotFoundError(f"no indirect question {index}")
    if chosen not in ("id1", "id2"):
        raise ValidationError(f"chosen must be 'id1' or 'id2', got {chosen!r}")
    if session.indirect_answers[index] is not None:
        raise ConflictError(f"indirect question {index} already answered")
    session.indirect_answers[index] = chosen


# ── persistence ──────────────────────────────────────────────────


class SurveyStore:
    """Sessions backed by one append-only JSONL event log per session.

    Per-session writes are serialized; export takes a store-wide snapshot.
    """

    def __init__(self, data_dir: str | Path, pool: QuestionPool,
                 base_seed: int | None = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.pool = pool
        self.base_seed = base_seed
        self.sessions: dict[str, SurveySession] = {}
        self._lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._created = 0
        self._load()

    def _log_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def _load(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            session = _replay_events(path)
            if session is not None:
                self.sessions[session.session_id] = session
                self._session_locks[session.session_id] = threading.Lock()
        self._created = len(self.sessions)

    def create(self, participant: str) -> SurveySession:
        with self._lock:
            seed = None if self.base_seed is None else self.base_seed + self._created
            self._created += 1
            session = create_session(self.pool, participant, seed=seed)
            self.sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()
            with open(self._log_path(session.session_id), "w", encoding="utf-8") as log:
                log.write(json.dumps(_session_created_event(session)) + "\n")
            return session

    def get(self, session_id: str) -> SurveySession:
        session = self.sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return session

    def _append(self, session_id: str, event: dict) -> None:
        with open(self._log_path(session_id), "a", encoding="utf-8") as log:
            log.write(json.dumps(event) + "\n")

    def answer_direct(self, session_id: str, index: int,
                      relatedness: int, similarity: int) -> SurveySession:
        session = self.get(session_id)
        with self._session_locks[session_id]:
            submit_direct(session, index, relatedness, similarity)
            self._append(session_id, {
                "type": "direct", "index": index,
                "relatedness": relatedness, "similarity": similarity,
            })
        return session

    def answer_indirect(self, session_id: str, index: int, chosen: str) -> SurveySession:
        session = self.get(session_id)
        with self._session_locks[session_id]:
            submit_indirect(session, index, chosen)
            self._append(session_id, {"type": "indirect", "index": index, "chosen": chosen})
        return session

    def export_ratings(self, include_partial: bool = False) -> tuple[str, str]:
        """Direct and indirect ratings CSVs; complete sessions only unless
        ``include_partial`` is set."""
        with self._lock:
            sessions = list(self.sessions.values())
        direct_rows: list[DirectRating] = []
        indirect_rows: list[IndirectRating] = []
        pairs: dict[str, IdentifierPair] = {}
        for session in sessions:
            if not include_partial and session.state != "complete":
                continue
            for pair, answer in zip(session.direct_questions, session.direct_answers):
                if answer is None:
                    continue
                pairs.setdefault(pair.pair_id, pair)
                direct_rows.append(DirectRating(
                    participant=session.participant, pair_id=pair.pair_id,
                    relatedness=answer[0], similarity=answer[1]))
            for question, answer in zip(session.indirect_questions, session.indirect_answers):
                if answer is None:
                    continue
                pairs.setdefault(question.pair.pair_id, question.pair)
                indirect_rows.append(IndirectRating(
                    participant=session.participant, pair_id=question.pair.pair_id,
                    context_owner=question.context_owner, chosen=answer))
        direct_out = io.StringIO()
        indirect_out = io.StringIO()
        write_direct_ratings(direct_rows, pairs, direct_out)
        write_indirect_ratings(indirect_rows, pairs, indirect_out)
        return direct_out.getvalue(), indirect_out.getvalue()


def _session_created_event(session: SurveySession) -> dict:
    return {
        "type": "created",
        "session_id": session.session_id,
        "participant": session.participant,
        "direct": [
            {"id1": p.id1.text, "id2": p.id2.text, "pair_id": p.pair_id}
            for p in session.direct_questions
        ],
        "indirect": [
            {
                "id1": q.pair.id1.text, "id2": q.pair.id2.text, "pair_id": q.pair.pair_id,
                "owner": q.context_owner,
                "context": {
                    "owner": q.context.owner.text,
                    "lines": list(q.context.lines),
                    "blanks": [list(slot) for slot in q.context.blank_slots],
                },
            }
            for q in session.indirect_questions
        ],
    }


def _replay_events(path: Path) -> SurveySession | None:
    session: SurveySession | None = None
    with open(path, encoding="utf-8") as log:
        for line in log:
            if not line.strip():
                continue
            event = json.loads(line)
            if event["type"] == "created":
                direct = [
                    IdentifierPair(Identifier(q["id1"]), Identifier(q["id2"]), q["pair_id"])
                    for q in event["direct"]
                ]
                indirect = [
                    IndirectQuestion(
                        pair=IdentifierPair(
                            Identifier(q["id1"]), Identifier(q["id2"]), q["pair_id"]),
                        context_owner=q["owner"],
                        context=CodeContext(
                            owner=Identifier(q["context"]["owner"]),
                            lines=tuple(q["context"]["lines"]),
                            blank_slots=tuple(
                                tuple(slot) for slot in q["context"]["blanks"]),
                        ),
                    )
                    for q in event["indirect"]
                ]
                session = SurveySession(
                    session_id=event["session_id"],
                    participant=event["participant"],
                    direct_questions=direct,
                    indirect_questions=indirect,
                )
            elif session is not None and event["type"] == "direct":
                session.direct_answers[event["index"]] = (
                    event["relatedness"], event["similarity"])
            elif session is not None and event["type"] == "indirect":
                session.indirect_answers[event["index"]] = event["chosen"]
    return session


# ── client-facing views ──────────────────────────────────────────


def session_view(session: SurveySession) -> dict:
    """JSON view served to participants: contexts pre-blanked, the context
    owner never revealed."""
    return {
        "session_id": session.session_id,
        "participant": session.participant,
        "state": session.state,
        "direct": [
            {
                "index": i,
                "id1": pair.id1.text,
                "id2": pair.id2.text,
                "answered": session.direct_answers[i] is not None,
            }
            for i, pair in enumerate(session.direct_questions)
        ],
        "indirect": [
            {
                "index": i,
                "id1": question.pair.id1.text,
                "id2": question.pair.id2.text,
                "lines": question.context.blanked_lines(BLANK_RENDERING),
                "answered": session.indirect_answers[i] is not None,
            }
            for i, question in enumerate(session.indirect_questions)
        ],
    }


def load_pairs_csv(stream: Iterable[str]) -> list[IdentifierPair]:
    """Pairs from a CSV whose first two columns are id1,id2 (header optional,
    extra columns ignored)."""
    pairs = []
    seen = set()
    for lineno, raw in enumerate(stream, start=1):
        row = raw.rstrip("\n")
        if not row:
            continue
        fields = row.split(",")
        if lineno == 1 and fields[0] == "id1":
            continue
        if len(fields) < 2:
            raise ValidationError(f"line {lineno}: expected at least 2 columns")
        pair = IdentifierPair(Identifier(fields[0]), Identifier(fields[1]))
        if pair.pair_id not in seen:
            seen.add(pair.pair_id)
            pairs.append(pair)
    return pairs
