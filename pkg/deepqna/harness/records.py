"""Line-delimited record files for worlds, question sets and score reports.

World file: one `{"record": "world", "size", "seed", "schema_version"}` line,
then one `{"record": "person", "name", "gender", "relations", "attributes"}`
line per person.

Question file: one QuestionSpec record per line
(`id`, `anchor`, `chain`, `surface`, `gold`, `answer_type`).

Score file: one `{"record": "summary", ...}` line with the scaffold,
aggregates, usage totals and config snapshot, then one
`{"record": "question", ...}` line per scored question.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence, Tuple, Union

from pydantic import ValidationError

from deepqna.models.report import ScoreReport
from deepqna.models.world import Person, QuestionSpec, WorldGraph, WorldSpec

logger = logging.getLogger(__name__)

WORLD_RECORD = "world"
PERSON_RECORD = "person"
SUMMARY_RECORD = "summary"
QUESTION_RECORD = "question"


class RecordError(ValueError):
    """A record file is missing or malformed."""


def _write_lines(path: Union[str, Path], records: Sequence[Dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True) + "\n")
    return path


def _read_lines(path: Union[str, Path]) -> Iterator[Tuple[int, Dict[str, Any]]]:
    path = Path(path)
    if not path.is_file():
        raise RecordError(f"Record file not found: {path}")
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise RecordError(f"{path}:{number}: invalid JSON: {e}") from e
        if not isinstance(record, dict):
            raise RecordError(f"{path}:{number}: expected an object")
        yield number, record


def save_world(world: WorldGraph, path: Union[str, Path]) -> Path:
    header = {"record": WORLD_RECORD, **world.spec.model_dump(mode="json")}
    people = [{"record": PERSON_RECORD, **p.model_dump(mode="json")} for p in world.persons]
    return _write_lines(path, [header] + people)


def load_world(path: Union[str, Path]) -> WorldGraph:
    """
    Read a world file.

    Raises:
        RecordError: If the file is missing or malformed
    """
    spec = None
    persons: List[Person] = []
    for number, record in _read_lines(path):
        kind = record.pop("record", None)
        try:
            if kind == WORLD_RECORD and spec is None:
                spec = WorldSpec.model_validate(record)
            elif kind == PERSON_RECORD:
                persons.append(Person.model_validate(record))
            else:
                raise RecordError(f"{path}:{number}: unexpected record {kind!r}")
        except ValidationError as e:
            raise RecordError(f"{path}:{number}: invalid {kind} record: {e}") from e
    if spec is None:
        raise RecordError(f"{path}: missing world record")
    return WorldGraph(spec=spec, persons=persons)


def save_questions(questions: Sequence[QuestionSpec], path: Union[str, Path]) -> Path:
    return _write_lines(path, [q.model_dump(mode="json") for q in questions])


def load_questions(path: Union[str, Path]) -> List[QuestionSpec]:
    """
    Read a question file.

    Raises:
        RecordError: If the file is missing or malformed
    """
    questions = []
    for number, record in _read_lines(path):
        try:
            questions.append(QuestionSpec.model_validate(record))
        except ValidationError as e:
            raise RecordError(f"{path}:{number}: invalid question record: {e}") from e
    logger.info(f"Loaded {len(questions)} questions from {path}")
    return questions


def score_records(report: ScoreReport) -> List[Dict[str, Any]]:
    """The machine-readable form of a score report."""
    summary = {
        "record": SUMMARY_RECORD,
        "scaffold": report.scaffold.value,
        "questions": len(report.scores),
        "aggregate": report.aggregate,
        "aggregate_exact_match": report.aggregate_exact_match,
        "per_metric": report.per_metric,
        "thread_count": report.usage.thread_count,
        "total_usage": report.usage.total.model_dump(mode="json"),
        "mean_completion_tokens": report.usage.mean_completion_tokens,
        "mean_reasoning_tokens": report.usage.mean_reasoning_tokens,
        "max_thread_completion_tokens": report.usage.max_thread_completion_tokens,
        "approximate": report.usage.approximate,
        "config": report.config,
    }
    questions = [{"record": QUESTION_RECORD, **s.model_dump(mode="json")} for s in report.scores]
    return [summary] + questions


def save_score_report(report: ScoreReport, path: Union[str, Path]) -> Path:
    return _write_lines(path, score_records(report))
