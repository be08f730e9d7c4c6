"""Corpus persistence.

A corpus is either a directory of `.txt` files (file name is the id, first
line is the title, the rest is the body) or a single JSONL file with one
`{"id", "title", "body"}` record per line.
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

from pydantic import ValidationError

from deepqna.corpus.index import CorpusError
from deepqna.models.document import Document

logger = logging.getLogger(__name__)

DOCUMENT_EXTENSION = ".txt"


def load_corpus(path: Union[str, Path]) -> List[Document]:
    """
    Load documents from a directory or a JSONL file.

    Directory files are read in file-name order.

    Raises:
        FileNotFoundError: If the path does not exist
        CorpusError: If a record is malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus not found: {path}")

    if path.is_dir():
        files = sorted(path.glob(f"*{DOCUMENT_EXTENSION}"))
        try:
            documents = [Document.from_file(f) for f in files]
        except ValueError as e:
            raise CorpusError(str(e)) from e
    else:
        documents = []
        for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                documents.append(Document.model_validate(json.loads(line)))
            except (json.JSONDecodeError, ValidationError) as e:
                raise CorpusError(f"{path}:{number}: invalid document record: {e}") from e

    logger.info(f"Loaded {len(documents)} documents from {path}")
    return documents


def save_corpus(documents: Sequence[Document], path: Union[str, Path]) -> Path:
    """
    Save documents; a path ending in `.jsonl` gets a records file, anything else a directory.

    Returns:
        The written path
    """
    path = Path(path)
    if path.suffix == ".jsonl":
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as f:
            for doc in documents:
                f.write(doc.model_dump_json() + "\n")
    else:
        path.mkdir(parents=True, exist_ok=True)
        for doc in documents:
            (path / f"{doc.id}{DOCUMENT_EXTENSION}").write_text(doc.to_text(), encoding="utf-8")
    logger.info(f"Saved {len(documents)} documents to {path}")
    return path
