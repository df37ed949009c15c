"""
Line reader shared by every input-file parser.

Files are decoded line by line so an invalid UTF-8 sequence is reported as a
malformed record with its line number.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from utils.errors import MalformedRecordError


def iter_text_lines(path: str | Path) -> Iterator[str]:
    """Yield the decoded lines of a UTF-8 file, line endings included.

    Raises:
        MalformedRecordError: if a line is not valid UTF-8
    """
    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            try:
                yield raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedRecordError(
                    f"invalid UTF-8 at byte {e.start}", line_no, str(path)
                ) from None
