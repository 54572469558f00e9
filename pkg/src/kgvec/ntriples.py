"""Line-oriented N-Triples reader that keeps URI triples and drops everything else.

Large public dumps are dirty, so malformed lines are counted and skipped,
never fatal. Literal objects are likewise counted and discarded. Blank nodes
are kept, with their ``_:`` label standing in for a URI.
"""

from __future__ import annotations

import gzip
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
import re

GZIP_MAGIC = b"\x1f\x8b"

_URI = r"<[^>\s]*>"
_BNODE = r"_:\S+"
_LITERAL = r'"(?:[^"\\]|\\.)*"(?:\^\^<[^>\s]*>|@[A-Za-z][A-Za-z0-9-]*)?'

_LINE_RE = re.compile(
    rf"^\s*({_URI}|{_BNODE})\s+({_URI})\s+({_URI}|{_BNODE}|{_LITERAL})\s*\.\s*$"
)


@dataclass
class ParseStats:
    """Per-line accounting for one parse pass.

    Invariant: lines == triples + literals_discarded + malformed + blank_or_comment.
    """

    lines: int = 0
    triples: int = 0
    literals_discarded: int = 0
    malformed: int = 0
    blank_or_comment: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _strip_term(token: str) -> str:
    # URIs arrive bracketed; blank nodes keep their label verbatim.
    if token.startswith("<"):
        token = token[1:-1]
    return sys.intern(token)


def open_maybe_gzip(source) -> io.TextIOBase:
    """Open a path or binary stream as UTF-8 text, transparently gunzipping.

    Compression is detected from the 0x1F 0x8B magic bytes, not the filename.
    """
    if isinstance(source, (str, Path)):
        raw = open(source, "rb")
    else:
        raw = source
    buffered = raw if isinstance(raw, io.BufferedReader) else io.BufferedReader(raw)
    if buffered.peek(2)[:2] == GZIP_MAGIC:
        buffered = gzip.open(buffered, "rb")
    return io.TextIOWrapper(buffered, encoding="utf-8", errors="replace")


def parse_ntriples(source) -> tuple[list[tuple[str, str, str]], ParseStats]:
    """Parse N-Triples text into (subject, predicate, object) URI string triples.

    ``source`` is a path or a binary file object; gzip input is detected by
    magic bytes. Lines whose object is a literal are counted and skipped.
    Unparseable lines are counted as malformed and skipped. I/O errors
    (unreadable file, bad descriptor) propagate as OSError.
    """
    triples: list[tuple[str, str, str]] = []
    stats = ParseStats()
    with open_maybe_gzip(source) as handle:
        for line in handle:
            stats.lines += 1
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                stats.blank_or_comment += 1
                continue
            match = _LINE_RE.match(line)
            if match is None:
                stats.malformed += 1
                continue
            obj = match.group(3)
            if obj.startswith('"'):
                stats.literals_discarded += 1
                continue
            triples.append(
                (
                    _strip_term(match.group(1)),
                    _strip_term(match.group(2)),
                    _strip_term(obj),
                )
            )
            stats.triples += 1
    return triples, stats
