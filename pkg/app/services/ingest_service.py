"""Ingestion of timestamped event CSVs into an EventLog."""

import csv
import io
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from app.core.exceptions import EmptySourceError, EventParseError
from app.models.event import ActionEvent, EventLog
from app.schemas.rows import EventFormat, EventRow

logger = logging.getLogger(__name__)

HEADER = ["actor", "kind", "target_node", "target_post", "timestamp"]


def _describe(error: ValidationError) -> str:
    """Flatten a pydantic error into a one-line message."""
    parts = []
    for item in error.errors():
        loc = ".".join(str(p) for p in item.get("loc", ())) or "row"
        parts.append(f"{loc}: {item.get('msg')}")
    return "; ".join(parts)


class IngestService:
    """Service for reading and writing event logs."""

    def ingest_events(
        self,
        source: Union[bytes, str, io.IOBase],
        fmt: Optional[EventFormat] = None
    ) -> EventLog:
        """Parse a CSV event source; rows are sorted by timestamp, stable on input order."""
        fmt = fmt or EventFormat()
        text = self._read_text(source, fmt.encoding)

        reader = csv.reader(io.StringIO(text), delimiter=fmt.delimiter)
        header = next(reader, None)
        if header is None:
            raise EmptySourceError("Event source is empty")
        header = [h.strip().lstrip("\ufeff") for h in header]
        if header != HEADER:
            raise EventParseError(1, f"expected header {','.join(HEADER)}, got {','.join(header)}")

        rows: List[EventRow] = []
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(HEADER):
                raise EventParseError(reader.line_num, f"expected {len(HEADER)} fields, got {len(record)}")
            try:
                rows.append(EventRow(**dict(zip(HEADER, (cell.strip() for cell in record)))))
            except ValidationError as e:
                raise EventParseError(reader.line_num, _describe(e))

        if not rows:
            raise EmptySourceError("Event source has no data rows")

        log = self.build_log(rows)
        logger.info(f"Ingested {len(log.events)} events over {log.node_count} nodes, days {log.t_min}-{log.t_max}")
        return log

    def ingest_file(self, path: Union[str, Path], fmt: Optional[EventFormat] = None) -> EventLog:
        with open(path, "rb") as f:
            return self.ingest_events(f.read(), fmt)

    def build_log(self, rows: Iterable[EventRow]) -> EventLog:
        """Sort rows by day (stable) and register node labels in order of first appearance."""
        ordered = sorted(rows, key=lambda row: row.timestamp)
        index: Dict[str, int] = {}

        def register(label: str) -> int:
            if label not in index:
                index[label] = len(index)
            return index[label]

        events = []
        for row in ordered:
            actor = register(row.actor)
            target = register(row.target_node) if row.target_node is not None else None
            events.append(ActionEvent(
                actor=actor,
                kind=row.kind,
                target_node=target,
                target_post=row.target_post,
                timestamp=row.timestamp
            ))

        return EventLog(events=tuple(events), labels=tuple(index))

    def serialize_events(self, log: EventLog) -> bytes:
        """Write a log back in the ingest CSV schema."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(HEADER)
        for event in log.events:
            writer.writerow([
                log.labels[event.actor],
                event.kind.value,
                log.labels[event.target_node] if event.target_node is not None else "",
                event.target_post or "",
                event.timestamp
            ])
        return buffer.getvalue().encode("utf-8")

    @staticmethod
    def _read_text(source: Union[bytes, str, io.IOBase], encoding: str) -> str:
        if hasattr(source, "read"):
            source = source.read()
        if isinstance(source, bytes):
            try:
                return source.decode(encoding)
            except UnicodeDecodeError as e:
                line = source.count(b"\n", 0, e.start) + 1
                raise EventParseError(line, f"not valid {encoding}: {e.reason}") from e
        return source


# Singleton instance
ingest_service = IngestService()
