"""Export service writing run artifacts as CSV and JSON."""

import csv
import io
import json
import logging
import math
import os
from typing import Any, Iterable, List, Optional, Sequence

import aiofiles
import numpy as np

from app.models.analysis import AnalysisReport
from app.models.event import EventLog
from app.models.rank import RankVector
from app.schemas.rows import EvaluationRow

logger = logging.getLogger(__name__)

RANK_COLUMNS = ["node", "score", "rank"]
EVALUATION_COLUMNS = ["snapshot_end", "algorithm", "kendall_tau", "fagin_at_25"]
SNAPSHOT_COLUMNS = ["src", "dst", "event_count", "first_ts", "last_ts"]


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if math.isnan(value) else repr(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _jsonable(value: Any) -> Any:
    """Replace NaN by null and numpy scalars/arrays by plain Python values."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    if isinstance(value, np.integer):
        return int(value)
    return value


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_json(data: Any) -> str:
    return json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


class ExportService:
    """Service for exporting run artifacts under an output directory."""

    async def write_text(self, path: str, content: str) -> str:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        async with aiofiles.open(path, "w", encoding="utf-8", newline="") as f:
            await f.write(content)
        logger.debug(f"Wrote {path}")
        return path

    async def write_csv(self, path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        return await self.write_text(path, render_csv(columns, rows))

    async def write_json(self, path: str, data: Any) -> str:
        return await self.write_text(path, render_json(data))

    def rank_rows(self, vector: RankVector, log: EventLog) -> List[list]:
        """node, score, rank rows by descending score, ties broken by node id."""
        return [[log.labels[v], vector.scores[v], i + 1] for i, v in enumerate(vector.ordered())]

    def rank_metadata(self, vector: RankVector) -> dict:
        return {
            "algorithm": vector.algorithm.value,
            "snapshot": vector.spec.name,
            "window": [vector.spec.window_start, vector.spec.window_end],
            "nodes": len(vector.scores),
            "iterations": vector.iterations,
            "residual": vector.residual,
            "converged": vector.converged
        }

    async def export_rank(self, out_dir: str, vector: RankVector, log: EventLog, index: Optional[int] = None) -> str:
        i = vector.spec.index if index is None else index
        base = os.path.join(out_dir, "ranks", f"{vector.algorithm.value}_{i:03d}")
        await self.write_json(f"{base}.json", self.rank_metadata(vector))
        return await self.write_csv(f"{base}.csv", RANK_COLUMNS, self.rank_rows(vector, log))

    async def export_evaluation(self, path: str, rows: Sequence[EvaluationRow]) -> str:
        return await self.write_csv(
            path,
            EVALUATION_COLUMNS,
            ([r.snapshot_end, r.algorithm, r.kendall_tau, r.fagin_at_25] for r in rows)
        )

    async def export_report(self, out_dir: str, report: AnalysisReport) -> str:
        base = os.path.join(out_dir, "analysis", report.name)
        await self.write_json(f"{base}.json", {
            "name": report.name,
            "summary": report.summary,
            "warnings": report.warnings,
            "skipped": report.skipped
        })
        return await self.write_csv(f"{base}.csv", report.columns, report.rows)

    def write_errors(self, out_dir: str, errors: List[dict], create: bool = True) -> Optional[str]:
        """Synchronous error manifest, usable after the event loop has stopped."""
        if not out_dir or (not create and not os.path.isdir(out_dir)):
            return None
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "errors.json")
        with open(path, "w", encoding="utf-8") as f:
            f.write(render_json({"errors": errors}))
        return path


# Singleton instance
export_service = ExportService()
