"""Services module."""

from app.services.ingest_service import IngestService, ingest_service
from app.services.snapshot_service import SnapshotService, snapshot_service
from app.services.feature_service import FeatureService, feature_service
from app.services.ranking_service import RankingService, ranking_service
from app.services.evaluation_service import EvaluationService, evaluation_service
from app.services.analysis_service import AnalysisService, analysis_service

__all__ = [
    "IngestService",
    "ingest_service",
    "SnapshotService",
    "snapshot_service",
    "FeatureService",
    "feature_service",
    "RankingService",
    "ranking_service",
    "EvaluationService",
    "evaluation_service",
    "AnalysisService",
    "analysis_service",
]
