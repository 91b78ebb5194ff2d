"""Domain models."""

from app.models.event import ActionEvent, ActionKind, EventLog
from app.models.features import (
    ActivitySeries,
    CumulativeScores,
    CumulativeScoreTable,
    DsaSegment,
    DsaSeries,
    IntervalFeatures,
    TemporalInterval,
)
from app.models.snapshot import EdgePolicy, SnapshotGraph, SnapshotMode, SnapshotSpec
from app.models.rank import Algorithm, RankerConfig, RankingList, RankVector, TemporalWeights
from app.models.analysis import (
    AnalysisReport,
    AttachmentSeries,
    Ecdf,
    FuzzyClustering,
    PowerLawFit,
    ScoreTimeSeries,
    UserCategorySnapshot,
)

__all__ = [
    # Events
    "ActionEvent",
    "ActionKind",
    "EventLog",
    # Features
    "ActivitySeries",
    "CumulativeScores",
    "CumulativeScoreTable",
    "DsaSegment",
    "DsaSeries",
    "IntervalFeatures",
    "TemporalInterval",
    # Snapshots
    "EdgePolicy",
    "SnapshotGraph",
    "SnapshotMode",
    "SnapshotSpec",
    # Ranking
    "Algorithm",
    "RankerConfig",
    "RankingList",
    "RankVector",
    "TemporalWeights",
    # Analysis
    "AnalysisReport",
    "AttachmentSeries",
    "Ecdf",
    "FuzzyClustering",
    "PowerLawFit",
    "ScoreTimeSeries",
    "UserCategorySnapshot",
]
