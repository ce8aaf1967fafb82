"""PER / CER scoring, length buckets and result tables."""

from app.metrics.edit import align, edit_distance, error_counts, error_rate, metric_name
from app.metrics.buckets import ScoreCell, bucket_by_length, score_buckets
from app.metrics.report import Report, make_report, sample_table
from app.metrics.scripts import cross_script_insertions

__all__ = [
    "Report",
    "ScoreCell",
    "align",
    "bucket_by_length",
    "cross_script_insertions",
    "edit_distance",
    "error_counts",
    "error_rate",
    "make_report",
    "metric_name",
    "sample_table",
    "score_buckets",
]
