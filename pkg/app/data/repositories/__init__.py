"""Repository layer - file-backed persistence"""
from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.data.repositories.history_repository import HistoryRepository
from app.data.repositories.report_repository import ReportRepository
from app.data.repositories.transaction_repository import TransactionRepository

__all__ = [
    "CheckpointRepository",
    "HistoryRepository",
    "ReportRepository",
    "TransactionRepository",
]
