"""Transaction CSV repository

Reads raw transaction logs into string-typed frames and writes histories back
out in the absolute-day schema (``user,item,day``).
"""
from pathlib import Path
from typing import IO, Iterable, Union

import pandas as pd

from app.data.models.history import UserHistory
from app.domain.exceptions import ConfigurationError, DataError

CsvSource = Union[str, Path, IO[str]]


class TransactionRepository:
    """CSV access for transaction logs. Every cell is read as text; validation happens in the ingest service."""

    def read_frame(self, source: CsvSource, columns: list[str]) -> pd.DataFrame:
        """
        Load the named columns of a UTF-8 CSV with a header row.

        Raises:
            ConfigurationError: a named column is absent from the header
            DataError: the file is empty or has no data rows
        """
        try:
            frame = pd.read_csv(source, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8")
        except pd.errors.EmptyDataError:
            raise DataError(f"transaction file {getattr(source, 'name', source)} is empty")
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise ConfigurationError(
                f"columns {missing} not found in header {list(frame.columns)}"
            )
        if frame.empty:
            raise DataError(f"transaction file {getattr(source, 'name', source)} has no data rows")
        return frame[columns]

    def write_day_schema(self, histories: Iterable[UserHistory], target: CsvSource) -> None:
        """Serialize histories as ``user,item,day`` rows (one row per purchased item per basket)."""
        rows = [
            (h.user_id, item, basket.day)
            for h in histories
            for basket in h.baskets
            for item in sorted(basket.items)
        ]
        pd.DataFrame(rows, columns=["user", "item", "day"]).to_csv(target, index=False)
