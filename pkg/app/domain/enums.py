"""
Centralized system enum definitions.

These enums drive branching logic (schema parsing, encoder selection, ranker
selection) and are referenced by the config schemas and the CLI choices.
"""
import enum


class InputSchema(str, enum.Enum):
    """How calendar days are read from a transaction CSV."""
    DAY = "day"
    GAP = "gap"
    DATE = "date"


class SetEncoderKind(str, enum.Enum):
    ISAB = "isab"
    PERM_EQ_MEAN = "perm_eq_mean"


class BaselineKind(str, enum.Enum):
    PERSONAL_TOP = "personal_top"
    TIFUKNN = "tifuknn"
    ORACLE = "oracle"


class MetricName(str, enum.Enum):
    PRECISION = "precision"
    RECALL = "recall"
    NDCG = "ndcg"


class Precision(str, enum.Enum):
    """Floating-point width of model tensors."""
    FLOAT32 = "float32"
    FLOAT64 = "float64"
