"""Deterministic reference rankers"""
from app.domain.baselines.oracle import DueDateOracleRanker
from app.domain.baselines.personal_top import PersonalTopRanker, personal_top_rank
from app.domain.baselines.tifuknn import TifuKnnRanker, TifuPopulation, tifu_build_vector, tifu_rank

__all__ = [
    "DueDateOracleRanker",
    "PersonalTopRanker",
    "TifuKnnRanker",
    "TifuPopulation",
    "personal_top_rank",
    "tifu_build_vector",
    "tifu_rank",
]
