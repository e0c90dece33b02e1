"""CASE network: cadence encoder, set encoders, scorer and ranker"""
from app.domain.model.network import CaseNetwork, CaseOutput, build_network, case_forward, restore_network
from app.domain.model.ranker import CaseRanker, rank

__all__ = [
    "CaseNetwork",
    "CaseOutput",
    "CaseRanker",
    "build_network",
    "case_forward",
    "rank",
    "restore_network",
]
