"""Data models - plain record types shared across layers"""
from app.data.models.batch import Batch
from app.data.models.example import CadenceSignal, Example
from app.data.models.history import Basket, UserHistory
from app.data.models.transaction import Transaction

__all__ = [
    "Basket",
    "Batch",
    "CadenceSignal",
    "Example",
    "Transaction",
    "UserHistory",
]
