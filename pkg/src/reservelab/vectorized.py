"""Batch implementations of the auction mechanics on numpy arrays.

Bids are a (T, n) float array, one row per auction, one column per bidder in
ascending bidder_id order; -inf marks a bidder absent from an auction.
Reserves are either a single (n,) row applied to every auction or a (T, n)
array. Semantics match mechanics.run_lazy / run_eager exactly (same weak
inequalities, same smallest-column tie-break via first argmax); the scalar
functions stay the reference and the test suite cross-checks the two.
"""

from __future__ import annotations

import numpy as np

ABSENT = -np.inf


def _reserve_at(reserves: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    if reserves.ndim == 1:
        return reserves[cols]
    return reserves[rows, cols]


def lazy_payments(bids: np.ndarray, reserves: np.ndarray,
                  return_welfare: bool = False):
    """Per-auction payments under lazy reserves. Optionally also welfare."""
    reserves = np.asarray(reserves, dtype=float)
    T = bids.shape[0]
    rows = np.arange(T)
    winner = np.argmax(bids, axis=1)  # first max = smallest bidder_id
    top = bids[rows, winner]
    r_w = _reserve_at(reserves, rows, winner)
    sold = top >= r_w
    rest = bids.copy()
    rest[rows, winner] = ABSENT
    second = rest.max(axis=1)
    second = np.where(np.isfinite(second), second, 0.0)  # single participant
    payment = np.where(sold, np.maximum(r_w, second), 0.0)
    if not return_welfare:
        return payment
    welfare = np.where(sold, top, 0.0)
    return payment, welfare


def eager_payments(bids: np.ndarray, reserves: np.ndarray,
                   return_welfare: bool = False):
    """Per-auction payments under eager reserves. Optionally also welfare."""
    reserves = np.asarray(reserves, dtype=float)
    T = bids.shape[0]
    rows = np.arange(T)
    surviving = np.where(bids >= reserves, bids, ABSENT)  # absent never survives
    winner = np.argmax(surviving, axis=1)
    top = surviving[rows, winner]
    sold = np.isfinite(top)
    r_w = _reserve_at(reserves, rows, winner)
    surviving[rows, winner] = ABSENT
    second = surviving.max(axis=1)
    second = np.where(np.isfinite(second), second, 0.0)  # sole survivor pays reserve
    payment = np.where(sold, np.maximum(r_w, second), 0.0)
    if not return_welfare:
        return payment
    welfare = np.where(sold, top, 0.0)
    return payment, welfare


def payments(bids: np.ndarray, reserves: np.ndarray, mechanism,
             return_welfare: bool = False):
    from .mechanics import Mechanism

    fn = lazy_payments if mechanism is Mechanism.LAZY else eager_payments
    return fn(bids, reserves, return_welfare)
