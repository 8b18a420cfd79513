"""Bid logs: an ordered collection of auctions over a shared bidder universe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .mechanics import BidProfile
from .vectorized import ABSENT


@dataclass
class BidLog:
    """Ordered list of auctions. auction_ids must be distinct.

    bidder_ids is the sorted universe of every bidder appearing anywhere in
    the log; matrix columns follow this order.
    """

    profiles: list[BidProfile]
    bidder_ids: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        seen = set()
        for p in self.profiles:
            if p.auction_id in seen:
                raise ValueError(f"duplicate auction_id {p.auction_id!r}")
            seen.add(p.auction_id)
        universe = set()
        for p in self.profiles:
            universe.update(p.bids)
        self.bidder_ids = tuple(sorted(universe))
        self._matrix = None

    def __len__(self) -> int:
        return len(self.profiles)

    def to_matrix(self) -> np.ndarray:
        """(T, n) bid matrix, columns in bidder_ids order, -inf where absent. Cached."""
        if self._matrix is None:
            col = {b: j for j, b in enumerate(self.bidder_ids)}
            m = np.full((len(self.profiles), len(self.bidder_ids)), ABSENT)
            for i, p in enumerate(self.profiles):
                for bidder, bid in p.bids.items():
                    m[i, col[bidder]] = bid
            self._matrix = m
        return self._matrix

    @staticmethod
    def from_matrix(bids: np.ndarray, bidder_ids: Sequence[str],
                    auction_ids: Iterable[str] | None = None) -> "BidLog":
        """Inverse of to_matrix; -inf entries are absent bidders."""
        T = bids.shape[0]
        if auction_ids is None:
            width = max(5, len(str(max(T - 1, 0))))
            auction_ids = (f"a{i:0{width}d}" for i in range(T))
        profiles = []
        for i, aid in zip(range(T), auction_ids):
            row = bids[i]
            present = row != ABSENT
            profiles.append(BidProfile(aid, {bidder_ids[j]: float(row[j])
                                             for j in np.flatnonzero(present)}))
        return BidLog(profiles)
