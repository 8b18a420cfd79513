"""Reserve-price optimization from bid logs.

The lazy problem decouples per bidder: bidder i's reserve only matters on the
auctions she would win at zero reserves, and there her lazy revenue is

    R_i(r) = r * k_i(r) + s_i(r)

with k_i(r) = #{auctions in Q_i : top >= r > second} and s_i(r) = sum of
seconds >= r. optimal_lazy maximizes R_i by a single ascending scan over the
distinct top/second values; optimal_lazy_bruteforce re-simulates every
candidate directly and exists as an independent check. The eager problem has
no such decoupling (it is as hard as maximum independent set), so the exact
optimizer is an exhaustive product search behind a size bound, with a
coordinate-ascent local search as the scalable alternative.

All optimizers report expected_revenue through the same exact evaluator
(empirical_revenue), so two routes that agree on the reserves agree on the
revenue bit for bit.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SearchSpaceTooLarge
from .logs import BidLog
from .mechanics import Mechanism, ReserveVector
from .vectorized import ABSENT, lazy_payments, payments


class CandidateSource(enum.Enum):
    """Where a chosen reserve value sits in the log's bid order statistics."""

    ZERO = "zero"
    FIRST_BID = "first_bid"
    SECOND_BID = "second_bid"


@dataclass(frozen=True)
class BidderDiagnostic:
    candidate_count: int
    source: CandidateSource


@dataclass(frozen=True)
class OptimizationResult:
    reserves: ReserveVector
    expected_revenue: float
    per_bidder_diagnostics: dict[str, BidderDiagnostic]


def _reserve_row(log: BidLog, reserves: ReserveVector) -> np.ndarray:
    return np.array([reserves.get(b) for b in log.bidder_ids])


def empirical_revenue(log: BidLog, reserves: ReserveVector, mechanism: Mechanism) -> float:
    """Mean payment per auction over the log. The one evaluator everything reports through."""
    if len(log) == 0:
        raise ValueError("empty log")
    pay = payments(log.to_matrix(), _reserve_row(log, reserves), mechanism)
    return math.fsum(pay.tolist()) / len(log)


def _first_second(log: BidLog):
    """Per auction: winner column at zero reserves, top bid, second-highest bid."""
    bids = log.to_matrix()
    rows = np.arange(bids.shape[0])
    winner = np.argmax(bids, axis=1)
    top = bids[rows, winner]
    rest = bids.copy()
    rest[rows, winner] = ABSENT
    second = rest.max(axis=1)
    second = np.where(np.isfinite(second), second, 0.0)
    return winner, top, second


def _classify(value: float, top_values) -> CandidateSource:
    # a candidate is always 0 or some auction's top/second bid; tops win the label
    if value == 0.0:
        return CandidateSource.ZERO
    if value in top_values:
        return CandidateSource.FIRST_BID
    return CandidateSource.SECOND_BID


def optimal_lazy(log: BidLog) -> OptimizationResult:
    """Exact optimal lazy reserves by the per-bidder ascending scan.

    For each bidder the candidates are {0} plus the distinct top/second values
    over the auctions she wins at zero reserves; the scan keeps (k, s) so that
    arriving at a value v it holds k = k_i(v), s = s_i(v), evaluates R_i(v),
    and only then applies v's own entry updates (a top at v leaves the count,
    a second at v enters it and leaves the sum). Ties break toward the
    smallest reserve. Bidders who never win at zero reserves keep reserve 0.
    """
    winner, top, second = _first_second(log)
    chosen: dict[str, float] = {}
    diags: dict[str, BidderDiagnostic] = {}
    for j, bidder in enumerate(log.bidder_ids):
        mask = winner == j
        if not mask.any():
            chosen[bidder] = 0.0
            diags[bidder] = BidderDiagnostic(1, CandidateSource.ZERO)
            continue
        tops = top[mask]
        seconds = second[mask]
        # entry stream: +1/-1 flags keyed by value; is_top True drops k, a second raises k and leaves s
        values = np.concatenate([tops, seconds])
        is_top = np.concatenate([np.ones(len(tops), bool), np.zeros(len(seconds), bool)])
        order = np.argsort(values, kind="stable")
        values, is_top = values[order], is_top[order]

        k = 0
        s = math.fsum(seconds.tolist())
        best_r, best_rev = 0.0, s  # candidate r = 0
        i = 0
        m = len(values)
        while i < m:
            v = values[i]
            if v > 0.0:
                rev = v * k + s
                if rev > best_rev:
                    best_r, best_rev = v, rev
            while i < m and values[i] == v:
                if is_top[i]:
                    k -= 1
                else:
                    k += 1
                    s -= v
                i += 1
        chosen[bidder] = float(best_r)
        n_candidates = len(np.unique(values)) + (0.0 not in values)
        diags[bidder] = BidderDiagnostic(int(n_candidates),
                                         _classify(chosen[bidder], set(tops.tolist())))
    reserves = ReserveVector(chosen)
    return OptimizationResult(reserves, empirical_revenue(log, reserves, Mechanism.LAZY), diags)


def optimal_lazy_bruteforce(log: BidLog, chunk: int = 256) -> OptimizationResult:
    """Optimal lazy reserves by direct re-simulation of every candidate.

    Same per-bidder decoupling, no incremental bookkeeping: for each candidate
    r the revenue over Q_i is summed from scratch. Slower than optimal_lazy
    by a factor of the candidate count; kept as an independent route to the
    same argmax and revenue.
    """
    winner, top, second = _first_second(log)
    chosen: dict[str, float] = {}
    diags: dict[str, BidderDiagnostic] = {}
    for j, bidder in enumerate(log.bidder_ids):
        mask = winner == j
        if not mask.any():
            chosen[bidder] = 0.0
            diags[bidder] = BidderDiagnostic(1, CandidateSource.ZERO)
            continue
        tops = top[mask]
        seconds = second[mask]
        cands = np.unique(np.concatenate([[0.0], tops, seconds]))  # ascending
        best_r, best_rev = 0.0, -np.inf
        for lo in range(0, len(cands), chunk):
            c = cands[lo:lo + chunk, None]
            rev = np.where(tops[None, :] >= c, np.maximum(c, seconds[None, :]), 0.0).sum(axis=1)
            i = int(np.argmax(rev))
            if rev[i] > best_rev:  # first strict max across chunks = smallest candidate on ties
                best_r, best_rev = float(c[i, 0]), float(rev[i])
        chosen[bidder] = best_r
        diags[bidder] = BidderDiagnostic(len(cands), _classify(best_r, set(tops.tolist())))
    reserves = ReserveVector(chosen)
    return OptimizationResult(reserves, empirical_revenue(log, reserves, Mechanism.LAZY), diags)


def monopoly_reserves(log: BidLog, mechanism: Mechanism = Mechanism.EAGER) -> OptimizationResult:
    """Per-bidder monopoly reserves: maximize r * #{own bids >= r} independently.

    Candidates are the bidder's own distinct bid values, ties toward the
    smallest. This ignores competition entirely; expected_revenue reports what
    the vector earns on the log under `mechanism` (eager by default), since
    the monopoly objective itself is not auction revenue.
    """
    bids = log.to_matrix()
    _, top, _ = _first_second(log)
    log_tops = set(top.tolist())
    chosen: dict[str, float] = {}
    diags: dict[str, BidderDiagnostic] = {}
    for j, bidder in enumerate(log.bidder_ids):
        vals = bids[:, j]
        vals = np.sort(vals[np.isfinite(vals)])
        cands = np.unique(vals)
        n_at_least = len(vals) - np.searchsorted(vals, cands, side="left")
        rev = cands * n_at_least
        i = int(np.argmax(rev))  # first max = smallest candidate
        chosen[bidder] = float(cands[i])
        diags[bidder] = BidderDiagnostic(len(cands), _classify(chosen[bidder], log_tops))
    reserves = ReserveVector(chosen)
    return OptimizationResult(reserves, empirical_revenue(log, reserves, mechanism), diags)


def _global_candidates(log: BidLog) -> np.ndarray:
    bids = log.to_matrix()
    vals = bids[np.isfinite(bids)]
    return np.unique(np.concatenate([[0.0], vals]))


def _eager_totals_for_rows(bids: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Summed eager revenue over all auctions for each reserve row in R (B, n)."""
    B = R.shape[0]
    rows = np.arange(B)
    totals = np.zeros(B)
    for t in range(bids.shape[0]):
        b = bids[t]
        masked = np.where(b[None, :] >= R, b[None, :], ABSENT)
        win = np.argmax(masked, axis=1)
        topv = masked[rows, win]
        sold = np.isfinite(topv)
        r_w = R[rows, win]
        masked[rows, win] = ABSENT
        comp = masked.max(axis=1)
        comp = np.where(np.isfinite(comp), comp, 0.0)
        totals += np.where(sold, np.maximum(r_w, comp), 0.0)
    return totals


def optimal_eager_exact(log: BidLog, max_product_size: int = 1_000_000) -> OptimizationResult:
    """Exhaustive eager optimum over the product of per-bidder candidate sets.

    Every bidder's candidates are {0} plus all distinct bid values in the log.
    Refuses (SearchSpaceTooLarge) when the product exceeds max_product_size.
    Ties break toward the lexicographically smallest reserve vector.
    """
    cands = _global_candidates(log)
    n = len(log.bidder_ids)
    size = len(cands) ** n
    if size > max_product_size:
        raise SearchSpaceTooLarge(
            f"{len(cands)}^{n} = {size} candidate vectors exceed max_product_size={max_product_size}")
    bids = log.to_matrix()
    _, top, _ = _first_second(log)
    log_tops = set(top.tolist())

    best_total = -np.inf
    best_vec = None
    buf: list[tuple] = []
    chunk = 1 << 14

    def flush():
        nonlocal best_total, best_vec
        if not buf:
            return
        R = np.array(buf)
        totals = _eager_totals_for_rows(bids, R)
        i = int(np.argmax(totals))
        if totals[i] > best_total:  # strict: earlier (lex smaller) vectors win ties
            best_total = float(totals[i])
            best_vec = R[i].copy()
        buf.clear()

    for combo in itertools.product(cands.tolist(), repeat=n):
        buf.append(combo)
        if len(buf) >= chunk:
            flush()
    flush()

    chosen = dict(zip(log.bidder_ids, (float(x) for x in best_vec)))
    diags = {b: BidderDiagnostic(len(cands), _classify(chosen[b], log_tops))
             for b in log.bidder_ids}
    reserves = ReserveVector(chosen)
    return OptimizationResult(reserves, empirical_revenue(log, reserves, Mechanism.EAGER), diags)


def eager_coordinate_ascent(log: BidLog, init: ReserveVector | None = None,
                            max_rounds: int = 50) -> OptimizationResult:
    """Local search for eager reserves: cycle bidders, re-optimize one reserve at a time.

    Bidders are cycled in ascending bidder_id order; each step scans the full
    candidate set ({0} plus all distinct log bids) for that bidder and moves
    only on strict improvement, preferring the smallest improving candidate.
    Stops after a full round improves total revenue by a relative factor
    below 1e-12, or after max_rounds rounds. Revenue never decreases, so the
    result is at least as good as the starting point.
    """
    if init is None:
        init = ReserveVector.zero()
    cands = _global_candidates(log)
    bids = log.to_matrix()
    _, top, _ = _first_second(log)
    log_tops = set(top.tolist())
    n = len(log.bidder_ids)
    current = np.array([init.get(b) for b in log.bidder_ids])
    current_total = float(_eager_totals_for_rows(bids, current[None, :])[0])

    for _ in range(max_rounds):
        round_start = current_total
        for j in range(n):
            R = np.tile(current, (len(cands), 1))
            R[:, j] = cands
            totals = _eager_totals_for_rows(bids, R)
            i = int(np.argmax(totals))  # first max = smallest candidate
            if totals[i] > current_total:
                current = R[i].copy()
                current_total = float(totals[i])
        gain = current_total - round_start
        if gain <= 1e-12 * max(1.0, abs(round_start)):
            break

    chosen = dict(zip(log.bidder_ids, (float(x) for x in current)))
    diags = {b: BidderDiagnostic(len(cands), _classify(chosen[b], log_tops))
             for b in log.bidder_ids}
    reserves = ReserveVector(chosen)
    return OptimizationResult(reserves, empirical_revenue(log, reserves, Mechanism.EAGER), diags)
