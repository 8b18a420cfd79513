"""Bid-log and reserve-file serialization, plus revenue/welfare lift reports.

Bids travel as decimal strings with at most 6 fractional digits (micros).
Parsing is strict: anything that is not a plain non-negative micro decimal is
rejected with its 1-based line number. Values are capped at 1e9 (1e15 micros)
so that micros -> float -> micros round trips are exact in both directions.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import LogParseError
from .logs import BidLog
from .mechanics import BidProfile, Mechanism, ReserveVector
from .optimize import monopoly_reserves, optimal_lazy
from .vectorized import payments

_BID_RE = re.compile(r"^(\d+)(?:\.(\d{1,6}))?$")
MAX_MICROS = 10 ** 15  # 1e9 units; beyond this float round trips stop being exact
LOG_HEADER = "auction_id,bidder_id,bid"
RESERVE_HEADER = "bidder_id,reserve"


def parse_bid_token(token: str, line_number: int = 0) -> float:
    """Decimal string -> float, micro precision, non-negative, bounded."""
    m = _BID_RE.match(token)
    if m is None:
        raise LogParseError(f"bad bid {token!r}: want a non-negative decimal with "
                            f"at most 6 fractional digits", line_number)
    micros = int(m.group(1)) * 10 ** 6 + int((m.group(2) or "").ljust(6, "0") or "0")
    if micros > MAX_MICROS:
        raise LogParseError(f"bid {token!r} exceeds the 1e9 cap", line_number)
    return micros / 10 ** 6


def is_micro(x: float) -> bool:
    """True when x is exactly representable as a bounded micro decimal."""
    if not (isinstance(x, float) or isinstance(x, int)) or isinstance(x, bool):
        return False
    if math.isnan(x) or math.isinf(x) or x < 0:
        return False
    micros = round(x * 10 ** 6)
    return micros <= MAX_MICROS and micros / 10 ** 6 == x


def quantize_value(x: float) -> float:
    """Round x to the nearest micro. Raises on NaN/inf/negative/out-of-range."""
    if math.isnan(x) or math.isinf(x) or x < 0:
        raise ValueError(f"cannot quantize {x!r}")
    micros = round(x * 10 ** 6)
    if micros > MAX_MICROS:
        raise ValueError(f"{x!r} exceeds the 1e9 cap")
    return micros / 10 ** 6


def format_micro(x: float) -> str:
    """Canonical decimal string for a micro-representable value."""
    if not is_micro(x):
        raise ValueError(f"{x!r} is not representable at micro precision")
    q, r = divmod(round(x * 10 ** 6), 10 ** 6)
    return str(q) if r == 0 else f"{q}.{r:06d}".rstrip("0")


def quantize_log(log: BidLog) -> BidLog:
    """Copy of the log with every bid rounded to micro precision."""
    return BidLog([BidProfile(p.auction_id, {b: quantize_value(v) for b, v in p.bids.items()})
                   for p in log.profiles])


def _infer_format(path: str, format: Optional[str]) -> str:
    if format is not None:
        fmt = format.lower()
    elif path.endswith(".csv"):
        fmt = "csv"
    elif path.endswith(".jsonl"):
        fmt = "jsonl"
    else:
        raise ValueError(f"cannot infer log format from {path!r}; pass format='csv' or 'jsonl'")
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown log format {fmt!r}")
    return fmt


def _read_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    return text.splitlines()


def _one_csv_row(line: str, line_number: int, n_fields: int) -> list[str]:
    rows = list(csv.reader([line]))
    if len(rows) != 1 or len(rows[0]) != n_fields:
        raise LogParseError(f"malformed row (want {n_fields} fields): {line!r}", line_number)
    return rows[0]


def _records_from_csv(lines: list[str]):
    if not lines:
        raise LogParseError("empty log file")
    if lines[0] != LOG_HEADER:
        raise LogParseError(f"bad header {lines[0]!r}: want {LOG_HEADER!r}", 1)
    for i, line in enumerate(lines[1:], start=2):
        aid, bidder, token = _one_csv_row(line, i, 3)
        yield i, aid, bidder, parse_bid_token(token, i)


def _records_from_jsonl(lines: list[str]):
    if not lines:
        raise LogParseError("empty log file")
    for i, line in enumerate(lines, start=1):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise LogParseError(f"invalid JSON: {e.msg}", i) from None
        if not isinstance(obj, dict) or set(obj) != {"auction_id", "bidder_id", "bid"}:
            raise LogParseError("object must have exactly the keys "
                                "auction_id, bidder_id, bid", i)
        aid, bidder, bid = obj["auction_id"], obj["bidder_id"], obj["bid"]
        if isinstance(bid, str):
            value = parse_bid_token(bid, i)
        elif isinstance(bid, int) and not isinstance(bid, bool):
            if bid < 0 or bid * 10 ** 6 > MAX_MICROS:
                raise LogParseError(f"bid {bid} out of range [0, 1e9]", i)
            value = float(bid)
        else:
            raise LogParseError(f"bid must be a decimal string or integer, got {bid!r}", i)
        yield i, aid, bidder, value


def parse_log(path: str, format: Optional[str] = None) -> BidLog:
    """Read a CSV or JSONL bid log. Auctions keep first-seen order."""
    fmt = _infer_format(path, format)
    lines = _read_lines(path)
    records = _records_from_csv(lines) if fmt == "csv" else _records_from_jsonl(lines)
    groups: dict[str, dict[str, float]] = {}
    seen: set[tuple[str, str]] = set()
    for i, aid, bidder, value in records:
        if not isinstance(aid, str) or not aid:
            raise LogParseError(f"bad auction_id {aid!r}", i)
        if not isinstance(bidder, str) or not bidder:
            raise LogParseError(f"bad bidder_id {bidder!r}", i)
        if (aid, bidder) in seen:
            raise LogParseError(f"duplicate (auction_id, bidder_id) = ({aid!r}, {bidder!r})", i)
        seen.add((aid, bidder))
        groups.setdefault(aid, {})[bidder] = value
    if not groups:
        raise LogParseError("log has a header but no data rows")
    return BidLog([BidProfile(aid, bids) for aid, bids in groups.items()])


def _bid_str(value: float, quantize: bool) -> str:
    if quantize and not is_micro(value):
        value = quantize_value(value)
    return format_micro(value)


def write_log(log: BidLog, path: str, format: Optional[str] = None,
              quantize: bool = False) -> None:
    """Write a bid log; raises on bids that are not micro decimals unless quantize=True."""
    fmt = _infer_format(path, format)
    lines = []
    if fmt == "csv":
        lines.append(LOG_HEADER)
        for p in log.profiles:
            for bidder in sorted(p.bids):
                lines.append(f"{p.auction_id},{bidder},{_bid_str(p.bids[bidder], quantize)}")
    else:
        for p in log.profiles:
            for bidder in sorted(p.bids):
                lines.append(json.dumps({"auction_id": p.auction_id, "bidder_id": bidder,
                                         "bid": _bid_str(p.bids[bidder], quantize)}))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_reserves(path: str) -> ReserveVector:
    """Read a `bidder_id,reserve` CSV. The token `inf` excludes a bidder."""
    lines = _read_lines(path)
    if not lines:
        raise LogParseError("empty reserve file")
    if lines[0] != RESERVE_HEADER:
        raise LogParseError(f"bad header {lines[0]!r}: want {RESERVE_HEADER!r}", 1)
    reserves: dict[str, float] = {}
    for i, line in enumerate(lines[1:], start=2):
        bidder, token = _one_csv_row(line, i, 2)
        if not bidder:
            raise LogParseError("empty bidder_id", i)
        if bidder in reserves:
            raise LogParseError(f"duplicate bidder_id {bidder!r}", i)
        reserves[bidder] = math.inf if token == "inf" else parse_bid_token(token, i)
    return ReserveVector(reserves)


def write_reserves(reserves: ReserveVector, path: str, quantize: bool = False) -> None:
    lines = [RESERVE_HEADER]
    for bidder in sorted(reserves.reserves):
        r = reserves.reserves[bidder]
        token = "inf" if math.isinf(r) else _bid_str(r, quantize)
        lines.append(f"{bidder},{token}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _rev_welfare(log: BidLog, reserves: ReserveVector, mechanism: Mechanism) -> tuple[float, float]:
    bids = log.to_matrix()
    row = [reserves.get(b) for b in log.bidder_ids]
    pay, wel = payments(bids, row, mechanism, return_welfare=True)
    T = len(log)
    return math.fsum(pay.tolist()) / T, math.fsum(wel.tolist()) / T


RESERVE_SOURCES = ("rstar_l", "monopoly")


@dataclass(frozen=True)
class LiftReport:
    """Revenue lifts and welfare losses of reserve vectors against the zero-reserve baseline.

    Raw per-auction revenues are stored; deltas and normalizations are
    derived views. `delta_difference` computes eager-minus-lazy revenue at one
    reserve source directly (not as a difference of deltas), so it matches a
    fresh simulation bit for bit.
    """

    slot: str
    rev0: float
    wel0: float
    revenue: dict[str, float]  # keys "lazy:rstar_l", "eager:monopoly", ...
    welfare: dict[str, float]
    reserves: dict[str, ReserveVector]

    def delta(self, mechanism: Mechanism, source: str) -> float:
        return self.revenue[f"{mechanism.value}:{source}"] - self.rev0

    def welfare_loss(self, mechanism: Mechanism, source: str) -> float:
        return self.wel0 - self.welfare[f"{mechanism.value}:{source}"]

    def delta_difference(self, source: str) -> float:
        return self.revenue[f"eager:{source}"] - self.revenue[f"lazy:{source}"]

    @property
    def normalizer(self) -> float:
        return self.delta(Mechanism.LAZY, "rstar_l")

    @property
    def welfare_normalizer(self) -> float:
        return self.welfare_loss(Mechanism.LAZY, "rstar_l")

    @property
    def normalization_available(self) -> bool:
        return self.normalizer > 0.0

    @property
    def welfare_normalization_available(self) -> bool:
        return self.welfare_normalizer > 0.0


def compute_lift_report(log: BidLog, slot: str) -> LiftReport:
    """Lifts of the optimal lazy reserves and the monopoly reserves on one log."""
    rev0, wel0 = _rev_welfare(log, ReserveVector.zero(), Mechanism.LAZY)
    vectors = {"rstar_l": optimal_lazy(log).reserves,
               "monopoly": monopoly_reserves(log).reserves}
    revenue: dict[str, float] = {}
    welfare: dict[str, float] = {}
    for source, rv in vectors.items():
        for mech in (Mechanism.LAZY, Mechanism.EAGER):
            rev, wel = _rev_welfare(log, rv, mech)
            revenue[f"{mech.value}:{source}"] = rev
            welfare[f"{mech.value}:{source}"] = wel
    return LiftReport(slot, rev0, wel0, revenue, welfare, vectors)


_CELLS = [(Mechanism.LAZY, "rstar_l"), (Mechanism.EAGER, "rstar_l"),
          (Mechanism.LAZY, "monopoly"), (Mechanism.EAGER, "monopoly")]
_LIFT_HEADER = ("slot\tbasis\tdelta_lazy_rstar_l\tdelta_eager_rstar_l\t"
                "delta_lazy_monopoly\tdelta_eager_monopoly")


def _lift_tsv(reports: Iterable[LiftReport], cell, available, normalizer) -> str:
    lines = [_LIFT_HEADER]
    for rep in reports:
        raw = [cell(rep, mech, src) for mech, src in _CELLS]
        lines.append("\t".join([rep.slot, "raw"] + [f"{v:.10g}" for v in raw]))
        if available(rep):
            norm = [v / normalizer(rep) for v in raw]
            lines.append("\t".join([rep.slot, "normalized"] + [f"{v:.10g}" for v in norm]))
        else:
            lines.append("\t".join([rep.slot, "normalization_unavailable"] + [""] * len(raw)))
    return "\n".join(lines) + "\n"


def lift_revenue_tsv(reports: Iterable[LiftReport]) -> str:
    """Revenue-lift table: raw deltas plus the same normalized so lazy-at-rstar = 1."""
    return _lift_tsv(reports, LiftReport.delta,
                     lambda r: r.normalization_available, lambda r: r.normalizer)


def lift_welfare_tsv(reports: Iterable[LiftReport]) -> str:
    """Welfare-loss table, normalized so the lazy-at-rstar loss = 1 when positive."""
    return _lift_tsv(reports, LiftReport.welfare_loss,
                     lambda r: r.welfare_normalization_available, lambda r: r.welfare_normalizer)
