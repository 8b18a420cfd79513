"""
Single-auction mechanics walkthrough
====================================

One auction, three bidders, two reserve policies. Shows how the lazy and
eager rules pick different winners and prices from the same bids, where the
critical bid sits, and why ties resolve the way they do.
"""

from reservelab import BidProfile, Mechanism, ReserveVector, critical_bid, run_auction

profile = BidProfile("demo", {"alice": 7.0, "bob": 5.0, "carol": 3.0})
print(f"bids: {profile.bids}\n")

# --- Reserves that knock out the top bidder ---

reserves = ReserveVector({"alice": 8.0, "bob": 1.0, "carol": 2.0})
print(f"reserves: alice=8 bob=1 carol=2")
for mech in Mechanism:
    out = run_auction(profile, reserves, mech)
    print(f"  {mech.value:>5}: winner={out.winner} payment={out.payment}")
print("  lazy picks alice first, sees 7 < 8, and the item goes unsold;")
print("  eager removes alice up front, so bob wins at max(1, 3) = 3\n")

# --- Reserves that knock out the runner-up ---

reserves = ReserveVector({"alice": 2.0, "bob": 6.0, "carol": 1.0})
print(f"reserves: alice=2 bob=6 carol=1")
for mech in Mechanism:
    out = run_auction(profile, reserves, mech)
    print(f"  {mech.value:>5}: winner={out.winner} payment={out.payment}")
print("  lazy charges alice max(2, 5) = 5 because bob's bid still counts;")
print("  eager drops bob from the price computation, leaving max(2, 3) = 3\n")

# --- The critical bid: what the winner's price really is ---

for mech in Mechanism:
    for bidder in ("alice", "bob", "carol"):
        c = critical_bid(profile, reserves, bidder, mech)
        print(f"  {mech.value:>5} critical bid for {bidder}: {c}")
print("  bidding above the critical value wins at that price, below loses;")
print("  the winner's payment always equals her own critical bid\n")

# --- Tie-breaking and single-bidder conventions ---

tie = BidProfile("tie", {"x": 4.0, "y": 4.0})
out = run_auction(tie, ReserveVector.zero(), Mechanism.LAZY)
print(f"equal bids (4, 4): winner={out.winner} (smallest id wins, pays {out.payment})")

solo = BidProfile("solo", {"only": 9.0})
out = run_auction(solo, ReserveVector({"only": 2.5}), Mechanism.EAGER)
print(f"single bidder at reserve 2.5: pays {out.payment} (reserve, not a second bid)")
