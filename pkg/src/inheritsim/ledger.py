"""Simulated single-chain ledger: accounts, balances, block clock, trace.

All protocol state in this package hangs off one ledger instance. The
ledger itself stays small: accounts with free/reserved balances, a monotone
block height, an append-only trace of tagged events, and per-block hooks
that the richer modules (deadman switches, reminder notifications) register
at engine construction time.

Determinism contract: two ledgers driven by the same call sequence produce
byte-identical serialized traces. Nothing here draws randomness or reads
wall clocks; hooks run in registration order at every height.

Block model: a dispatch made at height ``h`` lands in block ``h``. Hooks
for block ``h`` run after the dispatches of that block. ``advance_blocks``
walks empty blocks (hooks only); the scenario engine uses the
``enter_block`` / ``run_block_hooks`` pair to place dispatches before the
hooks of their block.

Balances are plain integers of the smallest currency unit. Arithmetic is
checked: any operation that would drive a component negative raises, and
amounts must be nonnegative ints (a ``ValueError`` otherwise, since that is
a caller bug rather than a protocol outcome).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import (
    DuplicateAccount,
    InsufficientFree,
    InsufficientReserved,
    UnknownAccount,
)

AccountId = str
Balance = int
BlockNumber = int

Hook = Callable[[BlockNumber], None]


@dataclass
class Account:
    """One on-ledger account; total = free + reserved, both nonnegative."""

    id: AccountId
    free: Balance
    reserved: Balance = 0

    @property
    def total(self) -> Balance:
        return self.free + self.reserved


@dataclass(frozen=True)
class TraceEvent:
    """Append-only trace entry, totally ordered by (block, seq)."""

    block: BlockNumber
    seq: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        obj = {"block": self.block, "seq": self.seq, "kind": self.kind,
               "payload": self.payload}
        return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def serialize_trace(events: Iterable[TraceEvent]) -> str:
    """UTF-8 JSON lines, one event per line, trailing newline."""
    lines = [event.to_json() for event in events]
    return "\n".join(lines) + ("\n" if lines else "")


def _check_amount(amount: int) -> None:
    if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
        raise ValueError(f"amounts must be nonnegative integers, got {amount!r}")


class Ledger:
    """Accounts, block clock and event trace for one simulated chain."""

    def __init__(self) -> None:
        self.accounts: dict[AccountId, Account] = {}
        self.height: BlockNumber = 0
        self.trace: list[TraceEvent] = []
        self._hooks: list[Hook] = []
        self._seq = 0

    # -- trace and hooks --------------------------------------------------

    def emit(self, kind: str, payload: dict) -> TraceEvent:
        event = TraceEvent(self.height, self._seq, kind, payload)
        self._seq += 1
        self.trace.append(event)
        return event

    def register_hook(self, hook: Hook) -> None:
        """Hooks run once per block in registration order."""
        self._hooks.append(hook)

    # -- accounts ----------------------------------------------------------

    def account(self, who: AccountId) -> Account:
        try:
            return self.accounts[who]
        except KeyError:
            raise UnknownAccount(who) from None

    def create_account(self, who: AccountId, endowment: Balance) -> Account:
        """Mint a new account with ``endowment`` free units.

        The only operation that changes total issuance. Meant for genesis
        and scenario setup.
        """
        _check_amount(endowment)
        if not who:
            raise ValueError("account id must be non-empty")
        if who in self.accounts:
            raise DuplicateAccount(who)
        account = Account(id=who, free=endowment)
        self.accounts[who] = account
        self.emit("AccountCreated", {"id": who, "endowment": endowment})
        return account

    def transfer(self, frm: AccountId, to: AccountId, amount: Balance) -> None:
        _check_amount(amount)
        src = self.account(frm)
        dst = self.account(to)
        if src.free < amount:
            raise InsufficientFree(f"{frm}: free {src.free} < {amount}")
        src.free -= amount
        dst.free += amount
        self.emit("Transferred", {"from": frm, "to": to, "amount": amount})

    def reserve(self, who: AccountId, amount: Balance) -> None:
        _check_amount(amount)
        account = self.account(who)
        if account.free < amount:
            raise InsufficientFree(f"{who}: free {account.free} < {amount}")
        account.free -= amount
        account.reserved += amount
        self.emit("Reserved", {"who": who, "amount": amount})

    def unreserve(self, who: AccountId, amount: Balance) -> None:
        _check_amount(amount)
        account = self.account(who)
        if account.reserved < amount:
            raise InsufficientReserved(
                f"{who}: reserved {account.reserved} < {amount}")
        account.reserved -= amount
        account.free += amount
        self.emit("Unreserved", {"who": who, "amount": amount})

    def repatriate_reserved(self, frm: AccountId, to: AccountId,
                            amount: Balance) -> None:
        """Move ``amount`` from ``frm``'s reserved into ``to``'s free.

        Traced as an unreserve followed by a transfer, which is the exact
        balance decomposition of the move.
        """
        _check_amount(amount)
        src = self.account(frm)
        self.account(to)
        if src.reserved < amount:
            raise InsufficientReserved(
                f"{frm}: reserved {src.reserved} < {amount}")
        self.unreserve(frm, amount)
        self.transfer(frm, to, amount)

    def total_issuance(self) -> Balance:
        return sum(a.free + a.reserved for a in self.accounts.values())

    # -- clock ---------------------------------------------------------------

    def advance_blocks(self, n: int) -> BlockNumber:
        """Walk ``n`` empty blocks, running hooks at each new height."""
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"advance_blocks needs a positive int, got {n!r}")
        for _ in range(n):
            self.enter_block()
            self.run_block_hooks()
        return self.height

    def enter_block(self) -> BlockNumber:
        """Increment the height without running hooks (dispatches first)."""
        self.height += 1
        return self.height

    def run_block_hooks(self) -> None:
        """Finalize the current block: run every registered hook at it."""
        for hook in self._hooks:
            hook(self.height)
