"""Social-recovery state machine with M-of-N vouching and delay periods.

An account owner stores a recovery configuration naming a friend set, a
vouch threshold and a delay period, backed by a reserved deposit. A rescuer
opens recovery against a lost account by reserving a further deposit, the
honeypot: if the rescuer is an attacker, the still-alive owner closes the
recovery and keeps that deposit. Once enough friends vouch and the delay
has elapsed, the rescuer claims a proxy binding and can dispatch calls as
the lost account. Removing the configuration severs the binding and refunds
the configuration deposit.

Friends are referenced either in the clear (``plain``) or as salted hash
commitments (``committed``); one configuration uses exactly one mode and
committed friends stay hidden in the trace until they vouch.

Deposit sizing and the friend-count cap are `ProtocolConstants`, which
scenario files may override.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import commit as commitments
from .errors import (
    AlreadyRecoverable,
    AlreadyStarted,
    AlreadyVouched,
    DelayPeriod,
    MaxFriends,
    NotFriend,
    NotProxy,
    NotRecoverable,
    NotSorted,
    NotStarted,
    StillActive,
    Threshold,
    ThresholdTooLarge,
    ZeroThreshold,
)
from .ledger import AccountId, Balance, BlockNumber, Ledger

PLAIN = "plain"
COMMITTED = "committed"


@dataclass(frozen=True)
class ProtocolConstants:
    """Engine configuration; defaults keep hand-traced numbers small."""

    config_deposit_base: int = 10
    friend_deposit_factor: int = 1
    recovery_deposit: int = 10
    max_friends: int = 9

    def config_deposit(self, friend_count: int) -> int:
        return self.config_deposit_base + self.friend_deposit_factor * friend_count


@dataclass(frozen=True)
class FriendRef:
    """A friend entry: a plain account id or a hex commitment digest."""

    kind: str  # PLAIN or COMMITTED
    value: str

    @classmethod
    def plain(cls, account: AccountId) -> "FriendRef":
        return cls(PLAIN, account)

    @classmethod
    def committed(cls, digest: "bytes | str") -> "FriendRef":
        if isinstance(digest, (bytes, bytearray)):
            digest = bytes(digest).hex()
        digest = digest.lower()
        if len(digest) != 2 * commitments.COMMITMENT_LENGTH:
            raise ValueError(f"commitment must be 32 bytes, got {digest!r}")
        return cls(COMMITTED, digest)

    def rendered(self) -> str:
        return self.value


def canonical_friend_list(friends: "list[FriendRef]") -> tuple[FriendRef, ...]:
    """Validate canonical form: one mode, strictly ascending, no duplicates."""
    if not friends:
        raise ZeroThreshold("friend list is empty")
    kinds = {f.kind for f in friends}
    if len(kinds) != 1:
        raise NotSorted("friend list mixes plain and committed references")
    values = [f.value for f in friends]
    if any(a >= b for a, b in zip(values, values[1:])):
        raise NotSorted("friend list must be strictly ascending")
    return tuple(friends)


@dataclass
class RecoveryConfig:
    owner: AccountId
    friends: tuple[FriendRef, ...]
    threshold: int
    delay_period: int
    deposit: Balance

    @property
    def mode(self) -> str:
        return self.friends[0].kind

    def friend_values(self) -> frozenset[str]:
        return frozenset(f.value for f in self.friends)


@dataclass
class ActiveRecovery:
    lost: AccountId
    rescuer: AccountId
    created: BlockNumber
    deposit: Balance
    vouched: list[AccountId] = field(default_factory=list)


def claim_allowed(height: BlockNumber, created: BlockNumber,
                  delay_period: int) -> bool:
    """Inclusive boundary: claimable at exactly ``created + delay_period``."""
    return height >= created + delay_period


class SocialRecovery:
    """Recovery configurations, open recoveries and proxy bindings."""

    def __init__(self, ledger: Ledger, constants: ProtocolConstants) -> None:
        self.ledger = ledger
        self.constants = constants
        self.configs: dict[AccountId, RecoveryConfig] = {}
        self.active: dict[tuple[AccountId, AccountId], ActiveRecovery] = {}
        self.proxies: dict[AccountId, AccountId] = {}  # rescuer -> lost

    # -- configuration -----------------------------------------------------

    def create_recovery(self, owner: AccountId, friends: list[FriendRef],
                        threshold: int, delay_period: int) -> RecoveryConfig:
        if owner in self.configs:
            raise AlreadyRecoverable(owner)
        if threshold < 1:
            raise ZeroThreshold(str(threshold))
        if len(friends) > self.constants.max_friends:
            raise MaxFriends(f"{len(friends)} > {self.constants.max_friends}")
        if threshold > len(friends):
            raise ThresholdTooLarge(f"{threshold} > {len(friends)}")
        canonical = canonical_friend_list(list(friends))
        deposit = self.constants.config_deposit(len(canonical))
        self.ledger.reserve(owner, deposit)
        config = RecoveryConfig(owner, canonical, threshold, delay_period, deposit)
        self.configs[owner] = config
        self.ledger.emit("RecoveryCreated", {
            "owner": owner,
            "mode": config.mode,
            "friends": [f.rendered() for f in canonical],
            "threshold": threshold,
            "delay_period": delay_period,
            "deposit": deposit,
        })
        return config

    def remove_recovery(self, origin: AccountId) -> None:
        """Delete the configuration and sever every proxy binding onto it."""
        config = self.configs.get(origin)
        if config is None:
            raise NotRecoverable(origin)
        if any(lost == origin for (lost, _rescuer) in self.active):
            raise StillActive(origin)
        self.ledger.unreserve(origin, config.deposit)
        del self.configs[origin]
        severed = [r for r, lost in self.proxies.items() if lost == origin]
        for rescuer in severed:
            del self.proxies[rescuer]
        self.ledger.emit("RecoveryRemoved", {
            "owner": origin,
            "deposit_unreserved": config.deposit,
            "proxies_severed": severed,
        })

    # -- lifecycle -----------------------------------------------------------

    def initiate_recovery(self, rescuer: AccountId,
                          lost: AccountId) -> ActiveRecovery:
        if lost not in self.configs:
            raise NotRecoverable(lost)
        if (lost, rescuer) in self.active:
            raise AlreadyStarted(f"{rescuer} -> {lost}")
        deposit = self.constants.recovery_deposit
        self.ledger.reserve(rescuer, deposit)
        recovery = ActiveRecovery(lost, rescuer, self.ledger.height, deposit)
        self.active[(lost, rescuer)] = recovery
        self.ledger.emit("RecoveryInitiated", {
            "lost": lost,
            "rescuer": rescuer,
            "deposit": deposit,
        })
        return recovery

    def _active_for(self, lost: AccountId, rescuer: AccountId) -> ActiveRecovery:
        recovery = self.active.get((lost, rescuer))
        if recovery is None:
            raise NotStarted(f"{rescuer} -> {lost}")
        return recovery

    def vouch_recovery(self, friend: AccountId, lost: AccountId,
                       rescuer: AccountId) -> ActiveRecovery:
        recovery = self._active_for(lost, rescuer)
        config = self.configs[lost]
        if config.mode != PLAIN or friend not in config.friend_values():
            raise NotFriend(friend)
        if friend in recovery.vouched:
            raise AlreadyVouched(friend)
        recovery.vouched.append(friend)
        self.ledger.emit("RecoveryVouched", {
            "lost": lost,
            "rescuer": rescuer,
            "friend": friend,
        })
        return recovery

    def vouch_recovery_committed(self, friend: AccountId, salt: bytes,
                                 lost: AccountId,
                                 rescuer: AccountId) -> ActiveRecovery:
        """Vouch by revealing a committed friend's (id, salt) preimage.

        The trace carries only the commitment digest, never the plain id.
        """
        digest = commitments.commit_friend_hex(friend, salt)
        recovery = self._active_for(lost, rescuer)
        config = self.configs[lost]
        if config.mode != COMMITTED or digest not in config.friend_values():
            raise NotFriend(digest)
        if friend in recovery.vouched:
            raise AlreadyVouched(digest)
        recovery.vouched.append(friend)
        self.ledger.emit("RecoveryVouched", {
            "lost": lost,
            "rescuer": rescuer,
            "friend_commitment": digest,
        })
        return recovery

    def claim_recovery(self, rescuer: AccountId, lost: AccountId) -> None:
        recovery = self._active_for(lost, rescuer)
        config = self.configs[lost]
        if len(recovery.vouched) < config.threshold:
            raise Threshold(
                f"{len(recovery.vouched)} of {config.threshold} vouches")
        if not claim_allowed(self.ledger.height, recovery.created,
                             config.delay_period):
            raise DelayPeriod(
                f"claimable at {recovery.created + config.delay_period}, "
                f"height {self.ledger.height}")
        self.proxies[rescuer] = lost
        self.ledger.emit("RecoveryClaimed", {"lost": lost, "rescuer": rescuer})

    def close_recovery(self, origin: AccountId, rescuer: AccountId) -> None:
        """The lost account (or its proxy) stops a recovery and keeps the
        rescuer's deposit."""
        recovery = self.active.get((origin, rescuer))
        if recovery is None:
            raise NotStarted(f"{rescuer} -> {origin}")
        self.ledger.repatriate_reserved(rescuer, origin, recovery.deposit)
        del self.active[(origin, rescuer)]
        self.ledger.emit("RecoveryClosed", {
            "lost": origin,
            "rescuer": rescuer,
            "deposit_captured": recovery.deposit,
        })

    # -- proxy dispatch ------------------------------------------------------

    def require_proxy(self, rescuer: AccountId, lost: AccountId) -> None:
        if self.proxies.get(rescuer) != lost:
            raise NotProxy(f"{rescuer} -> {lost}")

    def root_set_recovered(self, lost: AccountId, rescuer: AccountId) -> None:
        """Governance failsafe: bind unconditionally, bypassing vouches and
        delay. Origin checking happens at the dispatch layer."""
        self.ledger.account(lost)
        self.ledger.account(rescuer)
        self.proxies[rescuer] = lost
        self.ledger.emit("RootOverride", {"lost": lost, "rescuer": rescuer})
