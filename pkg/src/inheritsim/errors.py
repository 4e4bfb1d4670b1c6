"""Protocol error taxonomy.

Every rule violation raised by the engine is a `DispatchError` subclass.
The subclass NAME is the stable error identifier: it is what scenario files
put in their ``expect`` field and what the CLI prints in mismatch reports.
Renaming a class here is a wire-format change.
"""

from __future__ import annotations


class DispatchError(Exception):
    """Base for all protocol-level failures (never a bug signal)."""

    @property
    def ident(self) -> str:
        return type(self).__name__


# ledger

class DuplicateAccount(DispatchError):
    pass


class UnknownAccount(DispatchError):
    pass


class InsufficientFree(DispatchError):
    pass


class InsufficientReserved(DispatchError):
    pass


# recovery

class AlreadyRecoverable(DispatchError):
    pass


class NotSorted(DispatchError):
    """Friend list is not in canonical form (strictly ascending, no
    duplicates, single reference mode)."""


class MaxFriends(DispatchError):
    pass


class ThresholdTooLarge(DispatchError):
    pass


class ZeroThreshold(DispatchError):
    pass


class NotRecoverable(DispatchError):
    pass


class AlreadyStarted(DispatchError):
    pass


class NotFriend(DispatchError):
    pass


class AlreadyVouched(DispatchError):
    pass


class NotStarted(DispatchError):
    pass


class Threshold(DispatchError):
    """Too few vouches to claim."""


class DelayPeriod(DispatchError):
    """Claim attempted before the delay period elapsed."""


class BadOrigin(DispatchError):
    pass


class StillActive(DispatchError):
    pass


class NotProxy(DispatchError):
    pass


# friend commitments

class BadSaltLength(DispatchError):
    pass


# soulbound tokens

class NonTransferable(DispatchError):
    pass


class UnknownToken(DispatchError):
    pass


class NotIssuer(DispatchError):
    pass


# deadman switch

class AlreadyArmed(DispatchError):
    pass


class ZeroPeriod(DispatchError):
    pass


class NotArmed(DispatchError):
    pass


class UnknownSwitch(DispatchError):
    pass


class AlreadyFired(DispatchError):
    pass


# inheritance plans

class SharesDontSumToOne(DispatchError):
    """Beneficiary shares must be strictly positive rationals summing to 1."""


class DuplicateBeneficiary(DispatchError):
    pass


class UnknownPlan(DispatchError):
    pass


class RoundingImpossible(DispatchError):
    """Defensive guard around the share apportionment; never expected."""


def error_identifiers() -> frozenset[str]:
    """Names of every dispatch error, i.e. the legal ``expect`` values
    besides ``"Ok"``."""
    idents = set()
    stack = [DispatchError]
    while stack:
        cls = stack.pop()
        for sub in cls.__subclasses__():
            idents.add(sub.__name__)
            stack.append(sub)
    return frozenset(idents)
