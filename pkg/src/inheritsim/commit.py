"""Salted hash commitments that hide friend identities until they vouch.

A friend is listed in a recovery configuration not by account id but by
``SHA-256(domain tag || id bytes || salt bytes)``. Whoever holds the salt
can later reveal ``(id, salt)`` to prove membership; until then the public
trace shows only 32-byte digests.

Salts are always supplied by the scenario, never generated here, so runs
stay deterministic. All functions are pure.
"""

from __future__ import annotations

import hashlib

from .errors import BadSaltLength

DOMAIN_TAG = b"inherit-friend-v1"
SALT_LENGTH = 16
COMMITMENT_LENGTH = 32


def commit_friend(account: str, salt: bytes) -> bytes:
    """Commitment digest for ``account`` under ``salt`` (exactly 16 bytes)."""
    check_salt(salt)
    digest = hashlib.sha256()
    digest.update(DOMAIN_TAG)
    digest.update(account.encode("utf-8"))
    digest.update(salt)
    return digest.digest()


def commit_friend_hex(account: str, salt: bytes) -> str:
    return commit_friend(account, salt).hex()


def check_salt(salt: bytes) -> None:
    if not isinstance(salt, (bytes, bytearray)) or len(salt) != SALT_LENGTH:
        raise BadSaltLength(f"salt must be exactly {SALT_LENGTH} bytes")


def salt_from_hex(text: str) -> bytes:
    """Decode a scenario-file salt; malformed hex counts as a bad salt."""
    try:
        salt = bytes.fromhex(text)
    except ValueError:
        raise BadSaltLength(f"salt is not valid hex: {text!r}") from None
    check_salt(salt)
    return salt
