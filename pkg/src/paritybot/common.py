"""Small shared helpers: RFC 3339 timestamps, integer percentages, canonical JSON."""

import json
from datetime import datetime, timezone

from .errors import ParityError


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive values are taken as UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ParityError("MALFORMED_TIMESTAMP", f"not an RFC 3339 timestamp: {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def format_rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def integer_percent(part: int, total: int) -> int:
    """Whole-number percentage, rounding halves away from zero.

    `round()` would round half to even; reports use the away-from-zero
    convention, so this is done in exact integer arithmetic.
    """
    if total <= 0:
        raise ParityError("UNDEFINED_SHARE", "percentage of an empty total is undefined")
    if part < 0 or part > total:
        raise ParityError("UNDEFINED_SHARE", f"part {part} outside [0, {total}]")
    return (200 * part + total) // (2 * total)


def dump_json(payload) -> str:
    """Canonical pretty JSON used by both the CLI and the HTTP service, so the
    two produce byte-identical report bodies."""
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def compact_json(payload) -> bytes:
    """Canonical compact JSON for wire bodies (no whitespace, UTF-8)."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
