"""UTC timestamps, overridable for reproducible runs.

Setting CAPASSESS_CLOCK to an ISO 8601 instant pins every timestamp the
package records. This exists so scripted pipelines produce byte-identical
artifacts; leave it unset in real deployments.
"""

from __future__ import annotations

import os
from datetime import datetime, timezone

from .errors import ValidationError

CLOCK_ENV = "CAPASSESS_CLOCK"


def now_iso() -> str:
    """Current UTC time as an ISO 8601 string with a Z suffix."""
    pinned = os.environ.get(CLOCK_ENV)
    if pinned:
        return _normalize(pinned)
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _normalize(raw: str) -> str:
    try:
        parsed = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise ValidationError(f"{CLOCK_ENV} must be an ISO 8601 instant, got {raw!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
