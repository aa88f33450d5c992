"""Text protocol between the run loop and language-model agents: triplet
serialization, proposal parsing and verdict-token parsing."""
import enum
import json
import re
from dataclasses import dataclass

import numpy as np

from ..rank1 import Rank1Update, apply_sign_convention

__all__ = [
    "ProposalError",
    "ProposalParseError",
    "ProposalInvalidError",
    "VerdictParseError",
    "Verdict",
    "AgentVerdict",
    "serialize_triplet",
    "parse_rank1_response",
    "parse_verdict",
]


class ProposalError(ValueError):
    """A solver response that cannot be used; triggers regeneration."""


class ProposalParseError(ProposalError):
    pass


class ProposalInvalidError(ProposalError):
    pass


class VerdictParseError(ValueError):
    pass


class Verdict(str, enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"
    CONTINUE = "Continue"
    STOP = "Stop"


RANK1_VERDICTS = (Verdict.ACCEPT, Verdict.REJECT)
STOP_VERDICTS = (Verdict.CONTINUE, Verdict.STOP)


@dataclass(frozen=True)
class AgentVerdict:
    kind: Verdict
    rationale: str = None

    @property
    def accepted(self):
        return self.kind is Verdict.ACCEPT

    @property
    def stop(self):
        return self.kind is Verdict.STOP


def _fmt(x, precision):
    return repr(float(x)) if precision is None else f"{x:.{precision}f}"


def serialize_triplet(upd, precision=None):
    """JSON text ``{"s": ..., "u": [...], "v": [...]}``.

    ``precision=None`` writes full round-trip floats; an integer fixes the
    number of decimals (used for prompt text).
    """
    def vec(x):
        return "[" + ", ".join(_fmt(c, precision) for c in x) + "]"

    return f'{{"s": {_fmt(upd.s, precision)}, "u": {vec(upd.u)}, "v": {vec(upd.v)}}}'


def _first_json_object(text):
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", text):
        try:
            obj, _ = decoder.raw_decode(text, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    raise ProposalParseError("no JSON object found in solver response")


def _vector(obj, key, n):
    val = obj.get(key)
    if not isinstance(val, list) or len(val) != n:
        got = len(val) if isinstance(val, list) else type(val).__name__
        raise ProposalInvalidError(f"'{key}' must be a list of {n} numbers, got {got}")
    try:
        arr = np.array([float(x) for x in val])
    except (TypeError, ValueError):
        raise ProposalInvalidError(f"'{key}' contains non-numeric entries") from None
    if not np.all(np.isfinite(arr)):
        raise ProposalInvalidError(f"'{key}' contains non-finite entries")
    norm = np.linalg.norm(arr)
    if norm == 0:
        raise ProposalInvalidError(f"'{key}' is the zero vector")
    return arr, norm


def parse_rank1_response(text, rows, cols):
    """Extract a rank-1 proposal from free-form model output.

    The first balanced JSON object is used. ``u`` and ``v`` are renormalised
    with their magnitudes folded into ``s``; a negative ``s`` flips ``v``.
    """
    obj = _first_json_object(text)
    if "s" not in obj:
        raise ProposalInvalidError("missing 's'")
    s = obj["s"]
    if isinstance(s, bool) or not isinstance(s, (int, float)) or not np.isfinite(s):
        raise ProposalInvalidError(f"'s' must be a finite number, got {s!r}")
    u, nu = _vector(obj, "u", rows)
    v, nv = _vector(obj, "v", cols)
    s = float(s) * nu * nv
    if not np.isfinite(s):
        raise ProposalInvalidError("folded singular value overflows")
    u, v = u / nu, v / nv
    if s < 0:
        s, v = -s, -v
    u, v = apply_sign_convention(u, v)
    return Rank1Update(s, u, v)


_TOKENS = {
    "rank1": re.compile(r"\b(accept|reject)\w*", re.IGNORECASE),
    "stop": re.compile(r"\b(continue|stop)\w*", re.IGNORECASE),
}


def parse_verdict(text, expected):
    """First ACCEPT/REJECT (``expected="rank1"``) or CONTINUE/STOP
    (``expected="stop"``) token in ``text``, case-insensitive."""
    try:
        pattern = _TOKENS[expected]
    except KeyError:
        raise ValueError(f"expected must be 'rank1' or 'stop', got {expected!r}") from None
    m = pattern.search(text or "")
    if m is None:
        want = "ACCEPT/REJECT" if expected == "rank1" else "CONTINUE/STOP"
        raise VerdictParseError(f"no {want} token in response {text[:80]!r}")
    return AgentVerdict(Verdict(m.group(1).capitalize()), text)
