"""Agents that replay canned response texts, one per call.

Fixture files are JSON arrays of strings. Responses go through the same
parsers as remote model output, so scripted runs exercise the full text
protocol without a network.
"""
import json
from pathlib import Path

from .parsing import VerdictParseError, parse_rank1_response, parse_verdict

__all__ = [
    "ScriptExhausted",
    "load_script",
    "ScriptedSolver",
    "ScriptedRank1Evaluator",
    "ScriptedStopEvaluator",
]


class ScriptExhausted(RuntimeError):
    pass


def load_script(path):
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ValueError(f"{path}: expected a JSON array of response strings")
    return data


class _Script:
    def __init__(self, responses):
        if isinstance(responses, (str, Path)):
            responses = load_script(responses)
        self.responses = list(responses)
        self.calls = 0

    def _next(self):
        if self.calls >= len(self.responses):
            raise ScriptExhausted(
                f"{type(self).__name__}: script of {len(self.responses)} responses exhausted"
            )
        text = self.responses[self.calls]
        self.calls += 1
        return text


class ScriptedSolver(_Script):
    def propose(self, m):
        return parse_rank1_response(self._next(), *m.shape)


class _ScriptedEvaluator(_Script):
    mode = None

    def __init__(self, responses, max_retries=5):
        super().__init__(responses)
        self.max_retries = max_retries

    def _verdict(self):
        # unparseable replies are re-queried, as with a remote model
        for attempt in range(self.max_retries + 1):
            try:
                return parse_verdict(self._next(), self.mode)
            except VerdictParseError:
                if attempt == self.max_retries:
                    raise


class ScriptedRank1Evaluator(_ScriptedEvaluator):
    mode = "rank1"

    def evaluate(self, m, proposal):
        return self._verdict()


class ScriptedStopEvaluator(_ScriptedEvaluator):
    mode = "stop"

    def evaluate(self, original, current):
        return self._verdict()
