"""Solver, rank-1 evaluator and stop evaluator implementations.

Every solver exposes ``propose(matrix) -> Rank1Update`` (raising
:class:`ProposalError` for unusable output), every rank-1 evaluator
``evaluate(matrix, proposal) -> AgentVerdict`` and every stop evaluator
``evaluate(original, current) -> AgentVerdict``.
"""
from .oracle import (
    OracleRank1Evaluator,
    OracleSolver,
    OracleStopEvaluator,
    oracle_evaluate_rank1,
    oracle_solve,
    oracle_stop,
)
from .parsing import (
    AgentVerdict,
    ProposalError,
    ProposalInvalidError,
    ProposalParseError,
    Verdict,
    VerdictParseError,
    parse_rank1_response,
    parse_verdict,
    serialize_triplet,
)
from .prompts import IclExample, build_icl_examples, build_solver_prompt, matrix_to_text
from .remote import (
    RemoteConfigError,
    RemoteEndpointConfig,
    RemoteError,
    RemoteProtocolError,
    RemoteRank1Evaluator,
    RemoteSolver,
    RemoteStopEvaluator,
    RemoteTransportError,
    remote_chat,
)
from .scripted import (
    ScriptedRank1Evaluator,
    ScriptedSolver,
    ScriptedStopEvaluator,
    ScriptExhausted,
)

__all__ = [
    "AgentVerdict", "Verdict", "ProposalError", "ProposalParseError",
    "ProposalInvalidError", "VerdictParseError", "parse_rank1_response",
    "parse_verdict", "serialize_triplet", "IclExample", "build_icl_examples",
    "build_solver_prompt", "matrix_to_text", "oracle_solve",
    "oracle_evaluate_rank1", "oracle_stop", "OracleSolver",
    "OracleRank1Evaluator", "OracleStopEvaluator", "ScriptedSolver",
    "ScriptedRank1Evaluator", "ScriptedStopEvaluator", "ScriptExhausted",
    "RemoteEndpointConfig", "RemoteError", "RemoteConfigError",
    "RemoteTransportError", "RemoteProtocolError", "remote_chat",
    "RemoteSolver", "RemoteRank1Evaluator", "RemoteStopEvaluator",
]
