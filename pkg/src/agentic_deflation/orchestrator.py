"""The agentic deflation loop: permute once, then repeatedly propose, gate
(with regeneration), subtract with clamping and ask the stop evaluator."""
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .agents import (
    OracleRank1Evaluator,
    OracleSolver,
    OracleStopEvaluator,
    ProposalError,
    RemoteEndpointConfig,
    RemoteRank1Evaluator,
    RemoteSolver,
    RemoteStopEvaluator,
    ScriptedRank1Evaluator,
    ScriptedSolver,
    ScriptedStopEvaluator,
    build_icl_examples,
)
from .matrix import as_matrix, frobenius_norm, rmse_to_zero
from .permutation import (
    STRATEGIES,
    PermutationPair,
    apply_permutation,
    invert_permutation,
    permutation_for,
)
from .rank1 import DeflationStep, DeflationTrace, Rank1Update, StopReason, deflate_step

__all__ = [
    "AGENT_KINDS",
    "RunConfig",
    "AgentSet",
    "StepError",
    "build_agents",
    "run_deflation",
    "trace_to_dict",
    "trace_from_dict",
    "trace_to_json",
    "trace_from_json",
]

AGENT_KINDS = ("oracle", "scripted", "remote")


class StepError(RuntimeError):
    """An agent failed (transport, protocol, script) during a given step."""

    def __init__(self, step, cause):
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
        self.step = step


@dataclass(frozen=True)
class RunConfig:
    permutation_strategy: str = "none"
    icl_count: int = 0
    max_steps: int = 32
    max_retries: int = 5
    stop_fraction: float = 0.1
    epsilon: float = 0.05
    solver: str = "oracle"
    rank1_evaluator: str = "oracle"
    stop_evaluator: str = "oracle"
    seed: int = 0

    def __post_init__(self):
        if self.permutation_strategy not in STRATEGIES:
            raise ValueError(f"permutation_strategy must be one of {STRATEGIES}")
        if self.icl_count < 0:
            raise ValueError("icl_count must be >= 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        for role in (self.solver, self.rank1_evaluator, self.stop_evaluator):
            if role not in AGENT_KINDS:
                raise ValueError(f"agent kind must be one of {AGENT_KINDS}, got {role!r}")

    def to_dict(self):
        return asdict(self)


@dataclass
class AgentSet:
    solver: object
    rank1_evaluator: object
    stop_evaluator: object


def build_agents(cfg, dims=None, scripts=None, solver_endpoint=None,
                 evaluator_endpoint=None, session=None):
    """Instantiate the three roles named in ``cfg``.

    ``scripts`` maps role name (``solver``/``rank1_evaluator``/
    ``stop_evaluator``) to a list of canned responses or a fixture path.
    Remote roles need a :class:`RemoteEndpointConfig` (or dict); remote
    solvers also need ``dims`` to build their ICL examples.
    """
    scripts = scripts or {}

    def script(role):
        if role not in scripts:
            raise ValueError(f"scripted {role} needs a response script")
        return scripts[role]

    def endpoint(ep, role):
        if ep is None:
            raise ValueError(f"remote {role} needs an endpoint config")
        return ep if isinstance(ep, RemoteEndpointConfig) else RemoteEndpointConfig.from_dict(ep)

    if cfg.solver == "oracle":
        solver = OracleSolver()
    elif cfg.solver == "scripted":
        solver = ScriptedSolver(script("solver"))
    else:
        if dims is None and cfg.icl_count:
            raise ValueError("remote solver with ICL examples needs matrix dims")
        icl = build_icl_examples(cfg.icl_count, dims, cfg.seed) if cfg.icl_count else []
        solver = RemoteSolver(endpoint(solver_endpoint, "solver"), icl, session)

    if cfg.rank1_evaluator == "oracle":
        rank1 = OracleRank1Evaluator(cfg.epsilon)
    elif cfg.rank1_evaluator == "scripted":
        rank1 = ScriptedRank1Evaluator(script("rank1_evaluator"), cfg.max_retries)
    else:
        rank1 = RemoteRank1Evaluator(endpoint(evaluator_endpoint, "rank1_evaluator"), session)

    if cfg.stop_evaluator == "oracle":
        stop = OracleStopEvaluator(cfg.stop_fraction)
    elif cfg.stop_evaluator == "scripted":
        stop = ScriptedStopEvaluator(script("stop_evaluator"), cfg.max_retries)
    else:
        stop = RemoteStopEvaluator(endpoint(evaluator_endpoint, "stop_evaluator"), session)
    return AgentSet(solver, rank1, stop)


def _propose_until_accepted(work, agents, max_retries, step):
    attempts = []
    for _ in range(max_retries + 1):
        try:
            proposal = agents.solver.propose(work)
        except ProposalError as err:
            attempts.append({"proposal": None, "verdict": None,
                             "error": f"{type(err).__name__}: {err}"})
            continue
        except Exception as err:
            raise StepError(step, err) from err
        try:
            verdict = agents.rank1_evaluator.evaluate(work, proposal)
        except Exception as err:
            raise StepError(step, err) from err
        attempts.append({"proposal": proposal.to_dict(), "verdict": verdict.kind.value,
                         "error": None})
        if verdict.accepted:
            return proposal, attempts
    return None, attempts


def _ask_stop(agents, original, current, step):
    try:
        return agents.stop_evaluator.evaluate(original, current)
    except Exception as err:
        raise StepError(step, err) from err


def run_deflation(a, cfg=None, agents=None):
    """Run the agentic loop on ``a`` and return its trace.

    Step residuals and the final residual are reported in the original
    coordinates; proposals are kept as the solver produced them, i.e. in
    permuted coordinates. If a step exhausts its regeneration budget the run
    ends with ``StopReason.ABORTED`` and the partial trace.
    """
    cfg = cfg or RunConfig()
    agents = agents or build_agents(cfg, dims=np.shape(a))
    a = as_matrix(a)
    perm = permutation_for(a, cfg.permutation_strategy)
    inv = invert_permutation(perm)
    original = apply_permutation(a, perm)
    work = original

    trace = DeflationTrace(original=a, initial_fnorm=frobenius_norm(a), permutation=perm,
                           metadata={"config": cfg.to_dict()})
    verdict = _ask_stop(agents, original, work, 0)
    trace.metadata["initial_stop_verdict"] = verdict.kind.value
    stop = verdict.stop
    while not stop:
        step = trace.n_steps + 1
        if step > cfg.max_steps:
            trace.stop_reason = StopReason.MAX_STEPS_CAP
            break
        proposal, attempts = _propose_until_accepted(work, agents, cfg.max_retries, step)
        if proposal is None:
            trace.stop_reason = StopReason.ABORTED
            trace.failure = (f"step {step}: no proposal accepted after "
                             f"{len(attempts)} attempts")
            trace.metadata["failed_attempts"] = attempts
            break
        work = deflate_step(work, proposal)
        verdict = _ask_stop(agents, original, work, step)
        trace.steps.append(DeflationStep(
            update=proposal,
            residual=apply_permutation(work, inv),
            residual_fnorm=frobenius_norm(work),
            rejections=len(attempts) - 1,
            attempts=attempts,
            stop_verdict=verdict.kind.value,
        ))
        stop = verdict.stop
    if stop:
        trace.stop_reason = StopReason.EVALUATOR_STOP
    trace.residual = apply_permutation(work, inv)
    return trace


def _mat(m):
    return None if m is None else np.asarray(m).tolist()


def trace_to_dict(trace):
    return {
        "config": trace.metadata.get("config"),
        "metadata": {k: v for k, v in trace.metadata.items() if k != "config"},
        "permutation": trace.permutation.to_dict() if trace.permutation is not None else None,
        "original": _mat(trace.original),
        "initial_fnorm": trace.initial_fnorm,
        "steps": [
            {
                "proposal": st.update.to_dict(),
                "verdicts": [at["verdict"] for at in st.attempts],
                "attempts": st.attempts,
                "retries": st.rejections,
                "stop_verdict": st.stop_verdict,
                "residual_fnorm": st.residual_fnorm,
                "residual": _mat(st.residual),
            }
            for st in trace.steps
        ],
        "stop_reason": trace.stop_reason.value,
        "failure": trace.failure,
        "residual": _mat(trace.residual),
        "residual_rmse": rmse_to_zero(trace.residual),
    }


def trace_from_dict(d):
    steps = [
        DeflationStep(
            update=Rank1Update(**st["proposal"]),
            residual=np.array(st["residual"], dtype=np.float64),
            residual_fnorm=st["residual_fnorm"],
            rejections=st.get("retries", 0),
            attempts=st.get("attempts", []),
            stop_verdict=st.get("stop_verdict"),
        )
        for st in d["steps"]
    ]
    meta = dict(d.get("metadata") or {})
    if d.get("config") is not None:
        meta["config"] = d["config"]
    perm = d.get("permutation")
    return DeflationTrace(
        original=np.array(d["original"], dtype=np.float64),
        steps=steps,
        stop_reason=StopReason(d["stop_reason"]),
        residual=np.array(d["residual"], dtype=np.float64),
        initial_fnorm=d["initial_fnorm"],
        failure=d.get("failure"),
        permutation=PermutationPair(**perm) if perm else None,
        metadata=meta,
    )


def trace_to_json(trace):
    return json.dumps(trace_to_dict(trace), indent=1) + "\n"


def trace_from_json(text):
    return trace_from_dict(json.loads(text))
