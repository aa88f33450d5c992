"""
The agentic loop with oracle and scripted agents
================================================

Three roles: a solver proposes a triplet, a rank-1 evaluator accepts or
rejects it, a stop evaluator decides when the residual is small enough.
Oracle agents reproduce the numerical baseline. Scripted agents replay
canned text, which is how the regeneration path is exercised offline.
"""
from agentic_deflation import RunConfig, SyntheticSpec, baseline_deflate, build_agents
from agentic_deflation import generate, run_deflation, top_singular_triplet
from agentic_deflation.agents import serialize_triplet
from agentic_deflation.evaluation import rmse_gap
from agentic_deflation.orchestrator import trace_to_json

m = generate(SyntheticSpec(seed=4), 0).matrix

# oracle agents, block permutation
cfg = RunConfig(permutation_strategy="block")
trace = run_deflation(m, cfg)
base = baseline_deflate(m, 0.1)
print("agent steps", trace.n_steps, "baseline steps", base.n_steps,
      "stop:", trace.stop_reason.value)
print("RMSE gap to baseline:", rmse_gap(trace, base))

# scripted agents: garbage, a rejected answer, then the real triplet
good = serialize_triplet(top_singular_triplet(m))
cfg = RunConfig(solver="scripted", rank1_evaluator="scripted", stop_evaluator="scripted")
agents = build_agents(cfg, scripts={
    "solver": ["I am not sure.", good, good],
    "rank1_evaluator": ["Reject: too blurry", "Accept"],
    "stop_evaluator": ["Continue", "Stop, looks done"],
})
trace = run_deflation(m, cfg, agents)
st = trace.steps[0]
print("attempts at step 1:")
for at in st.attempts:
    print("  ", at["verdict"] or at["error"])
print("stop reason:", trace.stop_reason.value)
print(trace_to_json(trace)[:300], "...")
