"""
Synthetic matrices and the two numerical baselines
==================================================

Each synthetic matrix is a sum of k nonnegative rank-1 terms plus Gaussian
noise, clipped and quantized to 8 bits. With k known, the reference is k
deflation steps. Otherwise deflate until the residual norm drops to 10%.
"""
import numpy as np

from agentic_deflation import SyntheticSpec, baseline_deflate, baseline_deflate_k, generate
from agentic_deflation.matrix import rmse_to_zero

spec = SyntheticSpec(seed=0)
sample = generate(spec, 0)
print("construction rank k =", sample.k)
print("singular values used:", np.round(sample.singular_values, 1))
print("observed singular values:", np.round(np.linalg.svd(sample.matrix, compute_uv=False)[:8], 1))

tk = baseline_deflate_k(sample.matrix, sample.k)
tf = baseline_deflate(sample.matrix, stop_fraction=0.1)
print("k-step residual RMSE:", rmse_to_zero(tk.residual))
print("10% rule: steps", tf.n_steps, "norms", np.round(tf.fnorms, 1))

# over many samples the k-step residual is dominated by the noise
rmse = [rmse_to_zero(baseline_deflate_k(s.matrix, s.k).residual)
        for s in (generate(spec, i) for i in range(300))]
print("mean k-step residual RMSE over 300 samples: %.2f (noise_sigma=%.0f)"
      % (np.mean(rmse), spec.noise_sigma))
