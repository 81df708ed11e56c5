"""How much do assessment mistakes move the scores?

First the two systematic biases (a conservative assessor who downgrades
partial compliance, and a lax one who upgrades it), then random errors at
increasing rates, seven trials each.
"""

from mlagreview import PipelineConfig, load_hospital
from mlagreview.analytics import Conservative, NotRigorous, bias_comparison, sensitivity_sweep, summarize

inputs = load_hospital()
cfg = PipelineConfig(cv_mode="normalized", seed=7)

for bias in (Conservative(), NotRigorous()):
    res = bias_comparison(inputs, bias, cfg)
    for name, scored in res.items():
        d = summarize(scored.edges)
        print(f"{name:14s} mean={d.mean:.4f} std={d.std:.4f}")

report = sensitivity_sweep(inputs, cfg)
print(f"\n{len(report.runs)} perturbed runs")
for p in report.percentages:
    runs = [r for r in report.runs if r.percentage == p]
    worst = max(max(abs(v) for v in r.deviations.values()) for r in runs)
    print(f"  {p:4.0f}% errors: {len(runs[0].changed):2d} controls changed, worst edge deviation {worst:.4f}")
