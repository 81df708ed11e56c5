"""Uniform assessments: everything compliant, partially compliant, or not.

With the coverage factor of NC set to zero, an all-NC assessment carries no
weight at all and every edge score collapses to zero.
"""

from mlagreview import PipelineConfig, load_hospital
from mlagreview.analytics import borderline_cases, summarize
from mlagreview.controls import CoverageWeights

inputs = load_hospital()
for weights in (CoverageWeights(), CoverageWeights(1.0, 0.5, 0.0)):
    print(f"weights C={weights.c} PC={weights.pc} NC={weights.nc}")
    cases = borderline_cases(inputs, PipelineConfig(coverage_weights=weights))
    for name, scored in cases.items():
        d = summarize(scored.edges)
        print(f"  {name:7s} cv={scored.cv:.3f} mean={d.mean:.4f} max={d.max:.4f}")
    ratio = cases["all_PC"].cv / cases["all_C"].cv
    print(f"  cv ratio PC/C = {ratio}")
