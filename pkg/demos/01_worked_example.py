"""Review a single control by hand.

Control A.9.4.3 (password management system) has these alignment values:

    run time 0.0   design time 0.923   operational 0.926   compliance 0.0
    human 0.7      access 0.371        network 0.0

and was assessed as compliant.  We walk it through classification,
specificity, layer fitting and reliability.
"""

from mlagreview.controls import AssessmentValue, CoverageWeights
from mlagreview.review import (
    classify_control,
    fitting_degree,
    layer_mapping,
    reliability_degree,
    specificity_degree,
)

row = {"run_time": 0.0, "design_time": 0.923, "operational": 0.926, "compliance": 0.0}
cl = classify_control(row)
print(f"lifetime={cl.lifetime.value} management={cl.management.value}")

# design time + operational sits in the alpha/2 cell
spec = specificity_degree(cl, alpha=0.5)
print(f"specificity={spec}")

m = layer_mapping(0.7, 0.371, 0.0)
print(f"most fitting layer={m.most_fitting.value} members={sorted(l.value for l in m.member_layers)}")
print(f"fitting={fitting_degree(m)}")

rel = reliability_degree(cl, m, AssessmentValue.C, CoverageWeights())
print(f"reliability={rel:.5f}  (flagged below 0.5: {rel < 0.5})")
