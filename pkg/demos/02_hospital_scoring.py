"""Score the bundled hospital network end to end.

The dataset is synthetic (see fixtures/hospital/SYNTHETIC.md): an employee
is the entry point and three servers are the targets.  We list the attack
paths, score every edge for each attacker ability and show the edges that
are least protected.
"""

from mlagreview import PipelineConfig, enumerate_attack_paths, load_hospital, run_scoring

inputs = load_hospital()
paths = enumerate_attack_paths(inputs.graph)
print(f"{len(inputs.graph.edges)} edges, {len(paths)} entry->target paths")
print("shortest:", " -> ".join(min(paths, key=len)))

for attacker in ("professional", "advanced", "naive"):
    scored = run_scoring(inputs, PipelineConfig(attacker=attacker))
    gov = ", ".join(f"{l.value}={g.value:.3f}" for l, g in scored.layers.items() if g)
    print(f"\n[{attacker}] cv={scored.cv:.3f}  governance: {gov}")
    # reports label higher scores as safer; note that lambda enters the
    # aggregation with the same sign as governance, so an edge the attacker
    # cannot exploit (lambda 0) is pulled down, as seen for the naive attacker
    for e in sorted(scored.edges, key=lambda e: e.score)[:3]:
        print(f"  {e.edge_id} {e.layer.value:8s} lambda={e.lam:.3f} score={e.score:.3f}")

flagged = [p.control_id for p in scored.profiles if p.flagged]
print("\ncontrols to revise:", ", ".join(flagged) or "none")
