"""Assign one batch of passengers to shared cabs, three ways.

Same eight passengers, solved with the exhaustive optimal search and the
stochastic restart heuristic, each steering by the learned model, then
once more optimally under a cost-only proxy. All three assignments get
judged by the learned model so the numbers are comparable.
"""

from lastmile import (
    EconParams,
    MLPModel,
    ProxyObjective,
    evaluate_assignment,
    format_assignment,
    generate_random_graph,
    generate_synthetic_dataset,
    optimal_assign,
    sample_scenario,
    scenario_matrix,
    simsat,
    train_mlp,
)

params = EconParams()
model = MLPModel(train_mlp(generate_synthetic_dataset(5000, seed=11), seed=5).weights)

graph = generate_random_graph(35, seed=21)
scenario = sample_scenario(graph, 8, seed=42)
matrix = scenario_matrix(scenario)
print(f"{len(scenario.requests)} passengers on a {len(graph.nodes)}-vertex graph\n")

best = optimal_assign(matrix, scenario.requests, model, params)
print("optimal under the learned model:")
print(format_assignment(best, evaluate_assignment(best, model)))

heur = simsat(matrix, scenario.requests, model, params, seed=0)
print("stochastic restarts under the learned model:")
print(format_assignment(heur, evaluate_assignment(heur, model)))

cheap = optimal_assign(matrix, scenario.requests,
                       ProxyObjective("cost_only", params), params)
print("optimal under a cost-only proxy, judged by the learned model:")
print(format_assignment(cheap, evaluate_assignment(cheap, model)))

# the exhaustive search also optimizes each cab's drop order (for stops at
# equal distance that amounts to choosing who sits where), while the
# restart heuristic always drives the greedy nearest-neighbor route
gap = evaluate_assignment(best, model) - evaluate_assignment(heur, model)
print(f"heuristic trails the optimum by {gap:.4f} satisfaction points")
