"""Build road graphs and query shortest travel times.

Generates a random road network, round-trips it through the text format,
and builds the terminal travel-time matrix every solver consumes.
"""

import os

import numpy as np

from lastmile import (
    build_travel_time_matrix,
    crop_to_k_nearest,
    generate_random_graph,
    read_graph,
    shortest_times_from,
    write_graph,
)

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

graph = generate_random_graph(35, seed=7)
print(f"random graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges, "
      f"origin {graph.origin}")

# text round trip
path = os.path.join(OUT, "random35.graph")
write_graph(graph, path)
assert read_graph(path) == graph
print(f"wrote and re-read {path}")

# a terminal matrix over the origin and a handful of destinations
terminals = (graph.origin,) + graph.node_ids[1:6]
matrix = build_travel_time_matrix(graph, terminals)
print("terminals:", matrix.terminals)
print("times (min):")
print(np.array_str(matrix.times, precision=2))

# the matrix rows agree with a plain single-source pass
by_source = shortest_times_from(graph, graph.origin)
for t in terminals:
    assert abs(matrix.time(graph.origin, t) - by_source[t]) < 1e-9
print("matrix row matches single-source times from the origin")

# cropping keeps the k nearest nodes and preserves their origin times
small = crop_to_k_nearest(graph, 12)
small_times = shortest_times_from(small, small.origin)
for nid, t in small_times.items():
    assert abs(t - by_source[nid]) < 1e-9
print(f"cropped to {len(small.nodes)} nodes; origin times unchanged")
