"""Last-mile ridesharing assignment: shared rides from one origin, priced
so co-riders gain equally, assigned to maximize learned satisfaction."""

from .datasets import Dataset, generate_synthetic_dataset, read_dataset, write_dataset
from .experiments import (
    BenchmarkResult,
    BenchmarkRow,
    Scenario,
    run_benchmark,
    sample_scenario,
    scenario_matrix,
    write_report,
)
from .graphs import (
    ConnectivityError,
    RoadGraph,
    TravelTimeMatrix,
    build_travel_time_matrix,
    crop_to_k_nearest,
    generate_random_graph,
    read_graph,
    read_node_edge_files,
    shortest_times_from,
    write_graph,
)
from .mlp import (
    MLPModel,
    MLPWeights,
    TrainResult,
    load_model,
    mlp_predict,
    save_model,
    train_mlp,
)
from .payments import PaymentResult, VehicleBill, compute_equal_gain_payments
from .satisfaction import (
    EconParams,
    Gender,
    PassengerProfile,
    ProxyObjective,
    RideBatch,
    RideOffer,
    SatisfactionModel,
    Seat,
    encode_features,
    gain,
    inconvenience,
    proxy_objective_score,
)
from .solvers import (
    brute_force_oracle,
    enumerate_capacity_partitions,
    evaluate_assignment,
    optimal_assign,
    simsat,
)
from .vehicles import (
    Assignment,
    PassengerRequest,
    Vehicle,
    format_assignment,
    nn_drop_off_order,
    vehicle_satisfaction,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BenchmarkResult",
    "BenchmarkRow",
    "ConnectivityError",
    "Dataset",
    "EconParams",
    "Gender",
    "MLPModel",
    "MLPWeights",
    "PassengerProfile",
    "PassengerRequest",
    "PaymentResult",
    "ProxyObjective",
    "RideBatch",
    "RideOffer",
    "RoadGraph",
    "SatisfactionModel",
    "Scenario",
    "Seat",
    "TrainResult",
    "TravelTimeMatrix",
    "Vehicle",
    "VehicleBill",
    "brute_force_oracle",
    "build_travel_time_matrix",
    "compute_equal_gain_payments",
    "crop_to_k_nearest",
    "encode_features",
    "enumerate_capacity_partitions",
    "evaluate_assignment",
    "format_assignment",
    "gain",
    "generate_random_graph",
    "generate_synthetic_dataset",
    "inconvenience",
    "load_model",
    "mlp_predict",
    "nn_drop_off_order",
    "optimal_assign",
    "proxy_objective_score",
    "read_dataset",
    "read_graph",
    "read_node_edge_files",
    "run_benchmark",
    "sample_scenario",
    "save_model",
    "scenario_matrix",
    "shortest_times_from",
    "simsat",
    "train_mlp",
    "vehicle_satisfaction",
    "write_dataset",
    "write_graph",
    "write_report",
]
