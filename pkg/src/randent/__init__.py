"""Random two-qubit-gate circuits and their entanglement statistics.

Simulates the repeated-random-gate protocol on dense statevectors, tracks
multipartite entanglement under linear and von Neumann measures against
exact Haar-average baselines, and contrasts the gate count needed for
convergence with the total physical time under time-optimal gate
durations.
"""
from .brachistochrone import (
    LambdaRow,
    SweepRow,
    SweepTable,
    assemble_sweep_table,
    optimal_gate_time,
    physical_time,
    sweep_lambda,
    sweep_phi,
)
from .entanglement import (
    EntanglementProfile,
    Measure,
    SpectrumError,
    enumerate_bipartitions,
    global_entanglement,
    level_entanglement,
    linear_entropy,
    reduced_density_matrix,
    von_neumann_entropy,
)
from .haar_baseline import (
    BaselineTable,
    MonteCarloEstimate,
    haar_global_baseline,
    lubkin_linear_baseline,
    monte_carlo_baseline,
    page_vn_baseline,
    sample_haar_state,
)
from .protocol import (
    ConvergenceEntry,
    ConvergenceReport,
    Geometry,
    ProtocolConfig,
    Trajectory,
    convergence_gate_count,
    convergence_report,
    fit_decay_rate,
    pick_pair,
    run_ensemble,
    run_realization,
    step,
)
from .qstate import (
    StateVector,
    canonical_gate,
    entangler_gate,
    rng_stream,
    sample_haar_u2,
)

__version__ = "0.1.0"
