"""Time-optimal gate durations and the gate-count vs physical-time sweep.

The entangler gate with angle phi admits a closed-form minimum duration
under a finite-energy constraint: omega * t = pi * sqrt(x (1 - x/2)) with
x = phi/pi.  Total physical time of a protocol run is the gate count times
that duration, which shifts the optimum away from the pure gate-count one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .entanglement import Measure
from .protocol import ProtocolConfig, convergence_gate_count, run_ensemble
from .qstate import canonical_gate, entangler_gate

__all__ = [
    "SweepRow",
    "SweepTable",
    "LambdaRow",
    "optimal_gate_time",
    "physical_time",
    "assemble_sweep_table",
    "sweep_phi",
    "sweep_lambda",
]


def optimal_gate_time(phi: float, omega: float = 1.0) -> float:
    """Minimum duration of the angle-phi entangler, in units with hbar = 1."""
    phi = float(phi)
    if not 0.0 <= phi <= math.pi:
        raise ValueError(f"phi must be in [0, pi], got {phi!r}")
    if not omega > 0.0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    x = phi / math.pi
    return math.pi * math.sqrt(x * (1.0 - x / 2.0)) / omega


def physical_time(n_gates: int, phi: float, omega: float = 1.0) -> float:
    """Total run duration: gate count times the optimal per-gate time."""
    if n_gates < 0:
        raise ValueError(f"n_gates must be >= 0, got {n_gates}")
    return n_gates * optimal_gate_time(phi, omega)


@dataclass(frozen=True)
class SweepRow:
    phi: float
    n_gates: int | None  # None when not converged
    t_phi: float
    t_phys: float | None  # None when not converged


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]
    argmin_gates: float | None  # phi minimizing n_gates among converged rows
    argmin_time: float | None  # phi minimizing t_phys among converged rows


@dataclass(frozen=True)
class LambdaRow:
    lam: tuple[float, float, float]
    n_gates: int | None


def assemble_sweep_table(phis, gate_counts, omega: float = 1.0) -> SweepTable:
    """Build sweep rows and locate both optima from per-angle gate counts."""
    rows = []
    for phi, n in zip(phis, gate_counts):
        t_phi = optimal_gate_time(phi, omega)
        t_phys = physical_time(n, phi, omega) if n is not None else None
        rows.append(SweepRow(phi=float(phi), n_gates=n, t_phi=t_phi, t_phys=t_phys))
    converged = [r for r in rows if r.n_gates is not None]
    argmin_gates = min(converged, key=lambda r: r.n_gates).phi if converged else None
    argmin_time = min(converged, key=lambda r: r.t_phys).phi if converged else None
    return SweepTable(rows=tuple(rows), argmin_gates=argmin_gates, argmin_time=argmin_time)


def _converged_count(config: ProtocolConfig, workers: int | None) -> int | None:
    traj = run_ensemble(config, workers=workers)
    return convergence_gate_count(
        traj, Measure.LINEAR, None, config.threshold, config.confirm_window
    )


def sweep_phi(
    base_config: ProtocolConfig,
    phi_grid,
    omega: float = 1.0,
    workers: int | None = None,
) -> SweepTable:
    """Run the ensemble for each entangler angle and tabulate both optima.

    Convergence is judged on the global linear measure.  The base config's
    seed is reused at every grid point, so ensemble noise is correlated
    across angles and the argmin comparison is sharper than independent
    seeding would give.
    """
    counts = []
    for phi in phi_grid:
        config = replace(
            base_config, fixed_gate=entangler_gate(phi), measures=(Measure.LINEAR,)
        )
        counts.append(_converged_count(config, workers))
    return assemble_sweep_table(phi_grid, counts, omega)


def sweep_lambda(
    base_config: ProtocolConfig,
    lambda_grid,
    workers: int | None = None,
) -> list[LambdaRow]:
    """Gate counts over a grid of canonical gates (lam, 0, 0).

    No duration accompanies these rows: the closed-form optimal time is
    only available for the entangler family.
    """
    rows = []
    for lam in lambda_grid:
        vec = (float(lam), 0.0, 0.0)
        config = replace(
            base_config, fixed_gate=canonical_gate(vec), measures=(Measure.LINEAR,)
        )
        rows.append(LambdaRow(lam=vec, n_gates=_converged_count(config, workers)))
    return rows
