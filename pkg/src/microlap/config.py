"""Numeric tolerances in one place.  ``default`` and ``strict`` profiles."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # Taylor-stepping continuation
    step_fraction: float = 0.4  # step <= fraction * distance to the nearest singularity
    max_step: float = 2.0
    taylor_tol: float = 1e-17
    taylor_max_order: int = 160
    max_steps: int = 20000
    min_clearance: float = 1e-8
    # quadrature
    gauss_nodes: int = 20
    tail_tol: float = 1e-14
    exp_cutoff: float = 40.0  # integrate until |exp| has dropped by e^-cutoff
    # exact series used for numeric evaluation
    series_trunc: int = 48
    watson_trunc: int = 80
    # matrices
    cond_limit: float = 1e8
    atheta_radii: tuple[float, float] = (8.0, 64.0)
    atheta_points: int = 8
    atheta_max_spread: float = 12.0  # cap on |Re x| over the sample grid
    watson_radii: tuple[float, ...] = (8.0, 16.0, 32.0, 64.0)
    jobs: int = 1


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(step_fraction=0.25, max_step=1.0, gauss_nodes=30, series_trunc=64, watson_trunc=96),
}


def get_profile(name: str = "default", **overrides) -> Tolerances:
    if name not in PROFILES:
        raise ValueError(f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}")
    return replace(PROFILES[name], **overrides) if overrides else PROFILES[name]
