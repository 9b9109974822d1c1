"""Physical plant models and asset parameters.

Covers electrolyser efficiency and hydrogen yield, the iterative split of
hydrogen-production power into electrolysis and compression, stack wear, and
the cost parameters of every asset.  All powers are MW, energies kWh/MWh,
masses kg, currency GBP.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """Hydrogen energy content: lower and higher heating value, kWh/kg."""

    lhv_kwh_per_kg: float = 33.3
    hhv_kwh_per_kg: float = 39.4

    def __post_init__(self):
        if not 0 < self.lhv_kwh_per_kg < self.hhv_kwh_per_kg:
            raise ValueError("need 0 < LHV < HHV")


DEFAULT_CONSTANTS = PhysicalConstants()

# Constant LHV-basis system efficiency assumed for a PEM unit at any load;
# representative of current stacks including balance of plant.
DEFAULT_PEM_EFFICIENCY = 0.6746


class ConvergenceError(RuntimeError):
    """The electrolysis/compression power split failed to reach a fixed point."""


@dataclass(frozen=True)
class EfficiencyCurve:
    """Piecewise-linear LHV efficiency vs electrolyser load fraction."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(l), float(e)) for l, e in self.points)
        if not pts:
            raise ValueError("efficiency curve needs at least one point")
        loads = [l for l, _ in pts]
        if any(not 0.0 <= l <= 1.0 for l in loads):
            raise ValueError("load fractions must lie in [0, 1]")
        if any(b <= a for a, b in zip(loads, loads[1:])):
            raise ValueError("load fractions must be strictly increasing")
        if any(not 0.0 < e <= 1.0 for _, e in pts):
            raise ValueError("efficiencies must lie in (0, 1]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def constant(cls, efficiency: float) -> "EfficiencyCurve":
        return cls(((0.0, efficiency), (1.0, efficiency)))

    @classmethod
    def from_csv(cls, path: str | Path) -> "EfficiencyCurve":
        """Load a curve from a CSV with columns ``load_fraction,efficiency``."""
        path = Path(path)
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        if not rows or [c.strip() for c in rows[0]] != ["load_fraction", "efficiency"]:
            raise ValueError(f"{path}: expected header 'load_fraction,efficiency'")
        try:
            pts = tuple((float(r[0]), float(r[1])) for r in rows[1:])
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{path}: malformed curve row ({exc})") from exc
        return cls(pts)

    def scaled(self, uplift: float) -> "EfficiencyCurve":
        """Multiply every efficiency by (1 + uplift), capped at 1.0."""
        if uplift <= -1.0:
            raise ValueError("uplift must exceed -1")
        return EfficiencyCurve(
            tuple((l, min(e * (1.0 + uplift), 1.0)) for l, e in self.points)
        )

    def efficiency(self, load_fraction):
        """Interpolated efficiency at a load fraction (scalar or array)."""
        loads = np.array([l for l, _ in self.points])
        effs = np.array([e for _, e in self.points])
        return np.interp(np.clip(load_fraction, 0.0, 1.0), loads, effs)


def efficiency_at(curve: EfficiencyCurve, load_fraction, min_load_fraction: float = 0.0):
    """Curve efficiency with the minimum-load cut-in: zero below min load."""
    load = np.clip(load_fraction, 0.0, 1.0)
    eff = np.where(load < min_load_fraction, 0.0, curve.efficiency(load))
    return float(eff) if eff.ndim == 0 else eff


@dataclass(frozen=True)
class Electrolyser:
    """PEM electrolyser: rating, efficiency curve, stack wear, and costs."""

    rated_mw: float
    lifetime_years: float = 30.0
    capex_per_kw: float = 1500.0
    opex_frac_of_capex_per_year: float = 0.05
    stack_life_hours: float = 60_000.0
    stack_replace_frac_of_capex: float = 0.48
    curve: EfficiencyCurve = field(
        default_factory=lambda: EfficiencyCurve.constant(DEFAULT_PEM_EFFICIENCY)
    )
    min_load_fraction: float = 0.0

    def __post_init__(self):
        if self.rated_mw <= 0:
            raise ValueError("rated_mw must be positive")
        if not 0.0 <= self.stack_replace_frac_of_capex <= 1.0:
            raise ValueError("stack_replace_frac_of_capex must be in [0, 1]")
        if self.stack_life_hours <= 0:
            raise ValueError("stack_life_hours must be positive")
        if self.lifetime_years < 1:
            raise ValueError("lifetime_years must be >= 1")
        if not 0.0 <= self.min_load_fraction <= 1.0:
            raise ValueError("min_load_fraction must be in [0, 1]")

    @property
    def rated_kw(self) -> float:
        return self.rated_mw * 1000.0

    def efficiency_at(self, load_fraction):
        return efficiency_at(self.curve, load_fraction, self.min_load_fraction)


@dataclass(frozen=True)
class Compressor:
    """Mechanical compressor sized per kg/yr of hydrogen throughput."""

    capex_per_kg_annual: float = 2.49   # GBP per kg/yr of capacity
    opex_frac_of_capex_per_year: float = 0.06
    energy_kwh_per_kg: float = 0.399
    lifetime_years: float = 30.0

    def __post_init__(self):
        if self.energy_kwh_per_kg < 0:
            raise ValueError("energy_kwh_per_kg must be >= 0")
        if self.lifetime_years < 1:
            raise ValueError("lifetime_years must be >= 1")


@dataclass(frozen=True)
class GridConnection:
    """Grid line and private wire capacities, unit costs, and cost shares.

    The ``*_share_h2`` fractions say how much of each connection cost the
    hydrogen producer bears; the remainder sits with the wind developer.
    """

    line_capacity_mw: float = 0.0
    line_cost_per_kw: float = 100.0
    line_cost_share_h2: float = 1.0
    wire_capacity_mw: float = 0.0
    wire_cost_per_kw: float = 15.0
    wire_cost_share_h2: float = 1.0
    ic_lifetime_years: float = 30.0

    def __post_init__(self):
        if self.line_capacity_mw < 0 or self.wire_capacity_mw < 0:
            raise ValueError("capacities must be >= 0")
        for share in (self.line_cost_share_h2, self.wire_cost_share_h2):
            if not 0.0 <= share <= 1.0:
                raise ValueError("cost shares must lie in [0, 1]")
        if self.ic_lifetime_years < 1:
            raise ValueError("ic_lifetime_years must be >= 1")


@dataclass(frozen=True)
class WindPlant:
    """Wind farm rating and reference costs.

    The cost fields are informational context only: the wind business is a
    separate investment and its capital never enters the hydrogen cost stack.
    """

    rated_mw: float = 10.0
    lifetime_years: float = 25.0
    capex_per_kw: float = 1230.0
    opex_per_kw_year: float = 25.4

    def __post_init__(self):
        if self.rated_mw <= 0:
            raise ValueError("rated_mw must be positive")


@dataclass(frozen=True)
class PlantSpec:
    """The full physical system: wind, electrolyser, compressor, grid."""

    wind: WindPlant
    electrolyser: Electrolyser
    compressor: Compressor
    grid: GridConnection


def hydrogen_mass(
    p_pem_mw: float,
    step_hours: float,
    efficiency: float,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Hydrogen produced (kg) by electrolysis power over one step."""
    if p_pem_mw < 0 or step_hours < 0 or efficiency < 0:
        raise ValueError("inputs must be >= 0")
    return 1000.0 * p_pem_mw * step_hours * efficiency / consts.lhv_kwh_per_kg


def split_power(
    p_h2_mw: float,
    el: Electrolyser,
    comp: Compressor,
    tol: float = 1e-9,
    max_iterations: int = 50,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[float, float, float]:
    """Split hydrogen-production power into electrolysis and compression.

    All power is first assigned to electrolysis; the compression demand of
    the resulting hydrogen rate is then deducted and the production
    recomputed, until electrolysis + compression balances the input within
    ``tol`` MW.  Returns (p_pem_mw, p_comp_mw, mass_rate_kg_per_h).
    """
    if p_h2_mw < 0:
        raise ValueError("p_h2_mw must be >= 0")
    if tol <= 0:
        raise ValueError("tol must be positive")
    p_pem = p_h2_mw
    for _ in range(max_iterations):
        eta = el.efficiency_at(p_pem / el.rated_mw)
        rate = 1000.0 * p_pem * eta / consts.lhv_kwh_per_kg
        p_comp = rate * comp.energy_kwh_per_kg / 1000.0
        if abs(p_pem + p_comp - p_h2_mw) <= tol:
            return p_pem, p_comp, rate
        p_pem = max(p_h2_mw - p_comp, 0.0)
    raise ConvergenceError(
        f"electrolysis/compression split did not converge within {max_iterations} "
        f"iterations at {p_h2_mw} MW intake"
    )


def split_power_array(
    p_h2_mw: np.ndarray,
    el: Electrolyser,
    comp: Compressor,
    tol: float = 1e-9,
    max_iterations: int = 50,
    consts: PhysicalConstants = DEFAULT_CONSTANTS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`split_power` over a whole series of intake values."""
    p_h2 = np.asarray(p_h2_mw, dtype=float)
    if np.any(p_h2 < 0):
        raise ValueError("p_h2_mw must be >= 0")
    p_pem = p_h2.copy()
    for _ in range(max_iterations):
        eta = el.efficiency_at(p_pem / el.rated_mw)
        rate = 1000.0 * p_pem * eta / consts.lhv_kwh_per_kg
        p_comp = rate * comp.energy_kwh_per_kg / 1000.0
        residual = np.abs(p_pem + p_comp - p_h2)
        if residual.size == 0 or float(residual.max()) <= tol:
            return p_pem, p_comp, rate
        p_pem = np.maximum(p_h2 - p_comp, 0.0)
    step = int(np.argmax(residual))
    raise ConvergenceError(
        f"electrolysis/compression split did not converge within {max_iterations} "
        f"iterations (worst residual {float(residual[step]):.3e} MW at step {step})"
    )


def equivalent_full_load_hours(annual_p_pem_mwh: float, rated_mw: float) -> float:
    """Annual electrolysis energy expressed as hours at rated power."""
    if annual_p_pem_mwh < 0:
        raise ValueError("annual_p_pem_mwh must be >= 0")
    return annual_p_pem_mwh / rated_mw


def stack_life_years(annual_p_pem_mwh: float, el: Electrolyser) -> float:
    """Stack lifetime in years at the realised duty; +inf when the unit is idle.

    Reported raw even when it exceeds the electrolyser's own lifetime.
    """
    eflh = equivalent_full_load_hours(annual_p_pem_mwh, el.rated_mw)
    if eflh == 0.0:
        return math.inf
    return el.stack_life_hours / eflh
