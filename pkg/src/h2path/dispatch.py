"""Per-step power-flow allocation for each deployment pattern.

Every step the wind output is allocated to hydrogen production, grid export,
and curtailment; the hydrogen share (plus any grid import) is then split
between electrolysis and compression.  A full year of resolved flows is a
:class:`FlowLedger`.

The hydrogen block (electrolyser plus its compressor) draws at most the
electrolyser's rated power in total; "full load" means that total intake,
of which roughly 99% lands on the stack and the rest on compression.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np

from .plantmodel import PlantSpec, split_power_array
from .profiles import HOURS_PER_YEAR, WindProfile

if TYPE_CHECKING:  # pragma: no cover
    from .scenarios import ScenarioConfig

LEDGER_CSV_HEADER = "step,p_wind,p_h2_wind,p_import,p_export,p_curtail,p_pem,p_comp,mass_kg"


class DispatchVariant(str, Enum):
    """How wind, grid, and electrolyser are coupled."""

    GRID_ONLY = "GridOnly"
    OFF_GRID_DIRECT = "OffGridDirect"
    VIRTUAL_PPA = "VirtualPPA"
    CURTAILMENT_HARVEST = "CurtailmentHarvest"
    BTM_GRID_FIRST = "BtmGridFirst"
    BTM_PEM_FIRST = "BtmPemFirst"


_WIRE_VARIANTS = {
    DispatchVariant.OFF_GRID_DIRECT,
    DispatchVariant.BTM_GRID_FIRST,
    DispatchVariant.BTM_PEM_FIRST,
}


@dataclass(frozen=True)
class DispatchRule:
    """Allocation rule: variant, back-up policy, and curtailment parameters."""

    variant: DispatchVariant
    grid_backup: bool = False
    curtail_threshold_mw: float | None = None
    n_farms: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", DispatchVariant(self.variant))
        if self.n_farms < 1:
            raise ValueError("n_farms must be >= 1")
        if self.variant is DispatchVariant.CURTAILMENT_HARVEST:
            if self.curtail_threshold_mw is None:
                raise ValueError("CurtailmentHarvest requires curtail_threshold_mw")
            if self.curtail_threshold_mw < 0:
                raise ValueError("curtail_threshold_mw must be >= 0")
        else:
            if self.curtail_threshold_mw is not None:
                raise ValueError("curtail_threshold_mw only applies to CurtailmentHarvest")
            if self.n_farms != 1:
                raise ValueError("n_farms > 1 only applies to CurtailmentHarvest")


@dataclass(frozen=True)
class FlowRecord:
    """Resolved power flows (MW) and hydrogen mass (kg) for one step."""

    step: int
    p_wind_mw: float
    p_h2_wind_mw: float
    p_h2_import_mw: float
    p_export_mw: float
    p_curtail_mw: float
    p_pem_mw: float
    p_comp_mw: float
    mass_kg: float


@dataclass(frozen=True)
class FlowLedger:
    """A simulated year of flows, column-wise, with annual aggregates."""

    step_hours: float
    p_wind: np.ndarray
    p_h2_wind: np.ndarray
    p_h2_import: np.ndarray
    p_export: np.ndarray
    p_curtail: np.ndarray
    p_pem: np.ndarray
    p_comp: np.ndarray
    mass_kg: np.ndarray
    wind_to_h2_mwh: float
    import_mwh: float
    export_mwh: float
    curtailed_mwh: float
    intake_mwh: float
    pem_mwh: float
    annual_mass_kg: float

    _ARRAY_FIELDS = (
        "p_wind", "p_h2_wind", "p_h2_import", "p_export",
        "p_curtail", "p_pem", "p_comp", "mass_kg",
    )

    @classmethod
    def from_arrays(
        cls,
        step_hours: float,
        p_wind: np.ndarray,
        p_h2_wind: np.ndarray,
        p_h2_import: np.ndarray,
        p_export: np.ndarray,
        p_curtail: np.ndarray,
        p_pem: np.ndarray,
        p_comp: np.ndarray,
        mass_kg: np.ndarray,
    ) -> "FlowLedger":
        arrays = {}
        for name, arr in zip(cls._ARRAY_FIELDS, (
            p_wind, p_h2_wind, p_h2_import, p_export, p_curtail, p_pem, p_comp, mass_kg,
        )):
            a = np.ascontiguousarray(arr, dtype=float)
            a.setflags(write=False)
            arrays[name] = a
        h = step_hours
        return cls(
            step_hours=step_hours,
            **arrays,
            wind_to_h2_mwh=float(arrays["p_h2_wind"].sum()) * h,
            import_mwh=float(arrays["p_h2_import"].sum()) * h,
            export_mwh=float(arrays["p_export"].sum()) * h,
            curtailed_mwh=float(arrays["p_curtail"].sum()) * h,
            intake_mwh=float((arrays["p_h2_wind"] + arrays["p_h2_import"]).sum()) * h,
            pem_mwh=float(arrays["p_pem"].sum()) * h,
            annual_mass_kg=float(arrays["mass_kg"].sum()),
        )

    def __len__(self) -> int:
        return int(self.p_wind.size)

    @property
    def total_hours(self) -> float:
        return len(self) * self.step_hours

    def record(self, i: int) -> FlowRecord:
        return FlowRecord(
            step=i,
            p_wind_mw=float(self.p_wind[i]),
            p_h2_wind_mw=float(self.p_h2_wind[i]),
            p_h2_import_mw=float(self.p_h2_import[i]),
            p_export_mw=float(self.p_export[i]),
            p_curtail_mw=float(self.p_curtail[i]),
            p_pem_mw=float(self.p_pem[i]),
            p_comp_mw=float(self.p_comp[i]),
            mass_kg=float(self.mass_kg[i]),
        )

    def records(self) -> Iterator[FlowRecord]:
        return (self.record(i) for i in range(len(self)))

    def csv_text(self) -> str:
        """Per-step ledger as CSV with exact-round-trip float formatting."""
        lines = [LEDGER_CSV_HEADER]
        cols = [getattr(self, name) for name in self._ARRAY_FIELDS]
        for i in range(len(self)):
            lines.append(
                str(i) + "," + ",".join(repr(float(col[i])) for col in cols)
            )
        return "\n".join(lines) + "\n"

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.csv_text())


def _wind_allocation(
    rule: DispatchRule,
    wind: np.ndarray,
    plant: PlantSpec,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Allocate wind output to (total, to-H2, export, curtail) per step.

    ``wind`` has shape (steps,) for single-farm rules and (steps, n_farms)
    for curtailment harvesting.
    """
    cap = plant.electrolyser.rated_mw  # full-load intake of the hydrogen block
    grid = plant.grid
    wire = grid.wire_capacity_mw
    line = grid.line_capacity_mw
    variant = rule.variant

    if variant in (DispatchVariant.OFF_GRID_DIRECT, DispatchVariant.VIRTUAL_PPA):
        limit = cap
        if variant in _WIRE_VARIANTS and wire > 0:
            limit = min(limit, wire)
        p_h2_wind = np.minimum(wind, limit)
        p_export = np.zeros_like(wind)
        p_curtail = wind - p_h2_wind
        return wind, p_h2_wind, p_export, p_curtail

    if variant is DispatchVariant.CURTAILMENT_HARVEST:
        thr = rule.curtail_threshold_mw
        p_export = np.minimum(wind, thr).sum(axis=1)
        available = np.maximum(wind - thr, 0.0).sum(axis=1)
        p_h2_wind = np.minimum(available, cap)
        p_curtail = available - p_h2_wind
        return wind.sum(axis=1), p_h2_wind, p_export, p_curtail

    if variant is DispatchVariant.BTM_GRID_FIRST:
        p_export = np.minimum(wind, line)
        rest = wind - p_export
        limit = min(cap, wire) if wire > 0 else cap
        p_h2_wind = np.minimum(rest, limit)
        p_curtail = rest - p_h2_wind
        return wind, p_h2_wind, p_export, p_curtail

    if variant is DispatchVariant.BTM_PEM_FIRST:
        limit = min(cap, wire) if wire > 0 else cap
        p_h2_wind = np.minimum(wind, limit)
        rest = wind - p_h2_wind
        p_export = np.minimum(rest, line)
        p_curtail = rest - p_export
        return wind, p_h2_wind, p_export, p_curtail

    raise ValueError(f"unhandled dispatch variant {variant}")


def _as_wind_matrix(
    rule: DispatchRule,
    profile: WindProfile | Sequence[WindProfile],
) -> tuple[np.ndarray, float, float]:
    """Normalise the profile argument to the array shape the rule needs."""
    farms = [profile] if isinstance(profile, WindProfile) else list(profile)
    if not farms:
        raise ValueError("at least one wind profile is required")
    steps = len(farms[0])
    step_hours = farms[0].step_hours
    rated = farms[0].rated_mw
    for p in farms[1:]:
        if len(p) != steps or p.step_hours != step_hours:
            raise ValueError("farm profiles must share step count and step_hours")
        if p.rated_mw != rated:
            raise ValueError("farm profiles must share the plant rating")

    if rule.variant is DispatchVariant.CURTAILMENT_HARVEST:
        if len(farms) == 1:
            wind = np.broadcast_to(farms[0].values[:, None], (steps, rule.n_farms))
        elif len(farms) == rule.n_farms:
            wind = np.column_stack([p.values for p in farms])
        else:
            raise ValueError(
                f"rule expects {rule.n_farms} farm profiles (or one shared), got {len(farms)}"
            )
    else:
        if len(farms) != 1:
            raise ValueError(f"{rule.variant.value} takes a single wind profile")
        wind = farms[0].values
    return wind, step_hours, rated


def simulate_year(
    scenario: "ScenarioConfig",
    profile: WindProfile | Sequence[WindProfile],
    tol: float = 1e-9,
    require_full_year: bool = True,
) -> FlowLedger:
    """Run the dispatch rule over a profile and return the resolved ledger."""
    rule = scenario.rule
    plant = scenario.plant
    wind, step_hours, rated = _as_wind_matrix(rule, profile)
    steps = wind.shape[0]
    if require_full_year and abs(steps * step_hours - HOURS_PER_YEAR) > 1e-9:
        raise ValueError(
            f"profile covers {steps * step_hours} h; a full {HOURS_PER_YEAR} h year "
            f"is required (pass require_full_year=False to relax)"
        )
    if rule.variant is not DispatchVariant.GRID_ONLY and rated != plant.wind.rated_mw:
        raise ValueError(
            f"profile rating {rated} MW does not match the wind plant "
            f"rating {plant.wind.rated_mw} MW"
        )

    cap = plant.electrolyser.rated_mw
    if rule.variant is DispatchVariant.GRID_ONLY:
        # No wind plant participates: the unit runs flat out on imports.
        zeros = np.zeros(steps)
        p_wind, p_h2_wind, p_export, p_curtail = zeros, zeros, zeros, zeros
        p_import = np.full(steps, cap)
    else:
        p_wind, p_h2_wind, p_export, p_curtail = _wind_allocation(rule, wind, plant)
        if rule.grid_backup:
            p_import = np.maximum(cap - p_h2_wind, 0.0)
        else:
            p_import = np.zeros(steps)

    intake = p_h2_wind + p_import
    p_pem, p_comp, rate = split_power_array(
        intake, plant.electrolyser, plant.compressor, tol=tol
    )
    mass = rate * step_hours
    return FlowLedger.from_arrays(
        step_hours, p_wind, p_h2_wind, p_import, p_export, p_curtail, p_pem, p_comp, mass,
    )


def dispatch_step(
    rule: DispatchRule,
    p_wind_mw: float | Sequence[float],
    plant: PlantSpec,
    tol: float = 1e-9,
    step_hours: float = 0.5,
) -> FlowRecord:
    """Resolve a single step; ``p_wind_mw`` is per-farm for curtailment rules."""
    if rule.variant is DispatchVariant.CURTAILMENT_HARVEST:
        farm_values = (
            [float(p_wind_mw)] * rule.n_farms
            if np.isscalar(p_wind_mw)
            else [float(v) for v in p_wind_mw]
        )
        if len(farm_values) != rule.n_farms:
            raise ValueError(f"expected {rule.n_farms} per-farm values, got {len(farm_values)}")
        farms = [
            WindProfile(np.array([v]), plant.wind.rated_mw, step_hours) for v in farm_values
        ]
        ledger = simulate_year(
            _StepScenario(rule, plant), farms, tol=tol, require_full_year=False
        )
    else:
        if not np.isscalar(p_wind_mw):
            raise ValueError(f"{rule.variant.value} takes a scalar wind power")
        prof = WindProfile(np.array([float(p_wind_mw)]), plant.wind.rated_mw, step_hours)
        ledger = simulate_year(
            _StepScenario(rule, plant), prof, tol=tol, require_full_year=False
        )
    return ledger.record(0)


@dataclass(frozen=True)
class _StepScenario:
    """Minimal scenario stand-in for single-step dispatch."""

    rule: DispatchRule
    plant: PlantSpec


def verify_ledger(
    ledger: FlowLedger,
    rule: DispatchRule,
    plant: PlantSpec,
    tol: float = 1e-9,
) -> None:
    """Raise ValueError if any per-step balance or capacity limit is violated."""
    balance = ledger.p_wind - (ledger.p_h2_wind + ledger.p_export + ledger.p_curtail)
    worst = float(np.abs(balance).max()) if len(ledger) else 0.0
    if worst > tol:
        raise ValueError(f"wind allocation balance violated by {worst:.3e} MW")

    split = ledger.p_h2_wind + ledger.p_h2_import - (ledger.p_pem + ledger.p_comp)
    worst = float(np.abs(split).max()) if len(ledger) else 0.0
    if worst > tol:
        raise ValueError(f"intake/split balance violated by {worst:.3e} MW")

    for name, arr in (("export", ledger.p_export), ("curtail", ledger.p_curtail)):
        if len(ledger) and float(arr.min()) < -tol:
            raise ValueError(f"negative {name} flow")

    line_cap = plant.grid.line_capacity_mw
    if rule.variant is DispatchVariant.CURTAILMENT_HARVEST:
        line_cap *= rule.n_farms
    if len(ledger) and float(ledger.p_export.max()) > line_cap + tol:
        raise ValueError("export above line capacity")
    wire = plant.grid.wire_capacity_mw
    if rule.variant in _WIRE_VARIANTS and wire > 0 and len(ledger):
        if float(ledger.p_h2_wind.max()) > wire + tol:
            raise ValueError("wind-to-electrolyser flow above wire capacity")

    for total, sum_name in (
        (ledger.wind_to_h2_mwh, "p_h2_wind"),
        (ledger.import_mwh, "p_h2_import"),
        (ledger.export_mwh, "p_export"),
        (ledger.curtailed_mwh, "p_curtail"),
        (ledger.pem_mwh, "p_pem"),
    ):
        recomputed = float(getattr(ledger, sum_name).sum()) * ledger.step_hours
        if abs(recomputed - total) > 1e-6 * max(abs(total), 1.0):
            raise ValueError(f"aggregate {sum_name} deviates from the per-step sum")
