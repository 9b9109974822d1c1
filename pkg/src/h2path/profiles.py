"""Half-hourly wind power profiles: loading, synthesis, and rescaling.

Profiles are plain CSV files with a ``step_index,power_mw`` header and one
row per step.  An optional leading comment line ``# step_hours=0.5`` carries
the step duration (default 0.5 h).  Multi-farm files use columns
``power_mw_1 .. power_mw_N`` instead of a single ``power_mw`` column.
"""

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HOURS_PER_YEAR = 8760.0
DEFAULT_STEP_HOURS = 0.5

# Achieved capacity factor must sit within +-0.1% (relative) of the target.
CF_TOLERANCE = 1e-3
# Values above rating by up to 0.1% are treated as numeric noise and clamped.
OVERSHOOT_TOLERANCE = 1e-3

# Latent AR(1) shape for the synthetic generator.  The wide spread pushes a
# realistic fraction of steps onto the zero and rated bounds, as real wind
# farm output does.
_AR_PHI = 0.98
_AR_LEVEL = 0.45
_AR_SPREAD = 0.60


class ProfileFormatError(ValueError):
    """A profile file or its values violate the expected format."""


@dataclass(frozen=True)
class WindProfile:
    """Available wind power per step for one farm, MW."""

    values: np.ndarray
    rated_mw: float
    step_hours: float = DEFAULT_STEP_HOURS

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ProfileFormatError("profile values must be a non-empty 1-D sequence")
        if self.rated_mw <= 0:
            raise ProfileFormatError("rated_mw must be positive")
        if self.step_hours <= 0:
            raise ProfileFormatError("step_hours must be positive")
        if np.any(arr < 0):
            raise ProfileFormatError("profile contains negative power values")
        if np.any(arr > self.rated_mw):
            raise ProfileFormatError("profile contains values above the plant rating")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def capacity_factor(self) -> float:
        return float(np.mean(self.values)) / self.rated_mw

    @property
    def total_hours(self) -> float:
        return len(self) * self.step_hours

    @property
    def is_full_year(self) -> bool:
        return abs(self.total_hours - HOURS_PER_YEAR) < 1e-9

    def energy_mwh(self) -> float:
        return float(np.sum(self.values)) * self.step_hours


def expected_steps(step_hours: float = DEFAULT_STEP_HOURS) -> int:
    """Number of steps in one non-leap year at the given resolution."""
    return int(round(HOURS_PER_YEAR / step_hours))


def _parse_file(path: Path) -> tuple[list[str], list[list[str]], float]:
    """Read header, data rows, and the optional step_hours metadata."""
    step_hours = DEFAULT_STEP_HOURS
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, newline="") as fh:
        for raw in csv.reader(fh):
            if not raw or not any(cell.strip() for cell in raw):
                continue
            first = raw[0].lstrip()
            if first.startswith("#"):
                text = ",".join(raw).lstrip("# ").strip()
                if text.startswith("step_hours="):
                    try:
                        step_hours = float(text.split("=", 1)[1])
                    except ValueError as exc:
                        raise ProfileFormatError(f"bad step_hours metadata in {path}: {text}") from exc
                continue
            if header is None:
                header = [cell.strip() for cell in raw]
            else:
                rows.append(raw)
    if header is None:
        raise ProfileFormatError(f"{path} has no header row")
    return header, rows, step_hours


def _validate_columns(header: list[str], path: Path) -> int:
    """Return the number of farm columns declared by the header."""
    if header[:1] != ["step_index"]:
        raise ProfileFormatError(f"{path}: first column must be 'step_index', got {header[:1]}")
    cols = header[1:]
    if cols == ["power_mw"]:
        return 1
    expected = [f"power_mw_{i}" for i in range(1, len(cols) + 1)]
    if cols == expected and cols:
        return len(cols)
    raise ProfileFormatError(
        f"{path}: power columns must be 'power_mw' or 'power_mw_1..N', got {cols}"
    )


def _clamp_to_rating(values: np.ndarray, rated_mw: float, path: Path) -> np.ndarray:
    over = values > rated_mw
    if not np.any(over):
        return values
    worst = float(values.max())
    if worst > rated_mw * (1.0 + OVERSHOOT_TOLERANCE):
        raise ProfileFormatError(
            f"{path}: value {worst} exceeds rating {rated_mw} MW by more than 0.1%"
        )
    warnings.warn(
        f"{path}: {int(over.sum())} value(s) exceed rating {rated_mw} MW by <=0.1%; clamping",
        UserWarning,
        stacklevel=3,
    )
    return np.minimum(values, rated_mw)


def load_farm_profiles(
    path: str | Path,
    rated_mw: float,
    require_full_year: bool = True,
) -> list[WindProfile]:
    """Load one profile per farm column from a CSV file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    header, rows, step_hours = _parse_file(path)
    n_farms = _validate_columns(header, path)
    if require_full_year and len(rows) != expected_steps(step_hours):
        raise ProfileFormatError(
            f"{path}: expected {expected_steps(step_hours)} rows for a full year at "
            f"{step_hours} h steps, found {len(rows)}"
        )
    try:
        data = np.array([[float(r[c + 1]) for c in range(n_farms)] for r in rows])
    except (ValueError, IndexError) as exc:
        raise ProfileFormatError(f"{path}: malformed data row ({exc})") from exc
    if np.any(data < 0):
        raise ProfileFormatError(f"{path}: negative power values")
    data = _clamp_to_rating(data, rated_mw, path)
    return [WindProfile(data[:, c], rated_mw, step_hours) for c in range(n_farms)]


def load_profile(
    path: str | Path,
    rated_mw: float,
    require_full_year: bool = True,
) -> WindProfile:
    """Load a single-farm profile from a CSV file."""
    farms = load_farm_profiles(path, rated_mw, require_full_year)
    if len(farms) != 1:
        raise ProfileFormatError(
            f"{path} holds {len(farms)} farm columns; use load_farm_profiles()"
        )
    return farms[0]


def save_profile(profile: WindProfile, path: str | Path) -> None:
    """Write a profile to CSV with exact-round-trip float formatting."""
    path = Path(path)
    lines = [f"# step_hours={float(profile.step_hours)!r}", "step_index,power_mw"]
    lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(profile.values))
    path.write_text("\n".join(lines) + "\n")


def _calibrate(values: np.ndarray, target_cf: float, rated_mw: float, max_iterations: int) -> np.ndarray:
    """Rescale-and-clamp until the capacity factor hits the target.

    Scaling down is exact in one step; scaling up saturates against the
    rating and is re-iterated.  Targets needing near-total saturation can be
    unreachable, which is reported as an error.
    """
    target = target_cf * rated_mw
    for _ in range(max_iterations + 1):
        mean = float(values.mean())
        if abs(mean - target) <= CF_TOLERANCE * target:
            return values
        if mean <= 0.0:
            break
        values = np.minimum(values * (target / mean), rated_mw)
    raise ValueError(
        f"capacity factor {target_cf} unreachable after {max_iterations} rescale "
        f"iterations (target too close to the saturation bound for this shape)"
    )


def synth_profile(
    target_cf: float,
    rated_mw: float,
    seed: int,
    steps: int = 17_520,
    step_hours: float = DEFAULT_STEP_HOURS,
    max_iterations: int = 100,
) -> WindProfile:
    """Generate a deterministic synthetic wind profile with a pinned capacity factor.

    A first-order autoregressive latent series is clamped to [0, rated] and
    then affinely rescaled until mean/rated is within +-0.1% (relative) of
    ``target_cf``.  Output is a pure function of (target_cf, rated_mw, seed,
    steps).
    """
    if not 0.0 <= target_cf <= 1.0:
        raise ValueError(f"target_cf must be in [0, 1], got {target_cf}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if rated_mw <= 0:
        raise ValueError("rated_mw must be positive")
    if target_cf == 0.0:
        return WindProfile(np.zeros(steps), rated_mw, step_hours)
    if target_cf == 1.0:
        return WindProfile(np.full(steps, rated_mw), rated_mw, step_hours)

    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(steps)
    z = np.empty(steps)
    z[0] = eps[0]
    innovation = np.sqrt(1.0 - _AR_PHI**2)
    for t in range(1, steps):
        z[t] = _AR_PHI * z[t - 1] + innovation * eps[t]
    raw = np.clip(_AR_LEVEL + _AR_SPREAD * z, 0.0, 1.0) * rated_mw
    values = _calibrate(raw, target_cf, rated_mw, max_iterations)
    return WindProfile(values, rated_mw, step_hours)


def scale_to_cf(profile: WindProfile, target_cf: float, max_iterations: int = 100) -> WindProfile:
    """Rescale a profile to a new capacity factor, preserving shape where unclamped."""
    if not 0.0 < target_cf <= 1.0:
        raise ValueError(f"target_cf must be in (0, 1], got {target_cf}")
    if target_cf == 1.0:
        values = np.full(len(profile), profile.rated_mw)
    else:
        values = _calibrate(profile.values.copy(), target_cf, profile.rated_mw, max_iterations)
    return WindProfile(values, profile.rated_mw, profile.step_hours)
