"""Joint-angle synthesis: Fourier-series walking plus timed sit/stand profiles.

Walking angles are periodic functions of the oscillator phases, scaled by the
shared amplitude and the ramp gain. Sit-to-stand and stand-to-sit are finite
time profiles built from the sitting/standing coefficient rows, transformed so
the motion terminates at exactly 0 degrees in exoskeleton coordinates.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .cpg import JOINT_TYPES, JOINTS, CpgParams, CpgState, RampMode, ramp_gain
from .planner import FsmState

#: sha256 of each data row of the bundled coefficient file; loading refuses
#: rows whose checksum differs, so silent edits cannot reach the engine.
EXPECTED_ROW_SHA256 = {
    ("sitting_standing", "hip"): "bd424216cedc0d533b9a5988e9a514077cbbe868d1dfb909294f4c202dea01ec",
    ("sitting_standing", "knee"): "4cf196d735ca478da0ce48f699ce36c73b33a720062caf97c8e0861c7b1caecc",
    ("sitting_standing", "ankle"): "54473b939885f272deb65793ed365b78b7c3833d7379334de7fd25bbce6502fd",
    ("walk", "hip"): "0152b3d3d79913f306f3decfb5490806899461e986057209f3fba789b4fbe769",
    ("walk", "knee"): "63d7ff9b5842740c8c03d2671dc1a806c14340d4684eee8073f37a2742bc6dc4",
    ("walk", "ankle"): "da7d9c3922ad3d18e179bf27f5371e3528365106dcdd7e981ba710c8dedf3977",
}


class CoefficientTableError(RuntimeError):
    """Raised when the coefficient file is malformed or fails its checksums."""


class Direction(enum.Enum):
    SIT_TO_STAND = "sit_to_stand"
    STAND_TO_SIT = "stand_to_sit"


@dataclass(frozen=True)
class FourierSeries:
    """One truncated Fourier series; coefficients are in degrees."""

    a0: float
    a: np.ndarray
    b: np.ndarray

    @property
    def terms(self) -> int:
        return len(self.a)

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("cosine and sine coefficient lists must match in length")

    def evaluate(self, angle):
        """Series value at `angle` (radians); angle may be an array."""
        angle = np.asarray(angle, dtype=float)
        k = np.arange(1, self.terms + 1)
        ka = np.multiply.outer(angle, k)
        return self.a0 + np.cos(ka) @ self.a + np.sin(ka) @ self.b

    def derivative(self, angle):
        """d(series)/d(angle)."""
        angle = np.asarray(angle, dtype=float)
        k = np.arange(1, self.terms + 1)
        ka = np.multiply.outer(angle, k)
        return -np.sin(ka) @ (k * self.a) + np.cos(ka) @ (k * self.b)

    def second_derivative(self, angle):
        angle = np.asarray(angle, dtype=float)
        k = np.arange(1, self.terms + 1)
        ka = np.multiply.outer(angle, k)
        return -np.cos(ka) @ (k * k * self.a) - np.sin(ka) @ (k * k * self.b)


def bundled_coefficients_path() -> Path:
    return Path(resources.files("exoplan").joinpath("data/fourier_coefficients.csv"))


def load_tables(path: str | Path | None = None, verify: bool = True) -> dict[tuple[str, str], FourierSeries]:
    """Load the (state, joint) -> series table from the coefficient CSV.

    Empty trailing cells mean the row has fewer terms. With `verify` set (the
    default for the bundled file) every row must match its frozen checksum.
    """
    path = Path(path) if path is not None else bundled_coefficients_path()
    tables: dict[tuple[str, str], FourierSeries] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#") or line.startswith("state,"):
            continue
        cells = line.split(",")
        if len(cells) != 15:
            raise CoefficientTableError(f"row has {len(cells)} cells, expected 15: {line!r}")
        key = (cells[0], cells[1])
        if verify:
            digest = hashlib.sha256(line.encode("utf-8")).hexdigest()
            expected = EXPECTED_ROW_SHA256.get(key)
            if expected is None or digest != expected:
                raise CoefficientTableError(
                    f"checksum mismatch for row {key}: the coefficient file does not "
                    "match the bundled reference"
                )
        a0 = float(cells[2])
        a = [float(c) for c in cells[3:9] if c != ""]
        b = [float(c) for c in cells[9:15] if c != ""]
        if len(a) != len(b) or len(a) not in (5, 6):
            raise CoefficientTableError(f"row {key} must carry 5 or 6 paired terms")
        tables[key] = FourierSeries(a0=a0, a=np.array(a), b=np.array(b))
    missing = set(EXPECTED_ROW_SHA256) - set(tables)
    if verify and missing:
        raise CoefficientTableError(f"coefficient file is missing rows: {sorted(missing)}")
    return tables


def walk_angle(series: FourierSeries, theta: float, r: float = 1.0, lam: float = 1.0) -> float:
    """Walking joint angle in degrees: lam * r * series(theta); 2*pi periodic."""
    return float(lam * r * series.evaluate(theta))


@dataclass(frozen=True)
class SitStandProfile:
    """Timed sit/stand trajectory for the three joint types.

    Each joint's base series is evaluated on [0, t_star], where t_star is the
    argmax of the series over one fundamental period, then flipped and shifted
    by the peak value so the motion ends at exactly 0 degrees. Per-joint time
    axes are rescaled so all joints finish together after `duration` seconds.
    """

    series: dict[str, FourierSeries]
    omega_s: float
    t_star: dict[str, float]
    peak: dict[str, float]
    duration: float
    direction: Direction

    def reversed(self) -> "SitStandProfile":
        other = (
            Direction.STAND_TO_SIT
            if self.direction is Direction.SIT_TO_STAND
            else Direction.SIT_TO_STAND
        )
        return SitStandProfile(self.series, self.omega_s, self.t_star, self.peak, self.duration, other)


def _refine_argmax(series: FourierSeries, omega_s: float, t0: float, spacing: float) -> float:
    """Polish a grid argmax with Newton steps on the series derivative."""
    t = t0
    for _ in range(60):
        g = omega_s * float(series.derivative(omega_s * t))
        h = omega_s * omega_s * float(series.second_derivative(omega_s * t))
        if h >= 0:
            break
        t_new = t - g / h
        if abs(t_new - t) > spacing:
            break
        t = t_new
        if abs(g) < 1e-13:
            break
    return t


def build_sit_stand_profile(
    tables: dict[tuple[str, str], FourierSeries],
    period: float = 4.0,
    duration: float = 2.0,
    direction: Direction = Direction.SIT_TO_STAND,
    grid_points: int = 10_000,
) -> SitStandProfile:
    """Construct the timed profile from the sitting/standing coefficient rows."""
    omega_s = 2.0 * np.pi / period
    series: dict[str, FourierSeries] = {}
    t_star: dict[str, float] = {}
    peak: dict[str, float] = {}
    grid = np.linspace(0.0, period, grid_points + 1)
    for joint in JOINT_TYPES:
        s = tables[("sitting_standing", joint)]
        values = s.evaluate(omega_s * grid)
        t0 = float(grid[int(np.argmax(values))])
        ts = _refine_argmax(s, omega_s, t0, spacing=float(grid[1]))
        series[joint] = s
        t_star[joint] = ts
        peak[joint] = float(s.evaluate(omega_s * ts))
    return SitStandProfile(series, float(omega_s), t_star, peak, duration, direction)


def sit_stand_angle(profile: SitStandProfile, joint: str | tuple, t: float) -> float:
    """Profile angle in degrees at time t; t outside [0, duration] is clamped.

    Stand-to-sit is the exact pointwise time reversal of sit-to-stand.
    """
    joint_type = joint[1] if isinstance(joint, tuple) else joint
    s = min(max(t, 0.0), profile.duration)
    if profile.direction is Direction.STAND_TO_SIT:
        s = profile.duration - s
    tau = (s / profile.duration) * profile.t_star[joint_type]
    base = float(profile.series[joint_type].evaluate(profile.omega_s * tau))
    return profile.peak[joint_type] - base


class GaitGenerator:
    """Dispatches desired joint angles across locomotion states."""

    def __init__(
        self,
        tables: dict[tuple[str, str], FourierSeries] | None = None,
        cpg_params: CpgParams | None = None,
        sit_stand_period: float = 4.0,
        sit_stand_duration: float = 2.0,
    ):
        self.tables = tables if tables is not None else load_tables()
        self.cpg_params = cpg_params if cpg_params is not None else CpgParams()
        self.sit_to_stand = build_sit_stand_profile(
            self.tables, sit_stand_period, sit_stand_duration, Direction.SIT_TO_STAND
        )
        self.stand_to_sit = self.sit_to_stand.reversed()
        self.walk_series = {joint: self.tables[("walk", joint)] for joint in JOINT_TYPES}

    def sitting_pose(self) -> np.ndarray:
        """Frozen pose held while sitting: the sit-to-stand profile at t = 0."""
        return np.array([sit_stand_angle(self.sit_to_stand, jid.joint, 0.0) for jid in JOINTS])

    def walk_pose(self, state: CpgState, lam: float) -> np.ndarray:
        return np.array(
            [
                walk_angle(self.walk_series[jid.joint], float(state.theta[i]), state.r, lam)
                for i, jid in enumerate(JOINTS)
            ]
        )

    def desired_pose(self, fsm: FsmState, state: CpgState, transition_elapsed: float) -> np.ndarray:
        """Desired angles (degrees) for the current planner state."""
        if fsm is FsmState.SITTING:
            return self.sitting_pose()
        if fsm is FsmState.STANDING:
            return np.zeros(len(JOINTS))
        if fsm is FsmState.SIT_TO_STAND:
            return np.array(
                [sit_stand_angle(self.sit_to_stand, jid.joint, transition_elapsed) for jid in JOINTS]
            )
        if fsm is FsmState.STAND_TO_SIT:
            return np.array(
                [sit_stand_angle(self.stand_to_sit, jid.joint, transition_elapsed) for jid in JOINTS]
            )
        if fsm in (FsmState.LOCOMOTION_INITIATION, FsmState.WALKING, FsmState.LOCOMOTION_COMPLETION):
            lam = ramp_gain(state.ramp_mode, state.ramp_elapsed, self.cpg_params.ramp_period)
            return self.walk_pose(state, lam)
        raise ValueError(f"no pose defined for state {fsm!r}")
