"""Environment, region masks, vehicle parameters and scenario files.

Grid convention: ``occupancy[row, col]`` with row 0 at the *bottom* (planner
frame is x right, y up). Cell ``(row, col)`` has its center at
``((col + 0.5) * resolution, (row + 0.5) * resolution)`` meters.

Scenario files are JSON::

    {
      "resolution_m": 0.5,
      "grid": ["..AA", "#.BB", ...],      # first string is the TOP row
      "aerial": {"footprint_m": 1.0, "speed_mps": 1.0},
      "ground": {"footprint_m": 1.0, "speed_mps": 1.0},
      "energy": {"endurance_s": 300, "takeoff_s": 0, "landing_s": 0},
      "launch_offset_m": [0.0, 1.0]
    }

Grid characters: ``.`` free, ``#`` obstacle, ``A`` aerial mask, ``G`` ground
mask, ``B`` both. Any other character is rejected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

AERIAL = "aerial"
GROUND = "ground"

GRID_CHARS = {".": (False, False, False), "#": (True, False, False),
              "A": (False, True, False), "G": (False, False, True),
              "B": (False, True, True)}


class ScenarioError(ValueError):
    """A scenario violates one of the model invariants.

    ``cell`` is ``(line, column)`` in the file's grid, i.e. counted from the top.
    """

    def __init__(self, field_name, message, cell=None):
        self.field = field_name
        self.cell = cell
        where = f" at grid[{cell[0]}][{cell[1]}]" if cell is not None else ""
        super().__init__(f"{field_name}: {message}{where}")


class ScenarioParseError(ScenarioError):
    """The scenario document is malformed."""


def _frozen(arr, dtype):
    arr = np.array(arr, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridMap:
    width: int
    height: int
    resolution: float
    occupancy: np.ndarray  # (height, width) bool, True = obstacle

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ScenarioError("grid", f"dimensions must be >= 1, got {self.width}x{self.height}")
        if not self.resolution > 0:
            raise ScenarioError("resolution_m", f"must be > 0, got {self.resolution}")
        occ = np.asarray(self.occupancy)
        if occ.shape != (self.height, self.width):
            raise ScenarioError("grid", f"occupancy shape {occ.shape} != ({self.height}, {self.width})")
        object.__setattr__(self, "occupancy", _frozen(occ, bool))

    @property
    def shape(self):
        return (self.height, self.width)

    @property
    def free(self):
        return ~self.occupancy

    def cell_center(self, row, col):
        return np.array([(col + 0.5) * self.resolution, (row + 0.5) * self.resolution])

    def cell_of(self, point):
        """(row, col) of the cell containing ``point``."""
        x, y = point
        return int(np.floor(y / self.resolution)), int(np.floor(x / self.resolution))

    def __eq__(self, other):
        return (isinstance(other, GridMap) and self.shape == other.shape
                and self.resolution == other.resolution
                and np.array_equal(self.occupancy, other.occupancy))


@dataclass(frozen=True, eq=False)
class RegionMask:
    cells: np.ndarray  # (height, width) bool, True = must be covered

    def __post_init__(self):
        object.__setattr__(self, "cells", _frozen(self.cells, bool))

    @property
    def shape(self):
        return self.cells.shape

    def __eq__(self, other):
        return isinstance(other, RegionMask) and np.array_equal(self.cells, other.cells)


@dataclass(frozen=True)
class VehicleParams:
    footprint_width: float
    speed: float
    role: str

    def __post_init__(self):
        if self.role not in (AERIAL, GROUND):
            raise ScenarioError(self.role, f"unknown vehicle role {self.role!r}")
        if not self.footprint_width > 0:
            raise ScenarioError(f"{self.role}.footprint_m", f"must be > 0, got {self.footprint_width}")
        if not self.speed > 0:
            raise ScenarioError(f"{self.role}.speed_mps", f"must be > 0, got {self.speed}")


@dataclass(frozen=True)
class EnergyModel:
    endurance: float
    takeoff_time: float = 0.0
    landing_time: float = 0.0

    def __post_init__(self):
        if not self.endurance > 0:
            raise ScenarioError("energy.endurance_s", f"must be > 0, got {self.endurance}")
        if self.takeoff_time < 0:
            raise ScenarioError("energy.takeoff_s", f"must be >= 0, got {self.takeoff_time}")
        if self.landing_time < 0:
            raise ScenarioError("energy.landing_s", f"must be >= 0, got {self.landing_time}")
        if not self.endurance > self.takeoff_time + self.landing_time:
            raise ScenarioError("energy.endurance_s", "must exceed takeoff_s + landing_s")

    @property
    def flight_time(self):
        """Seconds of flight (or hover) available per charge."""
        return self.endurance - self.takeoff_time - self.landing_time

    def flight_range(self, speed):
        return self.flight_time * speed


@dataclass(frozen=True)
class Scenario:
    map: GridMap
    aerial_region: RegionMask
    ground_region: RegionMask
    aerial: VehicleParams
    ground: VehicleParams
    energy: EnergyModel
    launch_offset: tuple = (0.0, 0.0)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "launch_offset",
                           (float(self.launch_offset[0]), float(self.launch_offset[1])))
        validate_scenario(self)


def free_cell_count(mask, grid=None):
    """Number of cells that are masked and not obstacles."""
    cells = mask.cells
    if grid is not None:
        cells = cells & ~grid.occupancy
    return int(np.count_nonzero(cells))


def covered_cells(mask, grid):
    return mask.cells & ~grid.occupancy


def validate_scenario(sc):
    if sc.aerial.role != AERIAL:
        raise ScenarioError("aerial.role", f"expected {AERIAL!r}, got {sc.aerial.role!r}")
    if sc.ground.role != GROUND:
        raise ScenarioError("ground.role", f"expected {GROUND!r}, got {sc.ground.role!r}")
    grid = sc.map
    free_label, _ = ndimage.label(grid.free)
    for name, mask, veh in (("aerial_region", sc.aerial_region, sc.aerial),
                            ("ground_region", sc.ground_region, sc.ground)):
        if mask.shape != grid.shape:
            raise ScenarioError(name, f"mask shape {mask.shape} != map shape {grid.shape}")
        clash = np.argwhere(mask.cells & grid.occupancy)
        if len(clash):
            r, c = clash[0]
            raise ScenarioError(name, "masked cell is an obstacle",
                                cell=(grid.height - 1 - int(r), int(c)))
        if not mask.cells.any():
            raise ScenarioError(name, "mask is empty")
        if veh.footprint_width < grid.resolution - 1e-12:
            raise ScenarioError(f"{veh.role}.footprint_m",
                                f"footprint {veh.footprint_width} m is below the map resolution "
                                f"{grid.resolution} m")
        labels = np.unique(free_label[mask.cells])
        if len(labels) > 1:
            r, c = np.argwhere(mask.cells & (free_label != labels[0]))[0]
            raise ScenarioError(name, "masked cells are not mutually reachable through free space",
                                cell=(grid.height - 1 - int(r), int(c)))


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def _require(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise ScenarioParseError(f"{where}{key}", "missing field")
    return doc[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(where, f"expected a number, got {value!r}")
    return float(value)


def scenario_from_dict(doc, name=""):
    res = _number(_require(doc, "resolution_m", ""), "resolution_m")
    rows = _require(doc, "grid", "")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, str) for r in rows):
        raise ScenarioParseError("grid", "expected a non-empty list of strings")
    width = len(rows[0])
    height = len(rows)
    occ = np.zeros((height, width), bool)
    amask = np.zeros((height, width), bool)
    gmask = np.zeros((height, width), bool)
    for top_row, line in enumerate(rows):
        if len(line) != width:
            raise ScenarioParseError("grid", f"row {top_row} has length {len(line)}, expected {width}")
        r = height - 1 - top_row
        for c, ch in enumerate(line):
            if ch not in GRID_CHARS:
                raise ScenarioParseError("grid", f"unknown character {ch!r}", cell=(top_row, c))
            occ[r, c], amask[r, c], gmask[r, c] = GRID_CHARS[ch]
    vehicles = {}
    for role in (AERIAL, GROUND):
        sub = _require(doc, role, "")
        vehicles[role] = VehicleParams(
            footprint_width=_number(_require(sub, "footprint_m", f"{role}."), f"{role}.footprint_m"),
            speed=_number(_require(sub, "speed_mps", f"{role}."), f"{role}.speed_mps"),
            role=role)
    en = _require(doc, "energy", "")
    energy = EnergyModel(
        endurance=_number(_require(en, "endurance_s", "energy."), "energy.endurance_s"),
        takeoff_time=_number(en.get("takeoff_s", 0.0), "energy.takeoff_s"),
        landing_time=_number(en.get("landing_s", 0.0), "energy.landing_s"))
    offset = doc.get("launch_offset_m", [0.0, 0.0])
    if not isinstance(offset, list) or len(offset) != 2:
        raise ScenarioParseError("launch_offset_m", "expected [x, y]")
    offset = (_number(offset[0], "launch_offset_m"), _number(offset[1], "launch_offset_m"))
    grid = GridMap(width=width, height=height, resolution=res, occupancy=occ)
    return Scenario(map=grid, aerial_region=RegionMask(amask), ground_region=RegionMask(gmask),
                    aerial=vehicles[AERIAL], ground=vehicles[GROUND], energy=energy,
                    launch_offset=offset, name=name or doc.get("name", ""))


def scenario_to_dict(sc):
    inv = {v: k for k, v in GRID_CHARS.items()}
    occ, am, gm = sc.map.occupancy, sc.aerial_region.cells, sc.ground_region.cells
    rows = []
    for r in range(sc.map.height - 1, -1, -1):
        rows.append("".join(inv[(bool(occ[r, c]), bool(am[r, c]), bool(gm[r, c]))]
                            for c in range(sc.map.width)))
    doc = {
        "resolution_m": sc.map.resolution,
        "grid": rows,
        "aerial": {"footprint_m": sc.aerial.footprint_width, "speed_mps": sc.aerial.speed},
        "ground": {"footprint_m": sc.ground.footprint_width, "speed_mps": sc.ground.speed},
        "energy": {"endurance_s": sc.energy.endurance, "takeoff_s": sc.energy.takeoff_time,
                   "landing_s": sc.energy.landing_time},
        "launch_offset_m": list(sc.launch_offset),
    }
    if sc.name:
        doc["name"] = sc.name
    return doc


def load_scenario(path):
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(str(path), f"invalid JSON ({exc})") from exc
    return scenario_from_dict(doc, name=doc.get("name", path.stem) if isinstance(doc, dict) else "")


def save_scenario(sc, path):
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n")


def grid_shape_for(width_m, height_m, resolution):
    """Cells needed to tile a ``width_m`` x ``height_m`` rectangle."""
    return int(round(width_m / resolution)), int(round(height_m / resolution))
