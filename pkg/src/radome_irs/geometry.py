"""Deterministic 3D layout of the antenna array and its reflecting surfaces.

Everything lives in the local coordinate system (LCS): antennas in the
x-O-z plane centred at the origin, boresight along +y.  Each antenna module
is ringed by four reflecting surfaces whose normals point inward toward the
module axis:

    local surface 1: normal (-1, 0, 0), plane at x = +offset
    local surface 2: normal (+1, 0, 0), plane at x = -offset
    local surface 3: normal (0, 0, -1), plane at z = +offset
    local surface 4: normal (0, 0, +1), plane at z = -offset

where offset = module half-aperture + lambda/2 standoff.  Element rows run
along +y starting at d_I/2; element columns are centred laterally on the
module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, SimConfig

# Inward normals, indexed by local surface 0..3.
SURFACE_NORMALS = np.array(
    [
        [-1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0],
    ]
)


@dataclass(frozen=True)
class Surface:
    """One reflecting surface: a planar grid of elements with a fixed normal."""

    module: int
    local_index: int  # 0..3
    normal: np.ndarray  # unit 3-vector
    n_rows: int  # along +y
    n_cols: int  # along z (surfaces 1,2) or x (surfaces 3,4)
    element_start: int  # first flat element index
    initial_phase: float

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def element_slice(self) -> slice:
        return slice(self.element_start, self.element_start + self.n_elements)


@dataclass(frozen=True)
class RadomeLayout:
    """Immutable geometry of antennas, surfaces, and reflecting elements."""

    config: SimConfig
    antenna_positions: np.ndarray  # (M, 3)
    antenna_module: np.ndarray  # (M,)
    element_positions: np.ndarray  # (N_total, 3)
    element_normals: np.ndarray  # (N_total, 3)
    element_surface: np.ndarray  # (N_total,) global surface id
    element_local_surface: np.ndarray  # (N_total,) 0..3
    element_module: np.ndarray  # (N_total,)
    element_row: np.ndarray  # (N_total,) 0-based along y
    element_col: np.ndarray  # (N_total,) 0-based lateral
    surfaces: tuple[Surface, ...]
    module_centers: np.ndarray  # (eta, 3)

    @property
    def n_antennas(self) -> int:
        return self.antenna_positions.shape[0]

    @property
    def n_elements(self) -> int:
        return self.element_positions.shape[0]

    @property
    def n_modules(self) -> int:
        return self.module_centers.shape[0]

    def surface_centroid(self, surface_id: int) -> np.ndarray:
        sl = self.surfaces[surface_id].element_slice
        return self.element_positions[sl].mean(axis=0)

    def layout_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for arr in (self.antenna_positions, self.element_positions, self.element_normals):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


def _antenna_grid(config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Antenna positions in z-major order (z outer, x inner) plus module ids."""
    d = config.d_A
    xs = (np.arange(config.M_x) - (config.M_x - 1) / 2.0) * d
    zs = (np.arange(config.M_z) - (config.M_z - 1) / 2.0) * d
    ix, iz = np.meshgrid(np.arange(config.M_x), np.arange(config.M_z))
    positions = np.stack(
        [xs[ix.ravel()], np.zeros(config.M), zs[iz.ravel()]], axis=1
    )
    side = config.eta_side
    bx = ix.ravel() // (config.M_x // side)
    bz = iz.ravel() // (config.M_z // side)
    module = bz * side + bx
    return positions, module


def build_layout(config: SimConfig) -> RadomeLayout:
    """Construct the full layout for ``config.eta`` modules.

    Raises ConfigError if eta does not partition the array into equal
    square modules (delegated to config validation).
    """
    config.validate()
    side = config.eta_side
    mx, mz = config.M_x // side, config.M_z // side
    n_cols = config.N_j2 // side
    n_rows = config.N_j1
    lam = config.wavelength
    d_a, d_i = config.d_A, config.d_I

    antenna_positions, antenna_module = _antenna_grid(config)

    module_centers = np.zeros((config.eta, 3))
    for mod in range(config.eta):
        module_centers[mod] = antenna_positions[antenna_module == mod].mean(axis=0)

    # Per-module plane offsets beyond the outermost antenna on each side.
    half_x = (mx - 1) * d_a / 2.0
    half_z = (mz - 1) * d_a / 2.0
    offset_x = half_x + lam / 2.0
    offset_z = half_z + lam / 2.0

    row_y = d_i / 2.0 + np.arange(n_rows) * d_i
    lateral = (np.arange(n_cols) - (n_cols - 1) / 2.0) * d_i

    positions, normals = [], []
    surf_id, local_surf, module_id, rows, cols = [], [], [], [], []
    surfaces: list[Surface] = []
    start = 0
    for mod in range(config.eta):
        cx, _, cz = module_centers[mod]
        for j in range(4):
            normal = SURFACE_NORMALS[j]
            # Plane sits on the opposite side of the module axis from the
            # normal so the normal points inward.
            if j < 2:
                plane_x = cx - normal[0] * offset_x
            else:
                plane_z = cz - normal[2] * offset_z
            for r in range(n_rows):
                for c in range(n_cols):
                    y = row_y[r]
                    if j < 2:
                        pos = (plane_x, y, cz + lateral[c])
                    else:
                        pos = (cx + lateral[c], y, plane_z)
                    positions.append(pos)
                    normals.append(normal)
                    surf_id.append(len(surfaces))
                    local_surf.append(j)
                    module_id.append(mod)
                    rows.append(r)
                    cols.append(c)
            surfaces.append(
                Surface(
                    module=mod,
                    local_index=j,
                    normal=normal,
                    n_rows=n_rows,
                    n_cols=n_cols,
                    element_start=start,
                    initial_phase=config.initial_phases[j],
                )
            )
            start += n_rows * n_cols

    return RadomeLayout(
        config=config,
        antenna_positions=antenna_positions,
        antenna_module=antenna_module,
        element_positions=np.array(positions),
        element_normals=np.array(normals),
        element_surface=np.array(surf_id),
        element_local_surface=np.array(local_surf),
        element_module=np.array(module_id),
        element_row=np.array(rows),
        element_col=np.array(cols),
        surfaces=tuple(surfaces),
        module_centers=module_centers,
    )


def module_partition(config: SimConfig) -> list[RadomeLayout]:
    """Split the layout into per-module sub-layouts (positions stay in the LCS).

    With eta=1 the single sub-layout equals build_layout(config) bit-for-bit.
    """
    full = build_layout(config)
    if config.eta == 1:
        return [full]
    parts = []
    for mod in range(config.eta):
        a_mask = full.antenna_module == mod
        e_mask = full.element_module == mod
        surfaces = [s for s in full.surfaces if s.module == mod]
        # Re-base element_start for the sub-layout's element array.
        rebased = []
        offset = surfaces[0].element_start
        for s in surfaces:
            rebased.append(
                Surface(
                    module=0,
                    local_index=s.local_index,
                    normal=s.normal,
                    n_rows=s.n_rows,
                    n_cols=s.n_cols,
                    element_start=s.element_start - offset,
                    initial_phase=s.initial_phase,
                )
            )
        parts.append(
            RadomeLayout(
                config=config,
                antenna_positions=full.antenna_positions[a_mask],
                antenna_module=np.zeros(a_mask.sum(), dtype=int),
                element_positions=full.element_positions[e_mask],
                element_normals=full.element_normals[e_mask],
                element_surface=full.element_surface[e_mask] - 4 * mod,
                element_local_surface=full.element_local_surface[e_mask],
                element_module=np.zeros(e_mask.sum(), dtype=int),
                element_row=full.element_row[e_mask],
                element_col=full.element_col[e_mask],
                surfaces=tuple(rebased),
                module_centers=full.module_centers[mod : mod + 1],
            )
        )
    return parts
