"""Multipath sampling and assembly of the reflection channel tensors.

The per-element channel components factor into a user-side term, an
element-to-element pair term, and an element-to-antenna term:

    f[k, e, m] = sqrt(2) * S[k, e] * T[e, m]
    g[k, p, m] = 2 * S[k, a_p] * W[p] * T[b_p, m]

with S the path-summed user-side response (array response x sqrt of the
user-side reflection-gain factor), T the element-to-antenna LoS gain times
the antenna-side reflection-gain factor and antenna gain, and W the
inter-element LoS gain times both pair-side reflection-gain factors for
ordered pair p = (a_p, b_p).  build_tensors exploits this; the scalar
single_reflection_component / double_reflection_component functions follow
the defining products term by term and serve as an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import SimConfig
from .geometry import RadomeLayout, build_layout
from .propagation import (
    ELEMENT_WISE,
    FAR_FIELD_ISOTROPIC,
    Direction,
    IrsAngles,
    antenna_gain_from_unit,
    direction_cosines,
    element_reflection_gain,
    half_gain_factor,
    irs_array_response,
    los_gain,
    steering_vector,
)
from .seeding import substream

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PathSet:
    """Per-user multipath parameters in the LCS."""

    gains: np.ndarray  # (K, L) complex
    theta: np.ndarray  # (K, L)
    phi: np.ndarray  # (K, L)

    @property
    def n_users(self) -> int:
        return self.gains.shape[0]

    @property
    def n_paths(self) -> int:
        return self.gains.shape[1]

    @property
    def unit_vectors(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.stack(
            [st * np.sin(self.phi), np.cos(self.theta), st * np.cos(self.phi)], axis=-1
        )


def sample_paths(config: SimConfig, realization: int = 0, rng=None) -> PathSet:
    """Draw one multipath realization; deterministic in (master_seed, realization)."""
    if rng is None:
        rng = substream(config.master_seed, "paths", realization)
    shape = (config.K, config.L_k)
    scale = math.sqrt(config.path_gain_variance / 2.0)
    gains = rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)
    if config.sampling_mode == "lcs-direct":
        theta = rng.uniform(0.0, np.pi / 2, shape)
        phi = rng.uniform(0.0, 2 * np.pi, shape)
    else:  # global-ground: uniform on the lower global hemisphere, then tilt
        z = rng.uniform(-1.0, 0.0, shape)
        az = rng.uniform(0.0, 2 * np.pi, shape)
        s = np.sqrt(1.0 - z**2)
        ugx, ugy, ugz = s * np.cos(az), s * np.sin(az), z
        ct, st = math.cos(config.theta_tilt), math.sin(config.theta_tilt)
        ulx = ugx
        uly = ugy * ct - ugz * st
        ulz = ugy * st + ugz * ct
        theta = np.arccos(np.clip(uly, -1.0, 1.0))
        phi = np.arctan2(ulx, ulz) % (2 * np.pi)
    return PathSet(gains=gains, theta=theta, phi=phi)


@dataclass(frozen=True)
class ChannelTensors:
    """Direct, single-reflection, and double-reflection channel components.

    For grouped tensors the "element" axis indexes subsurfaces instead of
    raw elements; all per-element maps refer to that axis.
    """

    direct: np.ndarray  # (K, M)
    f: np.ndarray  # (K, N, M)
    g: np.ndarray  # (K, P, M)
    pair_first: np.ndarray  # (P,) first-bounce element index
    pair_second: np.ndarray  # (P,) second-bounce element index
    element_surface: np.ndarray  # (N,) global surface id
    element_module: np.ndarray  # (N,)
    surface_shapes: tuple[tuple[int, int], ...]  # (rows, cols) per surface
    layout_hash: str = ""
    seed: int = 0

    @property
    def n_users(self) -> int:
        return self.direct.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.direct.shape[1]

    @property
    def n_elements(self) -> int:
        return self.f.shape[1]

    @property
    def n_pairs(self) -> int:
        return self.g.shape[1]

    def masked(self, setup: str) -> "ChannelTensors":
        """Zeroed copies for the ablation setups."""
        if setup == "full":
            return self
        if setup == "single":
            return replace(self, g=np.zeros_like(self.g))
        if setup == "double":
            return replace(self, f=np.zeros_like(self.f))
        if setup == "none":
            return replace(self, f=np.zeros_like(self.f), g=np.zeros_like(self.g))
        raise ValueError(f"unknown setup {setup!r}")


def direct_channel(paths: PathSet, config: SimConfig, pattern: str | None = None) -> np.ndarray:
    """Direct user-to-array channel rows, shape (K, M)."""
    pattern = pattern or config.pattern
    u = paths.unit_vectors  # (K, L, 3)
    gains = paths.gains * np.sqrt(antenna_gain_from_unit(u, pattern))
    inc = 2 * config.d_A / config.wavelength
    # Kronecker of the z-axis and x-axis steering vectors.
    ez = np.exp(1j * np.pi * inc * u[..., 2, None] * np.arange(config.M_z))  # (K, L, Mz)
    ex = np.exp(1j * np.pi * inc * u[..., 0, None] * np.arange(config.M_x))  # (K, L, Mx)
    kron = ez[..., :, None] * ex[..., None, :]  # (K, L, Mz, Mx)
    h = np.einsum("kl,klm->km", gains, kron.reshape(*u.shape[:2], -1))
    return h


def _user_side_factors(paths: PathSet, layout: RadomeLayout, mode: str) -> np.ndarray:
    """S[k, e]: path-summed array response times user-side gain factor."""
    config = layout.config
    u = paths.unit_vectors  # (K, L, 3)
    coeff = np.pi * 2 * config.d_I / config.wavelength
    S = np.zeros((paths.n_users, layout.n_elements), dtype=complex)
    for surface in layout.surfaces:
        sl = surface.element_slice
        cos_t, sc, ss = direction_cosines(u, surface.local_index + 1)  # (K, L) each
        rho = half_gain_factor(cos_t, config.area, config.wavelength, mode)
        rows = layout.element_row[sl]
        cols = layout.element_col[sl]
        exponent = coeff * (sc[..., None] * rows + ss[..., None] * cols)
        alpha = np.exp(1j * (surface.initial_phase + exponent))  # (K, L, Ne)
        S[:, sl] = np.einsum("kl,kle->ke", paths.gains * rho, alpha)
    return S


def _element_antenna_factors(layout: RadomeLayout, mode: str, pattern: str) -> np.ndarray:
    """T[e, m]: antenna-side gain factor x LoS gain x sqrt(antenna gain)."""
    config = layout.config
    diff = layout.antenna_positions[None, :, :] - layout.element_positions[:, None, :]
    d = np.linalg.norm(diff, axis=-1)  # (N, M)
    cos_out = np.einsum("nmd,nd->nm", diff, layout.element_normals) / d
    rho = half_gain_factor(cos_out, config.area, config.wavelength, mode)
    xi = (config.wavelength / (4 * np.pi * d)) * np.exp(-1j * 2 * np.pi * d / config.wavelength)
    gain = antenna_gain_from_unit(-diff / d[..., None], pattern)
    T = rho * xi * np.sqrt(gain)
    if layout.n_modules > 1:
        # LoS links exist only between an antenna and the surfaces of its module.
        cross = layout.element_module[:, None] != layout.antenna_module[None, :]
        T[cross] = 0.0
    return T


def _pair_table(layout: RadomeLayout) -> tuple[np.ndarray, np.ndarray]:
    """Ordered in-module pairs (first bounce, second bounce) across surfaces."""
    first, second = [], []
    for mod in range(layout.n_modules):
        idx = np.nonzero(layout.element_module == mod)[0]
        surf = layout.element_surface[idx]
        for a_pos, a in enumerate(idx):
            different = idx[surf != surf[a_pos]]
            first.extend([a] * len(different))
            second.extend(different)
    return np.array(first, dtype=int), np.array(second, dtype=int)


def _pair_factors(layout: RadomeLayout, pair_first, pair_second, mode: str) -> np.ndarray:
    """W[p]: both pair-side gain factors x inter-element LoS gain."""
    config = layout.config
    wa = layout.element_positions[pair_first]
    wb = layout.element_positions[pair_second]
    diff = wb - wa
    d = np.linalg.norm(diff, axis=-1)
    # Pairs with an endpoint on (or behind) the partner's plane have zero gain;
    # that covers touching corner elements, whose separation is exactly zero.
    dot_ab = np.einsum("pd,pd->p", diff, layout.element_normals[pair_first])
    dot_ba = np.einsum("pd,pd->p", -diff, layout.element_normals[pair_second])
    live = (d > 0.0) & (dot_ab > 0.0) & (dot_ba > 0.0)
    d_safe = np.where(live, d, 1.0)
    rho_ab = half_gain_factor(dot_ab / d_safe, config.area, config.wavelength, mode)
    rho_ba = half_gain_factor(dot_ba / d_safe, config.area, config.wavelength, mode)
    zeta = (config.wavelength / (4 * np.pi * d_safe)) * np.exp(
        -1j * 2 * np.pi * d_safe / config.wavelength
    )
    return np.where(live, rho_ab * zeta * rho_ba, 0.0)


def build_tensors(
    paths: PathSet,
    layout: RadomeLayout,
    pattern: str | None = None,
    seed: int = 0,
) -> ChannelTensors:
    """Materialize the direct, single- and double-reflection tensors."""
    config = layout.config
    pattern = pattern or config.pattern
    mode = ELEMENT_WISE
    S = _user_side_factors(paths, layout, mode)
    T = _element_antenna_factors(layout, mode, pattern)
    pair_first, pair_second = _pair_table(layout)
    W = _pair_factors(layout, pair_first, pair_second, mode)
    f = SQRT2 * S[:, :, None] * T[None, :, :]
    g = 2.0 * S[:, pair_first, None] * W[None, :, None] * T[None, pair_second, :]
    return ChannelTensors(
        direct=direct_channel(paths, config, pattern),
        f=f,
        g=g,
        pair_first=pair_first,
        pair_second=pair_second,
        element_surface=layout.element_surface.copy(),
        element_module=layout.element_module.copy(),
        surface_shapes=tuple((s.n_rows, s.n_cols) for s in layout.surfaces),
        layout_hash=layout.layout_hash(),
        seed=seed,
    )


def build_far_field_tensors(
    paths: PathSet,
    layout: RadomeLayout,
    pattern: str | None = None,
    seed: int = 0,
) -> ChannelTensors:
    """Mismatched benchmark: plane-wave IRS-antenna and IRS-IRS links.

    Each surface-to-array and surface-to-surface link shares the common
    centroid-to-centroid complex gain; per-element phases follow the
    plane-wave direction between centroids.  Reflection gains use the
    isotropic (indicator) model.
    """
    config = layout.config
    if config.eta != 1:
        raise ValueError("far-field benchmark is defined for eta = 1")
    pattern = pattern or config.pattern
    lam = config.wavelength
    k0 = 2 * np.pi / lam
    mode = FAR_FIELD_ISOTROPIC

    S = _user_side_factors(paths, layout, mode)

    centroids = np.array([layout.surface_centroid(s) for s in range(len(layout.surfaces))])
    # Surface -> array (array centroid is the origin).
    T = np.zeros((layout.n_elements, layout.n_antennas), dtype=complex)
    for sid, surface in enumerate(layout.surfaces):
        sl = surface.element_slice
        c = centroids[sid]
        d_c = np.linalg.norm(c)
        u_prop = -c / d_c  # propagation direction surface -> array
        indicator = 1.0 if float(u_prop @ surface.normal) > 0.0 else 0.0
        dist = (
            d_c
            + (layout.antenna_positions @ u_prop)[None, :]
            - ((layout.element_positions[sl] - c) @ u_prop)[:, None]
        )
        xi = (lam / (4 * np.pi * d_c)) * np.exp(-1j * k0 * dist)
        gain = antenna_gain_from_unit(c / d_c, pattern)
        T[sl, :] = indicator * xi * math.sqrt(gain)

    pair_first, pair_second = _pair_table(layout)
    sa = layout.element_surface[pair_first]
    sb = layout.element_surface[pair_second]
    W = np.zeros(len(pair_first), dtype=complex)
    for ja in range(len(layout.surfaces)):
        for jb in range(len(layout.surfaces)):
            mask = (sa == ja) & (sb == jb)
            if not mask.any():
                continue
            ca, cb = centroids[ja], centroids[jb]
            d_c = np.linalg.norm(cb - ca)
            u_prop = (cb - ca) / d_c
            ind_a = 1.0 if float(u_prop @ layout.surfaces[ja].normal) > 0.0 else 0.0
            ind_b = 1.0 if float(-u_prop @ layout.surfaces[jb].normal) > 0.0 else 0.0
            dist = (
                d_c
                + (layout.element_positions[pair_second[mask]] - cb) @ u_prop
                - (layout.element_positions[pair_first[mask]] - ca) @ u_prop
            )
            W[mask] = ind_a * ind_b * (lam / (4 * np.pi * d_c)) * np.exp(-1j * k0 * dist)

    f = SQRT2 * S[:, :, None] * T[None, :, :]
    g = 2.0 * S[:, pair_first, None] * W[None, :, None] * T[None, pair_second, :]
    return ChannelTensors(
        direct=direct_channel(paths, config, pattern),
        f=f,
        g=g,
        pair_first=pair_first,
        pair_second=pair_second,
        element_surface=layout.element_surface.copy(),
        element_module=layout.element_module.copy(),
        surface_shapes=tuple((s.n_rows, s.n_cols) for s in layout.surfaces),
        layout_hash=layout.layout_hash(),
        seed=seed,
    )


def assemble_effective_channel(tensors: ChannelTensors, theta: np.ndarray) -> np.ndarray:
    """h_k = direct + f.theta + g.(theta_a * theta_b), shape (K, M)."""
    theta = np.asarray(theta)
    if theta.shape != (tensors.n_elements,):
        raise ValueError(
            f"reflection state has {theta.shape} coefficients, expected ({tensors.n_elements},)"
        )
    h = tensors.direct + np.einsum("e,kem->km", theta, tensors.f)
    if tensors.n_pairs:
        pair_coeff = theta[tensors.pair_first] * theta[tensors.pair_second]
        h = h + np.einsum("p,kpm->km", pair_coeff, tensors.g)
    return h


# --- scalar reference route -------------------------------------------------

def single_reflection_component(
    paths: PathSet, layout: RadomeLayout, pattern: str, k: int, element: int, m: int
) -> complex:
    """One f entry computed term by term from the defining product."""
    config = layout.config
    surface = layout.surfaces[layout.element_surface[element]]
    j = surface.local_index + 1
    w = layout.element_positions[element]
    s_m = layout.antenna_positions[m]
    delta = layout.element_normals[element]
    d_out = s_m - w
    theta_out = math.acos(float(d_out @ delta) / np.linalg.norm(d_out))
    total = 0.0 + 0.0j
    for l in range(paths.n_paths):
        direction = Direction(paths.theta[k, l], paths.phi[k, l])
        angles = _surface_angles(direction, j)
        alpha = irs_array_response(
            angles,
            int(layout.element_row[element]) + 1,
            int(layout.element_col[element]) + 1,
            config.d_I,
            config.wavelength,
            surface.initial_phase,
        )
        gain = element_reflection_gain(
            angles.theta, theta_out, config.area, config.wavelength
        )
        xi = los_gain(w, s_m, config.wavelength)
        u_elem = (w - s_m) / np.linalg.norm(w - s_m)
        ant = antenna_gain_from_unit(u_elem, pattern)
        total += paths.gains[k, l] * alpha * math.sqrt(gain) * xi * math.sqrt(float(ant))
    return total


def double_reflection_component(
    paths: PathSet,
    layout: RadomeLayout,
    pattern: str,
    k: int,
    first: int,
    second: int,
    m: int,
) -> complex:
    """One g entry computed term by term; hard 0 across modules."""
    config = layout.config
    if layout.element_module[first] != layout.element_module[second]:
        return 0.0 + 0.0j
    if layout.element_surface[first] == layout.element_surface[second]:
        raise ValueError("double reflection requires two different surfaces")
    surface_a = layout.surfaces[layout.element_surface[first]]
    wa = layout.element_positions[first]
    wb = layout.element_positions[second]
    s_m = layout.antenna_positions[m]
    delta_a = layout.element_normals[first]
    delta_b = layout.element_normals[second]
    d_ab = np.linalg.norm(wb - wa)
    if d_ab == 0.0:
        return 0.0 + 0.0j  # touching corner elements: zero-gain limit
    clamp = lambda x: min(1.0, max(-1.0, x))
    theta_ab = math.acos(clamp(float((wb - wa) @ delta_a) / d_ab))
    theta_ba = math.acos(clamp(float((wa - wb) @ delta_b) / d_ab))
    theta_bm = math.acos(clamp(float((s_m - wb) @ delta_b) / np.linalg.norm(s_m - wb)))
    total = 0.0 + 0.0j
    for l in range(paths.n_paths):
        direction = Direction(paths.theta[k, l], paths.phi[k, l])
        angles = _surface_angles(direction, surface_a.local_index + 1)
        alpha = irs_array_response(
            angles,
            int(layout.element_row[first]) + 1,
            int(layout.element_col[first]) + 1,
            config.d_I,
            config.wavelength,
            surface_a.initial_phase,
        )
        gain_a = element_reflection_gain(angles.theta, theta_ab, config.area, config.wavelength)
        zeta = los_gain(wa, wb, config.wavelength)
        gain_b = element_reflection_gain(theta_ba, theta_bm, config.area, config.wavelength)
        xi = los_gain(wb, s_m, config.wavelength)
        u_elem = (wb - s_m) / np.linalg.norm(wb - s_m)
        ant = antenna_gain_from_unit(u_elem, pattern)
        total += (
            paths.gains[k, l]
            * alpha
            * math.sqrt(gain_a)
            * zeta
            * math.sqrt(gain_b)
            * xi
            * math.sqrt(float(ant))
        )
    return total


def _surface_angles(direction: Direction, local_surface: int) -> IrsAngles:
    from .propagation import aoa_transform

    return aoa_transform(direction, local_surface)


# --- element grouping -------------------------------------------------------

@dataclass(frozen=True)
class Grouping:
    """Map from raw element to shared-coefficient subsurface."""

    element_to_group: np.ndarray  # (N,)
    n_groups: int


def column_grouping(layout: RadomeLayout) -> Grouping:
    """Tie each surface's elements sharing a lateral column (same y-axis run)."""
    group = np.full(layout.n_elements, -1, dtype=int)
    next_id = 0
    for surface in layout.surfaces:
        sl = surface.element_slice
        group[sl] = next_id + layout.element_col[sl]
        next_id += surface.n_cols
    return Grouping(element_to_group=group, n_groups=next_id)


def apply_grouping(tensors: ChannelTensors, grouping: Grouping) -> ChannelTensors:
    """Sum member contributions so one coefficient drives each subsurface."""
    grp = np.asarray(grouping.element_to_group)
    if grp.shape != (tensors.n_elements,) or np.any(grp < 0) or np.any(grp >= grouping.n_groups):
        raise ValueError("grouping must map every element to a valid subsurface")
    n_groups = grouping.n_groups
    group_surface = np.full(n_groups, -1, dtype=int)
    group_module = np.full(n_groups, -1, dtype=int)
    for e in range(tensors.n_elements):
        gid = grp[e]
        if group_surface[gid] == -1:
            group_surface[gid] = tensors.element_surface[e]
            group_module[gid] = tensors.element_module[e]
        elif group_surface[gid] != tensors.element_surface[e]:
            raise ValueError("a subsurface may not span surfaces")

    fg = np.zeros((n_groups, tensors.n_users, tensors.n_antennas), dtype=complex)
    np.add.at(fg, grp, tensors.f.transpose(1, 0, 2))
    fg = fg.transpose(1, 0, 2)

    # Grouped ordered pair table mirrors the element-level construction.
    pair_first, pair_second, pair_index = [], [], {}
    for mod in sorted(set(group_module.tolist())):
        idx = np.nonzero(group_module == mod)[0]
        surf = group_surface[idx]
        for a_pos, a in enumerate(idx):
            for b in idx[surf != surf[a_pos]]:
                pair_index[(int(a), int(b))] = len(pair_first)
                pair_first.append(int(a))
                pair_second.append(int(b))
    pair_first = np.array(pair_first, dtype=int)
    pair_second = np.array(pair_second, dtype=int)

    raw_pairs = np.stack([grp[tensors.pair_first], grp[tensors.pair_second]], axis=1)
    pid = np.array([pair_index[(int(a), int(b))] for a, b in raw_pairs], dtype=int)
    gg = np.zeros((len(pair_first), tensors.n_users, tensors.n_antennas), dtype=complex)
    np.add.at(gg, pid, tensors.g.transpose(1, 0, 2))
    gg = gg.transpose(1, 0, 2)

    # One (1, count) pseudo-shape per surface keeps codebook sizes meaningful.
    counts = [int(np.sum(group_surface == s)) for s in range(len(tensors.surface_shapes))]
    return ChannelTensors(
        direct=tensors.direct.copy(),
        f=fg,
        g=gg,
        pair_first=pair_first,
        pair_second=pair_second,
        element_surface=group_surface,
        element_module=group_module,
        surface_shapes=tuple((1, c) for c in counts),
        layout_hash=tensors.layout_hash,
        seed=tensors.seed,
    )


def random_reflection_state(n: int, rng) -> np.ndarray:
    """Unit-modulus state with phases uniform on [0, 2*pi)."""
    return np.exp(1j * rng.uniform(0.0, 2 * np.pi, n))


def dump_tensors(tensors: ChannelTensors, fh) -> None:
    """Text dump, one complex entry per line as "re im", for cross-diffing."""
    for name, arr in (("direct", tensors.direct), ("single", tensors.f), ("double", tensors.g)):
        fh.write(f"# {name} {' '.join(str(s) for s in arr.shape)}\n")
        for value in arr.ravel():
            fh.write(f"{value.real:.17g} {value.imag:.17g}\n")
