"""Pseudo-spectral incompressible flow on the periodic unit box.

The state is the divergence-free velocity spectrum.  Time stepping is
classical RK4 on the integrating-factor transform, so the viscous factor
exp(-4 pi^2 nu |xi|^2 dt) is applied exactly and only the momentum flux
is integrated numerically.

The momentum flux is the divergence form of the advection term with a
mandatory dealiasing rule.  Under either rule the retained modes of the
grid product equal those of the true product, which makes the divergence
form identical (to rounding) to the skew-symmetric average
1/2 [(u.grad)u + div(u x u)]: the discrete flux then moves no energy at
all, and dissipation comes from the exact viscous factor alone.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as _fft

from .dealias import (
    DEALIAS_MODES,
    THREE_HALVES,
    TWO_THIRDS,
    pad_spectrum,
    truncate_spectrum,
    twothirds_mask,
)
from .spectral import (Grid, SpectralField, grid_points, hermitianize,
                       radius_squared, wavevectors)

CHECKPOINT_MAGIC = b"LPNS1"


class BlowUpError(RuntimeError):
    """Raised when the state leaves the finite floats; carries the last
    finite state."""

    def __init__(self, time: float, state: "VelocityState"):
        super().__init__(f"solution left the finite floats at t = {time:.6g}")
        self.time = time
        self.state = state


@dataclass(frozen=True)
class VelocityState:
    """Spectral velocity (3 complex coefficient cubes in FFT layout)."""

    grid: Grid
    nu: float
    time: float
    components: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __post_init__(self):
        for c in self.components:
            if c.shape != self.grid.shape:
                raise ValueError("component shape does not match grid")

    def copy(self) -> "VelocityState":
        return replace(self, components=tuple(c.copy() for c in self.components))


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "taylor-green"
    amplitude: float = 1.0
    lam: int = 1
    seed: int = 0
    slope: float = 2.0
    path: str | None = None


@dataclass(frozen=True)
class SolverConfig:
    n: int
    nu: float
    dt: float
    t_end: float
    dealias: str = TWO_THIRDS
    initial: InitialSpec = field(default_factory=InitialSpec)
    checkpoint_interval: float | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"simulation grid must be a power of two >= 8, got {self.n}")
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise ValueError(f"viscosity must be positive, got {self.nu}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"time step must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.dealias not in DEALIAS_MODES:
            raise ValueError(f"dealias must be one of {DEALIAS_MODES}")


@lru_cache(maxsize=16)
def _paired_wavevectors(n: int):
    """Integer wavevectors with the unpaired plane xi_a = -n/2 zeroed on
    its own axis.  That plane has no conjugate partner, so first-order
    multipliers built from the raw values are even there while every
    mirrored mode is odd; mixing the two leaks non-Hermitian rounding
    noise into otherwise empty modes.  Dealiasing keeps real content off
    the plane anyway, so zeroing changes nothing physical."""
    out = []
    for a, k in enumerate(wavevectors(n)):
        k = k.astype(np.float64).copy()
        sl = [slice(None)] * k.ndim
        sl[a] = n // 2
        k[tuple(sl)] = 0.0
        k.flags.writeable = False
        out.append(k)
    return tuple(out)


@lru_cache(maxsize=16)
def _projector_rays(n: int):
    """xi_a / |xi|^2 for the Leray kernel, on the paired wavevectors;
    modes with no paired components (the zero mode, pure Nyquist modes)
    map to 0 and are left untouched by the projection."""
    k1, k2, k3 = _paired_wavevectors(n)
    r2 = k1**2 + k2**2 + k3**2
    safe = np.where(r2 > 0.0, r2, 1.0)
    out = []
    for k in (k1, k2, k3):
        q = np.ascontiguousarray(np.broadcast_to(k / safe, (n, n, n)))
        q.flags.writeable = False
        out.append(q)
    return tuple(out)


def leray_project(components, n: int):
    """Remove the gradient part: u_a <- (delta_ab - xi_a xi_b/|xi|^2) u_b,
    with the zero mode forced to 0 (mean velocity is not tracked)."""
    k1, k2, k3 = _paired_wavevectors(n)
    q1, q2, q3 = _projector_rays(n)
    div = k1 * components[0] + k2 * components[1] + k3 * components[2]
    out = tuple(c - q * div for c, q in zip(components, (q1, q2, q3)))
    for c in out:
        c[0, 0, 0] = 0.0
    return out


def _physicals(components, n: int):
    return [np.ascontiguousarray((_fft.ifftn(c) * n**3).real) for c in components]


def flux_tensor(components, grid: Grid, dealias: str):
    """Dealiased spectra of the six distinct products u_a u_b, keyed (a, b)."""
    n = grid.n
    if dealias == TWO_THIRDS:
        mask = twothirds_mask(n)
        u = _physicals([c * mask for c in components], n)
        out = {}
        for a in range(3):
            for b in range(a, 3):
                out[(a, b)] = (_fft.fftn(u[a] * u[b]) / n**3) * mask
        return out
    n_fine = (3 * n) // 2
    padded = [pad_spectrum(SpectralField(grid, c), n_fine) for c in components]
    u = _physicals([p.coeffs for p in padded], n_fine)
    out = {}
    fine = Grid(n_fine)
    for a in range(3):
        for b in range(a, 3):
            T = _fft.fftn(u[a] * u[b]) / n_fine**3
            out[(a, b)] = truncate_spectrum(SpectralField(fine, T), n).coeffs
    return out


def nonlinear_term(components, grid: Grid, dealias: str = TWO_THIRDS):
    """Momentum flux div(u x u) with alias-free products.

    For divergence-free input this equals the dealiased skew-symmetric
    average of the advective and divergence forms, so pairing it with the
    spectral inner product moves no energy between modes.
    """
    n = grid.n
    k = wavevectors(n)
    T = flux_tensor(components, grid, dealias)
    two_pi_i = 2j * np.pi
    out = []
    for b in range(3):
        acc = np.zeros(grid.shape, dtype=np.complex128)
        for a in range(3):
            key = (a, b) if a <= b else (b, a)
            acc += k[a] * T[key]
        out.append(two_pi_i * acc)
    return tuple(out)


def pressure_solve(state: VelocityState, dealias: str = TWO_THIRDS) -> SpectralField:
    """Mean-free pressure from the div-div of the momentum flux:
    p_hat(xi) = - sum_ab xi_a xi_b / |xi|^2 (u_a u_b)_hat(xi)."""
    n = state.grid.n
    k1, k2, k3 = wavevectors(n)
    r2 = radius_squared(n).copy()
    r2[0, 0, 0] = 1.0
    T = flux_tensor(state.components, state.grid, dealias)
    k = (k1, k2, k3)
    acc = np.zeros(state.grid.shape, dtype=np.complex128)
    for a in range(3):
        for b in range(3):
            key = (a, b) if a <= b else (b, a)
            acc += k[a] * k[b] * T[key]
    p = -acc / r2
    p[0, 0, 0] = 0.0
    return SpectralField(state.grid, p)


class Stepper:
    """Precomputed integrating-factor RK4 machinery for one (grid, nu, dt)."""

    def __init__(self, grid: Grid, nu: float, dt: float, dealias: str = TWO_THIRDS):
        self.grid = grid
        self.nu = nu
        self.dt = dt
        self.dealias = dealias
        lam = nu * (2 * np.pi) ** 2 * radius_squared(grid.n)
        self.e_half = np.exp(-lam * (dt / 2.0))
        self.e_full = np.exp(-lam * dt)

    def rhs(self, components):
        n = nonlinear_term(components, self.grid, self.dealias)
        p = leray_project(tuple(-c for c in n), self.grid.n)
        return p

    def advance(self, components):
        dt, E, E2 = self.dt, self.e_half, self.e_full
        u = components
        k1 = self.rhs(u)
        u2 = tuple(E * (u[a] + (dt / 2) * k1[a]) for a in range(3))
        k2 = self.rhs(u2)
        u3 = tuple(E * u[a] + (dt / 2) * k2[a] for a in range(3))
        k3 = self.rhs(u3)
        u4 = tuple(E2 * u[a] + dt * (E * k3[a]) for a in range(3))
        k4 = self.rhs(u4)
        return tuple(
            E2 * u[a] + (dt / 6) * (E2 * k1[a] + 2 * E * (k2[a] + k3[a]) + k4[a])
            for a in range(3)
        )


def step(state: VelocityState, config: SolverConfig) -> VelocityState:
    """Advance one dt; divergence-free is re-enforced by the projected flux."""
    stepper = Stepper(state.grid, config.nu, config.dt, config.dealias)
    new = stepper.advance(state.components)
    return VelocityState(state.grid, state.nu, state.time + config.dt, new)


# -- diagnostics ------------------------------------------------------------

def l2_norm_sq(state: VelocityState) -> float:
    return float(sum(np.sum(np.abs(c) ** 2) for c in state.components))


def grad_norm_sq(state: VelocityState) -> float:
    w = (2 * np.pi) ** 2 * radius_squared(state.grid.n)
    return float(sum(np.sum(w * np.abs(c) ** 2) for c in state.components))


def l4_norm(state: VelocityState) -> float:
    n = state.grid.n
    u = _physicals(state.components, n)
    mag2 = u[0] ** 2 + u[1] ** 2 + u[2] ** 2
    return float((state.grid.cell_volume * np.sum(mag2**2)) ** 0.25)


def divergence_defect(state: VelocityState) -> float:
    """Max over modes of |xi . u_hat| / |u_hat| (0/0 counts as 0), on the
    paired wavevectors so the convention matches the projection."""
    k1, k2, k3 = _paired_wavevectors(state.grid.n)
    c = state.components
    div = 2 * np.pi * np.abs(k1 * c[0] + k2 * c[1] + k3 * c[2])
    mag = np.sqrt(sum(np.abs(x) ** 2 for x in c))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(mag > 0, div / np.where(mag > 0, mag, 1.0), 0.0)
    return float(np.max(ratio))


def max_velocity(state: VelocityState) -> float:
    u = _physicals(state.components, state.grid.n)
    return float(np.max(np.sqrt(u[0] ** 2 + u[1] ** 2 + u[2] ** 2)))


# -- initial conditions -----------------------------------------------------

def _mask_state(components, n: int):
    mask = twothirds_mask(n)
    return tuple(c * mask for c in components)


def _spectra_from_physicals(grid: Grid, fields):
    # fields may be lean broadcastable products of the open grid axes;
    # symmetrize so empty spectral regions hold exactly Hermitian noise
    return tuple(
        hermitianize(_fft.fftn(np.broadcast_to(f, grid.shape)) * grid.cell_volume)
        for f in fields
    )


def taylor_green_state(grid: Grid, nu: float, amplitude: float = 1.0) -> VelocityState:
    x1, x2, x3 = grid_points(grid)
    s1, c1 = np.sin(2 * np.pi * x1), np.cos(2 * np.pi * x1)
    s2, c2 = np.sin(2 * np.pi * x2), np.cos(2 * np.pi * x2)
    c3 = np.cos(2 * np.pi * x3)
    u1 = amplitude * s1 * c2 * c3
    u2 = -amplitude * c1 * s2 * c3
    u3 = np.zeros(grid.shape)
    comps = _spectra_from_physicals(grid, (u1, u2, u3))
    return VelocityState(grid, nu, 0.0, leray_project(comps, grid.n))


def beltrami_state(grid: Grid, nu: float, lam: int = 1,
                   amplitude: float = 1.0) -> VelocityState:
    """Curl eigenfield (curl u = 2 pi lam u) built from equal-weight shear
    waves; decays exactly as exp(-nu (2 pi lam)^2 t) under the flow."""
    if lam < 1 or 2 * lam > grid.n // 3:
        raise ValueError(f"lam {lam} not resolvable under the sharp product mask")
    x1, x2, x3 = grid_points(grid)
    a = 2 * np.pi * lam
    u1 = amplitude * (np.sin(a * x3) + np.cos(a * x2))
    u2 = amplitude * (np.sin(a * x1) + np.cos(a * x3))
    u3 = amplitude * (np.sin(a * x2) + np.cos(a * x1))
    comps = _spectra_from_physicals(grid, (u1, u2, u3))
    return VelocityState(grid, nu, 0.0, comps)


def random_divfree_state(grid: Grid, nu: float, seed: int = 0, slope: float = 2.0,
                         amplitude: float = 1.0) -> VelocityState:
    """Divergence-free noise with spectrum ~ |xi|^-slope inside the sharp
    mask, normalized to ||u||_2 = amplitude."""
    rng = np.random.default_rng([97, seed])
    n = grid.n
    from .spectral import radius  # local import to avoid cycle at module load

    r = radius(n)
    keep = (r > 0) & (r <= n / 4)
    weight = np.where(keep, 1.0 / np.maximum(r, 1.0) ** slope, 0.0)
    comps = []
    for _ in range(3):
        w = rng.standard_normal(grid.shape)
        comps.append((_fft.fftn(w) * grid.cell_volume) * weight)
    comps = _mask_state(leray_project(tuple(comps), n), n)
    nrm = math.sqrt(sum(float(np.sum(np.abs(c) ** 2)) for c in comps))
    if nrm == 0:
        raise ValueError("degenerate random state")
    comps = tuple(c * (amplitude / nrm) for c in comps)
    return VelocityState(grid, nu, 0.0, comps)


def build_initial(config: SolverConfig) -> VelocityState:
    grid = Grid(config.n)
    spec = config.initial
    if spec.kind == "taylor-green":
        state = taylor_green_state(grid, config.nu, spec.amplitude)
    elif spec.kind == "beltrami":
        state = beltrami_state(grid, config.nu, spec.lam, spec.amplitude)
    elif spec.kind == "random-divfree":
        state = random_divfree_state(grid, config.nu, spec.seed, spec.slope,
                                     spec.amplitude)
    elif spec.kind == "from-checkpoint":
        if not spec.path:
            raise ValueError("from-checkpoint initial condition needs a path")
        state = read_checkpoint(spec.path)
        if state.grid.n != config.n:
            raise ValueError(
                f"checkpoint grid n={state.grid.n} does not match config n={config.n}")
        if abs(state.nu - config.nu) > 1e-300 + 1e-12 * config.nu:
            raise ValueError("checkpoint viscosity does not match config")
        return state  # resume untouched for bit-identical continuation
    else:
        raise ValueError(f"unknown initial kind {spec.kind!r}")
    comps = _mask_state(leray_project(state.components, grid.n), grid.n)
    return replace(state, components=comps)


# -- checkpoints ------------------------------------------------------------

def _lex_order(c: np.ndarray) -> np.ndarray:
    """FFT layout -> coefficients ordered lexicographically in
    (xi_1, xi_2, xi_3), each running -n/2 .. n/2 - 1."""
    return np.ascontiguousarray(np.fft.fftshift(c))


def _fft_order(c: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.fft.ifftshift(c))


def write_checkpoint(state: VelocityState, path) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<q", state.grid.n))
        fh.write(struct.pack("<d", state.nu))
        fh.write(struct.pack("<d", state.time))
        for c in state.components:
            fh.write(_lex_order(c).astype("<c16", copy=False).tobytes())


def read_checkpoint(path) -> VelocityState:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:5] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path} is not a checkpoint (bad magic {raw[:5]!r})")
    n = struct.unpack("<q", raw[5:13])[0]
    nu = struct.unpack("<d", raw[13:21])[0]
    time = struct.unpack("<d", raw[21:29])[0]
    grid = Grid(int(n))
    count = n**3
    expect = 29 + 3 * count * 16
    if len(raw) != expect:
        raise ValueError(f"{path}: expected {expect} bytes, found {len(raw)}")
    comps = []
    off = 29
    for _ in range(3):
        flat = np.frombuffer(raw, dtype="<c16", count=count, offset=off)
        comps.append(_fft_order(flat.reshape(grid.shape).astype(np.complex128)))
        off += count * 16
    return VelocityState(grid, float(nu), float(time), tuple(comps))


# -- the driver -------------------------------------------------------------

@dataclass
class RunResult:
    state: VelocityState
    monitor_rows: dict
    blown_up: bool = False
    blow_up_time: float | None = None
    checkpoint_paths: list = field(default_factory=list)


def _finite(components) -> bool:
    return all(np.isfinite(np.sum(np.abs(c))) for c in components)


def run(config: SolverConfig, monitors=(), initial_state: VelocityState | None = None,
        strict: bool = False) -> RunResult:
    """March to t_end, feeding monitors at their cadence.

    Monitors are objects with a name, a cadence (seconds of simulation
    time between observations; 0 observes every step) and an
    observe(state) -> dict method.  Initial and final states are always
    observed.  On NaN/Inf the last finite state is preserved in the
    result and blown_up is set (strict=True raises BlowUpError instead);
    callers translate that to exit status 3.
    """
    state = initial_state if initial_state is not None else build_initial(config)
    grid = state.grid
    dt = config.dt
    steps = int(round((config.t_end - state.time) / dt))
    if steps < 0:
        raise ValueError("t_end lies before the state time")
    landing = state.time + steps * dt
    if abs(landing - config.t_end) > 1e-9 * max(1.0, abs(config.t_end)):
        warnings.warn(f"t_end {config.t_end} is not a whole number of steps; "
                      f"stopping at {landing}")

    cfl = max_velocity(state) * dt * grid.n
    if cfl >= 0.5:
        warnings.warn(f"advective CFL number {cfl:.3f} >= 0.5; "
                      "the run is likely under-resolved in time")

    cadences = []
    for mon in monitors:
        every = max(1, int(round(mon.cadence / dt))) if mon.cadence > 0 else 1
        cadences.append(every)
    rows = {mon.name: [] for mon in monitors}

    def observe(current, dedupe=False):
        for mon in monitors:
            got = rows[mon.name]
            if dedupe and got and got[-1]["time"] == current.time:
                continue
            row = {"time": current.time}
            row.update(mon.observe(current))
            got.append(row)

    ckpt_every = None
    out_dir = Path(config.out_dir) if config.out_dir else None
    if config.checkpoint_interval and out_dir is not None:
        ckpt_every = max(1, int(round(config.checkpoint_interval / dt)))
        out_dir.mkdir(parents=True, exist_ok=True)
    result = RunResult(state=state, monitor_rows=rows)

    stepper = Stepper(grid, config.nu, dt, config.dealias)
    observe(state)
    for i in range(1, steps + 1):
        new_comps = stepper.advance(state.components)
        if not _finite(new_comps):
            if strict:
                raise BlowUpError(state.time + dt, state)
            result.state = state
            result.blown_up = True
            result.blow_up_time = state.time + dt
            observe(state, dedupe=True)
            return result
        state = VelocityState(grid, config.nu, state.time + dt, new_comps)
        is_last = i == steps
        for mon, every in zip(monitors, cadences):
            if i % every == 0 or is_last:
                row = {"time": state.time}
                row.update(mon.observe(state))
                rows[mon.name].append(row)
        if ckpt_every is not None and (i % ckpt_every == 0 or is_last):
            p = out_dir / f"checkpoint_{i:08d}.lpns"
            write_checkpoint(state, p)
            result.checkpoint_paths.append(str(p))
    result.state = state
    return result


class EnergyMonitor:
    """Per-step L2/gradient/L4 diagnostics for the energy inequalities."""

    name = "energy"

    def __init__(self, cadence: float = 0.0, with_l4: bool = True,
                 l4_every: int = 1):
        self.cadence = cadence
        self.with_l4 = with_l4
        self.l4_every = max(1, l4_every)
        self._count = 0

    def observe(self, state: VelocityState) -> dict:
        row = {
            "l2_sq": l2_norm_sq(state),
            "grad_sq": grad_norm_sq(state),
        }
        if self.with_l4 and self._count % self.l4_every == 0:
            row["l4"] = l4_norm(state)
        else:
            row["l4"] = float("nan")
        self._count += 1
        return row
