"""Run configuration: INI files with sections and documented defaults.

Example::

    [physics]
    nu = 0.01
    beta = 0.1
    T = 1.0
    K = 32
    N_u = 32
    u_max = 6.0

    [time]
    t_end = 5.0
    dt_max = 0.05
    record_interval = 0.5

    [initial]
    kind = perturbed_maxwellian
    T0 = 1.0
    modes = 1 0; 0 1; 1 2
    amplitudes = 0.3, 0.2, 0.1

    [run]
    mode = nonlinear
    output_dir = out
"""

from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .diagnostics import DEFAULT_SLACK, INEQUALITIES
from .fields import GyroDistribution, SpectralField2D
from .solver import DEFAULT_CFL, DEFAULT_DT_MAX, ConfigurationError, PhysicalParams, SolverState

__all__ = [
    "MODES",
    "InitialCondition",
    "HarnessSettings",
    "RunConfig",
    "load_config",
    "parse_config",
    "initial_distribution",
    "initial_state",
    "frozen_potential",
    "cosine_field",
]

log = logging.getLogger(__name__)

MODES = ("nonlinear", "frozen_phi", "harness_4d", "epsilon_sweep", "stability_pair")
INITIAL_KINDS = ("maxwellian", "perturbed_maxwellian", "file")


@dataclass(frozen=True)
class InitialCondition:
    """``exp(-u^2/T0) (1 + sum_m a_m cos(k_m . x + phase_m))`` or a snapshot file."""

    kind: str = "perturbed_maxwellian"
    T0: float = 1.0
    modes: tuple[tuple[int, int], ...] = ((1, 0), (0, 1), (1, 2))
    amplitudes: tuple[float, ...] = (0.3, 0.2, 0.1)
    phases: tuple[float, ...] = ()
    path: str | None = None

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigurationError(f"initial kind must be one of {INITIAL_KINDS}, got {self.kind!r}")
        if self.kind == "file" and not self.path:
            raise ConfigurationError("initial kind 'file' needs a path")
        if not self.T0 > 0:
            raise ConfigurationError("T0 must be positive")
        if len(self.modes) != len(self.amplitudes):
            raise ConfigurationError("modes and amplitudes differ in length")
        if self.phases and len(self.phases) != len(self.modes):
            raise ConfigurationError("phases and modes differ in length")


@dataclass(frozen=True)
class HarnessSettings:
    """Sizes of the four-dimensional gyro-coordinate harness."""

    epsilons: tuple[float, ...] = (0.2, 0.1, 0.05)
    epsilon: float = 0.1
    K_x: int = 10
    n_v: int = 48
    v_max: float = 6.0
    N_u_limit: int = 256
    steps_per_turn: int = 64
    amplitude: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    t_end: float = 5.0
    dt_max: float = DEFAULT_DT_MAX
    record_interval: float = 0.5
    cfl: float = DEFAULT_CFL
    initial: InitialCondition = field(default_factory=InitialCondition)
    seed: int = 0
    output_dir: str = "out"
    monitors: tuple[str, ...] = INEQUALITIES
    slack: float = DEFAULT_SLACK
    abort_on_violation: bool = True
    mode: str = "nonlinear"
    frozen_phi: str = "zero"
    phi_modes: tuple[tuple[int, int], ...] = ()
    phi_amplitudes: tuple[float, ...] = ()
    deltas: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    harness: HarnessSettings = field(default_factory=HarnessSettings)

    def __post_init__(self):
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ConfigurationError(f"t_end must be nonnegative, got {self.t_end}")
        if not self.dt_max > 0:
            raise ConfigurationError("dt_max must be positive")
        if not self.record_interval > 0:
            raise ConfigurationError("record_interval must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigurationError("cfl must lie in (0, 1]")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if set(self.monitors) - set(INEQUALITIES):
            raise ConfigurationError(f"monitors must be drawn from {INEQUALITIES}")
        if len(self.phi_modes) != len(self.phi_amplitudes):
            raise ConfigurationError("phi_modes and phi_amplitudes differ in length")
        if any(d < 0 for d in self.deltas):
            raise ConfigurationError("deltas must be nonnegative")

    def with_updates(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _mode_list(text: str) -> tuple[tuple[int, int], ...]:
    out = []
    for chunk in text.split(";"):
        parts = chunk.replace(",", " ").split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ConfigurationError(f"mode {chunk.strip()!r} must be two integers")
        out.append((int(parts[0]), int(parts[1])))
    return tuple(out)


_SECTIONS = {
    "physics": {"nu", "beta", "t", "k", "n_u", "u_max"},
    "time": {"t_end", "dt_max", "record_interval", "cfl"},
    "initial": {"kind", "t0", "modes", "amplitudes", "phases", "path"},
    "run": {"mode", "seed", "output_dir", "frozen_phi", "phi_modes", "phi_amplitudes", "deltas"},
    "monitors": {"enabled", "slack", "abort"},
    "harness": {"epsilons", "epsilon", "k_x", "n_v", "v_max", "n_u_limit", "steps_per_turn", "amplitude"},
}


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from INI text; unknown keys are errors."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown section [{section}]")
        extra = set(cp[section]) - _SECTIONS[section]
        if extra:
            raise ConfigurationError(f"unknown keys in [{section}]: {sorted(extra)}")

    def get(section, key, conv, default):
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                return conv(raw)
            except ValueError as exc:
                raise ConfigurationError(f"[{section}] {key} = {raw!r}: {exc}") from exc
        return default

    try:
        d = PhysicalParams()
        params = PhysicalParams(
            nu=get("physics", "nu", float, d.nu),
            beta=get("physics", "beta", float, d.beta),
            T=get("physics", "t", float, d.T),
            K=get("physics", "k", int, d.K),
            N_u=get("physics", "n_u", int, d.N_u),
            u_max=get("physics", "u_max", float, d.u_max),
        )
        ic_d = InitialCondition()
        kind = get("initial", "kind", str.strip, ic_d.kind)
        path = get("initial", "path", str.strip, None)
        if path is not None and base_dir is not None and not Path(path).is_absolute():
            path = str(base_dir / path)
        default_modes = ic_d.modes if kind == "perturbed_maxwellian" else ()
        default_amps = ic_d.amplitudes if kind == "perturbed_maxwellian" else ()
        initial = InitialCondition(
            kind=kind,
            T0=get("initial", "t0", float, ic_d.T0),
            modes=get("initial", "modes", _mode_list, default_modes),
            amplitudes=get("initial", "amplitudes", _floats, default_amps),
            phases=get("initial", "phases", _floats, ()),
            path=path,
        )
        h_d = HarnessSettings()
        harness = HarnessSettings(
            epsilons=get("harness", "epsilons", _floats, h_d.epsilons),
            epsilon=get("harness", "epsilon", float, h_d.epsilon),
            K_x=get("harness", "k_x", int, h_d.K_x),
            n_v=get("harness", "n_v", int, h_d.n_v),
            v_max=get("harness", "v_max", float, h_d.v_max),
            N_u_limit=get("harness", "n_u_limit", int, h_d.N_u_limit),
            steps_per_turn=get("harness", "steps_per_turn", int, h_d.steps_per_turn),
            amplitude=get("harness", "amplitude", float, h_d.amplitude),
        )
        r = RunConfig()
        frozen = get("run", "frozen_phi", str.strip, r.frozen_phi)
        if frozen not in ("zero", "modes") and base_dir is not None and not Path(frozen).is_absolute():
            frozen = str(base_dir / frozen)
        enabled = get("monitors", "enabled", lambda s: tuple(s.replace(",", " ").split()), r.monitors)
        return RunConfig(
            params=params,
            t_end=get("time", "t_end", float, r.t_end),
            dt_max=get("time", "dt_max", float, r.dt_max),
            record_interval=get("time", "record_interval", float, r.record_interval),
            cfl=get("time", "cfl", float, r.cfl),
            initial=initial,
            seed=get("run", "seed", int, r.seed),
            output_dir=get("run", "output_dir", str.strip, r.output_dir),
            monitors=enabled,
            slack=get("monitors", "slack", float, r.slack),
            abort_on_violation=get("monitors", "abort", _boolean, r.abort_on_violation),
            mode=get("run", "mode", str.strip, r.mode),
            frozen_phi=frozen,
            phi_modes=get("run", "phi_modes", _mode_list, r.phi_modes),
            phi_amplitudes=get("run", "phi_amplitudes", _floats, r.phi_amplitudes),
            deltas=get("run", "deltas", _floats, r.deltas),
            harness=harness,
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def _boolean(text: str) -> bool:
    val = text.strip().lower()
    if val in ("1", "yes", "true", "on"):
        return True
    if val in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def cosine_field(K: int, modes, amplitudes, phases=()) -> SpectralField2D:
    """``sum_m a_m cos(k_m . x + phase_m)`` as a truncated field."""
    coeffs = {}
    phases = tuple(phases) or (0.0,) * len(modes)
    for (a, b), amp, ph in zip(modes, amplitudes, phases):
        if max(abs(a), abs(b)) > K:
            raise ConfigurationError(f"mode {(a, b)} outside truncation K={K}")
        if (a, b) == (0, 0):
            raise ConfigurationError("mode (0, 0) is not a perturbation")
        coeffs[(a, b)] = coeffs.get((a, b), 0) + 0.5 * amp * np.exp(1j * ph)
    return SpectralField2D.from_modes(K, coeffs)


def initial_distribution(ic: InitialCondition, params: PhysicalParams, normalize: bool = True) -> GyroDistribution:
    """Build, check nonnegativity of, and mass-normalise the initial datum."""
    grid = params.grid()
    if ic.kind == "file":
        from .io import read_snapshot

        snap = read_snapshot(ic.path)
        if snap.params.K != params.K or snap.f.grid != grid:
            raise ConfigurationError("snapshot dimensions do not match [physics]")
        f = snap.f
    else:
        profile = np.exp(-grid.nodes ** 2 / ic.T0)
        pert = cosine_field(params.K, ic.modes, ic.amplitudes, ic.phases) if ic.modes else None
        modal = np.zeros((2 * params.K + 1, 2 * params.K + 1, grid.n), dtype=complex)
        modal[params.K, params.K] = profile
        if pert is not None:
            modal += pert.coeffs[:, :, None] * profile[None, None, :]
        f = GyroDistribution(modal, grid, params.K)
    min_f = float(f.values().min())
    if min_f < -1e-12 * float(np.abs(f.mean_profile).max()):
        raise ConfigurationError(f"initial datum is negative on the grid (min {min_f:.3e})")
    if normalize:
        mass = f.mass()
        if not mass > 0:
            raise ConfigurationError("initial datum has nonpositive mass")
        log.info("initial datum normalised by 1/%.17g", mass)
        f = f * (1.0 / mass)
    return f


def frozen_potential(config: RunConfig) -> SpectralField2D:
    """Potential for ``frozen_phi`` runs: zero, a cosine sum, or that of a snapshot."""
    K = config.params.K
    if config.frozen_phi == "zero":
        return SpectralField2D.zeros(K, zero_mean=True)
    if config.frozen_phi == "modes":
        phi = cosine_field(K, config.phi_modes, config.phi_amplitudes)
        return SpectralField2D(phi.coeffs, K, zero_mean=True)
    from .io import read_snapshot
    from .solver import potential

    snap = read_snapshot(config.frozen_phi)
    if snap.params.K != K:
        raise ConfigurationError("frozen-potential snapshot has a different K")
    return potential(replace(snap, frozen_phi=None))


def initial_state(config: RunConfig, frozen: bool | None = None) -> SolverState:
    f = initial_distribution(config.initial, config.params)
    use_frozen = config.mode == "frozen_phi" if frozen is None else frozen
    return SolverState(
        f,
        0.0,
        config.params,
        frozen_phi=frozen_potential(config) if use_frozen else None,
        dt_max=config.dt_max,
        cfl=config.cfl,
    )
