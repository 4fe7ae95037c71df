"""Run and sweep configuration, plus seeded initial conditions.

Config files are flat ``key = value`` text, one entry per line, with ``#``
starting a comment.  Lists (grids, explicit initial vectors) are
comma-separated.

Random initial conditions use numpy's PCG64 generator seeded with the
config seed, ``numpy.random.Generator(numpy.random.PCG64(seed))``.  Uniform
draws come from ``Generator.random``, which maps a 64-bit output ``u`` to
``(u >> 11) * 2**-53``.  Opinions are drawn first; under
``uniform_independent`` the actions are the next ``n`` draws.

Sweep replicates that are not listed explicitly derive their seeds from the
base seed with SplitMix64: replicate ``k`` (from 0) gets the ``k+1``-th
output of a SplitMix64 stream whose state starts at the base seed.  The
seed of a cell never depends on where its epsilon or phi value sits in the
grid, so growing a grid leaves existing cells untouched.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .model import ModelParams, PopulationState
from .simulation import DEFAULT_HORIZON, Tolerances

INIT_MODES = ("uniform_y_equals_x", "uniform_independent", "explicit")
MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Outputs:
    trajectory_csv: bool = True
    matrices_csv: bool = False
    graphs_dot: bool = True
    report_json: bool = True


@dataclass(frozen=True)
class RunConfig:
    n: int = 10
    epsilon: float = 0.3
    phi: float = 0.5
    seed: int = 0
    horizon: int = DEFAULT_HORIZON
    tolerances: Tolerances = field(default_factory=Tolerances)
    init_mode: str = "uniform_y_equals_x"
    x0: tuple | None = None
    y0: tuple | None = None
    outputs: Outputs = field(default_factory=Outputs)

    def __post_init__(self):
        try:
            ModelParams(self.n, self.epsilon, self.phi)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.horizon < 2:
            raise ConfigError("horizon must be at least 2")
        if self.init_mode not in INIT_MODES:
            raise ConfigError(f"init_mode must be one of {', '.join(INIT_MODES)}")
        if self.init_mode == "explicit":
            for name in ("x0", "y0"):
                v = getattr(self, name)
                if v is None:
                    raise ConfigError(f"init_mode = explicit needs {name}")
                if len(v) != self.n:
                    raise ConfigError(f"{name} has {len(v)} entries, expected n = {self.n}")
                if any(not 0.0 <= a <= 1.0 for a in v):
                    raise ConfigError(f"{name} entries must lie in [0, 1]")

    @property
    def params(self):
        return ModelParams(self.n, self.epsilon, self.phi)

    def echo(self):
        """Plain dict of every setting, in a fixed order."""
        out = {
            "n": self.n,
            "epsilon": self.epsilon,
            "phi": self.phi,
            "seed": self.seed,
            "horizon": self.horizon,
            "consensus_tol": self.tolerances.consensus,
            "containment_tol": self.tolerances.containment,
            "window": self.tolerances.window,
            "init_mode": self.init_mode,
        }
        if self.init_mode == "explicit":
            out["x0"] = list(self.x0)
            out["y0"] = list(self.y0)
        return out

    def digest(self):
        text = "\n".join(f"{k}={v!r}" for k, v in self.echo().items())
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SweepConfig:
    epsilon_grid: tuple
    phi_grid: tuple
    seeds: tuple
    base: RunConfig

    def __post_init__(self):
        for name in ("epsilon_grid", "phi_grid", "seeds"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        for v in self.epsilon_grid + self.phi_grid:
            if not 0.0 <= v <= 1.0:
                raise ConfigError("grid values must lie in [0, 1]")

    def cells(self):
        """Run configs in canonical order: epsilon, then phi, then seed."""
        return [
            replace(self.base, epsilon=e, phi=p, seed=s)
            for e in self.epsilon_grid
            for p in self.phi_grid
            for s in self.seeds
        ]


def splitmix64(state):
    """One SplitMix64 output for the given (already advanced) state."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def replicate_seed(base_seed, k):
    return splitmix64(base_seed + (k + 1) * GOLDEN_GAMMA)


def initial_state(config):
    n = config.n
    if config.init_mode == "explicit":
        return PopulationState(0, np.array(config.x0), np.array(config.y0))
    rng = np.random.Generator(np.random.PCG64(config.seed))
    x0 = rng.random(n)
    if config.init_mode == "uniform_y_equals_x":
        return PopulationState(0, x0, x0.copy())
    return PopulationState(0, x0, rng.random(n))


def _parse_bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text):
    return int(text, 0)


def _parse_floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _parse_ints(text):
    return tuple(int(v, 0) for v in text.split(",") if v.strip())


_RUN_KEYS = {
    "n": _parse_int,
    "epsilon": float,
    "phi": float,
    "seed": _parse_int,
    "horizon": _parse_int,
    "consensus_tol": float,
    "containment_tol": float,
    "window": _parse_int,
    "init_mode": str,
    "x0": _parse_floats,
    "y0": _parse_floats,
    "trajectory_csv": _parse_bool,
    "matrices_csv": _parse_bool,
    "graphs_dot": _parse_bool,
    "report_json": _parse_bool,
}

_SWEEP_KEYS = {
    "epsilon_grid": _parse_floats,
    "phi_grid": _parse_floats,
    "seeds": _parse_ints,
    "replicates": _parse_int,
}


def parse_lines(text, allowed, source="<config>"):
    """Parse ``key = value`` lines into a dict of converted values.

    Errors name the file and line number.
    """
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in allowed:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = allowed[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        lines[key] = lineno
    return values, lines


def _build_run(values, lines, source):
    tol_keys = {"consensus_tol": "consensus", "containment_tol": "containment", "window": "window"}
    out_keys = {f.name for f in fields(Outputs)}
    kwargs, tol, outs = {}, {}, {}
    for key, value in values.items():
        if key in tol_keys:
            tol[tol_keys[key]] = value
        elif key in out_keys:
            outs[key] = value
        elif key in _RUN_KEYS:
            kwargs[key] = value
    try:
        tolerances = Tolerances(**tol)
        if tolerances.window < 1:
            raise ConfigError("window must be at least 1")
        return RunConfig(tolerances=tolerances, outputs=Outputs(**outs), **kwargs)
    except ConfigError as exc:
        # validation messages lead with the offending key
        msg = str(exc)
        key = msg.split()[0] if msg else ""
        where = f"{source}:{lines[key]}" if key in lines else source
        raise ConfigError(f"{where}: {msg}") from None


def parse_run_config(text, source="<config>"):
    values, lines = parse_lines(text, _RUN_KEYS, source)
    return _build_run(values, lines, source)


def parse_sweep_config(text, source="<config>"):
    values, lines = parse_lines(text, {**_RUN_KEYS, **_SWEEP_KEYS}, source)
    base_values = {k: v for k, v in values.items() if k in _RUN_KEYS}
    base_values.setdefault("epsilon", values.get("epsilon_grid", (0.0,))[0])
    base_values.setdefault("phi", values.get("phi_grid", (0.0,))[0])
    base = _build_run(base_values, lines, source)
    if "seeds" in values and "replicates" in values:
        raise ConfigError(f"{source}:{lines['replicates']}: give either seeds or replicates, not both")
    if "seeds" in values:
        seeds = values["seeds"]
    else:
        count = values.get("replicates", 1)
        if count < 1:
            raise ConfigError(f"{source}:{lines.get('replicates', 0)}: replicates must be positive")
        seeds = tuple(replicate_seed(base.seed, k) for k in range(count))
    for key in ("epsilon_grid", "phi_grid"):
        if key not in values:
            raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        return SweepConfig(values["epsilon_grid"], values["phi_grid"], tuple(seeds), base)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_run_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_run_config(fh.read(), str(path))


def load_sweep_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_sweep_config(fh.read(), str(path))
