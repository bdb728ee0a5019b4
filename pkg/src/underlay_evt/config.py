"""Run configuration: flat ``key = value`` text, dB handling, sweeps.

Keys are the field names of :class:`SystemParams`, :class:`CsiParams` and
the metric classes, plus ``metric``, ``sweep``, ``grid``, ``trials``,
``seed``, ``out``, ``b_factor`` and ``secondary``. A few short aliases
(``N``, ``k``, ``T``, ``A``, ...) are accepted.

Only ``t_intf``, ``p_s``, ``p_m`` and ``x0`` take a ``dB`` suffix, and only
``p_s`` takes ``inf``. Grids are either comma lists or ``start:stop:step``
ranges, optionally followed by ``dB`` for the whole range.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from . import model
from .model import AvgBer, AvgThroughput, CsiParams, EffThroughput, Metric, Outage, SystemParams
from .montecarlo import CORRELATED, SUBSTITUTED
from .specfun import DomainError


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


SYSTEM_KEYS = ("lam", "beta", "m", "eta", "p_m", "t_intf", "p_s", "n_users", "k_rank")
CSI_KEYS = ("rho", "delta", "gamma0", "eta_hat", "beta_hat")
METRIC_KEYS = ("a_exp", "c", "v", "x0")
INT_KEYS = ("n_users", "k_rank", "trials", "seed")
DB_KEYS = ("t_intf", "p_s", "p_m", "x0")
OTHER_KEYS = ("metric", "sweep", "grid", "trials", "seed", "out", "b_factor", "secondary")
KNOWN_KEYS = SYSTEM_KEYS + CSI_KEYS + METRIC_KEYS + OTHER_KEYS
SWEEPABLE = SYSTEM_KEYS + CSI_KEYS + METRIC_KEYS

ALIASES = {
    "lambda": "lam",
    "N": "n_users",
    "k": "k_rank",
    "T": "t_intf",
    "P_S": "p_s",
    "P_M": "p_m",
    "A": "a_exp",
    "Gamma0": "gamma0",
    "n_trials": "trials",
}

METRICS = ("avg_throughput", "eff_throughput", "avg_ber", "outage")

DEFAULT_TRIALS = 100_000


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def canonical_key(key: str) -> str:
    key = key.strip()
    key = ALIASES.get(key, key)
    if key not in KNOWN_KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    return key


def _split_db(text: str) -> tuple[str, bool]:
    t = text.strip()
    if t[-2:].lower() == "db":
        return t[:-2].strip(), True
    return t, False


def parse_value(key: str, text: str) -> float:
    """Parse a numeric setting into linear units."""
    body, is_db = _split_db(text)
    if is_db and key not in DB_KEYS:
        raise ConfigError(f"{key} does not accept a dB value: {text!r}")
    if body.lower() in ("inf", "+inf", "infinity"):
        if key != "p_s" or is_db:
            raise ConfigError(f"only p_s may be 'inf', got {key} = {text!r}")
        return model.UNLIMITED
    if key in INT_KEYS:
        try:
            return int(body)
        except ValueError:
            raise ConfigError(f"{key} needs an integer, got {text!r}") from None
    try:
        value = float(body)
    except ValueError:
        raise ConfigError(f"{key} needs a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {text!r}")
    return db_to_linear(value) if is_db else value


def parse_grid(key: str, text: str) -> tuple[float, ...]:
    """Grid values in linear units; must be strictly increasing."""
    text = text.strip()
    if not text:
        raise ConfigError("empty grid")
    if ":" in text:
        body, is_db = _split_db(text)
        if is_db and key not in DB_KEYS:
            raise ConfigError(f"{key} does not accept a dB grid")
        parts = body.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range grid must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(x) for x in parts)
        except ValueError:
            raise ConfigError(f"bad range grid {text!r}") from None
        if not step > 0 or not stop >= start:
            raise ConfigError(f"range grid needs step > 0 and stop >= start, got {text!r}")
        count = round((stop - start) / step)
        if abs(start + count * step - stop) > 1e-9 * step:
            raise ConfigError(f"range {text!r} does not land on its stop value")
        raw = [start + i * step for i in range(count + 1)]
        suffix = "dB" if is_db else ""
        values = tuple(parse_value(key, repr(x) + suffix) if key not in INT_KEYS else _as_int(key, x) for x in raw)
    else:
        values = tuple(parse_value(key, item) for item in text.split(","))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"grid for {key} must be strictly increasing")
    return values


def _as_int(key: str, x: float) -> int:
    if x != int(x):
        raise ConfigError(f"{key} grid values must be integers, got {x!r}")
    return int(x)


def read_settings(lines: Iterable[str], source: str = "<config>") -> dict[str, str]:
    """``key = value`` lines to a raw mapping; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[canonical_key(key)] = value.strip()
    return out


def read_config_file(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return read_settings(fh, path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None


def parse_assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"--set expects key=value, got {text!r}")
    key, value = text.split("=", 1)
    return canonical_key(key), value.strip()


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    metric: Metric
    csi: Optional[CsiParams] = None
    sweep: Optional[tuple[str, tuple[float, ...]]] = None
    n_trials: int = DEFAULT_TRIALS
    seed: int = 0
    output_path: Optional[str] = None
    b_factor: float = 1.0
    secondary: str = SUBSTITUTED

    def points(self) -> list[tuple[Optional[float], Metric, SystemParams, Optional[CsiParams]]]:
        """(sweep value, metric, params, csi) for every grid point."""
        if self.sweep is None:
            return [(None, self.metric, self.params, self.csi)]
        name, grid = self.sweep
        return [(x, *point_at(self, name, x)) for x in grid]


def make_metric(name: str, a_exp=None, c=None, v=None, x0=None) -> Metric:
    """Metric from its name and fields; A = 0 means no delay constraint."""
    try:
        if name == "avg_throughput":
            return AvgThroughput()
        if name == "eff_throughput":
            if a_exp is None:
                raise ConfigError("eff_throughput needs a_exp")
            return AvgThroughput() if a_exp == 0 else EffThroughput(a_exp)
        if name == "avg_ber":
            if c is None or v is None:
                raise ConfigError("avg_ber needs c and v")
            return AvgBer(c, v)
        if name == "outage":
            if x0 is None:
                raise ConfigError("outage needs x0")
            return Outage(x0)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}")


def _metric_fields(metric: Metric) -> dict:
    if isinstance(metric, AvgThroughput):
        return {"name": "avg_throughput"}
    fields = dataclasses.asdict(metric)
    fields["name"] = metric.name
    return fields


def point_at(cfg: RunConfig, name: str, value: float):
    """(metric, params, csi) with ``name`` set to ``value``."""
    metric, params, csi = cfg.metric, cfg.params, cfg.csi
    try:
        if name in SYSTEM_KEYS:
            params = params.replace(**{name: value})
        elif name in CSI_KEYS:
            if csi is None:
                raise ConfigError(f"sweeping {name} needs imperfect-CSI settings (rho)")
            csi = csi.replace(**{name: value})
        elif name in METRIC_KEYS:
            fields = _metric_fields(metric)
            if name == "a_exp" and fields["name"] == "avg_throughput":
                fields["name"] = "eff_throughput"
            fields[name] = value
            metric = make_metric(**fields)
        else:
            raise ConfigError(f"{name} cannot be swept")
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if params.k_rank > params.n_users:
        raise ConfigError(f"k_rank {params.k_rank} exceeds n_users {params.n_users}")
    return metric, params, csi


def build_config(settings: Mapping[str, str]) -> RunConfig:
    """Turn raw settings into a validated :class:`RunConfig`."""
    s = dict(settings)
    missing = [k for k in ("lam", "beta", "m", "eta", "p_m", "t_intf") if k not in s]
    if missing:
        raise ConfigError(f"missing system parameters: {', '.join(missing)}")
    values = {k: parse_value(k, s[k]) for k in SYSTEM_KEYS if k in s}
    try:
        params = SystemParams(**values)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if params.k_rank > params.n_users:
        raise ConfigError(f"k_rank {params.k_rank} exceeds n_users {params.n_users}")

    csi = None
    if "rho" in s:
        csi_values = {
            "rho": parse_value("rho", s["rho"]),
            "delta": parse_value("delta", s.get("delta", "1")),
            "gamma0": parse_value("gamma0", s.get("gamma0", "0.1")),
            "eta_hat": parse_value("eta_hat", s["eta_hat"]) if "eta_hat" in s else params.eta,
            "beta_hat": parse_value("beta_hat", s["beta_hat"]) if "beta_hat" in s else params.beta,
        }
        try:
            csi = CsiParams(**csi_values)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
    elif any(k in s for k in CSI_KEYS):
        raise ConfigError("imperfect-CSI keys given without rho")

    fields = {k: parse_value(k, s[k]) for k in METRIC_KEYS if k in s}
    metric = make_metric(s.get("metric", "avg_throughput").strip(), **fields)

    sweep = None
    if "sweep" in s or "grid" in s:
        if "sweep" not in s or "grid" not in s:
            raise ConfigError("sweep and grid must be given together")
        name = canonical_key(s["sweep"])
        if name not in SWEEPABLE:
            raise ConfigError(f"{name} is not a numeric model, CSI or metric field")
        sweep = (name, parse_grid(name, s["grid"]))

    b_factor = parse_value("b_factor", s.get("b_factor", "1"))
    if not b_factor > 0:
        raise ConfigError(f"b_factor must be > 0, got {b_factor}")
    secondary = s.get("secondary", SUBSTITUTED).strip()
    if secondary not in (SUBSTITUTED, CORRELATED):
        raise ConfigError(f"secondary must be {SUBSTITUTED!r} or {CORRELATED!r}")
    if secondary == CORRELATED and csi is None:
        raise ConfigError("secondary = correlated needs imperfect-CSI settings")

    n_trials = int(parse_value("trials", s.get("trials", str(DEFAULT_TRIALS))))
    seed = int(parse_value("seed", s.get("seed", "0")))
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must lie in [0, 2^64), got {seed}")
    cfg = RunConfig(
        params=params,
        metric=metric,
        csi=csi,
        sweep=sweep,
        n_trials=n_trials,
        seed=seed,
        output_path=s.get("out"),
        b_factor=b_factor,
        secondary=secondary,
    )
    cfg.points()  # validates every grid point up front
    return cfg
