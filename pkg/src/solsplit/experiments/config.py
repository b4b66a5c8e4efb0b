"""Experiment configuration files: `key = value` lines with `#` comments.

Each run kind declares its own key table; unknown keys are rejected so
typos never silently fall back to defaults.  Launch-distance inequalities
(x0 <= -v^(1-delta), delta in (2/3, 1)) are enforced at parse time and
report exactly which inequality failed.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from ..errors import ConfigError

__all__ = ["ExperimentConfig", "parse_config", "default_dt"]

KINDS = ("snapshot", "sweep", "scaling", "resolution", "linear_probe")

_COMMON_KEYS = {"kind", "seed", "out_dir", "domain", "n_points", "dt"}
_KIND_KEYS = {
    "snapshot": {"q", "v", "x0", "times"},
    "sweep": {"alpha", "alpha_list", "v", "v_list", "x0", "delta"},
    "scaling": {"alpha", "v_list", "x0", "delta", "n_points_list"},
    "resolution": {"q", "v", "x0", "delta", "t_end"},
    "linear_probe": {"q", "v_list", "x0", "t"},
}

DEFAULT_DOMAIN = 400.0
DEFAULT_N_POINTS = 32768


def default_dt(v: float) -> float:
    """Default time step for a carrier-velocity-v run: 2.5e-4 * (3/v)^2."""
    return 2.5e-4 * (3.0 / v) ** 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully resolved description of one experiment run."""

    kind: str
    x0: float
    q: float | None = None
    alpha: float | None = None
    alphas: tuple[float, ...] | None = None
    v: float | None = None
    vs: tuple[float, ...] | None = None
    delta: float | None = None
    domain: float = DEFAULT_DOMAIN
    n_points: int = DEFAULT_N_POINTS
    n_points_list: tuple[int, ...] | None = None
    dt: float | None = None
    times: tuple[float, ...] | None = None
    t_end: float | None = None
    t_probe: float | None = None
    q_matches_v: bool = False
    seed: int = 0
    out_dir: str | None = None

    def resolved_items(self) -> list[tuple[str, object]]:
        """Sorted (key, value) pairs of every set field, for manifests."""
        items = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            items.append((f.name, value))
        return sorted(items)


def _parse_lines(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    raw: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = stripped.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _as_float(raw: dict[str, str], key: str) -> float:
    try:
        return float(raw[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected a number, got {raw[key]!r}") from exc


def _as_int(raw: dict[str, str], key: str) -> int:
    try:
        return int(raw[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected an integer, got {raw[key]!r}") from exc


def _as_float_list(raw: dict[str, str], key: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in raw[key].split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected comma-separated numbers, got {raw[key]!r}") from exc
    if not values:
        raise ConfigError(f"key {key!r}: empty list")
    return values


def _as_int_list(raw: dict[str, str], key: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw[key].split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected comma-separated integers, got {raw[key]!r}") from exc
    if not values:
        raise ConfigError(f"key {key!r}: empty list")
    return values


def _require(raw: dict[str, str], kind: str, key: str) -> None:
    if key not in raw:
        raise ConfigError(f"missing required key {key!r} for kind {kind!r}")


def _check_power_of_two(n: int, key: str) -> None:
    if n < 2 or n & (n - 1):
        raise ConfigError(f"key {key!r}: grid size must be a power of two >= 2, got {n}")


def _check_delta(delta: float) -> None:
    if not 2.0 / 3.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (2/3, 1), got {delta:g}")


def _check_launch_window(x0: float, delta: float, velocities: tuple[float, ...]) -> None:
    for v in velocities:
        bound = -(v ** (1.0 - delta))
        if x0 > bound + 1e-12:
            raise ConfigError(
                f"x0 = {x0:g} violates x0 <= -v^(1-delta) = {bound:.6g} at v = {v:g}"
            )


def parse_config(path: str) -> ExperimentConfig:
    """Parse and validate an experiment config file.

    Raises ConfigError on unreadable files, malformed lines, unknown or
    duplicate keys, missing required keys, out-of-range values, and
    launch-distance violations.
    """
    raw = _parse_lines(path)
    if "kind" not in raw:
        raise ConfigError("missing required key 'kind'")
    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")

    allowed = _COMMON_KEYS | _KIND_KEYS[kind]
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r} for kind {kind!r}")

    seed = _as_int(raw, "seed") if "seed" in raw else 0
    out_dir = raw.get("out_dir")
    domain = _as_float(raw, "domain") if "domain" in raw else DEFAULT_DOMAIN
    if domain <= 0:
        raise ConfigError(f"domain half-width must be > 0, got {domain:g}")
    n_points = _as_int(raw, "n_points") if "n_points" in raw else DEFAULT_N_POINTS
    _check_power_of_two(n_points, "n_points")
    dt = _as_float(raw, "dt") if "dt" in raw else None
    if dt is not None and dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt:g}")

    _require(raw, kind, "x0")
    x0 = _as_float(raw, "x0")
    if x0 >= 0:
        raise ConfigError(f"x0 must be negative (packet launches left of the impurity), got {x0:g}")

    common = dict(kind=kind, x0=x0, domain=domain, n_points=n_points, dt=dt, seed=seed, out_dir=out_dir)

    if kind == "snapshot":
        for key in ("q", "v", "times"):
            _require(raw, kind, key)
        q = _as_float(raw, "q")
        v = _as_float(raw, "v")
        times = _as_float_list(raw, "times")
        if q < 0:
            raise ConfigError(f"q must be >= 0, got {q:g}")
        if v <= 0:
            raise ConfigError(f"v must be > 0, got {v:g}")
        if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError(f"times must be strictly increasing and >= 0, got {raw['times']!r}")
        return ExperimentConfig(q=q, v=v, times=times, **common)

    if kind == "sweep":
        if "alpha" in raw and "alpha_list" in raw:
            raise ConfigError("give either 'alpha' or 'alpha_list', not both")
        if "alpha" not in raw and "alpha_list" not in raw:
            raise ConfigError("missing required key 'alpha' or 'alpha_list' for kind 'sweep'")
        if "v" in raw and "v_list" in raw:
            raise ConfigError("give either 'v' or 'v_list', not both")
        if "v" not in raw and "v_list" not in raw:
            raise ConfigError("missing required key 'v' or 'v_list' for kind 'sweep'")
        _require(raw, kind, "delta")
        alphas = _as_float_list(raw, "alpha_list") if "alpha_list" in raw else (_as_float(raw, "alpha"),)
        vs = _as_float_list(raw, "v_list") if "v_list" in raw else (_as_float(raw, "v"),)
        delta = _as_float(raw, "delta")
        if any(a <= 0 for a in alphas):
            raise ConfigError("all alpha values must be > 0")
        if any(v <= 0 for v in vs):
            raise ConfigError("all v values must be > 0")
        _check_delta(delta)
        _check_launch_window(x0, delta, vs)
        return ExperimentConfig(alphas=alphas, vs=vs, delta=delta, **common)

    if kind == "scaling":
        for key in ("alpha", "v_list", "delta"):
            _require(raw, kind, key)
        alpha = _as_float(raw, "alpha")
        vs = _as_float_list(raw, "v_list")
        delta = _as_float(raw, "delta")
        if alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {alpha:g}")
        if any(v <= 0 for v in vs):
            raise ConfigError("all v values must be > 0")
        _check_delta(delta)
        _check_launch_window(x0, delta, vs)
        n_points_list = None
        if "n_points_list" in raw:
            n_points_list = _as_int_list(raw, "n_points_list")
            if len(n_points_list) != len(vs):
                raise ConfigError(
                    f"n_points_list has {len(n_points_list)} entries for {len(vs)} velocities"
                )
            for n in n_points_list:
                _check_power_of_two(n, "n_points_list")
        return ExperimentConfig(alpha=alpha, vs=vs, delta=delta, n_points_list=n_points_list, **common)

    if kind == "resolution":
        for key in ("q", "v", "t_end"):
            _require(raw, kind, key)
        q = _as_float(raw, "q")
        v = _as_float(raw, "v")
        t_end = _as_float(raw, "t_end")
        delta = _as_float(raw, "delta") if "delta" in raw else 0.8
        if q < 0:
            raise ConfigError(f"q must be >= 0, got {q:g}")
        if v <= 0:
            raise ConfigError(f"v must be > 0, got {v:g}")
        if t_end <= 0:
            raise ConfigError(f"t_end must be > 0, got {t_end:g}")
        _check_delta(delta)
        _check_launch_window(x0, delta, (v,))
        return ExperimentConfig(q=q, v=v, t_end=t_end, delta=delta, **common)

    # linear_probe
    for key in ("q", "v_list"):
        _require(raw, kind, key)
    vs = _as_float_list(raw, "v_list")
    if any(v <= 0 for v in vs):
        raise ConfigError("all v values must be > 0")
    t_probe = _as_float(raw, "t") if "t" in raw else 0.5
    if not 0.0 < t_probe <= 1.0:
        raise ConfigError(f"t must lie in (0, 1], got {t_probe:g}")
    if raw["q"] == "match_v":
        return ExperimentConfig(vs=vs, t_probe=t_probe, q_matches_v=True, **common)
    q = _as_float(raw, "q")
    if q < 0:
        raise ConfigError(f"q must be >= 0, got {q:g}")
    return ExperimentConfig(q=q, vs=vs, t_probe=t_probe, **common)
