"""Run configuration: strict TOML with fixed sections.

The schema is deliberately closed.  A typo in a key name silently
falling back to a default would invalidate an experiment, so unknown
keys are an error, reported with their dotted path.
"""

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # 3.10: same parser under its package name
    import tomli as tomllib

from .series import SeriesParams
from .solver import InitialSpec, SolverConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "loads"]


class ConfigError(ValueError):
    """Unparseable document, unknown key, or value out of range."""


_INITIAL_KINDS = ("taylor-green", "beltrami", "random-divfree", "from-checkpoint")

_NUM = (int, float)
_SCHEMA = {
    "grid": {"n": int},
    "physics": {"nu": _NUM},
    "time": {"dt": _NUM, "t_end": _NUM},
    "initial": {"kind": str, "amplitude": _NUM, "lam": int, "seed": int,
                "slope": _NUM, "path": str},
    "series": {"sigma": int, "j0": int, "k0": int, "B": _NUM,
               "k_grid": list, "cadence": _NUM},
    "output": {"directory": str, "checkpoint_interval": _NUM,
               "csv_names": dict},
}
_REQUIRED = {"grid": ("n",), "physics": ("nu",), "time": ("dt", "t_end")}

DEFAULT_CSV_NAMES = {"energy": "energy.csv", "series": "series.csv"}


@dataclass(frozen=True)
class RunConfig:
    """Everything a simulation command needs, already validated."""

    solver: SolverConfig
    series: SeriesParams | None
    series_cadence: float
    csv_names: dict


def _reject_unknown(table: dict, allowed, prefix: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key {prefix}{key}")


def _typecheck(doc: dict) -> None:
    _reject_unknown(doc, _SCHEMA, "")
    for section, table in doc.items():
        if not isinstance(table, dict):
            raise ConfigError(f"{section} must be a table")
        _reject_unknown(table, _SCHEMA[section], f"{section}.")
        for key, val in table.items():
            want = _SCHEMA[section][key]
            if isinstance(val, bool) or not isinstance(val, want):
                raise ConfigError(
                    f"{section}.{key}: expected "
                    f"{want.__name__ if isinstance(want, type) else 'a number'}, "
                    f"got {type(val).__name__}")
    for section, names in _REQUIRED.items():
        if section not in doc:
            raise ConfigError(f"missing section [{section}]")
        for name in names:
            if name not in doc[section]:
                raise ConfigError(f"missing key {section}.{name}")


def _build_series(table: dict):
    cadence = float(table.get("cadence", 0.0))
    if cadence < 0:
        raise ConfigError("series.cadence must be nonnegative")
    kw = {}
    for name in ("sigma", "j0", "k0"):
        if name in table:
            kw[name] = table[name]
    if "B" in table:
        kw["b"] = float(table["B"])
    if "k_grid" in table:
        ks = table["k_grid"]
        if not ks or any(isinstance(k, bool) or not isinstance(k, int)
                         for k in ks):
            raise ConfigError("series.k_grid must be a nonempty list of integers")
        kw["k_grid"] = tuple(ks)
        kw.setdefault("k0", ks[0])
    elif "k0" in table:
        k0 = kw["k0"]
        kw["k_grid"] = tuple(range(k0, 2 * k0 + 1, max(1, k0 // 10)))
    try:
        return SeriesParams(**kw), cadence
    except ValueError as exc:
        raise ConfigError(f"series: {exc}") from exc


def loads(text: str, source: str = "<config>") -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the parser message carries line and column
        raise ConfigError(f"{source}: {exc}") from exc
    _typecheck(doc)

    init_table = doc.get("initial", {})
    kind = init_table.get("kind", "taylor-green")
    if kind not in _INITIAL_KINDS:
        raise ConfigError(
            f"initial.kind must be one of {', '.join(_INITIAL_KINDS)}; got {kind!r}")
    spec_kw = {k: v for k, v in init_table.items() if k != "kind"}

    out_table = doc.get("output", {})
    interval = out_table.get("checkpoint_interval")
    try:
        solver = SolverConfig(
            n=doc["grid"]["n"],
            nu=float(doc["physics"]["nu"]),
            dt=float(doc["time"]["dt"]),
            t_end=float(doc["time"]["t_end"]),
            initial=InitialSpec(kind=kind, **spec_kw),
            checkpoint_interval=None if interval is None else float(interval),
            out_dir=out_table.get("directory"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    series, cadence = (None, 0.0)
    if "series" in doc:
        series, cadence = _build_series(doc["series"])

    csv_names = dict(DEFAULT_CSV_NAMES)
    for key, val in out_table.get("csv_names", {}).items():
        if key not in csv_names:
            raise ConfigError(f"unknown key output.csv_names.{key}")
        if not isinstance(val, str) or not val:
            raise ConfigError(f"output.csv_names.{key} must be a file name")
        csv_names[key] = val

    return RunConfig(solver=solver, series=series, series_cadence=cadence,
                     csv_names=csv_names)


def load_config(path) -> RunConfig:
    path = Path(path)
    return loads(path.read_text(), source=str(path))
