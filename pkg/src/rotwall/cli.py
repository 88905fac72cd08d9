"""Command-line front end.

    rotwall wall --molecule N2
    rotwall floquet --molecule N2 --P 3 --jmax 120
    rotwall evolve --molecule N2 --P 3 --pulses 32 --j0 0 --out run.csv
    rotwall evolve --molecule N2 --P 3 --pulses 32 --temperature 298
    rotwall semiclassical --molecule N2 --P 3 --pulses 32
    rotwall run --config run.yaml

Settings come from an optional flat YAML config (``--config``); command-line
flags override it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .dynamics import ThermalEnsembleSpec, evolve_pure, evolve_thermal
from .errors import EXIT_CODES, ConfigError, NoWallError, RotwallError
from .floquet import anderson_wall, classify_states, floquet_spectrum, one_cycle_operator
from .molecules import MoleculeDatabase, MoleculeParams, PulseTrainSpec
from .rotor import auto_j_max
from .semiclassical import DEFAULT_K0, DEFAULT_STEP, integrate_bloch

OUTPUT_KINDS = ("distribution", "alignment", "energy", "floquet", "semiclassical", "wall")
J_MAX_RULE = "auto: max(2*J_A, J0 + 4*N*sqrt(P), 80)"

# config key -> (type, default)
CONFIG_KEYS = {
    "molecule": (str, None),
    "database": (str, None),
    "B": (float, None),
    "D": (float, None),
    "g_even": (float, None),
    "g_odd": (float, None),
    "P": (float, 0.0),
    "pulses": (int, 0),
    "detuning": (float, 0.0),
    "j0": (int, None),
    "m0": (int, 0),
    "temperature": (float, None),
    "population_cutoff": (float, 0.999),
    "jmax": (str, "auto"),
    "k0": (float, DEFAULT_K0),
    "step": (float, DEFAULT_STEP),
    "sample_every": (float, 0.1),
    "workers": (int, None),
    "outputs": (list, None),
    "out": (str, None),
    "format": (str, "csv"),
}


@dataclass
class RunConfig:
    molecule: MoleculeParams
    train: PulseTrainSpec
    initial: object  # (J0, M0) or ThermalEnsembleSpec
    j_max: int | None
    outputs: tuple = ("distribution", "alignment", "energy")
    output_path: str | None = None
    format: str = "csv"
    k0: float = DEFAULT_K0
    step: float = DEFAULT_STEP
    sample_every: float = 0.1
    workers: int | None = None
    echo: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.outputs:
            raise ConfigError("no outputs requested")
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad:
            raise ConfigError(f"unknown outputs {bad}; choose from {', '.join(OUTPUT_KINDS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    @property
    def thermal(self) -> bool:
        return isinstance(self.initial, ThermalEnsembleSpec)

    def resolved_j_max(self) -> tuple[int, str]:
        if self.j_max is not None:
            return self.j_max, "user"
        j0 = 0 if self.thermal else self.initial[0]
        if self.thermal:
            from .dynamics import thermal_levels

            j0 = int(thermal_levels(self.molecule, self.initial)[0].max())
        return auto_j_max(self.molecule, self.train, j0), J_MAX_RULE


def load_config_file(path) -> dict:
    raw = yaml.safe_load(Path(path).read_text("utf-8")) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a key-value mapping")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {unknown}")
    return raw


def _merge(args) -> dict:
    merged = {k: default for k, (_, default) in CONFIG_KEYS.items()}
    if getattr(args, "config", None):
        merged.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def resolve_molecule(cfg: dict) -> MoleculeParams:
    name = cfg.get("molecule")
    base = MoleculeDatabase.load(cfg.get("database"))[name] if name else None
    B = cfg.get("B") if cfg.get("B") is not None else (base.B if base else None)
    D = cfg.get("D") if cfg.get("D") is not None else (base.D if base else None)
    if B is None or D is None:
        raise ConfigError("give --molecule or inline --B and --D")
    g_even = cfg.get("g_even") if cfg.get("g_even") is not None else (base.g_even if base else 1.0)
    g_odd = cfg.get("g_odd") if cfg.get("g_odd") is not None else (base.g_odd if base else 1.0)
    return MoleculeParams(name or "inline", float(B), float(D), float(g_even), float(g_odd))


def build_config(cfg: dict, default_outputs=("distribution", "alignment", "energy")) -> RunConfig:
    params = resolve_molecule(cfg)
    train = PulseTrainSpec(float(cfg["P"]), int(cfg["pulses"]), float(cfg["detuning"]))
    if cfg.get("temperature") is not None and cfg.get("j0") is not None:
        raise ConfigError("specify either a pure initial state (--j0) or a temperature, not both")
    if cfg.get("temperature") is not None:
        initial = ThermalEnsembleSpec(float(cfg["temperature"]), float(cfg["population_cutoff"]))
    else:
        initial = (int(cfg["j0"] or 0), int(cfg["m0"] or 0))
    jmax = cfg.get("jmax", "auto")
    j_max = None if jmax in (None, "auto") else int(jmax)
    echo = {k: cfg[k] for k in sorted(cfg) if cfg[k] is not None}
    return RunConfig(
        molecule=params,
        train=train,
        initial=initial,
        j_max=j_max,
        outputs=tuple(cfg.get("outputs") or default_outputs),
        output_path=cfg.get("out"),
        format=cfg.get("format", "csv"),
        k0=float(cfg["k0"]),
        step=float(cfg["step"]),
        sample_every=float(cfg["sample_every"]),
        workers=cfg.get("workers"),
        echo=echo,
    )


# ---------------------------------------------------------------- output


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if not math.isfinite(x) else x
    if isinstance(x, np.integer):
        return int(x)
    return x


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(tables: dict, metadata: dict) -> str:
    doc = {
        "metadata": metadata,
        "tables": {
            name: {"columns": list(cols), "rows": [[_jsonable(v) for v in row] for row in rows]}
            for name, (cols, rows) in tables.items()
        },
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def read_csv(text: str):
    """Parse an emitted CSV back into (columns, rows of floats/ints/str)."""
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = []
    for raw in reader:
        row = []
        for v in raw:
            try:
                row.append(int(v))
            except ValueError:
                try:
                    row.append(float(v))
                except ValueError:
                    row.append(v)
        rows.append(row)
    return columns, rows


def emit(tables: dict, metadata: dict, fmt: str, out: str | None, stream=None):
    """Write tables.  CSV: the first table goes to ``out``, others to ``<stem>_<name><suffix>``."""
    stream = stream or sys.stdout
    if fmt == "json":
        text = render_json(tables, metadata)
        if out:
            Path(out).write_text(text, encoding="utf-8")
        else:
            stream.write(text)
        return
    names = list(tables)
    for i, name in enumerate(names):
        text = render_csv(*tables[name])
        if out:
            p = Path(out)
            target = p if i == 0 else p.with_name(f"{p.stem}_{name}{p.suffix or '.csv'}")
            target.write_text(text, encoding="utf-8")
        elif i == 0:
            stream.write(text)


def _metadata(cfg: RunConfig | None, command: str, extra=None) -> dict:
    meta = {"tool": "rotwall", "version": __version__, "command": command}
    if cfg is not None:
        meta["config"] = cfg.echo
    if extra:
        meta.update(extra)
    return meta


# ---------------------------------------------------------------- commands


def wall_table(params: MoleculeParams):
    est = anderson_wall(params)
    return ("molecule", "D_over_B", "j_anderson", "j_anderson_rounded"), [
        (params.name, params.D_over_B, est.j_anderson, est.j_anderson_rounded)
    ]


def floquet_table(cfg: RunConfig):
    M = 0 if cfg.thermal else cfg.initial[1]
    j_max, rule = cfg.resolved_j_max()
    U = one_cycle_operator(cfg.molecule, cfg.train, M, j_max)
    spec = floquet_spectrum(U, M, cfg.train.tau_over_trev)
    try:
        wall = anderson_wall(cfg.molecule)
    except NoWallError:
        wall = None
    labels = classify_states(spec, wall)
    cols = ("state_index", "quasienergy", "peak_J", "participation_ratio", "localization_length", "label")
    rows = [
        (i, spec.quasienergies[i], int(spec.peak_J[i]), spec.participation_ratios[i], spec.localization_lengths[i], labels[i])
        for i in range(len(spec))
    ]
    return cols, rows, {"j_max": j_max, "j_max_rule": rule, "M": M}


def evolve_tables(cfg: RunConfig):
    j_max, rule = cfg.resolved_j_max()
    if cfg.thermal:
        ev = evolve_thermal(cfg.molecule, cfg.train, cfg.initial, j_max=j_max, workers=cfg.workers)
    else:
        J0, M0 = cfg.initial
        ev = evolve_pure(cfg.molecule, cfg.train, J0, M0, j_max=j_max)
    summary = (("n", "mean_j", "alignment", "energy"),
               [(r.pulse_index, r.mean_j, r.alignment, r.mean_energy) for r in ev])
    dist = (("n", "J", "p"),
            [(r.pulse_index, J, r.j_distribution[J]) for r in ev for J in range(len(r.j_distribution))])
    return summary, dist, {"j_max": j_max, "j_max_rule": rule}


def semiclassical_table(cfg: RunConfig):
    J0 = 0 if cfg.thermal else cfg.initial[0]
    n_max = max(cfg.train.N, 1)
    every = max(1, int(round(cfg.sample_every / cfg.step)))
    traj = integrate_bloch(cfg.train.P, cfg.molecule.D_over_B, cfg.k0, J0, n_max, cfg.step,
                           record_every=every, delta=cfg.train.delta)
    rows = list(zip(traj.n, traj.k, traj.J, traj.H))
    return ("n", "k", "J", "H"), rows, {"hamiltonian": traj.hamiltonian, "relative_drift": traj.relative_drift}


def cmd_wall(args, stream):
    cfg = _merge(args)
    if not cfg.get("molecule") and cfg.get("B") is None:
        db = MoleculeDatabase.load(cfg.get("database"))
        cols, rows = ("molecule", "D_over_B", "j_anderson", "j_anderson_rounded"), []
        for name in db.names():
            rows.extend(wall_table(db[name])[1])
    else:
        params = resolve_molecule(cfg)
        try:
            cols, rows = wall_table(params)
        except NoWallError:
            stream.write(f"{params.name}: no Anderson wall (D = 0, rigid rotor)\n")
            return 0
    emit({"wall": (cols, rows)}, _metadata(None, "wall"), cfg["format"], cfg.get("out"), stream)
    return 0


def cmd_floquet(args, stream):
    cfg = build_config(_merge(args), default_outputs=("floquet",))
    cols, rows, extra = floquet_table(cfg)
    emit({"floquet": (cols, rows)}, _metadata(cfg, "floquet", extra), cfg.format, cfg.output_path, stream)
    return 0


def cmd_evolve(args, stream):
    cfg = build_config(_merge(args))
    summary, dist, extra = evolve_tables(cfg)
    emit({"summary": summary, "distribution": dist}, _metadata(cfg, "evolve", extra), cfg.format, cfg.output_path, stream)
    return 0


def cmd_semiclassical(args, stream):
    cfg = build_config(_merge(args), default_outputs=("semiclassical",))
    cols, rows, extra = semiclassical_table(cfg)
    emit({"trajectory": (cols, rows)}, _metadata(cfg, "semiclassical", extra), cfg.format, cfg.output_path, stream)
    return 0


def cmd_run(args, stream):
    """Run every output listed in the config, one file per output under ``out`` (a directory)."""
    merged = _merge(args)
    cfg = build_config(merged)
    outdir = Path(cfg.output_path or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    ext = ".json" if cfg.format == "json" else ".csv"
    tables = {}
    if {"distribution", "alignment", "energy"} & set(cfg.outputs):
        summary, dist, extra = evolve_tables(cfg)
        if "distribution" in cfg.outputs:
            tables["distribution"] = (dist, extra)
        if "alignment" in cfg.outputs:
            tables["alignment"] = ((("n", "alignment"), [(r[0], r[2]) for r in summary[1]]), extra)
        if "energy" in cfg.outputs:
            tables["energy"] = ((("n", "energy"), [(r[0], r[3]) for r in summary[1]]), extra)
    if "floquet" in cfg.outputs:
        cols, rows, extra = floquet_table(cfg)
        tables["floquet"] = ((cols, rows), extra)
    if "semiclassical" in cfg.outputs:
        cols, rows, extra = semiclassical_table(cfg)
        tables["semiclassical"] = ((cols, rows), extra)
    if "wall" in cfg.outputs:
        try:
            tables["wall"] = (wall_table(cfg.molecule), {})
        except NoWallError:
            stream.write(f"{cfg.molecule.name}: no Anderson wall (D = 0, rigid rotor)\n")
    for name, (table, extra) in tables.items():
        emit({name: table}, _metadata(cfg, f"run:{name}", extra), cfg.format, str(outdir / f"{name}{ext}"), stream)
    return 0


def _exit_code_help():
    lines = ["exit statuses:", "  0  success"]
    for name, code in sorted(EXIT_CODES.items(), key=lambda kv: kv[1]):
        lines.append(f"  {code:<2} {name}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run settings (override --config)")
    g.add_argument("--config", help="flat YAML key-value config file")
    g.add_argument("--molecule", help="name from the molecule database")
    g.add_argument("--database", help="alternative molecule database (YAML)")
    g.add_argument("--B", type=float, help="rotational constant, cm^-1")
    g.add_argument("--D", type=float, help="centrifugal distortion constant, cm^-1")
    g.add_argument("--g-even", dest="g_even", type=float, help="spin weight of even J")
    g.add_argument("--g-odd", dest="g_odd", type=float, help="spin weight of odd J")
    g.add_argument("--P", type=float, help="kick strength (units of hbar)")
    g.add_argument("--pulses", type=int, help="number of pulses N")
    g.add_argument("--detuning", type=float, help="fractional detuning delta, tau = t_rev (1 + delta)")
    g.add_argument("--j0", type=int, help="initial J (pure state)")
    g.add_argument("--m0", type=int, help="initial M (pure state; Floquet block)")
    g.add_argument("--temperature", type=float, help="initial temperature in K (thermal ensemble)")
    g.add_argument("--population-cutoff", dest="population_cutoff", type=float, help="retained Boltzmann weight")
    g.add_argument("--jmax", help="basis cutoff, integer or 'auto'")
    g.add_argument("--k0", type=float, help="semiclassical initial quasimomentum")
    g.add_argument("--step", type=float, help="semiclassical integration step in n")
    g.add_argument("--sample-every", dest="sample_every", type=float, help="semiclassical output spacing in n")
    g.add_argument("--workers", type=int, help="worker threads for thermal branches")
    g.add_argument("--out", help="output path (stdout if omitted)")
    g.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = argparse.ArgumentParser(
        prog="rotwall",
        description="Resonantly kicked linear molecules: Floquet states, pulse-train dynamics, semiclassics.",
        epilog=_exit_code_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"rotwall {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("wall", cmd_wall, "Anderson-wall estimate (all database molecules if none given)"),
        ("floquet", cmd_floquet, "quasienergy table of one M block"),
        ("evolve", cmd_evolve, "per-pulse J distribution, alignment and energy"),
        ("semiclassical", cmd_semiclassical, "Bloch-oscillation trajectory (n, k, J, H)"),
        ("run", cmd_run, "run the outputs listed in a config; --out is a directory"),
    ):
        p = sub.add_parser(name, parents=[common], help=text, epilog=_exit_code_help(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
    return parser


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stream)
    except RotwallError as exc:
        print(f"rotwall: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
