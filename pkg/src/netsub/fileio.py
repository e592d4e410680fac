"""Edge-list files, experiment configuration, and report serialization.

Edge lists are whitespace-separated "u v" pairs, one per line, with '#'
comment lines and an optional "n <count>" header; the canonical written
form is the header followed by edges with u < v in lexicographic order.
Experiment configuration is a flat "key = value" text document.  Reports
are either flat key-value documents (single results) or CSV tables
(grids); all floats are written with 6 significant digits so identical
inputs produce byte-identical files.
"""

import csv
import io
import math

import numpy as np

from .counts import MOTIFS
from .graph import Graph, empty_graph, graph_from_edges
from .inference import VertexFraction
from .models import (BlockKernel, ConstantSparsity, ExponentSparsity,
                     GraphonModel, LatentKernel, LowRankKernel)
from .spectral import (CountStat, EigRatio, Eigenvalue, EstimatedRho,
                       KnownRho, SpectralGap, StatisticSpec, TracePower)
from .subsample import PSampleScheme

MAX_VERTEX_ID = 2**31 - 2


class EdgeListFormatError(ValueError):
    pass


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# edge lists


def parse_edge_list(text: str) -> Graph:
    declared_n = None
    us, vs = [], []
    saw_header_slot = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not saw_header_slot and parts[0] == "n":
            saw_header_slot = True
            if len(parts) != 2:
                raise EdgeListFormatError(f"line {lineno}: malformed header {line!r}")
            try:
                declared_n = int(parts[1])
            except ValueError:
                raise EdgeListFormatError(f"line {lineno}: malformed header {line!r}")
            if declared_n < 0:
                raise EdgeListFormatError(f"line {lineno}: negative vertex count")
            continue
        saw_header_slot = True
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected two vertex ids, "
                                      f"got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"line {lineno}: non-integer vertex id in "
                                      f"{line!r}")
        if u < 0 or v < 0:
            raise EdgeListFormatError(f"line {lineno}: negative vertex id")
        if u > MAX_VERTEX_ID or v > MAX_VERTEX_ID:
            raise EdgeListFormatError(f"line {lineno}: vertex id overflow")
        if u == v:
            raise EdgeListFormatError(f"line {lineno}: self loop {u}")
        us.append(u)
        vs.append(v)
    if declared_n is None:
        if not us:
            raise EdgeListFormatError("empty edge list without an 'n' header")
        n = 1 + max(max(us), max(vs))
    else:
        n = declared_n
        if us and max(max(us), max(vs)) >= n:
            raise EdgeListFormatError("vertex id exceeds declared count")
    if not us:
        return empty_graph(n)
    return graph_from_edges(n, us, vs, dedupe=True)


def read_edge_list(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def serialize_edge_list(graph: Graph) -> str:
    out = [f"n {graph.n}"]
    for u, v in graph.edge_array():
        out.append(f"{u} {v}")
    return "\n".join(out) + "\n"


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_edge_list(graph))


# ---------------------------------------------------------------------------
# number formatting and key-value reports


def round6(value: float) -> float:
    """Canonicalize a float to the report precision (6 significant digits)."""
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.6g}")
    return value


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def serialize_kv(mapping: dict) -> str:
    lines = [f"{key} = {format_value(value)}" for key, value in mapping.items()]
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if " = " not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition(" = ")
        out[key.strip()] = _parse_scalar(value.strip())
    return out


def _parse_scalar(token: str):
    if token == "true":
        return True
    if token == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def write_kv_report(mapping: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_kv(mapping))


def read_kv_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kv(fh.read())


# ---------------------------------------------------------------------------
# grid reports (CSV)


def serialize_table(rows: list, columns: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) if row[c] is not None else ""
                         for c in columns])
    return buf.getvalue()


def parse_table(text: str):
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ConfigError("empty table")
    columns = rows[0]
    out = []
    for row in rows[1:]:
        out.append({c: (_parse_scalar(cell) if cell != "" else None)
                    for c, cell in zip(columns, row)})
    return columns, out


COVERAGE_COLUMNS = ["model", "n", "sparsity", "scheme", "statistic",
                    "rho_mode", "available", "target", "coverage", "se",
                    "trials", "replicates", "level", "seed", "tau",
                    "construction", "note"]


def coverage_report_rows(report) -> list:
    prov = report.provenance
    rows = []
    for cell in report.cells:
        rows.append({
            "model": cell.model, "n": cell.n, "sparsity": cell.sparsity,
            "scheme": cell.scheme, "statistic": cell.statistic,
            "rho_mode": cell.rho_mode, "available": cell.available,
            "target": round6(cell.target) if cell.target is not None else None,
            "coverage": round6(cell.coverage) if cell.coverage is not None else None,
            "se": round6(cell.se) if cell.se is not None else None,
            "trials": cell.trials,
            "replicates": prov.get("replicates"), "level": prov.get("level"),
            "seed": prov.get("seed"), "tau": prov.get("tau"),
            "construction": prov.get("construction"), "note": cell.note or None,
        })
    return rows


def write_coverage_report(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_table(coverage_report_rows(report), COVERAGE_COLUMNS))


# ---------------------------------------------------------------------------
# statistic / scheme / sparsity tokens


def parse_statistic_token(token: str):
    """Functional part of a statistic spec, e.g. eig:-1, gap, trace:3:2."""
    parts = token.split(":")
    try:
        if parts[0] == "eig" and len(parts) == 2:
            return Eigenvalue(int(parts[1]))
        if parts[0] == "gap" and len(parts) == 1:
            return SpectralGap()
        if parts[0] == "ratio" and len(parts) == 2:
            return EigRatio(int(parts[1]))
        if parts[0] == "trace" and len(parts) == 3:
            return TracePower(p=int(parts[1]), k=int(parts[2]))
        if parts[0] == "count" and len(parts) == 2:
            if parts[1] not in MOTIFS:
                raise ConfigError(f"unknown motif {parts[1]!r} "
                                  f"(choices: {', '.join(sorted(MOTIFS))})")
            return CountStat(MOTIFS[parts[1]])
    except ValueError as exc:
        raise ConfigError(f"bad statistic token {token!r}: {exc}")
    raise ConfigError(f"unknown statistic token {token!r}")


def parse_rho_mode(token: str):
    if token == "estimated":
        return EstimatedRho()
    if token.startswith("known:"):
        try:
            return KnownRho(float(token.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad rho mode {token!r}: {exc}")
    raise ConfigError(f"rho mode must be 'estimated' or 'known:<value>', "
                      f"got {token!r}")


def parse_sparsity_token(token: str):
    kind, _, value = token.partition(":")
    try:
        if kind == "exponent":
            return ExponentSparsity(float(value))
        if kind == "constant":
            return ConstantSparsity(float(value))
    except ValueError as exc:
        raise ConfigError(f"bad sparsity token {token!r}: {exc}")
    raise ConfigError(f"sparsity must be 'exponent:<gamma>' or "
                      f"'constant:<nu>', got {token!r}")


def parse_scheme_token(token: str):
    kind, _, value = token.partition(":")
    try:
        if kind == "vertex":
            return VertexFraction(float(value))
        if kind == "psample":
            return PSampleScheme(float(value))
    except ValueError as exc:
        raise ConfigError(f"bad scheme token {token!r}: {exc}")
    raise ConfigError(f"scheme must be 'vertex:<fraction>' or "
                      f"'psample:<p>', got {token!r}")


def _parse_float_list(text: str):
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def build_model_from_keys(keys: dict) -> GraphonModel:
    family = keys.get("model")
    if family == "sbm":
        if "sbm_b" not in keys or "sbm_pi" not in keys:
            raise ConfigError("sbm model requires sbm_b and sbm_pi")
        rows = [_parse_float_list(row) for row in str(keys["sbm_b"]).split(";")]
        kernel = BlockKernel(B=np.array(rows), pi=np.array(_parse_float_list(
            str(keys["sbm_pi"]))))
    elif family == "gaussian_rbf":
        kernel = LatentKernel(family="gaussian_rbf",
                              bandwidth=float(keys.get("bandwidth", 25.0)),
                              latent_law=str(keys.get("latent_law",
                                                      "standard_normal")))
    elif family == "lowrank":
        if "eigenvalues" not in keys:
            raise ConfigError("lowrank model requires eigenvalues")
        kernel = LowRankKernel(eigenvalues=tuple(_parse_float_list(
            str(keys["eigenvalues"]))))
    else:
        raise ConfigError(f"unknown model family {family!r}")
    return GraphonModel(kernel=kernel)


REQUIRED_CONFIG_KEYS = ("model", "n_grid", "sparsity_grid", "scheme_grid",
                        "statistics", "trials", "replicates", "level",
                        "seed", "out")


class ExperimentConfig:
    """Validated coverage-experiment description."""

    def __init__(self, model, n_grid, sparsity_grid, scheme_grid, statistics,
                 trials, replicates, level, seed, out):
        self.model = model
        self.n_grid = n_grid
        self.sparsity_grid = sparsity_grid
        self.scheme_grid = scheme_grid
        self.statistics = statistics
        self.trials = trials
        self.replicates = replicates
        self.level = level
        self.seed = seed
        self.out = out


def parse_config(text: str) -> ExperimentConfig:
    keys = parse_kv(text)
    missing = [k for k in REQUIRED_CONFIG_KEYS if k not in keys]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    model = build_model_from_keys(keys)
    try:
        n_grid = [int(tok) for tok in str(keys["n_grid"]).split(",")]
    except ValueError:
        raise ConfigError("n_grid must be a comma-separated integer list")
    if any(n < 4 for n in n_grid):
        raise ConfigError("every n in n_grid must be at least 4")
    sparsity_grid = [parse_sparsity_token(tok.strip())
                     for tok in str(keys["sparsity_grid"]).split(",")]
    scheme_grid = [parse_scheme_token(tok.strip())
                   for tok in str(keys["scheme_grid"]).split(",")]
    rho_mode = parse_rho_mode(str(keys.get("rho_mode", "estimated")))
    statistics = [StatisticSpec(parse_statistic_token(tok.strip()), rho_mode)
                  for tok in str(keys["statistics"]).split(",")]
    trials = keys["trials"]
    replicates = keys["replicates"]
    level = keys["level"]
    seed = keys["seed"]
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials must be a positive integer")
    if not isinstance(replicates, int) or replicates < 50:
        raise ConfigError("replicates must be an integer >= 50")
    if not isinstance(level, (int, float)) or not 0.0 < float(level) < 1.0:
        raise ConfigError("level must lie in (0, 1)")
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return ExperimentConfig(model=model, n_grid=n_grid,
                            sparsity_grid=sparsity_grid,
                            scheme_grid=scheme_grid, statistics=statistics,
                            trials=trials, replicates=replicates,
                            level=float(level), seed=seed,
                            out=str(keys["out"]))


def read_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
