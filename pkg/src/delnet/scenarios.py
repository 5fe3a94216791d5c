"""Config-driven scenario tables with reproducible CSV output.

A scenario is a TOML document with a ``[scenario]`` header naming its kind,
a mandatory rng seed, and kind-specific sections.  Unknown keys are hard
errors.  Every runner is deterministic given the config and seed, and every
emitted number comes from an exact computation, so rerunning a config
produces byte-identical output.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import __version__
from .blackwell import Experiment, is_dominated, separating_loss, verification_gain
from .channels import (
    BudgetSpec,
    ChainSpec,
    apply_encoder,
    chain_decomposition,
    communication_tax,
    optimal_encoder,
)
from .decision import (
    BRIER_SCORE,
    LOG_SCORE,
    InformationState,
    LossMatrix,
    bayes_risk,
)
from .network import (
    DelegatedNetwork,
    NetworkNode,
    collapse_gap,
    with_bayes_terminal,
)
from .prob import (
    ConfigError,
    Distribution,
    GraphError,
    InputError,
    JointModel,
    Kernel,
    Space,
    VariableSpec,
    compose,
)
from .review import ReviewProblem, review_frontier
from .sampling import random_distribution, random_kernel

LN2 = math.log(2.0)

RUN_KINDS = ("relay-depth", "interface", "distortion-scatter",
             "signal-expansion", "review-frontier", "custom-network")
ALL_KINDS = RUN_KINDS + ("encode-opt", "tax", "chain", "blackwell")


# ---------------------------------------------------------------------------
# Result tables


def _fmt(cell) -> str:
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    if isinstance(cell, (float, np.floating)):
        x = float(cell)
        if x == 0.0:
            return "0"
        return f"{x:.12g}"
    return str(cell)


@dataclass(frozen=True, eq=False)
class ResultTable:
    """A rectangular table plus a ``#``-prefixed provenance footer.

    ``nat_columns`` marks columns holding natural-log quantities; rendering
    with bits=True divides those by ln 2 and records the unit change.
    """

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    footer: tuple[tuple[str, str], ...] = ()
    nat_columns: tuple[str, ...] = ()

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise InputError(
                    f"row of width {len(row)} in a {len(self.columns)}-column table")
        for name in self.nat_columns:
            if name not in self.columns:
                raise InputError(f"nat column {name!r} is not a column")

    def render(self, bits: bool = False) -> str:
        scaled = {self.columns.index(c) for c in self.nat_columns} if bits else set()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            cells = []
            for i, cell in enumerate(row):
                if i in scaled and isinstance(cell, (float, np.floating)):
                    cell = float(cell) / LN2
                cells.append(_fmt(cell))
            writer.writerow(cells)
        for key, value in self.footer:
            buf.write(f"# {key}={value}\n")
        if self.nat_columns:
            buf.write(f"# units={'bits' if bits else 'nats'}\n")
        return buf.getvalue()


def pearson(xs, ys) -> float | None:
    """Sample correlation; None when either column has zero variance."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(dx @ dy) / (sx * sy)


# ---------------------------------------------------------------------------
# Config parsing


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario document (the parsed mapping is the identity)."""

    data: dict

    @property
    def kind(self) -> str:
        return self.data["scenario"]["kind"]

    @property
    def seed(self) -> int:
        return self.data["scenario"]["seed"]

    @property
    def out(self) -> str | None:
        return self.data["scenario"].get("out")

    def with_seed(self, seed: int) -> "ScenarioConfig":
        data = _copy_tree(self.data)
        data["scenario"]["seed"] = int(seed)
        return ScenarioConfig(data)


def _copy_tree(value):
    if isinstance(value, dict):
        return {k: _copy_tree(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_copy_tree(v) for v in value]
    return value


def _find_line(lines, key) -> int | None:
    if key is None:
        return None
    for i, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped.startswith(f"{key}") and stripped[len(key):].lstrip().startswith("="):
            return i
        if stripped.startswith("[") and key in stripped:
            return i
    return None


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return _is_int(v) or isinstance(v, float)


def _is_str(v) -> bool:
    return isinstance(v, str)


def _is_num_list(v) -> bool:
    return isinstance(v, list) and len(v) > 0 and all(_is_num(x) for x in v)


def _is_matrix(v) -> bool:
    return (isinstance(v, list) and len(v) > 0
            and all(_is_num_list(row) for row in v)
            and len({len(row) for row in v}) == 1)


def _is_labels(v) -> bool:
    if _is_int(v):
        return v >= 2
    return (isinstance(v, list) and len(v) >= 2
            and all(_is_str(x) for x in v) and len(set(v)) == len(v))


class _Section:
    """Cursor over one config table: typed reads plus unknown-key detection."""

    def __init__(self, mapping, path, lines):
        self._map = mapping
        self._path = path
        self._lines = lines
        self._seen = set()

    def _dotted(self, key=None) -> str:
        parts = self._path + ((key,) if key else ())
        return ".".join(parts) if parts else "config"

    def fail(self, message, key=None):
        raise ConfigError(message, _find_line(self._lines, key or
                                              (self._path[-1] if self._path else None)))

    def req(self, key, pred, desc):
        if key not in self._map:
            self.fail(f"'{self._dotted()}' is missing required key '{key}'")
        return self.opt(key, pred, desc)

    def opt(self, key, pred, desc, default=None):
        self._seen.add(key)
        if key not in self._map:
            return default
        value = self._map[key]
        if not pred(value):
            self.fail(f"'{self._dotted(key)}' must be {desc}", key)
        return value

    def sub(self, key, required=False):
        self._seen.add(key)
        value = self._map.get(key)
        if value is None:
            if required:
                self.fail(f"'{self._dotted()}' is missing required section '{key}'")
            return None
        if not isinstance(value, dict):
            self.fail(f"'{self._dotted(key)}' must be a section", key)
        return _Section(value, self._path + (key,), self._lines)

    def subs(self, key):
        """An array of tables ([[...]]); empty when absent."""
        self._seen.add(key)
        value = self._map.get(key, [])
        if not (isinstance(value, list) and all(isinstance(x, dict) for x in value)):
            self.fail(f"'{self._dotted(key)}' must be an array of sections", key)
        return [_Section(x, self._path + (key,), self._lines) for x in value]

    def done(self):
        for key in self._map:
            if key not in self._seen:
                self.fail(f"unknown key '{self._dotted(key)}'", key)


def _check_channel(sec: _Section):
    fid = sec.opt("fidelity", _is_num, "a number in [0, 1]")
    rows = sec.opt("rows", _is_matrix, "a matrix (equal-length rows of numbers)")
    if (fid is None) == (rows is None):
        sec.fail(f"'{sec._dotted()}' needs exactly one of 'fidelity' or 'rows'")
    sec.done()


def _check_model(root: _Section, allow_base: bool):
    model = root.sub("model", required=True)
    labels = model.req("labels", _is_labels,
                       "an integer >= 2 or a list of distinct strings")
    n = labels if _is_int(labels) else len(labels)
    prior = model.opt("prior", _is_num_list, "a list of numbers")
    if prior is not None and len(prior) != n:
        model.fail(f"'model.prior' has {len(prior)} entries for {n} labels", "prior")
    if allow_base:
        base = model.sub("base")
        if base is not None:
            _check_channel(base)
    model.done()


def _check_loss_table(sec: _Section):
    kind = sec.opt("kind", lambda v: v == "zero-one", "the string 'zero-one'")
    values = sec.opt("values", _is_matrix, "a matrix of losses (actions x labels)")
    if (kind is None) == (values is None):
        sec.fail(f"'{sec._dotted()}' needs exactly one of 'kind' or 'values'")
    sec.done()


def _check_relay_depth(root: _Section):
    _check_model(root, allow_base=True)
    relay = root.sub("relay", required=True)
    relay.req("depths",
              lambda v: isinstance(v, list) and len(v) > 0
              and all(_is_int(d) and d >= 1 for d in v),
              "a nonempty list of integers >= 1")
    _check_channel(relay.sub("hop", required=True))
    relay.done()


def _check_interface(root: _Section):
    _check_model(root, allow_base=True)
    sec = root.sub("interface", required=True)
    sec.req("stages", lambda v: _is_int(v) and v >= 0, "an integer >= 0")
    sec.req("budget", lambda v: _is_int(v) and v >= 1, "an integer >= 1")
    _check_channel(sec.sub("prose", required=True))
    sec.done()


def _check_distortion_scatter(root: _Section):
    sec = root.sub("scatter", required=True)
    n = sec.req("instances", _is_int, "an integer")
    if n < 3:
        sec.fail("'scatter.instances' below 3 leaves no correlation to report",
                 "instances")
    sec.req("label_count", lambda v: _is_int(v) and v >= 2, "an integer >= 2")
    sec.req("signal_count", lambda v: _is_int(v) and v >= 2, "an integer >= 2")
    sec.req("hops", lambda v: _is_int(v) and v >= 1, "an integer >= 1")
    _check_channel(sec.sub("relay", required=True))
    sec.done()


def _check_signal_expansion(root: _Section):
    _check_model(root, allow_base=False)
    sec = root.sub("expansion", required=True)
    _check_channel(sec.sub("message", required=True))
    settings = sec.subs("settings")
    if not settings:
        sec.fail("'expansion' needs at least one [[expansion.settings]] entry")
    names = []
    for setting in settings:
        names.append(setting.req("name", _is_str, "a string"))
        setting.req("inputs", lambda v: v in ("m", "ym"), "'m' or 'ym'")
        fid = setting.opt("fidelity", _is_num, "a number in [0, 1]")
        rows = setting.opt("rows", _is_matrix, "a matrix")
        if (fid is None) == (rows is None):
            setting.fail("each setting needs exactly one of 'fidelity' or 'rows'")
        setting.done()
    if len(set(names)) != len(names):
        sec.fail("setting names must be distinct", "settings")
    sec.done()


def _check_review_frontier(root: _Section):
    _check_model(root, allow_base=True)
    sec = root.sub("review", required=True)
    costs = sec.req("costs", _is_num_list, "a nonempty list of numbers")
    if any(c < 0 for c in costs):
        sec.fail("'review.costs' entries must be >= 0", "costs")
    loss = sec.sub("loss")
    if loss is not None:
        _check_loss_table(loss)
    sec.done()


def _check_custom_network(root: _Section):
    _check_model(root, allow_base=False)
    sec = root.sub("network", required=True)
    variables = sec.subs("variables")
    if not variables:
        sec.fail("'network' needs at least one [[network.variables]] entry")
    for var in variables:
        var.req("name", _is_str, "a string")
        parents = var.opt("parents",
                          lambda v: isinstance(v, list) and len(v) > 0
                          and all(_is_str(x) for x in v),
                          "a nonempty list of names")
        rows = var.opt("rows", _is_matrix, "a matrix")
        dist = var.opt("dist", _is_num_list, "a list of probabilities")
        if dist is not None and (parents is not None or rows is not None):
            var.fail("a root variable with 'dist' cannot also have 'parents'/'rows'")
        if dist is None and (parents is None or rows is None):
            var.fail("a variable needs either 'dist' or both 'parents' and 'rows'")
        var.done()
    nodes = sec.subs("nodes")
    if not nodes:
        sec.fail("'network' needs at least one [[network.nodes]] entry")
    terminals = 0
    for node in nodes:
        node.req("id", _is_str, "a string")
        node.req("inputs",
                 lambda v: isinstance(v, list) and len(v) > 0
                 and all(_is_str(x) for x in v),
                 "a nonempty list of names")
        node.req("rows", _is_matrix, "a matrix")
        terminals += bool(node.opt("terminal", lambda v: isinstance(v, bool),
                                   "a boolean", default=False))
        node.done()
    if terminals != 1:
        sec.fail(f"exactly one node must set terminal = true (found {terminals})",
                 "nodes")
    sec.opt("edges",
            lambda v: isinstance(v, list)
            and all(isinstance(e, list) and len(e) == 2
                    and all(_is_str(x) for x in e) for e in v),
            "a list of [from, to] name pairs")
    loss = sec.sub("loss")
    if loss is not None:
        _check_loss_table(loss)
    sec.done()


def _check_encode_opt(root: _Section):
    _check_model(root, allow_base=True)
    sec = root.sub("encode")
    if sec is None:
        return
    sec.opt("budgets",
            lambda v: isinstance(v, list) and len(v) > 0
            and all(_is_int(k) and k >= 1 for k in v),
            "a nonempty list of integers >= 1")
    objective = sec.opt("objective", lambda v: v in ("zero-one", "log", "brier"),
                        "'zero-one', 'log', or 'brier'")
    loss = sec.sub("loss")
    if loss is not None:
        if objective is not None:
            sec.fail("'encode.objective' and [encode.loss] are mutually exclusive")
        _check_loss_table(loss)
    sec.done()


def _check_tax(root: _Section):
    _check_model(root, allow_base=True)
    sec = root.sub("tax", required=True)
    sec.req("rule", lambda v: v in ("log", "brier"), "'log' or 'brier'")
    _check_channel(sec.sub("channel", required=True))
    sec.done()


def _check_chain(root: _Section):
    _check_model(root, allow_base=True)
    sec = root.sub("chain", required=True)
    hops = sec.subs("hops")
    if not hops:
        sec.fail("'chain' needs at least one [[chain.hops]] entry")
    for hop in hops:
        _check_channel(hop)
    sec.done()


def _check_blackwell(root: _Section):
    _check_model(root, allow_base=False)
    sec = root.sub("blackwell", required=True)
    _check_channel(sec.sub("source", required=True))
    _check_channel(sec.sub("target", required=True))
    sec.done()


_CHECKERS = {
    "relay-depth": _check_relay_depth,
    "interface": _check_interface,
    "distortion-scatter": _check_distortion_scatter,
    "signal-expansion": _check_signal_expansion,
    "review-frontier": _check_review_frontier,
    "custom-network": _check_custom_network,
    "encode-opt": _check_encode_opt,
    "tax": _check_tax,
    "chain": _check_chain,
    "blackwell": _check_blackwell,
}


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"config is not valid TOML: {err}") from None
    lines = text.splitlines()
    root = _Section(data, (), lines)
    scenario = root.sub("scenario", required=True)
    kind = scenario.req("kind", lambda v: v in ALL_KINDS,
                        "one of " + ", ".join(ALL_KINDS))
    scenario.req("seed", lambda v: _is_int(v) and v >= 0, "an integer >= 0")
    scenario.opt("out", _is_str, "a string")
    scenario.done()
    _CHECKERS[kind](root)
    root.done()
    return ScenarioConfig(data)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# Canonical serialization


def _emit_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, list):
        return "[" + ", ".join(_emit_value(v) for v in value) + "]"
    raise InputError(f"cannot serialize config value of type {type(value).__name__}")


def _is_table_array(value) -> bool:
    return (isinstance(value, list) and len(value) > 0
            and all(isinstance(x, dict) for x in value))


def _emit_table(mapping, path, out, array=False):
    scalars = [(k, v) for k, v in mapping.items()
               if not isinstance(v, dict) and not _is_table_array(v)]
    tables = [(k, v) for k, v in mapping.items() if isinstance(v, dict)]
    arrays = [(k, v) for k, v in mapping.items() if _is_table_array(v)]
    if path:
        head = ".".join(path)
        out.append(f"[[{head}]]" if array else f"[{head}]")
    for key, value in scalars:
        out.append(f"{key} = {_emit_value(value)}")
    for key, value in tables:
        out.append("")
        _emit_table(value, path + (key,), out)
    for key, items in arrays:
        for item in items:
            out.append("")
            _emit_table(item, path + (key,), out, array=True)


def serialize_config(cfg: ScenarioConfig) -> str:
    out: list = []
    _emit_table(cfg.data, (), out)
    while out and out[0] == "":
        del out[0]
    return "\n".join(out) + "\n"


def config_digest(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Shared model construction


def _model_space_prior(data) -> tuple[Space, Distribution]:
    model = data["model"]
    labels = model["labels"]
    y = Space.of_size("y", labels) if _is_int(labels) else Space("y", tuple(labels))
    try:
        prior = (Distribution(y, model["prior"]) if "prior" in model
                 else Distribution.uniform(y))
    except InputError as err:
        raise ConfigError(f"[model] prior: {err}") from None
    return y, prior


def _kernel_from(table, from_space: Space, out_name: str, where: str,
                 square: bool = False) -> Kernel:
    try:
        if "fidelity" in table:
            return Kernel.symmetric(from_space, float(table["fidelity"]),
                                    Space.of_size(out_name, from_space.size))
        rows = np.asarray(table["rows"], dtype=float)
        if rows.shape[0] != from_space.size:
            raise InputError(
                f"needs {from_space.size} rows (one per input symbol), "
                f"got {rows.shape[0]}")
        if square and rows.shape[1] != rows.shape[0]:
            raise InputError("matrix must be square so it can be re-applied")
        return Kernel(from_space, Space.of_size(out_name, rows.shape[1]), rows)
    except InputError as err:
        raise ConfigError(f"[{where}] {err}") from None


def _base_state(data) -> InformationState:
    y, prior = _model_space_prior(data)
    model = data["model"]
    if "base" in model:
        kern = _kernel_from(model["base"], y, "b", "model.base")
    else:
        kern = Kernel(y, Space.of_size("b", y.size), np.eye(y.size))
    return InformationState.from_kernel(prior, kern, name="b")


def _loss_from(table, labels: Space, where: str) -> LossMatrix:
    if table is None or table.get("kind") == "zero-one":
        return LossMatrix.zero_one(labels)
    try:
        values = np.asarray(table["values"], dtype=float)
        return LossMatrix(Space.of_size("a", values.shape[0]), labels, values)
    except InputError as err:
        raise ConfigError(f"[{where}] {err}") from None


# ---------------------------------------------------------------------------
# Runners


def _relay_network(y: Space, prior: Distribution, base: Kernel,
                   hop_rows: np.ndarray, hops: int,
                   loss: LossMatrix) -> DelegatedNetwork:
    model = JointModel(y, prior, (VariableSpec("b", base.to_space, ("y",), base),))
    nodes = []
    edges = []
    prev_name, prev_space = "b", base.to_space
    for i in range(hops):
        node_id = f"r{i + 1}"
        out = Space.of_size(node_id, hop_rows.shape[1])
        nodes.append(NetworkNode(node_id, (prev_name,),
                                 Kernel(prev_space, out, hop_rows)))
        if prev_name != "b":
            edges.append((prev_name, node_id))
        prev_name, prev_space = node_id, out
    placeholder = Kernel.constant(prev_space, Distribution.uniform(loss.actions))
    nodes.append(NetworkNode("decide", (prev_name,), placeholder,
                             is_terminal=True))
    if prev_name != "b":
        edges.append((prev_name, "decide"))
    net = DelegatedNetwork(model, tuple(nodes), tuple(edges))
    return with_bayes_terminal(net, loss)


def run_relay_depth(cfg: ScenarioConfig) -> ResultTable:
    y, prior = _model_space_prior(cfg.data)
    model = cfg.data["model"]
    base = (_kernel_from(model["base"], y, "b", "model.base")
            if "base" in model else Kernel(y, Space.of_size("b", y.size), np.eye(y.size)))
    hop = _kernel_from(cfg.data["relay"]["hop"], base.to_space, "r", "relay.hop",
                       square=True)
    loss = LossMatrix.zero_one(y)
    rows = []
    for depth in cfg.data["relay"]["depths"]:
        net = _relay_network(y, prior, base, hop.rows, depth - 1, loss)
        report = collapse_gap(net, loss)
        rows.append((int(depth), 1.0 - report.network_loss, report.gap))
    return ResultTable(("depth", "accuracy", "gap_to_centralized"), tuple(rows))


def run_interface(cfg: ScenarioConfig) -> ResultTable:
    state = _base_state(cfg.data)
    sec = cfg.data["interface"]
    prose_kernel = _kernel_from(sec["prose"], state.alphabet, "p",
                                "interface.prose", square=True)
    loss = LossMatrix.zero_one(state.label_space)
    budget = BudgetSpec(sec["budget"])
    structured, prose = state, state
    rows = [(0, 1.0 - bayes_risk(state, loss).value,
             1.0 - bayes_risk(state, loss).value)]
    for stage in range(1, sec["stages"] + 1):
        found = optimal_encoder(structured, budget, loss)
        structured = apply_encoder(structured, found.encoder)
        prose = apply_encoder(prose, prose_kernel)
        rows.append((stage, 1.0 - bayes_risk(structured, loss).value,
                     1.0 - bayes_risk(prose, loss).value))
    return ResultTable(("stage", "accuracy_structured", "accuracy_prose"),
                       tuple(rows))


def run_distortion_scatter(cfg: ScenarioConfig) -> ResultTable:
    sec = cfg.data["scatter"]
    y = Space.of_size("y", sec["label_count"])
    b = Space.of_size("b", sec["signal_count"])
    relay = _kernel_from(sec["relay"], b, "m", "scatter.relay", square=True)
    channel = relay
    for _ in range(sec["hops"] - 1):
        channel = compose(channel, relay)
    loss = LossMatrix.zero_one(y)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(sec["instances"]):
        prior = random_distribution(rng, y)
        base = random_kernel(rng, y, b)
        direct = InformationState.from_kernel(prior, base, name="b")
        tax = communication_tax(direct, channel, LOG_SCORE)
        relayed = apply_encoder(direct, channel)
        drop = bayes_risk(relayed, loss).value - bayes_risk(direct, loss).value
        rows.append((i, tax.expected_divergence, drop))
    r = pearson([row[1] for row in rows], [row[2] for row in rows])
    footer = (("pearson_r", "undefined" if r is None else _fmt(r)),)
    return ResultTable(("instance", "posterior_kl", "accuracy_drop"),
                       tuple(rows), footer, nat_columns=("posterior_kl",))


def run_signal_expansion(cfg: ScenarioConfig) -> ResultTable:
    y, prior = _model_space_prior(cfg.data)
    sec = cfg.data["expansion"]
    message = _kernel_from(sec["message"], y, "m", "expansion.message")
    n_m = message.to_space.size
    loss = LossMatrix.zero_one(y)
    rows = []
    for setting in sec["settings"]:
        name = setting["name"]
        where = f"expansion.settings ({name})"
        if setting["inputs"] == "m":
            w = _kernel_from(setting, message.to_space, "w", where)
            joint = np.einsum("y,ym,mw->ymw", prior.probs, message.rows, w.rows)
        elif "fidelity" in setting:
            # Fresh look: W is a symmetric observation of the label itself.
            look = Kernel.symmetric(y, float(setting["fidelity"]),
                                    Space.of_size("w", y.size))
            joint = np.einsum("y,ym,yw->ymw", prior.probs, message.rows,
                              look.rows)
        else:
            w_rows = np.asarray(setting["rows"], dtype=float)
            if w_rows.shape[0] != y.size * n_m:
                raise ConfigError(
                    f"[{where}] needs {y.size * n_m} rows "
                    f"(label-major over label x message pairs), got {w_rows.shape[0]}")
            pair = Space.of_size("ym", y.size * n_m)
            w = _kernel_from({"rows": setting["rows"]}, pair, "w", where)
            joint = (prior.probs[:, None] * message.rows)[:, :, None] \
                * w.rows.reshape(y.size, n_m, -1)
        gain = verification_gain(joint, loss)
        rows.append((name, 1.0 - gain.value_without, 1.0 - gain.value_with,
                     gain.gain, gain.redundant))
    return ResultTable(("setting", "accuracy_without", "accuracy_with",
                        "gain", "redundant"), tuple(rows))


def run_review_frontier(cfg: ScenarioConfig) -> ResultTable:
    state = _base_state(cfg.data)
    sec = cfg.data["review"]
    loss = _loss_from(sec.get("loss"), state.label_space, "review.loss")
    problem = ReviewProblem.uniform_cost(state, loss, 0.0)
    points = review_frontier(problem, sec["costs"])
    rows = tuple((p.review_cost, p.escalation_mass, p.value) for p in points)
    return ResultTable(("review_cost", "escalation_mass", "value"), rows)


def run_custom_network(cfg: ScenarioConfig) -> ResultTable:
    y, prior = _model_space_prior(cfg.data)
    sec = cfg.data["network"]
    sizes = {"y": y.size}
    variables = []
    for var in sec["variables"]:
        name = var["name"]
        where = f"network.variables ({name})"
        try:
            if "dist" in var:
                space = Space.of_size(name, len(var["dist"]))
                variables.append(VariableSpec.root(
                    name, Distribution(space, var["dist"])))
            else:
                rows = np.asarray(var["rows"], dtype=float)
                in_size = 1
                for parent in var["parents"]:
                    if parent not in sizes:
                        raise InputError(f"unknown parent '{parent}'")
                    in_size *= sizes[parent]
                space = Space.of_size(name, rows.shape[1])
                kern = Kernel(Space.of_size("in", in_size), space, rows)
                variables.append(VariableSpec(name, space,
                                              tuple(var["parents"]), kern))
            sizes[name] = variables[-1].space.size
        except InputError as err:
            raise ConfigError(f"[{where}] {err}") from None
    try:
        model = JointModel(y, prior, tuple(variables))
    except InputError as err:
        raise ConfigError(f"[network] {err}") from None
    for node in sec["nodes"]:
        sizes[node["id"]] = len(node["rows"][0])
    nodes = []
    for node in sec["nodes"]:
        where = f"network.nodes ({node['id']})"
        try:
            rows = np.asarray(node["rows"], dtype=float)
            in_size = 1
            for parent in node["inputs"]:
                if parent not in sizes:
                    raise InputError(f"unknown input '{parent}'")
                in_size *= sizes[parent]
            rule = Kernel(Space.of_size("in", in_size),
                          Space.of_size(node["id"], rows.shape[1]), rows)
            nodes.append(NetworkNode(node["id"], tuple(node["inputs"]), rule,
                                     is_terminal=node.get("terminal", False)))
        except InputError as err:
            raise ConfigError(f"[{where}] {err}") from None
    if "edges" in sec:
        edges = tuple((e[0], e[1]) for e in sec["edges"])
    else:
        node_ids = {n.id for n in nodes}
        edges = tuple((src, n.id) for n in nodes for src in n.inputs
                      if src in node_ids)
    try:
        net = DelegatedNetwork(model, tuple(nodes), edges)
    except (GraphError, InputError) as err:
        raise ConfigError(f"[network] {err}") from None
    loss = _loss_from(sec.get("loss"), y, "network.loss")
    if loss.actions.size != net.terminal.output_space.size:
        raise ConfigError(
            f"[network.loss] has {loss.actions.size} actions but the terminal "
            f"emits {net.terminal.output_space.size} symbols")
    report = collapse_gap(net, loss)
    rows = ((report.network_loss, report.centralized_value, report.gap),)
    return ResultTable(("network_loss", "centralized_value", "gap"), rows)


def run_encode_opt(cfg: ScenarioConfig) -> ResultTable:
    state = _base_state(cfg.data)
    sec = cfg.data.get("encode", {})
    budgets = sec.get("budgets", list(range(1, state.alphabet.size + 1)))
    if "loss" in sec:
        objective = _loss_from(sec["loss"], state.label_space, "encode.loss")
        kind = "custom"
    else:
        kind = sec.get("objective", "zero-one")
        objective = {"zero-one": LossMatrix.zero_one(state.label_space),
                     "log": LOG_SCORE, "brier": BRIER_SCORE}[kind]
    rows = []
    all_exact = True
    for k in budgets:
        found = optimal_encoder(state, BudgetSpec(int(k)), objective)
        all_exact = all_exact and found.exact
        rows.append((int(k), found.value,
                     "-".join(str(block) for block in found.assignment)))
    footer = (("objective", kind), ("exact", "true" if all_exact else "false"))
    return ResultTable(("k", "value", "encoder_partition"), tuple(rows), footer,
                       nat_columns=("value",) if kind == "log" else ())


def run_tax(cfg: ScenarioConfig) -> ResultTable:
    state = _base_state(cfg.data)
    sec = cfg.data["tax"]
    channel = _kernel_from(sec["channel"], state.alphabet, "m", "tax.channel")
    rule = LOG_SCORE if sec["rule"] == "log" else BRIER_SCORE
    tax = communication_tax(state, channel, rule)
    if sec["rule"] == "log":
        columns = ("rule", "value_source", "value_relayed", "gap",
                   "expected_divergence", "conditional_mi")
        rows = ((sec["rule"], tax.value_source, tax.value_relayed, tax.gap,
                 tax.expected_divergence, tax.conditional_mi),)
        nat = columns[1:]
    else:
        columns = ("rule", "value_source", "value_relayed", "gap",
                   "expected_divergence")
        rows = ((sec["rule"], tax.value_source, tax.value_relayed, tax.gap,
                 tax.expected_divergence),)
        nat = ()
    return ResultTable(columns, rows, nat_columns=nat)


def run_chain(cfg: ScenarioConfig) -> ResultTable:
    state = _base_state(cfg.data)
    kernels = []
    current = state.alphabet
    for i, hop in enumerate(cfg.data["chain"]["hops"]):
        kern = _kernel_from(hop, current, f"m{i + 1}", f"chain.hops[{i}]")
        kernels.append(kern)
        current = kern.to_space
    decomposition = chain_decomposition(ChainSpec(state, tuple(kernels)))
    rows = []
    running = 0.0
    for i, term in enumerate(decomposition.stage_terms, start=1):
        running += term
        rows.append((i, term, running))
    return ResultTable(("stage", "term", "cumulative"), tuple(rows),
                       nat_columns=("term", "cumulative"))


def run_blackwell(cfg: ScenarioConfig) -> ResultTable:
    y, prior = _model_space_prior(cfg.data)
    sec = cfg.data["blackwell"]
    source = Experiment(prior, _kernel_from(sec["source"], y, "s",
                                            "blackwell.source"))
    target = Experiment(prior, _kernel_from(sec["target"], y, "t",
                                            "blackwell.target"))
    check = is_dominated(source, target)
    if check.dominated:
        witness = check.witness
        columns = ("target_signal",) + tuple(
            f"g_{lab}" for lab in source.signal_space.labels)
        rows = tuple((t_lab, *witness.channel.rows[i])
                     for i, t_lab in enumerate(target.signal_space.labels))
        footer = (("dominated", "true"),
                  ("witness_residual", _fmt(witness.residual)))
        return ResultTable(columns, rows, footer)
    sep = separating_loss(source, target, seed=cfg.seed)
    columns = ("action",) + tuple(f"loss_{lab}" for lab in y.labels)
    rows = tuple((a_lab, *sep.loss.values[i])
                 for i, a_lab in enumerate(sep.actions.labels))
    footer = (("dominated", "false"), ("margin", _fmt(sep.margin)),
              ("method", sep.method))
    return ResultTable(columns, rows, footer)


_RUNNERS = {
    "relay-depth": run_relay_depth,
    "interface": run_interface,
    "distortion-scatter": run_distortion_scatter,
    "signal-expansion": run_signal_expansion,
    "review-frontier": run_review_frontier,
    "custom-network": run_custom_network,
    "encode-opt": run_encode_opt,
    "tax": run_tax,
    "chain": run_chain,
    "blackwell": run_blackwell,
}


def run_config(cfg: ScenarioConfig) -> ResultTable:
    """Execute a validated config and stamp the provenance footer."""
    table = _RUNNERS[cfg.kind](cfg)
    footer = (("delnet_version", __version__),
              ("config_sha256", config_digest(cfg)),
              ("seed", str(cfg.seed))) + table.footer
    return dataclasses.replace(table, footer=footer)
