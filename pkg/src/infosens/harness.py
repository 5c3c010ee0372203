"""Seeded Monte-Carlo engine over input configurations.

Sweep drivers for the single-task and meta decompositions, the sensitivity
sandwich, slope checks of the convergence rates, identity audits with
standard errors, and CSV/JSON emission.

Randomness is counter-based: one root seed, and a Philox stream per
(cell, sample, purpose) triple, so results do not depend on evaluation
order and repeated runs with the same (config, seed) are bit-identical.
Within a cell every reported quantity is computed on the same sampled
configurations (shared-sample discipline), which cancels common Monte-Carlo
noise in identity residuals.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import generalization as gen
from . import meta as mt
from . import oracle as orc
from . import single_task as st
from .blr import fit, isotropic_model, predictive
from .errors import ConfigError, InsufficientGrid
from .features import FeatureMap, make_constant, make_polynomial, make_rbf_grid
from .single_task import Configuration

MODES = ("single_task", "meta", "bounds", "oracle_check", "asymptotics", "audit")
CSV_HEADER = ["mode", "N", "M", "quantity", "mean_nats", "stderr_nats", "seed", "mc_samples"]

# streams within one sample
_STREAM_INPUTS = 0
_STREAM_TARGETS = 1
_STREAM_MODEL = 2


def default_feature_map() -> FeatureMap:
    return make_rbf_grid(10, -2.0, 2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "single_task"
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    feature_map: FeatureMap = field(default_factory=default_feature_map)
    input_dim: int = 1
    n_grid: tuple[int, ...] = (2, 3, 5, 8, 13, 21, 34, 55, 89, 144)
    m_grid: tuple[int, ...] = (1, 2, 5, 10, 20, 50)
    mc_samples: int = 1000
    seed: int = 0
    meta_fixed_n: int = 50
    meta_fixed_m: int = 20

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in ("alpha", "beta", "gamma"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.input_dim != 1:
            raise ConfigError("only scalar inputs (input_dim = 1) are supported")
        for grid_name in ("n_grid", "m_grid"):
            grid = getattr(self, grid_name)
            if len(grid) == 0:
                raise ConfigError(f"{grid_name} must be nonempty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{grid_name} must be strictly increasing")
            if any(v < 1 for v in grid):
                raise ConfigError(f"{grid_name} entries must be >= 1")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be >= 1")

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "ExperimentConfig":
        kwargs: dict[str, Any] = {}
        for key in (
            "mode", "alpha", "beta", "gamma", "input_dim", "mc_samples",
            "seed", "meta_fixed_n", "meta_fixed_m",
        ):
            if key in data:
                kwargs[key] = data[key]
        if "feature_map" in data:
            kwargs["feature_map"] = FeatureMap.from_dict(data["feature_map"])
        if "n_grid" in data:
            kwargs["n_grid"] = tuple(int(v) for v in data["n_grid"])
        if "m_grid" in data:
            kwargs["m_grid"] = tuple(int(v) for v in data["m_grid"])
        unknown = set(data) - {
            "mode", "alpha", "beta", "gamma", "feature_map", "input_dim",
            "n_grid", "m_grid", "mc_samples", "seed", "meta_fixed_n", "meta_fixed_m",
        }
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = ExperimentConfig(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @staticmethod
    def from_json_file(path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return ExperimentConfig.from_dict(data)

    def blr_model(self):
        return isotropic_model(self.alpha, self.beta, self.feature_map)

    def meta_model(self) -> mt.MetaModel:
        return mt.MetaModel(
            alpha=self.alpha, beta=self.beta, gamma=self.gamma,
            feature_map=self.feature_map,
        )


def rng_for(seed: int, cell: int, sample: int, stream: int = 0) -> np.random.Generator:
    """Counter-based stream for one (cell, sample, purpose) triple."""
    counter = np.array([0, stream, sample, cell], dtype=np.uint64)
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, 0x9E3779B97F4A7C15], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def sample_configuration(
    ec: ExperimentConfig, n: int, cell: int, sample: int
) -> Configuration:
    """Inputs x ~ N(0, 1): n training points plus one test point."""
    rng = rng_for(ec.seed, cell, sample, _STREAM_INPUTS)
    draws = rng.standard_normal(n + 1)
    return Configuration(
        model=ec.blr_model(), train_inputs=draws[:n], test_input=float(draws[n])
    )


def sample_meta_configuration(
    ec: ExperimentConfig, n: int, m: int, cell: int, sample: int
) -> mt.MetaConfiguration:
    rng = rng_for(ec.seed, cell, sample, _STREAM_INPUTS)
    tasks = rng.standard_normal((m, n))
    test_rows = rng.standard_normal(n)
    test_x = float(rng.standard_normal())
    return mt.MetaConfiguration(
        model=ec.meta_model(),
        task_inputs=tasks,
        test_task_inputs=test_rows,
        test_input=test_x,
    )


@dataclass(frozen=True)
class SweepRow:
    mode: str
    n: int
    m: int | None
    quantity: str
    mean: float
    stderr: float
    seed: int
    mc_samples: int


@dataclass
class CellResult:
    """Per-configuration value arrays for one grid cell, plus provenance."""

    mode: str
    n: int
    m: int | None
    seed: int
    mc_samples: int
    values: dict[str, np.ndarray]
    config_digest: str

    def rows(self) -> list[SweepRow]:
        out = []
        for quantity, arr in self.values.items():
            out.append(
                SweepRow(
                    mode=self.mode,
                    n=self.n,
                    m=self.m,
                    quantity=quantity,
                    mean=float(np.mean(arr)),
                    stderr=_stderr(arr),
                    seed=self.seed,
                    mc_samples=self.mc_samples,
                )
            )
        return out


def _stderr(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


def _digest(arrays: Iterable[np.ndarray]) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        h.update(np.ascontiguousarray(arr, dtype=float).tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# sweep drivers


def evaluate_single_task_cell(ec: ExperimentConfig, n: int, cell: int) -> CellResult:
    names = (
        "cmi", "mi_rate", "sens_test_sum", "sens_chain_sum",
        "bound_tightened", "sens_lower_sum", "sens_upper_sum", "residual",
    )
    values = {name: np.empty(ec.mc_samples) for name in names}
    digest_parts: list[np.ndarray] = []
    for s in range(ec.mc_samples):
        cfg = sample_configuration(ec, n, cell, s)
        digest_parts.append(np.append(cfg.train_inputs, cfg.test_input))
        d = st.decompose(cfg)
        lower, upper = st.sensitivity_sandwich_all(cfg)
        values["cmi"][s] = d.cmi
        values["mi_rate"][s] = d.mi_rate
        values["sens_test_sum"][s] = d.sens_test_sum
        values["sens_chain_sum"][s] = d.sens_chain_sum
        values["bound_tightened"][s] = d.mi_rate - d.sens_chain_sum
        values["sens_lower_sum"][s] = float(np.mean(lower))
        values["sens_upper_sum"][s] = float(np.mean(upper))
        values["residual"][s] = d.residual
    return CellResult(
        mode="single_task", n=n, m=None, seed=ec.seed, mc_samples=ec.mc_samples,
        values=values, config_digest=_digest(digest_parts),
    )


def run_single_task_sweep(ec: ExperimentConfig) -> list[CellResult]:
    ec.validate()
    return [
        evaluate_single_task_cell(ec, n, cell)
        for cell, n in enumerate(ec.n_grid)
    ]


def evaluate_bounds_cell(ec: ExperimentConfig, n: int, cell: int) -> CellResult:
    names = (
        "sens_mean", "sens_lower_mean", "sens_upper_mean",
        "upper_gap_mean", "lower_gap_mean", "sandwich_violation_rate",
    )
    values = {name: np.empty(ec.mc_samples) for name in names}
    digest_parts: list[np.ndarray] = []
    slack = 1e-12
    for s in range(ec.mc_samples):
        cfg = sample_configuration(ec, n, cell, s)
        digest_parts.append(np.append(cfg.train_inputs, cfg.test_input))
        sens = st.per_point_sensitivities(cfg)
        lower, upper = st.sensitivity_sandwich_all(cfg)
        violations = (sens < lower - slack) | (sens > upper + slack)
        values["sens_mean"][s] = float(np.mean(sens))
        values["sens_lower_mean"][s] = float(np.mean(lower))
        values["sens_upper_mean"][s] = float(np.mean(upper))
        values["upper_gap_mean"][s] = float(np.mean(upper - sens))
        values["lower_gap_mean"][s] = float(np.mean(sens - lower))
        values["sandwich_violation_rate"][s] = float(np.mean(violations))
    return CellResult(
        mode="bounds", n=n, m=None, seed=ec.seed, mc_samples=ec.mc_samples,
        values=values, config_digest=_digest(digest_parts),
    )


def run_bounds_sweep(ec: ExperimentConfig) -> list[CellResult]:
    ec.validate()
    return [evaluate_bounds_cell(ec, n, cell) for cell, n in enumerate(ec.n_grid)]


def evaluate_meta_cell(ec: ExperimentConfig, n: int, m: int, cell: int) -> CellResult:
    names = (
        "memr", "within_task_rate", "hyper_mi_rate",
        "task_sens_sum", "task_chain_sum", "data_sens_sum", "data_chain_sum",
        "bound_mi_sum", "bound_tightened", "residual",
    )
    values = {name: np.empty(ec.mc_samples) for name in names}
    digest_parts: list[np.ndarray] = []
    for s in range(ec.mc_samples):
        mc = sample_meta_configuration(ec, n, m, cell, s)
        digest_parts.append(
            np.concatenate(
                [mc.task_inputs.ravel(), mc.test_task_inputs, [mc.test_input]]
            )
        )
        d = mt.decompose_meta(mc)
        values["memr"][s] = d.memr
        values["within_task_rate"][s] = d.term_within
        values["hyper_mi_rate"][s] = d.term_hyper
        values["task_sens_sum"][s] = d.task_sens_sum
        values["task_chain_sum"][s] = d.task_chain_sum
        values["data_sens_sum"][s] = d.data_sens_sum
        values["data_chain_sum"][s] = d.data_chain_sum
        values["bound_mi_sum"][s] = d.term_within + d.term_hyper
        values["bound_tightened"][s] = (
            d.term_within + d.term_hyper - d.task_chain_sum - d.data_chain_sum
        )
        values["residual"][s] = d.residual
    return CellResult(
        mode="meta", n=n, m=m, seed=ec.seed, mc_samples=ec.mc_samples,
        values=values, config_digest=_digest(digest_parts),
    )


def run_meta_sweep(ec: ExperimentConfig) -> list[CellResult]:
    """Two families: vary M at fixed N, then vary N at fixed M."""
    ec.validate()
    cells = []
    cell_index = 0
    for m in ec.m_grid:
        cells.append(evaluate_meta_cell(ec, ec.meta_fixed_n, m, cell_index))
        cell_index += 1
    for n in ec.n_grid:
        cells.append(evaluate_meta_cell(ec, n, ec.meta_fixed_m, cell_index))
        cell_index += 1
    return cells


@dataclass(frozen=True)
class AsymptoticsReport:
    n_grid: tuple[int, ...]
    mean_sens: tuple[float, ...]
    mean_mi_rate: tuple[float, ...]
    n_times_sens: tuple[float, ...]
    slope_sens: float
    slope_mi_rate: float
    tail_decreasing: bool
    passed: bool


def run_asymptotics_check(ec: ExperimentConfig) -> tuple[AsymptoticsReport, list[CellResult]]:
    """Least-squares slopes of ln(mean) vs ln N for the sensitivity and MI rate.

    Requires the N grid to span at least one decade. Passes when the
    sensitivity slope is below the MI-rate slope by more than 0.1 and
    N * mean-sensitivity is decreasing over the tail half of the grid.
    """
    ec.validate()
    if max(ec.n_grid) < 10 * min(ec.n_grid):
        raise InsufficientGrid(
            f"n_grid {ec.n_grid} spans less than a decade"
        )
    cells = run_single_task_sweep(ec)
    mean_sens = np.array([float(np.mean(c.values["sens_test_sum"])) for c in cells])
    mean_mi = np.array([float(np.mean(c.values["mi_rate"])) for c in cells])
    ns = np.array(ec.n_grid, dtype=float)
    slope_sens = float(np.polyfit(np.log(ns), np.log(mean_sens), 1)[0])
    slope_mi = float(np.polyfit(np.log(ns), np.log(mean_mi), 1)[0])
    n_times = ns * mean_sens
    tail = n_times[len(n_times) // 2 :]
    tail_decreasing = bool(np.all(np.diff(tail) < 0))
    passed = (slope_sens < slope_mi - 0.1) and tail_decreasing
    for cell in cells:
        cell.mode = "asymptotics"
        cell.values["n_times_sens"] = cell.n * cell.values["sens_test_sum"]
    report = AsymptoticsReport(
        n_grid=tuple(ec.n_grid),
        mean_sens=tuple(float(v) for v in mean_sens),
        mean_mi_rate=tuple(float(v) for v in mean_mi),
        n_times_sens=tuple(float(v) for v in n_times),
        slope_sens=slope_sens,
        slope_mi_rate=slope_mi,
        tail_decreasing=tail_decreasing,
        passed=passed,
    )
    return report, cells


# ---------------------------------------------------------------------------
# identity audits


@dataclass(frozen=True)
class IdentityAudit:
    name: str
    residual: float
    stderr: float
    max_abs_residual: float
    n_samples: int
    exact: bool
    threshold: float
    passed: bool


@dataclass(frozen=True)
class AuditReport:
    audits: tuple[IdentityAudit, ...]
    passed: bool


def _make_audit(
    name: str, residuals: np.ndarray, exact: bool, exact_tol: float
) -> IdentityAudit:
    residuals = np.asarray(residuals, dtype=float)
    se = _stderr(residuals)
    mean = float(residuals.mean())
    max_abs = float(np.max(np.abs(residuals)))
    if exact:
        threshold = exact_tol
        passed = max_abs <= exact_tol
    else:
        threshold = 3.0 * se
        passed = abs(mean) <= threshold
    return IdentityAudit(
        name=name, residual=mean, stderr=se, max_abs_residual=max_abs,
        n_samples=residuals.size, exact=exact, threshold=threshold, passed=passed,
    )


def run_identity_audits(
    ec: ExperimentConfig, chain_weighting: str = "linear"
) -> AuditReport:
    """Audit every identity on shared samples; residual +/- SE per identity.

    ``chain_weighting="flat"`` is a negative control that drops the chain
    multiplicity in the cmi decomposition, which must blow the residual far
    beyond 3 SE. Exchangeable (constant-map) configurations are flagged
    exact and held to absolute tolerances instead of SE bands.
    """
    ec.validate()
    if chain_weighting not in ("linear", "flat"):
        raise ConfigError(f"unknown chain weighting {chain_weighting!r}")
    exact_family = ec.feature_map.kind == "constant"
    n = ec.n_grid[0]
    m = ec.m_grid[0]
    s_count = ec.mc_samples

    decomp_res = np.empty(s_count)
    regret_res = np.empty(s_count)
    jensen_res = np.empty(s_count)
    risk_res = np.empty(s_count)
    meta_res = np.empty(s_count)
    for s in range(s_count):
        cfg = sample_configuration(ec, n, 0, s)
        d = st.decompose(cfg)
        if chain_weighting == "flat":
            flat_chain = float(np.sum(st.chain_terms(cfg))) / n
            decomp_res[s] = d.cmi - d.mi_rate + d.sens_test_sum + flat_chain
        else:
            decomp_res[s] = d.residual
        regret_res[s] = gen.regret_residual(cfg)
        jd = gen.jensen_gap(cfg) - (
            gen.conditional_lautum(cfg) / n + d.sens_test_sum + d.sens_chain_sum - d.mi_rate
        )
        jensen_res[s] = jd
        rc = gen.sample_realized(cfg, rng_for(ec.seed, 0, s, _STREAM_TARGETS))
        risk_res[s] = gen.bayes_risk(cfg) - (
            gen.training_term(rc) + gen.posterior_prior_kl(rc) / n
            - d.sens_test_sum - d.sens_chain_sum
        )
        mc = sample_meta_configuration(ec, m=m, n=n, cell=1, sample=s)
        meta_res[s] = mt.decompose_meta(mc).residual

    audits = (
        _make_audit("cmi_decomposition", decomp_res, exact_family, 1e-12),
        _make_audit("regret", regret_res, exact_family, 1e-12),
        _make_audit("jensen_gap", jensen_res, exact_family, 1e-12),
        _make_audit("risk_identity", risk_res, False, 0.0),
        _make_audit("meta_decomposition", meta_res, exact_family, 1e-10),
    )
    return AuditReport(audits=audits, passed=all(a.passed for a in audits))


# ---------------------------------------------------------------------------
# oracle check


@dataclass(frozen=True)
class OracleReport:
    n_single: int
    n_meta: int
    max_abs_err: float
    passed: bool


def _random_feature_map(rng: np.random.Generator, max_dim: int) -> FeatureMap:
    kind = rng.integers(0, 3)
    if kind == 0:
        return make_constant()
    if kind == 1:
        return make_polynomial(int(rng.integers(1, max_dim + 1)))
    d = int(rng.integers(2, max_dim + 1))
    return make_rbf_grid(d, -2.0, 2.0)


def _oracle_check_single(ec: ExperimentConfig, sample: int) -> float:
    rng = rng_for(ec.seed, 0, sample, _STREAM_MODEL)
    fmap = _random_feature_map(rng, 5)
    alpha, beta = rng.uniform(0.5, 2.0, size=2)
    model = isotropic_model(float(alpha), float(beta), fmap)
    n = int(rng.integers(1, 9))
    draws = rng.standard_normal(n + 1)
    cfg = Configuration(model=model, train_inputs=draws[:n], test_input=float(draws[n]))
    joint = orc.build_single_task(cfg)
    train = orc.train_labels(n)

    errs = [
        abs(st.cmi(cfg) - orc.mi(joint, "W", "y_test", train)),
        abs(st.mi(cfg) - orc.mi(joint, "W", train)),
        abs(gen.bayes_risk(cfg) - orc.cond_entropy(joint, "y_test", train)),
    ]
    post = fit(model, cfg.train_inputs)
    _, var = predictive(post, model, cfg.test_input)
    from .gaussian import condition

    cond = condition(joint.mean, joint.cov, joint.indices("y_test"), joint.indices(train))
    errs.append(abs(var - float(cond.cov[0, 0])))
    sens = st.per_point_sensitivities(cfg)
    for j in range(n):
        rest = [lbl for i, lbl in enumerate(train) if i != j]
        errs.append(abs(sens[j] - orc.mi(joint, "y_test", train[j], rest)))
    chains = st.chain_terms(cfg)
    for k in range(n - 1):
        errs.append(abs(chains[k] - orc.mi(joint, train[k + 1], train[k], train[:k])))
    return max(errs)


def _oracle_check_meta(ec: ExperimentConfig, sample: int) -> float:
    rng = rng_for(ec.seed, 1, sample, _STREAM_MODEL)
    fmap = _random_feature_map(rng, 3)
    alpha, beta, gamma = rng.uniform(0.5, 2.0, size=3)
    model = mt.MetaModel(
        alpha=float(alpha), beta=float(beta), gamma=float(gamma), feature_map=fmap
    )
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, 4))
    mc = mt.MetaConfiguration(
        model=model,
        task_inputs=rng.standard_normal((m, n)),
        test_task_inputs=rng.standard_normal(n),
        test_input=float(rng.standard_normal()),
    )
    joint = orc.build_meta(mc)
    tasks = [orc.task_labels(j, n) for j in range(m)]
    all_tasks = [lbl for block in tasks for lbl in block]
    test_train = orc.test_task_labels(n)

    d = mt.decompose_meta(mc)
    errs = [
        abs(d.memr - orc.mi(joint, "W", "y_test", test_train + all_tasks)),
        abs(d.term_within * n - orc.mi(joint, "W", test_train, "U")),
        abs(d.term_hyper * n * m - orc.mi(joint, "U", all_tasks)),
    ]
    for j in range(m):
        others = [lbl for i, block in enumerate(tasks) if i != j for lbl in block]
        errs.append(
            abs(mt.task_sensitivity(mc, j) - orc.mi(joint, test_train, tasks[j], others))
        )
    for k in range(m - 1):
        before = [lbl for block in tasks[:k] for lbl in block]
        errs.append(
            abs(mt.task_chain_term(mc, k) - orc.mi(joint, tasks[k + 1], tasks[k], before))
        )
    cond_cfg = mt._conditional_configuration(mc)
    data_sens = st.per_point_sensitivities(cond_cfg)
    for j in range(n):
        rest = [lbl for i, lbl in enumerate(test_train) if i != j] + all_tasks
        errs.append(abs(data_sens[j] - orc.mi(joint, "y_test", test_train[j], rest)))
    data_chain = st.chain_terms(cond_cfg)
    for k in range(n - 1):
        errs.append(
            abs(
                data_chain[k]
                - orc.mi(joint, test_train[k + 1], test_train[k], test_train[:k] + all_tasks)
            )
        )
    return max(errs)


def run_oracle_check(ec: ExperimentConfig, tolerance: float = 1e-8) -> OracleReport:
    """Compare every analytic quantity against the joint-Gaussian oracle.

    Runs ``mc_samples`` random single-task configurations (d <= 5, N <= 8)
    and half as many meta configurations (d <= 3, N <= 4, M <= 3).
    """
    ec.validate()
    n_single = ec.mc_samples
    n_meta = max(1, ec.mc_samples // 2)
    max_err = 0.0
    for s in range(n_single):
        max_err = max(max_err, _oracle_check_single(ec, s))
    for s in range(n_meta):
        max_err = max(max_err, _oracle_check_meta(ec, s))
    return OracleReport(
        n_single=n_single, n_meta=n_meta, max_abs_err=max_err,
        passed=max_err <= tolerance,
    )


# ---------------------------------------------------------------------------
# emission


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv_text(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.mode,
                row.n,
                _format_value(row.m),
                row.quantity,
                _format_value(row.mean),
                _format_value(row.stderr),
                row.seed,
                row.mc_samples,
            ]
        )
    return buf.getvalue()


def rows_to_json_text(rows: Iterable[SweepRow]) -> str:
    payload = [
        {
            "mode": row.mode,
            "N": row.n,
            "M": row.m,
            "quantity": row.quantity,
            "mean_nats": row.mean,
            "stderr_nats": row.stderr,
            "seed": row.seed,
            "mc_samples": row.mc_samples,
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def emit(rows: Iterable[SweepRow], path: str | Path, fmt: str = "csv") -> Path:
    """Write rows to ``path`` as CSV or JSON with the fixed schema."""
    rows = list(rows)
    if fmt == "csv":
        text = rows_to_csv_text(rows)
    elif fmt == "json":
        text = rows_to_json_text(rows)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path


def cells_to_rows(cells: Iterable[CellResult]) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for cell in cells:
        rows.extend(cell.rows())
    return rows
