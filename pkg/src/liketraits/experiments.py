"""Experiment protocols: per-trait algorithm comparison and min-likes sweeps.

Three runnable protocols over one config document:

* comparison — for each trait and algorithm, build features, split once per
  trait, fit, evaluate; every algorithm sees the same train/test rows for a
  given trait so the comparison is paired.
* sweep (max_train) — repeat the standard split at each min-likes threshold;
  training sets shrink as the filter bites.
* sweep (fixed_train) — draw the test set first, then a fixed-size training
  sample, so prediction quality isolates the filtering effect from the
  training-set size.

All row ordering is canonical (threshold, trait, algorithm) and all seeds
derive from one master seed, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import features as feats
from . import kernels
from .core import TRAITS, Dataset
from .errors import (
    ConfigError,
    DegenerateInputError,
    EmptyInputError,
    InsufficientRowsError,
    KTooLargeError,
    TooFewRowsError,
)
from .metrics import REPORT_CSV_HEADER, RegressionReport, evaluate
from .models import ALGORITHMS, train_model
from .sampling import (
    METHOD_STRATIFIED,
    RNG_NAME,
    SplitSpec,
    sample_fixed_train,
    split_random,
    split_stratified,
)
from .synth import SyntheticSpec, generate_synthetic

SWEEP_MAX_TRAIN = "max_train"
SWEEP_FIXED_TRAIN = "fixed_train"

SWEEP_CSV_HEADER = "threshold,trait,algorithm,n_train,n_test,rmse,mae_pct,status"

_SKIP_ERRORS = (
    TooFewRowsError,
    InsufficientRowsError,
    EmptyInputError,
    DegenerateInputError,
    KTooLargeError,
)


def derive_seed(master: int, *indices: int) -> int:
    """Stable child seed for a (trait, algorithm, threshold, ...) cell."""
    seq = np.random.SeedSequence(master, spawn_key=tuple(indices))
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepRow:
    threshold: int
    trait: str
    algorithm: str
    n_train: int
    n_test: int
    rmse: float | None
    mae_pct: float | None
    status: str  # "ok" | "skipped"

    def to_csv_row(self) -> str:
        rmse = "" if self.rmse is None else repr(self.rmse)
        mae = "" if self.mae_pct is None else repr(self.mae_pct)
        return (
            f"{self.threshold},{self.trait},{self.algorithm},"
            f"{self.n_train},{self.n_test},{rmse},{mae},{self.status}"
        )


def _split_for_trait(matrix, split: SplitSpec, trait: str, *seed_indices: int):
    spec = replace(
        split,
        strat_trait=trait,
        seed=derive_seed(split.seed, *seed_indices),
    )
    if spec.method == METHOD_STRATIFIED:
        return split_stratified(matrix, spec)
    return split_random(matrix, spec)


def run_comparison(
    dataset: Dataset,
    algorithms,
    split: SplitSpec,
    threshold: int = 1,
    feature_mode: str = feats.MODE_RELATIVE,
    taxonomy: str = feats.TAXONOMY_BOTH,
    algo_configs: dict | None = None,
    master_seed: int | None = None,
) -> list[RegressionReport]:
    """5 traits x |algorithms| paired evaluation table."""
    names = sorted(set(algorithms))
    for name in names:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}")
    configs = algo_configs or {}
    master = split.seed if master_seed is None else master_seed
    ds = feats.apply_taxonomy(dataset, taxonomy)
    space = feats.build_feature_space(ds)
    matrix = feats.build_matrix(ds, space, threshold, feature_mode)
    reports: list[RegressionReport] = []
    for t_idx, trait in enumerate(TRAITS):
        train, test = _split_for_trait(matrix, split, trait, t_idx)
        for a_idx, name in enumerate(names):
            model = train_model(
                name,
                train,
                trait,
                config=configs.get(name),
                seed=derive_seed(master, t_idx, a_idx),
            )
            reports.append(evaluate(model, test))
    return reports


def run_threshold_sweep(
    dataset: Dataset,
    thresholds,
    mode: str,
    algorithm: str,
    split: SplitSpec,
    train_size: int | None = None,
    feature_mode: str = feats.MODE_RELATIVE,
    taxonomy: str = feats.TAXONOMY_BOTH,
    algo_config: dict | None = None,
    master_seed: int | None = None,
) -> list[SweepRow]:
    """RMSE per (threshold, trait) for one algorithm.

    Thresholds where too few users survive produce rows marked "skipped"
    instead of aborting the sweep.
    """
    thresholds = list(thresholds)
    if not thresholds or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be non-empty and strictly ascending")
    if mode not in (SWEEP_MAX_TRAIN, SWEEP_FIXED_TRAIN):
        raise ValueError(f"unknown sweep mode {mode!r}")
    if mode == SWEEP_FIXED_TRAIN and not train_size:
        raise ValueError("fixed_train mode requires train_size")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    master = split.seed if master_seed is None else master_seed
    ds = feats.apply_taxonomy(dataset, taxonomy)
    space = feats.build_feature_space(ds)
    rows: list[SweepRow] = []
    for s_idx, threshold in enumerate(thresholds):
        matrix = feats.build_matrix(ds, space, threshold, feature_mode)
        for t_idx, trait in enumerate(TRAITS):
            try:
                if mode == SWEEP_FIXED_TRAIN:
                    train, test = sample_fixed_train(
                        matrix,
                        train_size,
                        split.test_fraction,
                        derive_seed(split.seed, s_idx, t_idx),
                    )
                else:
                    train, test = _split_for_trait(matrix, split, trait, s_idx, t_idx)
                model = train_model(
                    algorithm,
                    train,
                    trait,
                    config=algo_config,
                    seed=derive_seed(master, s_idx, t_idx),
                )
                report = evaluate(model, test)
            except _SKIP_ERRORS:
                rows.append(
                    SweepRow(threshold, trait, algorithm, 0, 0, None, None, "skipped")
                )
                continue
            rows.append(
                SweepRow(
                    threshold,
                    trait,
                    algorithm,
                    train.n_rows,
                    test.n_rows,
                    report.rmse,
                    report.mae_pct,
                    "ok",
                )
            )
    return rows


def write_comparison_csv(reports, fp) -> None:
    fp.write(REPORT_CSV_HEADER + "\n")
    for report in reports:
        fp.write(report.to_csv_row() + "\n")


def write_sweep_csv(rows, fp) -> None:
    fp.write(SWEEP_CSV_HEADER + "\n")
    for row in rows:
        fp.write(row.to_csv_row() + "\n")


# --------------------------------------------------------------------------
# config documents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    seed: int
    synthetic: SyntheticSpec | None
    data_dir: str | None
    feature_mode: str
    taxonomy: str
    min_likes: int
    split: SplitSpec
    algorithms: tuple[str, ...]
    algo_configs: dict
    kind: str                      # "comparison" | "sweep"
    thresholds: tuple[int, ...]
    sweep_mode: str
    train_size: int | None
    sweep_algorithm: str | None

    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def load_config(doc: dict) -> ExperimentConfig:
    """Validate a config document; any schema violation raises ConfigError."""
    _require(isinstance(doc, dict), "config must be a JSON object")
    unknown = set(doc) - {"seed", "data", "features", "split", "algorithms", "experiment"}
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    seed = doc.get("seed", 0)
    _require(isinstance(seed, int), "seed must be an integer")

    data = doc.get("data")
    _require(isinstance(data, dict), "config requires a data section")
    synthetic = None
    data_dir = None
    if "synthetic" in data:
        try:
            synthetic = SyntheticSpec.from_json_dict(data["synthetic"])
        except Exception as exc:
            raise ConfigError(f"bad synthetic spec: {exc}") from exc
    elif "dir" in data:
        data_dir = data["dir"]
        _require(isinstance(data_dir, str), "data.dir must be a path string")
    else:
        raise ConfigError("data section needs either 'synthetic' or 'dir'")

    fsec = doc.get("features", {})
    _require(isinstance(fsec, dict), "features must be an object")
    feature_mode = fsec.get("mode", feats.MODE_RELATIVE)
    _require(feature_mode in feats.MODES, f"features.mode must be one of {feats.MODES}")
    taxonomy = fsec.get("taxonomy", feats.TAXONOMY_BOTH)
    _require(taxonomy in feats.TAXONOMIES, f"features.taxonomy must be one of {feats.TAXONOMIES}")
    min_likes = fsec.get("min_likes", 1)
    _require(isinstance(min_likes, int) and min_likes >= 0, "features.min_likes must be >= 0")

    ssec = doc.get("split", {})
    _require(isinstance(ssec, dict), "split must be an object")
    try:
        split = SplitSpec(
            test_fraction=ssec.get("test_fraction", 0.2),
            method=ssec.get("method", "random"),
            strat_trait=ssec.get("strat_trait", "ope"),
            n_buckets=ssec.get("n_buckets", 8),
            seed=ssec.get("seed", seed),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad split spec: {exc}") from exc

    raw_algos = doc.get("algorithms", ["linear"])
    _require(isinstance(raw_algos, list) and raw_algos, "algorithms must be a non-empty list")
    names = []
    algo_configs = {}
    for entry in raw_algos:
        if isinstance(entry, str):
            name, cfg = entry, None
        elif isinstance(entry, dict) and "name" in entry:
            name, cfg = entry["name"], entry.get("config")
        else:
            raise ConfigError(f"bad algorithm entry: {entry!r}")
        _require(name in ALGORITHMS, f"unknown algorithm {name!r}")
        names.append(name)
        if cfg is not None:
            _require(isinstance(cfg, dict), f"config for {name!r} must be an object")
            algo_configs[name] = cfg

    esec = doc.get("experiment", {"kind": "comparison"})
    _require(isinstance(esec, dict), "experiment must be an object")
    kind = esec.get("kind")
    _require(kind in ("comparison", "sweep"), "experiment.kind must be comparison or sweep")
    thresholds: tuple[int, ...] = ()
    sweep_mode = SWEEP_MAX_TRAIN
    train_size = None
    sweep_algorithm = None
    if kind == "sweep":
        raw_thresholds = esec.get("thresholds")
        _require(
            isinstance(raw_thresholds, list)
            and raw_thresholds
            and all(isinstance(t, int) for t in raw_thresholds),
            "sweep needs an integer thresholds list",
        )
        thresholds = tuple(raw_thresholds)
        sweep_mode = esec.get("mode", SWEEP_MAX_TRAIN)
        _require(
            sweep_mode in (SWEEP_MAX_TRAIN, SWEEP_FIXED_TRAIN),
            "experiment.mode must be max_train or fixed_train",
        )
        train_size = esec.get("train_size")
        if sweep_mode == SWEEP_FIXED_TRAIN:
            _require(
                isinstance(train_size, int) and train_size > 0,
                "fixed_train sweep needs a positive train_size",
            )
        sweep_algorithm = esec.get("algorithm", names[0])
        _require(sweep_algorithm in ALGORITHMS, f"unknown algorithm {sweep_algorithm!r}")

    return ExperimentConfig(
        raw=doc,
        seed=seed,
        synthetic=synthetic,
        data_dir=data_dir,
        feature_mode=feature_mode,
        taxonomy=taxonomy,
        min_likes=min_likes,
        split=split,
        algorithms=tuple(names),
        algo_configs=algo_configs,
        kind=kind,
        thresholds=thresholds,
        sweep_mode=sweep_mode,
        train_size=train_size,
        sweep_algorithm=sweep_algorithm,
    )


def _load_dataset(config: ExperimentConfig) -> Dataset:
    if config.synthetic is not None:
        dataset, _ = generate_synthetic(config.synthetic)
        return dataset
    from .ingest import load_directory  # deferred: ingest pulls in requests

    dataset, _ = load_directory(config.data_dir)
    return dataset


def run_from_config(config: ExperimentConfig, out_dir) -> list[str]:
    """Execute the configured experiment; returns the written file names."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset = _load_dataset(config)
    written = []
    if config.kind == "comparison":
        reports = run_comparison(
            dataset,
            config.algorithms,
            config.split,
            threshold=config.min_likes,
            feature_mode=config.feature_mode,
            taxonomy=config.taxonomy,
            algo_configs=config.algo_configs,
            master_seed=config.seed,
        )
        with open(out / "comparison.csv", "w") as fp:
            write_comparison_csv(reports, fp)
        written.append("comparison.csv")
    else:
        rows = run_threshold_sweep(
            dataset,
            config.thresholds,
            config.sweep_mode,
            config.sweep_algorithm,
            config.split,
            train_size=config.train_size,
            feature_mode=config.feature_mode,
            taxonomy=config.taxonomy,
            algo_config=config.algo_configs.get(config.sweep_algorithm),
            master_seed=config.seed,
        )
        with open(out / "sweep.csv", "w") as fp:
            write_sweep_csv(rows, fp)
        written.append("sweep.csv")

    meta = {
        "seed": config.seed,
        "split_seed": config.split.seed,
        "rng": RNG_NAME,
        "kernel_backend": kernels.ACTIVE_BACKEND,
        "config_sha256": config.config_hash(),
        "outputs": written,
    }
    with open(out / "run_meta.json", "w") as fp:
        json.dump(meta, fp, indent=2, sort_keys=True)
        fp.write("\n")
    written.append("run_meta.json")
    return written
