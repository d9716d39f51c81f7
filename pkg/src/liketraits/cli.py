"""Command-line front end: generate, train, predict, evaluate, experiment.

Results go to stdout, diagnostics to stderr. Exit codes: 0 success, 1 usage
error (bad flags, malformed JSON, config schema violations), 2 data error,
3 unexpected runtime error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import features as feats
from . import ingest
from .core import TRAITS
from .errors import ConfigError, LikeTraitsError, ZeroTotalError
from .experiments import load_config, run_from_config
from .metrics import compute_regression_metrics
from .models import ALGORITHMS, load_any, predict, save_bundle, save_model, train_model
from .sampling import RNG_NAME
from .synth import SyntheticSpec, generate_synthetic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


@click.group()
def cli():
    """Big Five trait prediction from page-like categories."""


def _load_json_file(path: str):
    with open(path) as fp:
        return json.load(fp)


def _echo_err(message: str):
    click.echo(message, err=True)


# --------------------------------------------------------------------------
# generate
# --------------------------------------------------------------------------

@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the spec seed.")
def generate(spec_path, out_dir, seed):
    """Write a synthetic dataset (big5.csv, user_likes.csv,
    like_categories.csv, ground_truth.json) into OUT."""
    spec = SyntheticSpec.from_json_dict(_load_json_file(spec_path))
    if seed is not None:
        spec = spec.with_seed(seed)
    dataset, truth = generate_synthetic(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "big5.csv", "w") as fp:
        fp.write(ingest.BIG5_HEADER + "\n")
        for user in dataset:
            values = ",".join(repr(v) for v in user.scores.as_tuple())
            fp.write(f"{user.user_id},{values}\n")

    # one like id per category; repeated rows carry the counts
    like_ids = {path: f"L{i:04d}" for i, path in enumerate(truth.categories)}
    with open(out / "user_likes.csv", "w") as fp:
        fp.write(ingest.USER_LIKES_HEADER + "\n")
        for user in dataset:
            for path in sorted(user.like_counts, key=lambda p: p.sort_key):
                row = f"{user.user_id},{like_ids[path]}\n"
                fp.write(row * user.like_counts[path])

    with open(out / "like_categories.csv", "w") as fp:
        fp.write(ingest.FIXTURE_HEADER + "\n")
        for path, like_id in like_ids.items():
            fp.write(f"{like_id},{path.category},{path.subcategory or ''}\n")

    with open(out / "ground_truth.json", "w") as fp:
        json.dump(truth.to_json_dict(), fp, indent=2, sort_keys=True)
        fp.write("\n")

    _echo_err(f"wrote {len(dataset)} users, {len(truth.categories)} categories to {out}")


# --------------------------------------------------------------------------
# train
# --------------------------------------------------------------------------

@cli.command()
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--algorithm", required=True, type=click.Choice(ALGORITHMS))
@click.option("--trait", required=True, type=click.Choice(TRAITS + ("all",)))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--min-likes", type=int, default=1, show_default=True)
@click.option("--features", "feature_mode", type=click.Choice(feats.MODES), default=feats.MODE_RELATIVE, show_default=True)
@click.option("--taxonomy", type=click.Choice(feats.TAXONOMIES), default=feats.TAXONOMY_BOTH, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def train(data_dir, algorithm, trait, config_path, min_likes, feature_mode, taxonomy, seed, out_path):
    """Train on the full (filtered) dataset and write a versioned model file.

    A JSON training report goes to stdout.
    """
    algo_config = _load_json_file(config_path) if config_path else None
    dataset, ingest_report = ingest.load_directory(data_dir)
    dataset = feats.apply_taxonomy(dataset, taxonomy)
    space = feats.build_feature_space(dataset)
    matrix = feats.build_matrix(dataset, space, min_likes, feature_mode)
    if matrix.n_rows == 0:
        raise ZeroTotalError(f"no users left after min-likes filter {min_likes}")

    traits = TRAITS if trait == "all" else (trait,)
    models = {}
    training = {}
    for name in traits:
        model = train_model(algorithm, matrix, name, config=algo_config, seed=seed)
        models[name] = model
        mse, rmse, mae_pct = compute_regression_metrics(
            predict(model, matrix.X), matrix.trait_values(name)
        )
        training[name] = {"mse": mse, "rmse": rmse, "mae_pct": mae_pct}

    with open(out_path, "w") as fp:
        if trait == "all":
            save_bundle(models, fp)
        else:
            save_model(models[trait], fp)

    report = {
        "algorithm": algorithm,
        "traits": list(traits),
        "n_train": matrix.n_rows,
        "dimension": space.dimension,
        "feature_mode": feature_mode,
        "taxonomy": taxonomy,
        "min_likes": min_likes,
        "seed": seed,
        "rng": RNG_NAME,
        "training": training,
        "ingest": {
            "users_parsed": ingest_report.users_parsed,
            "likes_parsed": ingest_report.likes_parsed,
            "likes_resolved": ingest_report.likes_resolved,
            "likes_unresolved": ingest_report.likes_unresolved,
            "users_joined": ingest_report.users_joined,
            "orphan_likes": ingest_report.orphan_likes,
        },
        "model_file": str(out_path),
    }
    click.echo(json.dumps(report, indent=2, sort_keys=True))


# --------------------------------------------------------------------------
# predict
# --------------------------------------------------------------------------

@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--likes", "likes_path", required=True, type=click.Path(exists=True))
@click.option("--categories", "categories_path", required=True, type=click.Path(exists=True))
def predict_cmd(model_path, likes_path, categories_path):
    """Predict trait scores for one user from a `likeid` CSV.

    Prints a JSON object with all five traits; traits the model does not
    cover are null. Unknown categories are dropped before normalization.
    """
    with open(model_path) as fp:
        models = load_any(fp)
    with open(categories_path) as fp:
        resolver = ingest.FixtureResolver.from_csv(fp)

    with open(likes_path) as fp:
        text = fp.read()
    lines = [line.rstrip("\r") for line in text.split("\n")]
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != "likeid":
        raise ingest.MalformedRowError("expected header 'likeid'", line=1)
    like_ids = [line for line in lines[1:] if line]

    counts: dict = {}
    for like_id in like_ids:
        path = resolver.lookup(like_id)
        if path is None:
            continue
        counts[path] = counts.get(path, 0) + 1

    output = {name: None for name in TRAITS}
    for trait, model in models.items():
        known = feats.drop_unknown(counts, model.feature_space)
        if not known:
            raise ZeroTotalError("no likes resolve into the model's feature space")
        vec = feats.normalize_counts(known, model.feature_space)
        output[trait] = predict(model, vec)
    click.echo(json.dumps(output, indent=2, sort_keys=True))


# --------------------------------------------------------------------------
# evaluate / experiment
# --------------------------------------------------------------------------

def _run_experiment(config_path, out_dir):
    config = load_config(_load_json_file(config_path))
    written = run_from_config(config, out_dir)
    _echo_err(f"wrote {', '.join(written)} to {out_dir}")


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def experiment(config_path, out_dir):
    """Run the configured experiment (comparison or sweep) into OUT."""
    _run_experiment(config_path, out_dir)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def evaluate(config_path, out_dir):
    """Alias of `experiment`: evaluate algorithms per the config document."""
    _run_experiment(config_path, out_dir)


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Abort:
        _echo_err("aborted")
        return EXIT_USAGE
    except click.UsageError as exc:
        _echo_err(f"usage error: {exc.format_message()}")
        return EXIT_USAGE
    except click.ClickException as exc:
        _echo_err(f"error: {exc.format_message()}")
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        _echo_err(f"malformed JSON: {exc}")
        return EXIT_USAGE
    except ConfigError as exc:
        _echo_err(f"config error: {exc}")
        return EXIT_USAGE
    except LikeTraitsError as exc:
        _echo_err(f"data error: {exc}")
        return EXIT_DATA
    except OSError as exc:
        _echo_err(f"io error: {exc}")
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        _echo_err(f"unexpected error: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
