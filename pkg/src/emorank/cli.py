"""Command-line front end.

Subcommands: ``lexicon validate``, ``learn``, ``classify``, ``embed``,
``rank``, ``eval``, ``synth``, ``serve``. Global flags ``--config``,
``--format json|text``, and ``--seed`` apply to every subcommand.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import EngineConfig, load_config
from .core import EmotionVector
from .datastore import (
    ProfileStore,
    fixtures_root,
    load_table_fixtures,
    response_from_dict,
    response_to_dict,
)
from .embedding import load_template_file, embed_headline
from .errors import EngineError, ParseError
from .evaluation import (
    AccuracyReport,
    class_accuracy,
    comparison_summary,
    generate_population,
    run_experiment,
)
from .learning import cluster_candidates, classify_candidate, model_from_dict, model_to_dict
from .lexicon import load_lexicon_file
from .ranking import rank_items
from .sessions import SessionManager
from .validation import as_emotion_vector, check_dataset


def default_lexicon_path() -> Path:
    return fixtures_root() / "lexicon.json"


def _read_responses_file(path: str) -> list:
    out = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    out.append(response_from_dict(json.loads(line)))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read responses {path}: {exc}") from exc
    return out


def _parse_vector(text: str, config: EngineConfig) -> EmotionVector:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"target must be comma-separated floats: {exc}") from exc
    return as_emotion_vector(values, config)


def _emit(ctx: click.Context, payload: dict, text_lines: list[str]) -> None:
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


def _accuracy_text(report: AccuracyReport) -> list[str]:
    lines = ["Class  Accuracy %", "-----  ----------"]
    for label, pct in report.per_class.items():
        lines.append(f"{label:>5}  {pct:>10.1f}")
    lines.append(f"overall  {report.overall:.1f}")
    return lines


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Engine config JSON.")
@click.option("--format", "output_format", type=click.Choice(["json", "text"]),
              default="text", show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.pass_context
def main(ctx, config_path, output_format, seed):
    """Emotion-aware personalization engine."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = load_config(config_path) if config_path else EngineConfig()
    ctx.obj["format"] = output_format
    ctx.obj["seed"] = seed


@main.group()
def lexicon():
    """Lexicon tools."""


@lexicon.command("validate")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
def lexicon_validate(ctx, path):
    """Validate a lexicon document."""
    config = ctx.obj["config"]
    try:
        lex = load_lexicon_file(path, config)
    except EngineError as exc:
        raise click.ClickException(f"invalid lexicon: {exc}")
    payload = {
        "valid": True,
        "dims": lex.dims,
        "taxonomy": list(lex.taxonomy.names),
        "contexts": lex.contexts(),
        "words": len(lex.words),
        "features": len(lex.features),
    }
    _emit(ctx, payload, [
        f"lexicon ok: {len(lex.words)} words, {len(lex.features)} feature maps",
        f"taxonomy: {', '.join(lex.taxonomy.names)}",
        f"contexts: {', '.join(lex.contexts())}",
    ])


@main.command()
@click.option("--responses", "responses_path", type=click.Path(exists=True), required=True)
@click.option("--k", type=int, default=None, help="Clusters (default: config num_classes).")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.pass_context
def learn(ctx, responses_path, k, out_path):
    """Cluster candidates from a responses file into a model."""
    config = ctx.obj["config"]
    responses = _read_responses_file(responses_path)
    model = cluster_candidates(responses, k or config.num_classes, config)
    Path(out_path).write_text(json.dumps(model_to_dict(model), indent=2), encoding="utf-8")
    payload = {
        "k": model.k,
        "candidates": len(model.assignments),
        "objective": model.objective,
        "medoids": [m.candidate_id for m in model.medoids],
        "model": str(out_path),
    }
    _emit(ctx, payload, [
        f"clustered {len(model.assignments)} candidates into {model.k} classes",
        f"objective {model.objective:.4f}; medoids: "
        + ", ".join(m.candidate_id for m in model.medoids),
        f"model written to {out_path}",
    ])


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--responses", "responses_path", type=click.Path(exists=True), required=True)
@click.pass_context
def classify(ctx, model_path, responses_path):
    """Classify every candidate in a responses file."""
    config = ctx.obj["config"]
    model = model_from_dict(json.loads(Path(model_path).read_text(encoding="utf-8")))
    grouped = check_dataset(_read_responses_file(responses_path), config)
    classes = {
        cid: classify_candidate(grouped[cid], model, config) for cid in sorted(grouped)
    }
    _emit(ctx, {"classes": classes},
          [f"{cid}  class {label}" for cid, label in classes.items()])


@main.command()
@click.option("--template", "template_path", type=click.Path(exists=True), required=True)
@click.option("--target", required=True, help="Comma-separated simplex profile.")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.pass_context
def embed(ctx, template_path, target, lexicon_path):
    """Embed emotions into a headline template for a target profile."""
    config = ctx.obj["config"]
    lex = load_lexicon_file(lexicon_path or default_lexicon_path(), config)
    template = load_template_file(template_path)
    target_ev = _parse_vector(target, config)
    variant = embed_headline(template, target_ev, lex, config)
    payload = {
        "headline": variant.text,
        "score": variant.score,
        "profile": list(variant.profile.values),
        "features": variant.features.to_dict(),
    }
    _emit(ctx, payload, [variant.text, f"score {variant.score:.4f}"])


@main.command()
@click.option("--reader", required=True, help="Comma-separated simplex profile.")
@click.option("--items", "items_path", type=click.Path(exists=True), required=True,
              help="JSON array of {item_id, profile}.")
@click.pass_context
def rank(ctx, reader, items_path):
    """Rank items for a reader profile."""
    config = ctx.obj["config"]
    reader_ev = _parse_vector(reader, config)
    try:
        raw = json.loads(Path(items_path).read_text(encoding="utf-8"))
        items = [(entry["item_id"], as_emotion_vector(entry["profile"], config))
                 for entry in raw]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read items {items_path}: {exc}") from exc
    ranking = rank_items(reader_ev, items)
    payload = {"ranking": [
        {"rank": r.rank, "item_id": r.item_id, "score": r.score} for r in ranking
    ]}
    _emit(ctx, payload, [f"{r.rank:>4}  {r.score:.4f}  {r.item_id}" for r in ranking])


@main.command("eval")
@click.option("--fixture", "fixture_name", default=None,
              help="paper/table1, paper/table2, or paper/table3.")
@click.option("--synthetic", is_flag=True, help="Run the synthetic experiment.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--per-class", type=int, default=20, show_default=True)
@click.option("--noise", default="0", show_default=True,
              help="Noise level, or comma-separated sweep.")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.pass_context
def eval_cmd(ctx, fixture_name, synthetic, k, per_class, noise, lexicon_path):
    """Replay published-table fixtures or run synthetic experiments."""
    config = ctx.obj["config"]
    if fixture_name is None and not synthetic:
        raise click.UsageError("pass --fixture NAME or --synthetic")

    if fixture_name is not None:
        fixtures = load_table_fixtures()
        if fixture_name == "paper/table1":
            flagged = fixtures.table1.out_of_range_cells()
            payload = {
                "fixture": fixture_name,
                "rows": [
                    {"candidate": c, "ratings": list(r)} for c, r in fixtures.table1.rows
                ],
                "out_of_range": [
                    {"candidate": c, "cluster": cl, "value": v} for c, cl, v in flagged
                ],
            }
            lines = ["Candidate  Ratings"]
            lines += [f"{c:>9}  {list(r)}" for c, r in fixtures.table1.rows]
            lines += [f"out of range: candidate {c} cluster {cl} value {v}"
                      for c, cl, v in flagged]
            _emit(ctx, payload, lines)
        elif fixture_name == "paper/table2":
            summary = comparison_summary(fixtures.table2)
            payload = {"fixture": fixture_name, **summary,
                       "rows": [{"expected": e, "actual": a} for e, a in fixtures.table2.rows]}
            lines = ["Serial  Expected  Actual", "------  --------  ------"]
            lines += [f"{i:>6}  {e:>8}  {a:>6}"
                      for i, (e, a) in enumerate(fixtures.table2.rows, start=1)]
            lines += [
                f"exact_match_rate   {summary['exact_match_rate']:.2f}",
                f"rank_2_share       {summary['rank_2_share']:.2f}",
                f"rank_3_plus_share  {summary['rank_3_plus_share']:.2f}",
            ]
            _emit(ctx, payload, lines)
        elif fixture_name == "paper/table3":
            # replay through the metric: 100 outcome rows per class with
            # exactly the published number of successes
            outcomes = [
                (f"class{label}-cand{i}", label, i < successes)
                for label, successes in fixtures.table3.items()
                for i in range(100)
            ]
            report = class_accuracy(outcomes)
            payload = {
                "fixture": fixture_name,
                "per_class": report.per_class,
                "overall": report.overall,
            }
            _emit(ctx, payload, _accuracy_text(report))
        else:
            raise click.UsageError(f"unknown fixture {fixture_name!r}")
        return

    lex = load_lexicon_file(lexicon_path or default_lexicon_path(), config)
    try:
        levels = [float(x) for x in str(noise).split(",")]
    except ValueError as exc:
        raise ParseError(f"bad --noise value: {exc}") from exc
    runs = []
    for level in levels:
        population = generate_population(
            k, per_class, level, ctx.obj["seed"], lex, config
        )
        result = run_experiment(population, lex, config)
        runs.append(
            {
                "noise": level,
                "exact_match_rate": comparison_summary(result.rank_comparison)[
                    "exact_match_rate"
                ],
                "classification_accuracy": result.classification_accuracy,
                "per_class": result.accuracy_report.per_class,
                "overall": result.accuracy_report.overall,
                "train_size": result.metadata["train_size"],
                "test_size": result.metadata["test_size"],
            }
        )
    payload = {"seed": ctx.obj["seed"], "k": k, "per_class": per_class, "runs": runs}
    lines = ["noise  match_rate  class_acc  train  test",
             "-----  ----------  ---------  -----  ----"]
    lines += [
        f"{r['noise']:>5.2f}  {r['exact_match_rate']:>10.3f}  "
        f"{r['classification_accuracy']:>9.3f}  {r['train_size']:>5}  {r['test_size']:>4}"
        for r in runs
    ]
    _emit(ctx, payload, lines)


@main.command()
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--per-class", type=int, default=20, show_default=True)
@click.option("--noise", type=float, default=0.5, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.pass_context
def synth(ctx, k, per_class, noise, out_dir, lexicon_path):
    """Generate a synthetic population into a directory."""
    config = ctx.obj["config"]
    lex = load_lexicon_file(lexicon_path or default_lexicon_path(), config)
    population = generate_population(k, per_class, noise, ctx.obj["seed"], lex, config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = [
        json.dumps(response_to_dict(resp))
        for candidate in population.candidates
        for resp in candidate.responses
    ]
    (out / "responses.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "variants.json").write_text(
        json.dumps(
            {vid: features.to_dict() for vid, features in sorted(population.variants.items())},
            indent=2,
        ),
        encoding="utf-8",
    )
    (out / "population.json").write_text(
        json.dumps(
            {
                "seed": population.seed,
                "noise_level": population.noise_level,
                "k": population.k,
                "context": population.context_id,
                "prototypes": [list(p.values) for p in population.prototypes],
                "true_classes": {
                    c.candidate_id: c.true_class for c in population.candidates
                },
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    payload = {
        "out": str(out),
        "candidates": len(population.candidates),
        "responses": len(lines),
    }
    _emit(ctx, payload, [
        f"wrote {len(population.candidates)} candidates "
        f"({len(lines)} responses) to {out}"
    ])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--store", "store_path", type=click.Path(), default="./emorank-store",
              show_default=True)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), default=None)
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--rounds", type=int, default=5, show_default=True)
@click.option("--context", default="news", show_default=True)
@click.pass_context
def serve(ctx, host, port, store_path, lexicon_path, model_path, rounds, context):
    """Run the elicitation HTTP service."""
    import uvicorn

    from .server import create_app

    config = ctx.obj["config"]
    lex = load_lexicon_file(lexicon_path or default_lexicon_path(), config)
    model = None
    if model_path:
        model = model_from_dict(json.loads(Path(model_path).read_text(encoding="utf-8")))
    manager = SessionManager(
        store=ProfileStore(store_path),
        lexicon=lex,
        config=config,
        model=model,
        rounds=rounds,
        context_id=context,
    )
    uvicorn.run(create_app(manager), host=host, port=port)


def cli_entry() -> None:  # pragma: no cover
    try:
        main(standalone_mode=True)
    except EngineError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    cli_entry()
