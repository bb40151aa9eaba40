import json

import pytest
from click.testing import CliRunner

from emorank.cli import main
from emorank.datastore import fixtures_root


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args, **kwargs):
    result = runner.invoke(main, args, catch_exceptions=False, **kwargs)
    assert result.exit_code == 0, result.output
    return result


class TestLexiconCommands:
    def test_validate_shipped_lexicon(self, runner):
        path = str(fixtures_root() / "lexicon.json")
        result = invoke(runner, ["--format", "json", "lexicon", "validate", path])
        payload = json.loads(result.output)
        assert payload["valid"] is True
        assert payload["dims"] == 5

    def test_validate_rejects_bad_document(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"version": 1, "taxonomy": ["a"], "words": [], '
                       '"features": [{"kind": "color", "category": "x", '
                       '"profile": [0.5]}]}')
        result = runner.invoke(main, ["lexicon", "validate", str(bad)])
        assert result.exit_code != 0
        assert "invalid lexicon" in result.output


class TestEvalFixtures:
    def test_table2_numbers(self, runner):
        result = invoke(
            runner, ["--format", "json", "eval", "--fixture", "paper/table2"]
        )
        payload = json.loads(result.output)
        assert payload["exact_match_rate"] == 0.6
        assert payload["rank_2_share"] == 0.3
        assert payload["rank_3_plus_share"] == 0.1
        assert len(payload["rows"]) == 10

    def test_table3_numbers(self, runner):
        result = invoke(
            runner, ["--format", "json", "eval", "--fixture", "paper/table3"]
        )
        payload = json.loads(result.output)
        assert payload["per_class"] == {
            "0": 61.0, "1": 61.0, "2": 67.0, "3": 72.0, "4": 70.0
        }
        assert abs(payload["overall"] - 66.2) < 0.1

    def test_table1_flags_out_of_scale_cell(self, runner):
        result = invoke(
            runner, ["--format", "json", "eval", "--fixture", "paper/table1"]
        )
        payload = json.loads(result.output)
        assert payload["out_of_range"] == [
            {"candidate": 5, "cluster": 4, "value": 5}
        ]

    def test_unknown_fixture(self, runner):
        result = runner.invoke(main, ["eval", "--fixture", "paper/table9"])
        assert result.exit_code != 0

    def test_text_format(self, runner):
        result = invoke(runner, ["eval", "--fixture", "paper/table2"])
        assert "exact_match_rate" in result.output
        assert "0.60" in result.output


class TestSynthLearnClassify:
    def test_pipeline(self, runner, tmp_path):
        out_dir = tmp_path / "population"
        invoke(
            runner,
            ["--seed", "3", "synth", "--k", "3", "--per-class", "4",
             "--noise", "0", "--out", str(out_dir)],
        )
        assert (out_dir / "responses.jsonl").exists()
        assert (out_dir / "variants.json").exists()

        model_path = tmp_path / "model.json"
        invoke(
            runner,
            ["learn", "--responses", str(out_dir / "responses.jsonl"),
             "--k", "3", "--out", str(model_path)],
        )
        assert model_path.exists()

        result = invoke(
            runner,
            ["--format", "json", "classify", "--model", str(model_path),
             "--responses", str(out_dir / "responses.jsonl")],
        )
        classes = json.loads(result.output)["classes"]
        assert len(classes) == 12
        truth = json.loads((out_dir / "population.json").read_text())["true_classes"]
        # zero-noise population: same true class iff same predicted class
        by_true = {}
        for cid, label in classes.items():
            by_true.setdefault(truth[cid], set()).add(label)
        assert all(len(labels) == 1 for labels in by_true.values())

    def test_eval_synthetic(self, runner):
        result = invoke(
            runner,
            ["--format", "json", "--seed", "7", "eval", "--synthetic",
             "--k", "5", "--per-class", "4", "--noise", "0"],
        )
        payload = json.loads(result.output)
        run = payload["runs"][0]
        assert run["exact_match_rate"] == 1.0
        assert run["classification_accuracy"] == 1.0


class TestEmbedAndRank:
    def test_embed_command(self, runner, tmp_path):
        template = tmp_path / "template.json"
        template.write_text(json.dumps({
            "version": 1,
            "tokens": [{"slot": "theme", "context": "news"},
                       {"literal": "tonight"}],
        }))
        result = invoke(
            runner,
            ["--format", "json", "embed", "--template", str(template),
             "--target", "0,1,0,0,0"],
        )
        payload = json.loads(result.output)
        assert payload["headline"] == "calm tonight"
        assert payload["score"] == 1.0

    def test_rank_command(self, runner, tmp_path):
        items = tmp_path / "items.json"
        items.write_text(json.dumps([
            {"item_id": "a", "profile": [1, 0, 0, 0, 0]},
            {"item_id": "b", "profile": [0, 1, 0, 0, 0]},
        ]))
        result = invoke(
            runner,
            ["--format", "json", "rank", "--reader", "0,1,0,0,0",
             "--items", str(items)],
        )
        ranking = json.loads(result.output)["ranking"]
        assert ranking[0]["item_id"] == "b"


class TestConfigFlag:
    def test_config_file_changes_dims(self, runner, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"emotion_dims": 3, "num_classes": 3}))
        lexicon_path = tmp_path / "lex.json"
        lexicon_path.write_text(json.dumps({
            "version": 1,
            "taxonomy": ["x", "y", "z"],
            "words": [{"word": "w", "context": "c", "cluster": 1,
                       "profile": [1, 0, 0]}],
            "features": [],
        }))
        result = invoke(
            runner,
            ["--config", str(config_path), "--format", "json",
             "lexicon", "validate", str(lexicon_path)],
        )
        assert json.loads(result.output)["dims"] == 3

    def test_config_rejects_mismatched_lexicon(self, runner, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"emotion_dims": 3}))
        result = runner.invoke(
            main,
            ["--config", str(config_path), "lexicon", "validate",
             str(fixtures_root() / "lexicon.json")],
        )
        assert result.exit_code != 0
