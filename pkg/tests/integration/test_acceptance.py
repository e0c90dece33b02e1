"""
End-to-end acceptance runs at reduced scale.

Marked integration + slow: each test trains at least one model.
"""
import pytest

from app.data.models.history import UserHistory
from app.domain.baselines import DueDateOracleRanker, PersonalTopRanker, TifuKnnRanker, TifuPopulation
from app.domain.enums import MetricName
from app.domain.metrics import evaluate
from app.domain.model.network import build_network
from app.domain.model.ranker import CaseRanker
from app.domain.services.benchmark_service import bench_inference
from app.domain.services.dataset_service import prepare
from app.domain.services.experiment_service import (
    ABLATIONS,
    largest_drop,
    majority,
    train_and_evaluate,
    with_ablation,
)
from app.domain.services.ingest_service import IngestService, build_vocab
from app.domain.services.signal_service import build_eval_set
from app.domain.services.synth_service import generate
from app.infrastructure.config import load_config

pytestmark = [pytest.mark.integration, pytest.mark.slow]

PRECISION = MetricName.PRECISION
RECALL = MetricName.RECALL


class TestSyntheticSeparation:
    def test_case_beats_counts_and_approaches_oracle(self, acceptance_config, synth_corpus, synth_data):
        run = train_and_evaluate("case", acceptance_config, synth_data)
        examples = synth_data.test.examples
        personal = evaluate(PersonalTopRanker(), examples, [1])
        oracle = evaluate(DueDateOracleRanker(synth_corpus.planted), examples, [1])

        case_p1 = run.report.value(PRECISION, 1)
        assert case_p1 >= personal.value(PRECISION, 1) + 0.25
        assert case_p1 >= 0.75 * oracle.value(PRECISION, 1)

    def test_ndcg_at_one_equals_precision_at_one(self, synth_data):
        report = evaluate(PersonalTopRanker(), synth_data.test.examples, [1, 5])
        assert report.value(MetricName.NDCG, 1) == report.value(PRECISION, 1)


class TestAblationDirection:
    def test_removing_cnn_hurts_most(self, acceptance_config, synth_corpus):
        votes = []
        for seed in (0, 1, 2):
            config = acceptance_config.model_copy(update={"seed": seed})
            data = prepare(synth_corpus.histories, config)
            reports = {
                name: train_and_evaluate(name, with_ablation(config, flags), data).report
                for name, flags in ABLATIONS.items()
            }
            votes.append(largest_drop(reports, PRECISION, 1))
        winner, count = majority(votes)
        assert winner == "no_cnn", votes
        assert count >= 2


class TestDeterminism:
    def test_identical_runs(self, acceptance_config, synth_data, tmp_path):
        config = acceptance_config.model_copy(update={"train": acceptance_config.train.model_copy(update={"epochs": 2})})
        first = train_and_evaluate("case", config, synth_data, tmp_path / "a")
        second = train_and_evaluate("case", config, synth_data, tmp_path / "b")
        assert (tmp_path / "a" / "best.ckpt").read_bytes() == (tmp_path / "b" / "best.ckpt").read_bytes()
        assert first.report == second.report
        assert (tmp_path / "a" / "eval_report.csv").read_text() == (tmp_path / "b" / "eval_report.csv").read_text()


class TestInferenceScaling:
    def test_case_flat_and_tifu_grows(self, acceptance_config):
        populations = [500, 2000]
        config = acceptance_config.model_copy(
            update={"synth": acceptance_config.synth.model_copy(update={"n_users": populations[-1] + 50})}
        )
        histories = generate(config.synth, config.rng("bench").child("synth")).histories
        population, held_out = histories[: populations[-1]], histories[populations[-1] :]
        queries = build_eval_set(histories, [h.user_id for h in held_out], config.model.window, config.data.cap_n).examples
        vocab = build_vocab(histories)
        network = build_network(config.model, len(vocab), 0.0, config.rng("init"))
        by_user: dict[str, UserHistory] = {h.user_id: h for h in histories}

        report = bench_inference(
            {
                "case": lambda _: CaseRanker(network, vocab),
                "tifuknn": lambda users: TifuKnnRanker(TifuPopulation.build(users, config.tifu), by_user, config.tifu),
            },
            population,
            queries,
            populations,
            repeats=3,
        )
        assert 0.8 <= report.ratios["case"] <= 1.25
        assert report.ratios["tifuknn"] >= 2.0


class TestTaFeng:
    def test_desk_scale_targets(self, tafeng_csv):
        config = load_config(
            overrides={
                "data": {
                    "schema": "date",
                    "user_col": "CUSTOMER_ID",
                    "item_col": "PRODUCT_ID",
                    "date_col": "TRANSACTION_DT",
                    "date_format": "%m/%d/%Y",
                },
                "train": {"epochs": 10},
            }
        )
        histories, summary = IngestService().ingest(tafeng_csv, config.data.format_spec())
        assert summary.users > 5000
        data = prepare(histories, config)

        personal = evaluate(PersonalTopRanker(), data.test.examples, [1, 10])
        assert 0.14 <= personal.value(PRECISION, 1) <= 0.21

        run = train_and_evaluate("case", config, data)
        assert run.report.value(RECALL, 10) >= personal.value(RECALL, 10) + 0.10
