"""Unit tests for the training service"""
import numpy as np
import pytest

from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.data.repositories.report_repository import ReportRepository
from app.domain.autodiff.rng import Rng
from app.domain.exceptions import DataError, NumericalError, TrainingError
from app.domain.model.network import build_network
from app.domain.services.ingest_service import build_vocab
from app.domain.services.signal_service import batch_collate, build_train_set, vocab_index
from app.domain.services.training_service import BEST_CHECKPOINT, TrainingService, epoch_checkpoint_name
from app.schemas.training import TrainConfig

pytestmark = pytest.mark.usefixtures("float64")


@pytest.fixture
def corpus_examples(small_corpus):
    histories = small_corpus.histories
    examples = build_train_set(histories, None, 28, 512).examples
    return build_vocab(histories), examples[:40], examples[40:]


def _service(config: TrainConfig, tmp_path=None, seed: int = 11, workers: int = 1) -> TrainingService:
    return TrainingService(
        config,
        workers=workers,
        shuffle_rng=Rng(seed).child("shuffle"),
        dropout_rng=Rng(seed).child("dropout"),
        checkpoints=CheckpointRepository(tmp_path) if tmp_path else None,
        reports=ReportRepository(tmp_path) if tmp_path else None,
    )


def _network(config, vocab, dropout=0.1, seed=11):
    return build_network(config, len(vocab), dropout, Rng(seed).child("init"))


class TestTrainingLoop:
    def test_one_step_per_epoch_when_batch_holds_everything(self, tiny_model_config, corpus_examples):
        vocab, train, _ = corpus_examples
        config = TrainConfig(epochs=3, batch_size=len(train))
        result = _service(config).train(_network(tiny_model_config, vocab), vocab, train)
        assert result.steps == 3
        assert [row.epoch for row in result.log] == [1, 2, 3]

    def test_loss_goes_down(self, tiny_model_config, corpus_examples):
        vocab, train, _ = corpus_examples
        config = TrainConfig(epochs=8, batch_size=8, lr=1e-2, dropout=0.0)
        result = _service(config).train(_network(tiny_model_config, vocab, dropout=0.0), vocab, train)
        assert result.log[-1].loss < result.log[0].loss

    def test_checkpoints_are_reproducible(self, tiny_model_config, corpus_examples, tmp_path):
        vocab, train, val = corpus_examples
        config = TrainConfig(epochs=2, batch_size=16)
        blobs = []
        for run in ("a", "b"):
            out = tmp_path / run
            _service(config, out).train(_network(tiny_model_config, vocab), vocab, train, val)
            blobs.append((out / f"{BEST_CHECKPOINT}.ckpt").read_bytes())
            assert (out / f"{epoch_checkpoint_name(2)}.ckpt").exists()
            assert (out / "training_log.csv").exists()
        assert blobs[0] == blobs[1]

    def test_validation_threads_do_not_change_training(self, tiny_model_config, corpus_examples):
        vocab, train, val = corpus_examples
        config = TrainConfig(epochs=3, batch_size=8)
        runs = [
            _service(config, workers=workers).train(_network(tiny_model_config, vocab), vocab, train, val)
            for workers in (1, 8)
        ]
        assert [row.loss for row in runs[0].log] == [row.loss for row in runs[1].log]
        assert runs[0].best_epoch == runs[1].best_epoch

    def test_selects_best_validation_epoch(self, tiny_model_config, corpus_examples, tmp_path):
        vocab, train, val = corpus_examples
        config = TrainConfig(epochs=4, batch_size=8, lr=5e-3)
        result = _service(config, tmp_path).train(_network(tiny_model_config, vocab), vocab, train, val)
        metrics = [row.val_metric for row in result.log]
        assert result.best_metric == max(metrics)
        assert result.best_epoch == metrics.index(max(metrics)) + 1

        manifest, state = CheckpointRepository.load(result.best_path)
        assert manifest.epoch == result.best_epoch
        for name, values in result.network.state_dict().items():
            np.testing.assert_array_equal(state[name], values)
        _, epoch_state = CheckpointRepository.load(tmp_path / f"{epoch_checkpoint_name(result.best_epoch)}.ckpt")
        for name in state:
            np.testing.assert_array_equal(state[name], epoch_state[name])

    def test_without_validation_keeps_last_epoch(self, tiny_model_config, corpus_examples):
        vocab, train, _ = corpus_examples
        result = _service(TrainConfig(epochs=3, batch_size=64)).train(_network(tiny_model_config, vocab), vocab, train)
        assert result.best_epoch == 3
        assert result.best_metric is None

    def test_empty_training_set(self, tiny_model_config, corpus_examples):
        vocab, _, _ = corpus_examples
        with pytest.raises(DataError, match="empty"):
            _service(TrainConfig(epochs=1)).train(_network(tiny_model_config, vocab), vocab, [])

    def test_numerical_failure_names_epoch_and_batch(self, tiny_model_config, corpus_examples, mocker):
        vocab, train, _ = corpus_examples
        network = _network(tiny_model_config, vocab)
        mocker.patch.object(network, "loss", side_effect=NumericalError("matmul"))
        with pytest.raises(TrainingError, match="epoch 1 batch 0: matmul"):
            _service(TrainConfig(epochs=2, batch_size=8)).train(network, vocab, train)


class TestLoss:
    def test_duplicated_example_batch_has_same_loss(self, tiny_model_config, corpus_examples):
        vocab, train, _ = corpus_examples
        network = _network(tiny_model_config, vocab, dropout=0.0)
        index = vocab_index(vocab)
        single = network.loss(batch_collate([train[0]], index)).item()
        doubled = network.loss(batch_collate([train[0], train[0]], index)).item()
        assert doubled == pytest.approx(single, rel=1e-12)

    def test_padding_does_not_change_per_example_loss(self, tiny_model_config, corpus_examples):
        vocab, train, _ = corpus_examples
        network = _network(tiny_model_config, vocab, dropout=0.0)
        index = vocab_index(vocab)
        small, large = sorted(train[:10], key=lambda e: e.n)[0], sorted(train[:10], key=lambda e: e.n)[-1]
        pair = network.loss(batch_collate([small, large], index)).item()
        separate = (network.loss(batch_collate([small], index)).item() + network.loss(batch_collate([large], index)).item()) / 2
        assert pair == pytest.approx(separate, rel=1e-10)
