import math

import numpy as np
import pytest
from scipy import stats

from conftest import small_run_config
from gravrec import influence
from gravrec.content import DocVectors
from gravrec.corpus import SplitSpec, generate_synthetic, leave_one_out_split
from gravrec.gradcheck import FIXTURE_TRIPLES, fixture_corpus
from gravrec.hetnet import build_network
from gravrec.numkernel import DimensionError, finite_difference_gradient, relative_error
from gravrec.recommender import (CHECKPOINT_VERSION, DivergenceError,
                                 EmptySplit, Model, ModelCheckpoint,
                                 TrainConfig, UnknownScholar, align,
                                 bpr_batch_loss, recommend_topk, regularizer,
                                 sample_triples, score, seed_streams, train)
from gravrec.util import DataError, UsageError


def test_align():
    U = np.array([[1.0, -1.0]])
    assert np.array_equal(align(U, np.eye(2), np.zeros(2)), [[1.0, 0.0]])
    assert np.array_equal(align(U, np.eye(2), np.array([0.0, 2.0])),
                          [[1.0, 1.0]])
    with pytest.raises(DimensionError):
        align(U, np.eye(3), np.zeros(3))


def test_score():
    assert score(np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0
    assert score(np.zeros(3), np.ones(3)) == 0.0
    with pytest.raises(DimensionError):
        score(np.ones(2), np.ones(3))


def test_bpr_batch_loss():
    assert bpr_batch_loss([1.0, 2.0], [1.0, 2.0], {},
                          0.0) == pytest.approx(2 * math.log(2))
    params = {"w": np.array([1.0, 2.0])}
    assert bpr_batch_loss([0.0], [0.0], params,
                          0.5) == pytest.approx(math.log(2) + 2.5)
    # Large margin, loss vanishes
    assert bpr_batch_loss([50.0], [0.0], {}, 0.0) < 1e-20


def one_scholar_split(corpus):
    return SplitSpec({"s1": {"A"}}, {"s1": {"B", "C"}},
                     {"s1": ["N00", "N01"]})


def test_sample_triples_valid(split_corpus):
    split = one_scholar_split(split_corpus)
    triples = sample_triples(split, split_corpus, 200,
                             np.random.default_rng(0))
    assert len(triples) == 200
    for t in triples:
        assert (t.scholar, t.positive) == ("s1", "A")
        assert t.negative not in ("A", "B", "C")
        assert t.negative in split_corpus.papers


def test_sample_triples_deterministic(split_corpus):
    split = one_scholar_split(split_corpus)
    a = sample_triples(split, split_corpus, 50, np.random.default_rng(9))
    b = sample_triples(split, split_corpus, 50, np.random.default_rng(9))
    assert a == b
    c = sample_triples(split, split_corpus.paper_ids(), 50,
                       np.random.default_rng(9))
    assert a == c


def test_sample_triples_negatives_uniform(split_corpus):
    split = one_scholar_split(split_corpus)
    triples = sample_triples(split, split_corpus, 100000,
                             np.random.default_rng(1))
    allowed = [p for p in split_corpus.paper_ids() if p not in ("A", "B", "C")]
    counts = dict((p, 0) for p in allowed)
    for t in triples:
        counts[t.negative] += 1
    _stat, p = stats.chisquare([counts[p] for p in allowed])
    assert p > 1e-3


def test_sample_triples_empty(split_corpus):
    with pytest.raises(EmptySplit):
        sample_triples(SplitSpec(), split_corpus, 4, np.random.default_rng(0))
    everything = set(split_corpus.paper_ids())
    split = SplitSpec({"s1": everything}, {}, {})
    with pytest.raises(EmptySplit):
        sample_triples(split, split_corpus, 4, np.random.default_rng(0))


def hand_checkpoint():
    ckpt = ModelCheckpoint()
    ckpt.config = {"dim": 2}
    ckpt.scholar_ids = ["s1", "s2"]
    ckpt.paper_ids = ["a", "b", "c", "d"]
    ckpt.params = {
        "paper.emb": np.array([[1.0, 0.0], [2.0, 0.0], [1.0, 0.0],
                               [0.0, 1.0]])
    }
    ckpt.scholar_vectors = np.array([[1.0, 0.0], [0.0, 1.0]])
    ckpt.train_positives = {"s1": ["b"]}
    return ckpt


def test_recommend_default_candidates_and_ties():
    ranked = recommend_topk(hand_checkpoint(), "s1", k=3)
    assert ranked == [("a", 1.0), ("c", 1.0), ("d", 0.0)]


def test_recommend_explicit_candidates():
    ckpt = hand_checkpoint()
    assert recommend_topk(ckpt, "s1", ["d", "b"], k=1) == [("b", 2.0)]
    assert recommend_topk(ckpt, "s2", ["a", "d"], k=10) == [("d", 1.0),
                                                            ("a", 0.0)]
    assert recommend_topk(ckpt, "s1", [], k=5) == []


def test_recommend_errors():
    ckpt = hand_checkpoint()
    with pytest.raises(UsageError):
        recommend_topk(ckpt, "s1", k=0)
    with pytest.raises(UnknownScholar):
        recommend_topk(ckpt, "nobody")
    with pytest.raises(DataError):
        recommend_topk(ckpt, "s1", ["a", "zz"])


def test_checkpoint_round_trip(tmp_path):
    ckpt = hand_checkpoint()
    ckpt.params["align.w"] = np.random.default_rng(0).normal(size=(2, 3))
    ckpt.doc_vectors = DocVectors(["a", "b", "c", "d"],
                                  np.arange(8.0).reshape(4, 2))
    ckpt.losses = [1.5, 0.25]
    fn = str(tmp_path / "model.ckpt")
    ckpt.save(fn)
    back = ModelCheckpoint.from_file_name(fn)
    assert back.version == CHECKPOINT_VERSION
    assert back.dumps() == ckpt.dumps()
    assert np.array_equal(back.params["align.w"], ckpt.params["align.w"])
    assert back.doc_vectors == ckpt.doc_vectors
    assert recommend_topk(back, "s2") == recommend_topk(ckpt, "s2")


def test_checkpoint_load_errors(tmp_path):
    with pytest.raises(DataError):
        ModelCheckpoint.from_file_name(str(tmp_path / "missing.ckpt"))
    with pytest.raises(DataError):
        ModelCheckpoint.loads("not json")
    j = hand_checkpoint().to_json()
    j["version"] = "gravrec-ckpt-0"
    with pytest.raises(DataError):
        ModelCheckpoint.from_json(j)


@pytest.mark.parametrize("text", [
    '[1, 2]',
    '"gravrec-ckpt-1"',
    '{"version": "gravrec-ckpt-1"}',
    '{"version": "gravrec-ckpt-1", "config": {}, "seeds": {}, "epochs": 1,'
    ' "losses": [], "scholar_ids": [], "paper_ids": [], "params": [],'
    ' "scholar_vectors": {"shape": [0, 2], "data": []},'
    ' "train_positives": {}}',
    '{"version": "gravrec-ckpt-1", "config": {}, "seeds": {}, "epochs": 1,'
    ' "losses": [], "scholar_ids": [], "paper_ids": [], "params": {},'
    ' "scholar_vectors": {"shape": [3, 2], "data": [1.0]},'
    ' "train_positives": {}}',
])
def test_checkpoint_malformed(text):
    with pytest.raises(DataError):
        ModelCheckpoint.loads(text)


def test_seed_streams_independent():
    a = [rng.random() for rng in seed_streams(3)]
    b = [rng.random() for rng in seed_streams(3)]
    assert a == b
    assert len(set(a)) == 4


def fixture_model(use_content, influence_mode="gravity", reg_weight=0.1):
    corpus = fixture_corpus()
    rc = small_run_config(dim=4,
                          att_dim=4,
                          dim_v=3,
                          sample_sizes=[2, 2],
                          use_content=use_content,
                          influence_mode=influence_mode,
                          reg_weight=reg_weight)
    network = build_network(corpus, rc.get('relations'))
    tables = influence.build_tables(network, corpus.citation_mass)
    tc = TrainConfig.from_run_config(rc)
    rng = np.random.default_rng(2)
    doc = rng.normal(size=(4, 3)) if use_content else None
    model = Model(network, tables, tc, corpus.paper_ids(), doc)
    params = model.init_params(rng)
    return model, params, model.encoder.draw_samples(rng), tc


@pytest.mark.parametrize("use_content", [True, False])
def test_loss_and_grads_match_fd(use_content):
    model, params, samples, tc = fixture_model(use_content)
    triples = list(FIXTURE_TRIPLES)
    loss, grads = model.loss_and_grads(params, samples, triples,
                                       tc.reg_weight)
    assert loss == pytest.approx(
        model.loss(params, samples, triples, tc.reg_weight), rel=1e-12)
    numeric = finite_difference_gradient(
        lambda: model.loss(params, samples, triples, tc.reg_weight), params)
    assert sorted(grads) == sorted(params)
    assert ("paper.emb" in params) != use_content
    for name in params:
        assert relative_error(grads[name], numeric[name]) < 1e-4, name


def test_live_alignment_bias():
    model, params, samples, _tc = fixture_model(True)
    b = model.live_alignment_bias(params, samples)
    assert b.shape == params["align.b"].shape
    assert b.min() >= 0.0
    emb, _caches = model.encoder.forward(params, samples)
    assert (emb.fused @ params["align.w"].T + b).min() > 0.0


def test_model_needs_vectors():
    corpus = fixture_corpus()
    network = build_network(corpus)
    tables = influence.build_tables(network, corpus.citation_mass)
    tc = TrainConfig.from_run_config(small_run_config())
    with pytest.raises(DataError):
        Model(network, tables, tc, corpus.paper_ids(), None)
    with pytest.raises(DimensionError):
        Model(network, tables, tc, corpus.paper_ids(), np.zeros((3, 8)))


def synthetic_setup(**kwargs):
    corpus = generate_synthetic(3, 6, 3, 0.9, 1)
    rc = small_run_config(**kwargs)
    network = build_network(corpus, rc.get('relations'),
                            rc.get('min_shared_topic'))
    split = leave_one_out_split(corpus, rc.get('split_seed'))
    return corpus, network, split, TrainConfig.from_run_config(rc)


def quiet(s):
    pass


def test_train_deterministic():
    corpus, network, split, tc = synthetic_setup()
    a = train(corpus, network, split, tc, log=quiet)
    b = train(corpus, network, split, tc, log=quiet)
    assert a.dumps() == b.dumps()
    assert len(a.losses) == 3
    assert all(math.isfinite(x) for x in a.losses)
    assert a.config["dim"] == 8
    assert a.scholar_vectors.shape == (len(network.nodes), 8)
    assert a.doc_vectors is not None
    assert min(a.scholar_vectors.ravel()) >= 0.0


def test_train_seed_changes_model():
    corpus, network, split, tc = synthetic_setup(use_content=False)
    a = train(corpus, network, split, tc, log=quiet)
    tc.seed = 2
    b = train(corpus, network, split, tc, log=quiet)
    assert a.doc_vectors is None
    assert "paper.emb" in a.params
    assert not np.array_equal(a.scholar_vectors, b.scholar_vectors)


def test_train_logs_epochs():
    corpus, network, split, tc = synthetic_setup(use_content=False)
    lines = []
    train(corpus, network, split, tc, log=lines.append)
    epochs = [l for l in lines if l.startswith("epoch ")]
    assert [l.split()[1] for l in epochs] == ["1", "2", "3"]


def test_train_divergence(monkeypatch):
    corpus, network, split, tc = synthetic_setup(use_content=False)

    def nan_loss(self, params, samples, triples, reg_weight):
        return float("nan"), dict(
            (name, np.zeros_like(a)) for name, a in params.items())

    monkeypatch.setattr(Model, "loss_and_grads", nan_loss)
    with pytest.raises(DivergenceError) as excinfo:
        train(corpus, network, split, tc, log=quiet)
    assert excinfo.value.epoch == 1


def test_train_starts_with_live_alignment():
    corpus, network, split, tc = synthetic_setup(epochs=1)
    ckpt = train(corpus, network, split, tc, log=quiet)
    assert ckpt.params["align.b"].max() > 0.0
    # Every aligned coordinate is used by some scholar
    assert np.all(ckpt.scholar_vectors.max(axis=0) > 0.0)


def test_train_regularization_shrinks_params():
    norms = {}
    for reg_weight in (0.0, 0.05):
        corpus, network, split, tc = synthetic_setup(epochs=20,
                                                     learning_rate=0.01,
                                                     reg_weight=reg_weight,
                                                     use_content=False)
        ckpt = train(corpus, network, split, tc, log=quiet)
        norms[reg_weight] = regularizer(ckpt.params)
    assert norms[0.05] < norms[0.0]


def test_train_empty_split():
    corpus, network, _split, tc = synthetic_setup(use_content=False)
    with pytest.raises(EmptySplit):
        train(corpus, network, SplitSpec(), tc, log=quiet)


@pytest.mark.slow
def test_train_loss_goes_down():
    corpus, network, split, tc = synthetic_setup(epochs=30,
                                                 learning_rate=0.01,
                                                 use_content=False)
    ckpt = train(corpus, network, split, tc, log=quiet)
    assert np.mean(ckpt.losses[-3:]) < np.mean(ckpt.losses[:3])
