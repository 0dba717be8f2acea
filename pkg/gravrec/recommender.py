'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Scholar => paper scoring and BPR training

Aligned scholar vector u^a = relu(W_align u + b_align) lives in paper vector space
Score(i, j) = u^a_i . v_j
Loss = -sum log sigmoid(score(i, j) - score(i, k)) + reg_weight * |theta|^2
over sampled (scholar, positive, negative) triples
Paper vectors come from the content model and stay frozen, or with use_content off
are a trainable table "paper.emb"
'''

import collections
import json
import math
import os

import numpy as np

from . import influence
from .content import ContentConfig, DocVectors, train_pvdbow
from .encoder import Encoder, EncoderConfig
from .numkernel import Adam, DimensionError, log_sigmoid, relu, sigmoid, xavier_init
from .util import DataError, NumericError, UsageError

CHECKPOINT_VERSION = 'gravrec-ckpt-1'


class EmptySplit(DataError):
    pass


class DivergenceError(NumericError):
    def __init__(self, epoch, loss):
        NumericError.__init__(
            self, 'epoch %u: training diverged, loss %r' % (epoch, loss))
        self.epoch = epoch


class UnknownScholar(DataError, KeyError):
    def __str__(self):
        return DataError.__str__(self)


Triple = collections.namedtuple('Triple', 'scholar positive negative')


class TrainConfig:
    def __init__(self,
                 batch_size=1024,
                 learning_rate=0.001,
                 reg_weight=0.0005,
                 epochs=100,
                 seed=1,
                 encoder=None,
                 content=None,
                 use_content=True,
                 gravitational_constant=1.0,
                 distance_source=influence.DISTANCE_RELATION,
                 snapshot=None):
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.reg_weight = reg_weight
        self.epochs = epochs
        self.seed = seed
        self.encoder = encoder or EncoderConfig()
        self.content = content or ContentConfig()
        self.use_content = use_content
        self.gravitational_constant = gravitational_constant
        self.distance_source = distance_source
        # Flat config echoed into the checkpoint
        self.snapshot = snapshot or {}

    @property
    def dim(self):
        return self.encoder.dim

    @staticmethod
    def from_run_config(rc):
        return TrainConfig(
            batch_size=rc.get('batch_size'),
            learning_rate=rc.get('learning_rate'),
            reg_weight=rc.get('reg_weight'),
            epochs=rc.get('epochs'),
            seed=rc.get('seed'),
            encoder=EncoderConfig.from_run_config(rc),
            content=ContentConfig.from_run_config(rc),
            use_content=rc.get('use_content'),
            gravitational_constant=rc.get('gravitational_constant'),
            distance_source=rc.get('distance_source'),
            snapshot=rc.as_dict())


def align(U, W, b):
    if U.shape[1] != W.shape[1] or W.shape[0] != b.shape[0]:
        raise DimensionError('align: U %s, W %s, b %s' %
                             (U.shape, W.shape, b.shape))
    return relu(U @ W.T + b)


def score(ua, v):
    if ua.shape != v.shape:
        raise DimensionError('score: %s vs %s' % (ua.shape, v.shape))
    return float(ua @ v)


def regularizer(params):
    return sum(float(np.sum(np.square(params[name]))) for name in sorted(params))


def bpr_batch_loss(pos_scores, neg_scores, params, reg_weight):
    '''Summed, not averaged, over the batch'''
    x = np.asarray(pos_scores) - np.asarray(neg_scores)
    return float(-np.sum(log_sigmoid(x))) + reg_weight * regularizer(params)


def sample_triples(split, corpus, batch_size, rng, pairs=None):
    '''
    (scholar, positive) uniform over train pairs, negative uniform over
    corpus papers that are not any kind of positive for the scholar
    corpus may also be a plain paper id list
    '''
    if isinstance(corpus, (list, tuple)):
        paper_ids = corpus
    else:
        paper_ids = corpus.paper_ids()
    if pairs is None:
        pairs = split.train_pairs()
    if not pairs:
        raise EmptySplit('No training pairs')
    picks = rng.integers(len(pairs), size=batch_size)
    ret = []
    for pick in picks:
        scholar, positive = pairs[pick]
        positives = split.positives(scholar)
        if len(positives) >= len(paper_ids):
            raise EmptySplit('%s has no negative candidates' % scholar)
        while True:
            negative = paper_ids[int(rng.integers(len(paper_ids)))]
            if negative not in positives:
                break
        ret.append(Triple(scholar, positive, negative))
    return ret


class Model:
    '''Encoder + alignment + paper vectors for one corpus'''
    def __init__(self, network, tables, tc, paper_ids, doc_matrix=None):
        self.tc = tc
        self.encoder = Encoder(network, tables, tc.encoder)
        self.scholar_ids = list(network.nodes)
        self.scholar_index = dict(network.node_index)
        self.paper_ids = list(paper_ids)
        self.paper_index = dict((p, i) for i, p in enumerate(self.paper_ids))
        if tc.use_content:
            if doc_matrix is None:
                raise DataError('use_content needs paper vectors')
            if doc_matrix.shape[0] != len(self.paper_ids):
                raise DimensionError('%u paper vectors for %u papers' %
                                     (doc_matrix.shape[0], len(
                                         self.paper_ids)))
        self.doc_matrix = doc_matrix

    def dim_v(self):
        if self.doc_matrix is not None:
            return self.doc_matrix.shape[1]
        return self.tc.content.dim_v

    def init_params(self, rng):
        params = self.encoder.init_params(rng)
        params['align.w'] = xavier_init(self.dim_v(), self.tc.dim, rng)
        params['align.b'] = np.zeros(self.dim_v())
        if not self.tc.use_content:
            params['paper.emb'] = xavier_init(len(self.paper_ids),
                                              self.dim_v(), rng)
        return params

    def live_alignment_bias(self, params, samples):
        '''
        align.b putting every alignment unit above zero for every scholar,
        by one pre-activation spread at least
        A unit that is off for every scholar gets no gradient
        '''
        emb, _caches = self.encoder.forward(params, samples)
        pre = emb.fused @ params['align.w'].T
        spread = np.maximum(pre.std(axis=0), 1e-3)
        return np.maximum(0.0, spread - pre.min(axis=0))

    def paper_matrix(self, params):
        if self.tc.use_content:
            return self.doc_matrix
        return params['paper.emb']

    def triple_indices(self, triples):
        si = np.array([self.scholar_index[t.scholar] for t in triples],
                      dtype=np.int64)
        pj = np.array([self.paper_index[t.positive] for t in triples],
                      dtype=np.int64)
        pk = np.array([self.paper_index[t.negative] for t in triples],
                      dtype=np.int64)
        return si, pj, pk

    def scholar_vectors(self, params, samples):
        emb, _caches = self.encoder.forward(params, samples)
        return align(emb.fused, params['align.w'], params['align.b'])

    def loss(self, params, samples, triples, reg_weight):
        si, pj, pk = self.triple_indices(triples)
        Ua = self.scholar_vectors(params, samples)
        V = self.paper_matrix(params)
        pos = np.sum(Ua[si] * V[pj], axis=1)
        neg = np.sum(Ua[si] * V[pk], axis=1)
        return bpr_batch_loss(pos, neg, params, reg_weight)

    def loss_and_grads(self, params, samples, triples, reg_weight):
        si, pj, pk = self.triple_indices(triples)
        emb, caches = self.encoder.forward(params, samples)
        U = emb.fused
        W = params['align.w']
        pre = U @ W.T + params['align.b']
        Ua = relu(pre)
        V = self.paper_matrix(params)
        ui = Ua[si]
        diff = V[pj] - V[pk]
        x = np.sum(ui * diff, axis=1)
        loss = float(-np.sum(log_sigmoid(x))) + reg_weight * regularizer(
            params)

        # dLoss/dx of -log sigmoid(x)
        g = -sigmoid(-x)
        dUa = np.zeros_like(Ua)
        np.add.at(dUa, si, g[:, None] * diff)
        dpre = dUa * (pre > 0)
        grads = self.encoder.backward(caches, dpre @ W)
        grads['align.w'] = dpre.T @ U
        grads['align.b'] = dpre.sum(axis=0)
        if not self.tc.use_content:
            dV = np.zeros_like(V)
            np.add.at(dV, pj, g[:, None] * ui)
            np.add.at(dV, pk, -g[:, None] * ui)
            grads['paper.emb'] = dV
        for name in params:
            if name not in grads:
                grads[name] = np.zeros_like(params[name])
            grads[name] = grads[name] + 2.0 * reg_weight * params[name]
        return loss, grads


class ModelCheckpoint:
    def __init__(self):
        self.version = CHECKPOINT_VERSION
        # Flat run config snapshot
        self.config = {}
        self.seeds = {}
        self.epochs = 0
        self.losses = []
        self.scholar_ids = []
        self.paper_ids = []
        # name => array, every trainable matrix
        self.params = {}
        # Frozen paper vectors, None with use_content off
        self.doc_vectors = None
        # Aligned scholar vectors from the final inference pass
        self.scholar_vectors = None
        # scholar => sorted train positives
        self.train_positives = {}
        self._scholar_index = None
        self._paper_index = None

    def scholar_index(self):
        if self._scholar_index is None:
            self._scholar_index = dict(
                (s, i) for i, s in enumerate(self.scholar_ids))
        return self._scholar_index

    def paper_index(self):
        if self._paper_index is None:
            self._paper_index = dict(
                (p, i) for i, p in enumerate(self.paper_ids))
        return self._paper_index

    def paper_matrix(self):
        if self.doc_vectors is not None:
            return self.doc_vectors.aligned(self.paper_ids)
        return self.params['paper.emb']

    def scholar_vector(self, scholar_id):
        i = self.scholar_index().get(scholar_id)
        if i is None:
            raise UnknownScholar('Unknown scholar %s' % scholar_id)
        return self.scholar_vectors[i]

    def to_json(self):
        def matrix(a):
            return {"shape": list(a.shape), "data": a.tolist()}

        j = {
            "version": self.version,
            "config": self.config,
            "seeds": self.seeds,
            "epochs": self.epochs,
            "losses": self.losses,
            "scholar_ids": self.scholar_ids,
            "paper_ids": self.paper_ids,
            "params":
            dict((name, matrix(a)) for name, a in self.params.items()),
            "scholar_vectors": matrix(self.scholar_vectors),
            "train_positives": self.train_positives,
        }
        if self.doc_vectors is not None:
            j["doc_vectors"] = {
                "paper_ids": self.doc_vectors.paper_ids,
                "matrix": matrix(self.doc_vectors.matrix),
            }
        return j

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True) + '\n'

    def save(self, fn):
        with open(fn, 'w', encoding='utf-8') as f:
            f.write(self.dumps())

    @staticmethod
    def from_json(j):
        def matrix(m):
            a = np.array(m["data"], dtype=np.float64)
            return a.reshape(m["shape"])

        if not isinstance(j, dict):
            raise DataError('Bad checkpoint: expected an object, got %s' %
                            type(j).__name__)
        if j.get("version") != CHECKPOINT_VERSION:
            raise DataError('Unsupported checkpoint version %r' %
                            (j.get("version"), ))
        ret = ModelCheckpoint()
        try:
            ret.config = j["config"]
            ret.seeds = j["seeds"]
            ret.epochs = j["epochs"]
            ret.losses = j["losses"]
            ret.scholar_ids = j["scholar_ids"]
            ret.paper_ids = j["paper_ids"]
            ret.params = dict(
                (name, matrix(m)) for name, m in j["params"].items())
            ret.scholar_vectors = matrix(j["scholar_vectors"])
            ret.train_positives = j["train_positives"]
            if "doc_vectors" in j:
                ret.doc_vectors = DocVectors(
                    j["doc_vectors"]["paper_ids"],
                    matrix(j["doc_vectors"]["matrix"]))
        except KeyError as e:
            raise DataError('Bad checkpoint: missing %s' % e)
        except (AttributeError, TypeError, ValueError) as e:
            raise DataError('Bad checkpoint: %s' % e)
        return ret

    @staticmethod
    def loads(s):
        try:
            j = json.loads(s)
        except ValueError as e:
            raise DataError('Bad checkpoint: %s' % e)
        return ModelCheckpoint.from_json(j)

    @staticmethod
    def from_file_name(fn):
        if not os.path.exists(fn):
            raise DataError('Checkpoint %s does not exist' % fn)
        with open(fn, encoding='utf-8') as f:
            return ModelCheckpoint.loads(f.read())


def recommend_topk(checkpoint, scholar_id, candidates=None, k=10):
    '''
    [(paper_id, score)] best first, ties by ascending paper id
    candidates default to every paper except the scholar's train positives
    '''
    if k < 1:
        raise UsageError('k must be >= 1, got %s' % k)
    ua = checkpoint.scholar_vector(scholar_id)
    if candidates is None:
        seen = set(checkpoint.train_positives.get(scholar_id, []))
        candidates = [p for p in checkpoint.paper_ids if p not in seen]
    paper_index = checkpoint.paper_index()
    missing = [p for p in candidates if p not in paper_index]
    if missing:
        raise DataError('Unknown candidate paper %s' % missing[0])
    V = checkpoint.paper_matrix()
    scores = V[[paper_index[p] for p in candidates]] @ ua if len(
        candidates) else np.zeros(0)
    ranked = sorted(zip(candidates, (float(s) for s in scores)),
                    key=lambda ps: (-ps[1], ps[0]))
    return ranked[:k]


def seed_streams(seed):
    '''Independent generators: init, neighbor sampling, triples, inference sampling'''
    children = np.random.SeedSequence(seed).spawn(4)
    return [np.random.default_rng(c) for c in children]


def train(corpus,
          network,
          split,
          tc,
          doc_vectors=None,
          tables=None,
          log=print):
    '''
    Full graph forward per batch, neighbors re-sampled once per epoch
    Returns a ModelCheckpoint holding everything recommend / evaluate need
    '''
    if tables is None:
        tables = influence.build_tables(network, corpus.citation_mass,
                                        tc.gravitational_constant,
                                        tc.distance_source)
    doc_matrix = None
    if tc.use_content:
        if doc_vectors is None:
            cc = tc.content
            log('Training paper vectors (%u epochs)' % cc.epochs)
            doc_vectors = train_pvdbow(corpus,
                                       dim_v=cc.dim_v,
                                       epochs=cc.epochs,
                                       negatives=cc.negatives,
                                       lr=cc.lr,
                                       seed=cc.seed,
                                       min_count=cc.min_count)
        doc_matrix = doc_vectors.aligned(corpus.paper_ids())
    else:
        doc_vectors = None

    model = Model(network, tables, tc, corpus.paper_ids(), doc_matrix)
    init_rng, sample_rng, triple_rng, infer_rng = seed_streams(tc.seed)
    params = model.init_params(init_rng)
    params['align.b'] = model.live_alignment_bias(
        params, model.encoder.draw_samples(init_rng))
    adam = Adam(tc.learning_rate)
    pairs = split.train_pairs()
    if not pairs:
        raise EmptySplit('No training pairs')
    n_batches = max(1, int(math.ceil(len(pairs) / tc.batch_size)))
    log('Training on %u pairs, %u batches / epoch, %u params' %
        (len(pairs), n_batches, sum(a.size for a in params.values())))

    losses = []
    for epoch in range(1, tc.epochs + 1):
        samples = model.encoder.draw_samples(sample_rng)
        total = 0.0
        for _batch in range(n_batches):
            triples = sample_triples(split,
                                     model.paper_ids,
                                     tc.batch_size,
                                     triple_rng,
                                     pairs=pairs)
            loss, grads = model.loss_and_grads(params, samples, triples,
                                               tc.reg_weight)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, loss)
            adam.step(params, grads)
            total += loss
        losses.append(total / n_batches)
        log('epoch %u loss %0.6f' % (epoch, losses[-1]))

    ckpt = ModelCheckpoint()
    ckpt.config = dict(tc.snapshot)
    ckpt.seeds = {"seed": tc.seed, "content_seed": tc.content.seed}
    ckpt.epochs = tc.epochs
    ckpt.losses = losses
    ckpt.scholar_ids = list(model.scholar_ids)
    ckpt.paper_ids = list(model.paper_ids)
    ckpt.params = params
    ckpt.doc_vectors = doc_vectors
    ckpt.scholar_vectors = model.scholar_vectors(
        params, model.encoder.draw_samples(infer_rng))
    ckpt.train_positives = dict(
        (s, sorted(ps)) for s, ps in sorted(split.train_positives.items()))
    return ckpt
