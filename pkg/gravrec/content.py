'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Paper content vectors
PV-DBOW: each paper's vector is trained to predict the words of its title + abstract,
negative sampling against the unigram^0.75 distribution

Vector file:
#dim 64
<paper_id> <v_1> ... <v_64>
'''

import collections
import re

import numpy as np

from .numkernel import log_sigmoid, sigmoid, xavier_init
from .util import DataError, UsageError, warning


class EmptyVocabulary(UsageError):
    pass


class CoverageError(DataError):
    pass


class FormatError(DataError):
    def __init__(self, lineno, s):
        DataError.__init__(self, 'line %u: %s' % (lineno, s))
        self.lineno = lineno


TOKEN_SPLIT_RE = re.compile(r'[\W_]+')


def tokenize(text):
    '''Case folded alphanumeric runs, 2+ characters'''
    if not text:
        return []
    return [t for t in TOKEN_SPLIT_RE.split(text.casefold()) if len(t) >= 2]


class Vocabulary:
    def __init__(self, token_lists, min_count=2):
        self.min_count = min_count
        counts = collections.Counter()
        for tokens in token_lists:
            counts.update(tokens)
        kept = [t for t, c in counts.items() if c >= min_count]
        # Most frequent first, ties alphabetical
        kept.sort(key=lambda t: (-counts[t], t))
        self.tokens = kept
        self.index = dict((t, i) for i, t in enumerate(kept))
        self.counts = np.array([counts[t] for t in kept], dtype=np.float64)

    def __len__(self):
        return len(self.tokens)

    def encode(self, tokens):
        return [self.index[t] for t in tokens if t in self.index]

    def noise_distribution(self, power=0.75):
        p = self.counts**power
        return p / p.sum()


class ContentConfig:
    def __init__(self,
                 dim_v=64,
                 epochs=50,
                 negatives=5,
                 lr=0.025,
                 min_count=2,
                 seed=1):
        self.dim_v = dim_v
        self.epochs = epochs
        self.negatives = negatives
        self.lr = lr
        self.min_count = min_count
        self.seed = seed

    @staticmethod
    def from_run_config(rc):
        return ContentConfig(dim_v=rc.get('dim_v'),
                             epochs=rc.get('pv_epochs'),
                             negatives=rc.get('pv_negatives'),
                             lr=rc.get('pv_lr'),
                             min_count=rc.get('pv_min_count'),
                             seed=rc.get('seed'))


class DocVectors:
    def __init__(self, paper_ids, matrix):
        if len(paper_ids) != matrix.shape[0]:
            raise DataError('%u ids for %u vectors' %
                            (len(paper_ids), matrix.shape[0]))
        self.paper_ids = list(paper_ids)
        self.index = dict((p, i) for i, p in enumerate(self.paper_ids))
        self.matrix = matrix
        # Per epoch mean pair loss when trained here
        self.losses = []

    @property
    def dim(self):
        return self.matrix.shape[1]

    def vector(self, paper_id):
        return self.matrix[self.index[paper_id]]

    def aligned(self, paper_ids):
        '''Matrix with rows in paper_ids order'''
        missing = [p for p in paper_ids if p not in self.index]
        if missing:
            raise CoverageError('No vector for paper %s' % missing[0])
        return self.matrix[[self.index[p] for p in paper_ids]]

    def __eq__(self, other):
        return isinstance(other, DocVectors) and (
            self.paper_ids == other.paper_ids
            and np.array_equal(self.matrix, other.matrix))


def pair_objective(v, c_word, c_negs):
    '''log s(v . c_w) + sum log s(-v . c_n), the quantity ascended'''
    return float(log_sigmoid(v @ c_word) + np.sum(log_sigmoid(-(c_negs @ v))))


def pair_gradient(v, targets_c, labels):
    '''
    Gradient of the pair objective
    targets_c: rows [c_w, c_n1, ...], labels [1, 0, ...]
    Returns (d/dv, d/d targets_c rows)
    '''
    g = labels - sigmoid(targets_c @ v)
    return g @ targets_c, g[:, None] * v[None, :]


def train_pvdbow(corpus, dim_v=64, epochs=50, negatives=5, lr=0.025, seed=1,
                 min_count=2):
    if dim_v < 1 or epochs < 1 or negatives < 1:
        raise UsageError('dim_v, epochs and negatives must be >= 1')
    paper_ids = corpus.paper_ids()
    token_lists = [tokenize(corpus.papers[p].text()) for p in paper_ids]
    vocab = Vocabulary(token_lists, min_count)
    if not len(vocab):
        raise EmptyVocabulary('No token occurs %u+ times' % min_count)
    docs = [vocab.encode(tokens) for tokens in token_lists]

    rng = np.random.default_rng(seed)
    D = xavier_init(len(paper_ids), dim_v, rng)
    C = np.zeros((len(vocab), dim_v))
    noise = vocab.noise_distribution()
    empty = [p for p, doc in zip(paper_ids, docs) if not doc]
    if empty:
        warning('%u papers have no usable tokens, vectors stay untrained'
                % len(empty))

    pair_doc = np.array([d for d, doc in enumerate(docs) for _w in doc],
                        dtype=np.int64)
    pair_word = np.array([w for doc in docs for w in doc], dtype=np.int64)
    n_pairs = len(pair_doc)
    labels = np.zeros(negatives + 1)
    labels[0] = 1.0
    losses = []
    for epoch in range(epochs):
        # Linear decay toward lr * 1e-4 over the run
        alpha = lr - (lr - lr * 1e-4) * epoch / max(epochs - 1, 1)
        order = rng.permutation(n_pairs)
        negs = rng.choice(len(vocab), size=(n_pairs, negatives), p=noise)
        total = 0.0
        for k, pair in enumerate(order):
            d = pair_doc[pair]
            targets = np.concatenate([[pair_word[pair]], negs[k]])
            v = D[d]
            tc = C[targets]
            total -= pair_objective(v, tc[0], tc[1:])
            gv, gc = pair_gradient(v, tc, labels)
            np.add.at(C, targets, alpha * gc)
            D[d] = v + alpha * gv
        losses.append(total / max(n_pairs, 1))
    ret = DocVectors(paper_ids, D)
    ret.losses = losses
    return ret


def save_vectors(dv, fd):
    fd.write('#dim %u\n' % dv.dim)
    for paper_id, row in zip(dv.paper_ids, dv.matrix):
        fd.write('%s %s\n' % (paper_id, ' '.join(repr(float(x)) for x in row)))


def load_vectors(fd, corpus=None):
    '''Parse a vector file, every corpus paper must be covered when corpus is given'''
    dim = None
    paper_ids = []
    rows = []
    for lineno, line in enumerate(fd, 1):
        line = line.strip()
        if not line:
            continue
        if dim is None:
            m = re.match(r'#dim\s+(\d+)$', line)
            if not m:
                raise FormatError(lineno, 'expect "#dim <n>" header')
            dim = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != dim + 1:
            raise FormatError(
                lineno, 'expect %u values, got %u' % (dim, len(parts) - 1))
        try:
            rows.append([float(x) for x in parts[1:]])
        except ValueError as e:
            raise FormatError(lineno, str(e))
        paper_ids.append(parts[0])
    if dim is None:
        raise FormatError(0, 'empty vector file')
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    if not np.all(np.isfinite(matrix)):
        raise FormatError(0, 'non-finite vector entry')
    dv = DocVectors(paper_ids, matrix)
    if corpus is not None:
        for paper_id in corpus.paper_ids():
            if paper_id not in dv.index:
                raise CoverageError('No vector for paper %s' % paper_id)
    return dv
