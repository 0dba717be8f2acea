'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Top-k ranking metrics and the held out test protocol
Every test scholar ranks their positives + 1:3 negatives, metrics are macro averaged
'''

import json
import multiprocessing

import numpy as np

from .recommender import EmptySplit, recommend_topk
from .util import DataError

DEFAULT_KS = (5, 10, 20)
METRICS = ('precision', 'recall', 'ndcg')


class UndefinedMetric(DataError):
    pass


def debug(s=''):
    pass


def precision_recall_at_k(ranked, relevant, k):
    '''
    ranked: paper ids, best first
    P@k divides by the top-k list actually available, min(k, len(ranked))
    '''
    if k < 1:
        raise ValueError('k must be >= 1')
    if not relevant:
        raise UndefinedMetric('no relevant items')
    top = ranked[:k]
    hits = sum(1 for p in top if p in relevant)
    if not top:
        return 0.0, 0.0
    return hits / len(top), hits / len(relevant)


def dcg_at_k(gains, k):
    gains = np.asarray(gains, dtype=np.float64)[:k]
    return float(np.sum(gains / np.log2(np.arange(2, gains.size + 2))))


def ndcg_at_k(gains, total_relevant, k):
    '''gains: 0/1 per ranked position'''
    if k < 1:
        raise ValueError('k must be >= 1')
    if total_relevant < 1:
        raise UndefinedMetric('no relevant items')
    idcg = dcg_at_k(np.ones(min(total_relevant, k)), k)
    return dcg_at_k(gains, k) / idcg


def gain_list(ranked, relevant):
    return [1 if p in relevant else 0 for p in ranked]


def scholar_metrics(ranked, relevant, ks=DEFAULT_KS):
    '''metric@k => value for one scholar'''
    ret = {}
    gains = gain_list(ranked, relevant)
    for k in ks:
        p, r = precision_recall_at_k(ranked, relevant, k)
        ret['precision@%u' % k] = p
        ret['recall@%u' % k] = r
        ret['ndcg@%u' % k] = ndcg_at_k(gains, len(relevant), k)
    return ret


class MetricsReport:
    def __init__(self, ks=DEFAULT_KS):
        self.ks = list(ks)
        # metric@k => macro average
        self.values = {}
        self.n_scholars = 0
        self.config = {}
        # scholar => metric@k => value
        self.per_scholar = {}

    def get(self, metric, k):
        return self.values['%s@%u' % (metric, k)]

    def to_json(self, per_scholar=False):
        j = dict(self.values)
        j["n_scholars"] = self.n_scholars
        j["config"] = self.config
        if per_scholar:
            j["per_scholar"] = self.per_scholar
        return j

    def dumps(self, per_scholar=False):
        return json.dumps(self.to_json(per_scholar), sort_keys=True,
                          indent=4) + '\n'

    def save(self, fn, per_scholar=False):
        with open(fn, 'w', encoding='utf-8') as f:
            f.write(self.dumps(per_scholar))

    def table(self):
        '''Human readable rows, one per metric'''
        lines = ['%-10s %s' % ('', ' '.join('%8s' % ('@%u' % k)
                                               for k in self.ks))]
        for metric in METRICS:
            lines.append('%-10s %s' %
                         (metric, ' '.join('%8.4f' % self.get(metric, k)
                                           for k in self.ks)))
        lines.append('scholars: %u' % self.n_scholars)
        return '\n'.join(lines)

    def __eq__(self, other):
        return isinstance(other, MetricsReport) and self.to_json(
            True) == other.to_json(True)


_worker_state = None


def _worker_init(checkpoint, split, ks):
    global _worker_state
    _worker_state = (checkpoint, split, ks)


def _evaluate_scholar(scholar_id, checkpoint=None, split=None, ks=None):
    if checkpoint is None:
        checkpoint, split, ks = _worker_state
    relevant = split.test_positives[scholar_id]
    if not relevant:
        return None
    ranked = recommend_topk(checkpoint,
                            scholar_id,
                            split.candidates(scholar_id),
                            k=max(ks))
    return scholar_metrics([p for p, _s in ranked], relevant, ks)


def evaluate(checkpoint, split, ks=DEFAULT_KS, workers=1):
    '''
    Candidates per scholar are test positives + test negatives
    Scholars without test positives are skipped
    Reduction runs in sorted scholar order whatever the worker count
    '''
    scholars = split.scholars()
    if not scholars:
        raise EmptySplit('No test scholars')
    ks = tuple(ks)
    if workers > 1 and len(scholars) > 1:
        with multiprocessing.Pool(workers,
                                  initializer=_worker_init,
                                  initargs=(checkpoint, split, ks)) as pool:
            results = pool.map(_evaluate_scholar, scholars)
    else:
        results = [
            _evaluate_scholar(s, checkpoint, split, ks) for s in scholars
        ]

    report = MetricsReport(ks)
    sums = {}
    for scholar_id, metrics in zip(scholars, results):
        if metrics is None:
            debug('skip %s: no test positives' % scholar_id)
            continue
        report.per_scholar[scholar_id] = metrics
        for name, value in metrics.items():
            sums[name] = sums.get(name, 0.0) + value
    report.n_scholars = len(report.per_scholar)
    if not report.n_scholars:
        raise EmptySplit('No scholar has test positives')
    for k in ks:
        for metric in METRICS:
            name = '%s@%u' % (metric, k)
            report.values[name] = sums[name] / report.n_scholars
    report.config = dict(checkpoint.config)
    return report
