'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Ablation sweeps: every variant is a set of run config overrides
Variants share the split and, per seed, the paper vectors
'''

import json

import numpy as np

from . import influence
from .benchmark import Benchmark
from .content import ContentConfig, train_pvdbow
from .corpus import leave_one_out_split
from .evaluation import METRICS, evaluate
from .hetnet import COLLABORATION, COORG, COTOPIC, COVENUE, build_network
from .recommender import TrainConfig, train
from .util import UsageError

VARIANTS = {
    'full': {},
    # M_ij = 1
    'sn': {
        'influence_mode': 'uniform'
    },
    # M_ij = learned edge attention
    'att': {
        'influence_mode': 'attention'
    },
    'wo_ic': {
        'use_interdependent': False
    },
    'wo_cont': {
        'use_content': False
    },
    '+org': {
        'relations': [COLLABORATION, COTOPIC, COVENUE, COORG]
    },
    '+org-col': {
        'relations': [COORG, COTOPIC, COVENUE]
    },
    '+org-top': {
        'relations': [COLLABORATION, COORG, COVENUE]
    },
    '+org-ven': {
        'relations': [COLLABORATION, COTOPIC, COORG]
    },
}
DEFAULT_VARIANTS = ('full', 'sn', 'att', 'wo_ic', 'wo_cont')
ORG_VARIANTS = ('+org', '+org-col', '+org-top', '+org-ven')


def variant_config(rc, variant, seed):
    overrides = VARIANTS.get(variant)
    if overrides is None:
        raise UsageError('Unknown variant %s, expect one of %s' %
                         (variant, ', '.join(sorted(VARIANTS))))
    return rc.copy(seed=seed, **overrides)


class AblationTable:
    def __init__(self, ks):
        self.ks = list(ks)
        # variant => seed => MetricsReport values
        self.runs = {}
        # variant => metric@k => mean over seeds
        self.means = {}

    def add(self, variant, seed, report):
        self.runs.setdefault(variant, {})[seed] = dict(report.values)

    def reduce(self):
        self.means = {}
        for variant, by_seed in self.runs.items():
            seeds = sorted(by_seed)
            names = sorted(by_seed[seeds[0]])
            self.means[variant] = dict(
                (name, float(np.mean([by_seed[s][name] for s in seeds])))
                for name in names)

    def mean(self, variant, metric, k):
        return self.means[variant]['%s@%u' % (metric, k)]

    def to_json(self):
        return {
            "means": self.means,
            "runs": dict((v, dict((str(s), values) for s, values in r.items()))
                         for v, r in self.runs.items()),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=4) + '\n'

    def text(self, k=5):
        lines = ['%-10s %s' % ('variant', ' '.join('%12s' % ('%s@%u' % (m, k))
                                                   for m in METRICS))]
        for variant in self.means:
            lines.append('%-10s %s' % (variant, ' '.join(
                '%12.4f' % self.mean(variant, m, k) for m in METRICS)))
        return '\n'.join(lines)

    def plot(self, fn, metric='ndcg', k=5, title=None):
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt

        variants = list(self.means)
        plt.figure()
        plt.bar(variants, [self.mean(v, metric, k) for v in variants])
        plt.ylabel('%s@%u' % (metric, k))
        plt.title(title or 'ablation, mean over seeds')
        plt.savefig(fn)
        plt.close()


def run_ablation(corpus,
                 rc,
                 variants=DEFAULT_VARIANTS,
                 seeds=(1, 2, 3),
                 ks=(5, 10, 20),
                 workers=1,
                 log=print):
    # Reject bad variant names before any training
    for variant in variants:
        variant_config(rc, variant, seeds[0])
    split = leave_one_out_split(corpus, rc.get('split_seed'))
    table = AblationTable(ks)
    progress = Benchmark(max_items=len(variants) * len(seeds))
    for seed in seeds:
        # Paper vectors only depend on the corpus and content settings
        cc = ContentConfig.from_run_config(rc.copy(seed=seed))
        doc_vectors = None
        for variant in variants:
            vrc = variant_config(rc, variant, seed)
            tc = TrainConfig.from_run_config(vrc)
            if tc.use_content and doc_vectors is None:
                log('seed %u: training paper vectors' % seed)
                doc_vectors = train_pvdbow(corpus,
                                           dim_v=cc.dim_v,
                                           epochs=cc.epochs,
                                           negatives=cc.negatives,
                                           lr=cc.lr,
                                           seed=cc.seed,
                                           min_count=cc.min_count)
            network = build_network(corpus, vrc.get('relations'),
                                    vrc.get('min_shared_topic'))
            tables = influence.build_tables(network, corpus.citation_mass,
                                            tc.gravitational_constant,
                                            tc.distance_source)
            log('variant %s seed %u' % (variant, seed))
            ckpt = train(corpus,
                         network,
                         split,
                         tc,
                         doc_vectors=doc_vectors if tc.use_content else None,
                         tables=tables,
                         log=log)
            report = evaluate(ckpt, split, ks, workers=workers)
            log('variant %s seed %u: ndcg@%u %0.4f' %
                (variant, seed, ks[0], report.get('ndcg', ks[0])))
            table.add(variant, seed, report)
            progress.advance()
            log('ablation %s' % progress.progress_str())
    table.reduce()
    return table
