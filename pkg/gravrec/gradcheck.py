'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Finite difference check of the full BPR gradient on a tiny frozen fixture
6 scholars, 4 papers, fixed neighbor samples and triples

Parameters are grouped so a failure points at a part of the model:
    channels    ind.<kind>.w<l>
    shared      ic.w<l>
    fusion      att.*
    alignment   align.*
    features    *.x
    edges       *.p<l>, *.a<l> (attention influence mode)
    papers      paper.emb (use_content off)
'''

import re

import numpy as np

from . import influence
from .corpus import CorpusStore, PaperRecord
from .encoder import ATTENTION
from .hetnet import build_network
from .numkernel import finite_difference_gradient, relative_error
from .recommender import Model, TrainConfig, Triple

FIXTURE_DIM = 4
FIXTURE_DIM_V = 3
FIXTURE_SAMPLE_SIZE = 2
FIXTURE_SEED = 5
# Agreement below this counts as a pass even when both sides nearly vanish
ABS_TOLERANCE = 1e-10

GROUPS = ('channels', 'shared', 'fusion', 'alignment', 'features', 'edges',
          'papers')


def param_group(name):
    if name.endswith('.x'):
        return 'features'
    if name.startswith('att.'):
        return 'fusion'
    if name.startswith('align.'):
        return 'alignment'
    if name == 'paper.emb':
        return 'papers'
    if re.search(r'\.[pa]\d+$', name):
        return 'edges'
    if name.startswith('ic.'):
        return 'shared'
    if name.startswith('ind.'):
        return 'channels'
    raise ValueError('Unknown parameter %s' % name)


def fixture_corpus():
    '''
    Citations give unequal masses, keyword and venue overlaps give
    co-topic / co-venue edges, author orgs give co-org edges
    '''
    def paper(paper_id, year, authors, keywords, venue, refs, org):
        return PaperRecord(paper_id,
                           'paper %s' % paper_id,
                           year,
                           authors,
                           venue=venue,
                           keywords=keywords,
                           references=refs,
                           author_orgs=[org] * len(authors))

    return CorpusStore([
        paper('p1', 2018, ['s1', 's2', 's3'], ['k1', 'k2', 'k3'], 'V1', [],
              'O1'),
        paper('p2', 2019, ['s2', 's4'], ['k1', 'k2', 'k3', 'k4'], 'V1',
              ['p1'], 'O1'),
        paper('p3', 2020, ['s4', 's5'], ['k2', 'k3', 'k4'], 'V2',
              ['p1', 'p2'], 'O2'),
        paper('p4', 2021, ['s5', 's6', 's1'], ['k1', 'k3', 'k4'], 'V2',
              ['p2', 'p3'], 'O2'),
    ])


FIXTURE_TRIPLES = (
    Triple('s1', 'p3', 'p2'),
    Triple('s2', 'p1', 'p4'),
    Triple('s3', 'p4', 'p1'),
    Triple('s4', 'p2', 'p3'),
    Triple('s5', 'p1', 'p2'),
    Triple('s6', 'p2', 'p4'),
    Triple('s1', 'p4', 'p1'),
)


def fixture_config(rc, **overrides):
    '''Run config shrunk to fixture dims, model switches kept'''
    values = dict(dim=FIXTURE_DIM,
                  att_dim=FIXTURE_DIM,
                  dim_v=FIXTURE_DIM_V,
                  sample_sizes=[FIXTURE_SAMPLE_SIZE] * rc.get('layers'))
    values.update(overrides)
    return rc.copy(**values)


class GroupResult:
    def __init__(self, label, group, n_params, max_rel_error, abs_error,
                 tolerance):
        self.label = label
        self.group = group
        self.n_params = n_params
        self.max_rel_error = max_rel_error
        self.abs_error = abs_error
        self.passed = max_rel_error <= tolerance or abs_error <= ABS_TOLERANCE

    def row(self):
        return '%-24s %-10s %6u %12.3e  %s' % (
            self.label, self.group, self.n_params, self.max_rel_error,
            'PASS' if self.passed else 'FAIL')


def check_model(rc, label, tolerance, eps, corrupt=None):
    '''
    One frozen fixture under rc's model switches
    corrupt: group name whose analytic gradient gets perturbed, for testing the checker
    '''
    corpus = fixture_corpus()
    network = build_network(corpus, rc.get('relations'),
                            rc.get('min_shared_topic'))
    tables = influence.build_tables(network, corpus.citation_mass,
                                    rc.get('gravitational_constant'),
                                    rc.get('distance_source'))
    tc = TrainConfig.from_run_config(rc)
    rng = np.random.default_rng(FIXTURE_SEED)
    doc_matrix = None
    if tc.use_content:
        doc_matrix = rng.normal(size=(len(corpus.papers), FIXTURE_DIM_V))
    model = Model(network, tables, tc, corpus.paper_ids(), doc_matrix)
    params = model.init_params(rng)
    samples = model.encoder.draw_samples(rng)
    triples = list(FIXTURE_TRIPLES)
    reg_weight = tc.reg_weight

    _loss, analytic = model.loss_and_grads(params, samples, triples,
                                           reg_weight)
    if corrupt:
        for name in analytic:
            if param_group(name) == corrupt:
                analytic[name] = analytic[name] * 1.5 + 1e-3
    numeric = finite_difference_gradient(
        lambda: model.loss(params, samples, triples, reg_weight), params, eps)

    by_group = {}
    for name in sorted(params):
        by_group.setdefault(param_group(name), []).append(name)
    ret = []
    for group in GROUPS:
        names = by_group.get(group)
        if not names:
            continue
        rel = max(relative_error(analytic[n], numeric[n]) for n in names)
        diff = max(
            float(np.max(np.abs(analytic[n] - numeric[n]))) for n in names)
        ret.append(
            GroupResult(label, group, sum(params[n].size for n in names), rel,
                        diff, tolerance))
    return ret


def gradcheck(rc, corrupt=None):
    '''
    Configured model, plus an attention mode / trainable paper pass when the
    configured one leaves those groups out
    Returns [GroupResult]
    '''
    tolerance = rc.get('grad_tolerance')
    eps = rc.get('fd_eps')
    base = fixture_config(rc)
    ret = check_model(base, base.get('influence_mode'), tolerance, eps,
                      corrupt)
    if base.get('influence_mode') != ATTENTION or base.get('use_content'):
        extra = fixture_config(rc,
                               influence_mode=ATTENTION,
                               use_content=False)
        ret += check_model(extra, 'attention/no-content', tolerance, eps,
                           corrupt)
    return ret


def format_table(results):
    lines = [
        '%-24s %-10s %6s %12s  %s' % ('model', 'group', 'params', 'rel error',
                                      'result')
    ]
    for r in results:
        lines.append(r.row())
    worst = max(r.max_rel_error for r in results)
    lines.append('max relative error: %0.3e' % worst)
    return '\n'.join(lines)
