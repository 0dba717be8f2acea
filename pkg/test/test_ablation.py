import json
import os

import pytest

from conftest import small_run_config
from gravrec.ablation import (DEFAULT_VARIANTS, ORG_VARIANTS, VARIANTS,
                              AblationTable, run_ablation, variant_config)
from gravrec.corpus import generate_synthetic
from gravrec.evaluation import MetricsReport
from gravrec.util import UsageError


def test_variant_configs():
    rc = small_run_config()
    assert variant_config(rc, 'sn', 4).get('influence_mode') == 'uniform'
    assert variant_config(rc, 'att', 4).get('influence_mode') == 'attention'
    assert variant_config(rc, 'wo_ic', 4).get('use_interdependent') is False
    assert variant_config(rc, 'wo_cont', 4).get('use_content') is False
    full = variant_config(rc, 'full', 4)
    assert full.get('seed') == 4
    assert full.get('influence_mode') == 'gravity'
    for variant in ORG_VARIANTS:
        relations = variant_config(rc, variant, 1).get('relations')
        assert 'coorg' in relations
    assert variant_config(rc, '+org-col', 1).get('relations')[0] == 'coorg'
    with pytest.raises(UsageError):
        variant_config(rc, 'bogus', 1)
    assert set(DEFAULT_VARIANTS + ORG_VARIANTS) == set(VARIANTS)


def report(values):
    ret = MetricsReport([5])
    ret.values = values
    return ret


def test_table_means():
    table = AblationTable([5])
    table.add('full', 1, report({'ndcg@5': 0.5, 'precision@5': 0.2,
                                 'recall@5': 0.1}))
    table.add('full', 2, report({'ndcg@5': 0.7, 'precision@5': 0.4,
                                 'recall@5': 0.3}))
    table.reduce()
    assert table.mean('full', 'ndcg', 5) == pytest.approx(0.6)
    j = json.loads(table.dumps())
    assert j['runs']['full']['2']['recall@5'] == 0.3
    lines = table.text().splitlines()
    assert lines[1].split()[0] == 'full'


def test_run_ablation(tmp_path):
    corpus = generate_synthetic(3, 6, 3, 0.9, 1)
    lines = []
    table = run_ablation(corpus,
                         small_run_config(epochs=2),
                         variants=['full', 'sn', 'wo_cont'],
                         seeds=[1, 2],
                         ks=[5],
                         log=lines.append)
    assert sorted(table.means) == ['full', 'sn', 'wo_cont']
    for variant in table.means:
        assert sorted(table.runs[variant]) == [1, 2]
        assert 0.0 <= table.mean(variant, 'ndcg', 5) <= 1.0
    # Paper vectors trained once per seed
    assert len([l for l in lines if 'training paper vectors' in l]) == 2
    fn = str(tmp_path / 'ablation.png')
    table.plot(fn)
    assert os.path.getsize(fn) > 0


def test_run_ablation_rejects_unknown_variant_first():
    corpus = generate_synthetic(2, 3, 2, 0.9, 1)
    lines = []
    with pytest.raises(UsageError):
        run_ablation(corpus,
                     small_run_config(),
                     variants=['full', 'nope'],
                     seeds=[1],
                     log=lines.append)
    assert lines == []
