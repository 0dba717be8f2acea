'''
Shared fixtures and corpus factories
'''
import os
import sys

import numpy as np
import pytest

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from gravrec.config import RunConfig
from gravrec.corpus import CorpusStore, PaperRecord
from gravrec.gradcheck import fixture_corpus


def make_paper(paper_id="p1",
               title="Test Paper",
               year=2020,
               authors=("s1", ),
               abstract=None,
               venue="KDD",
               keywords=(),
               references=(),
               orgs=None):
    return PaperRecord(paper_id,
                       title,
                       year,
                       list(authors),
                       abstract=abstract,
                       venue=venue,
                       keywords=list(keywords),
                       references=list(references),
                       author_orgs=orgs)


def make_corpus(*papers):
    return CorpusStore(list(papers))


def write_jsonl(path, lines):
    path.write_text(''.join(line + '\n' for line in lines), encoding='utf-8')
    return str(path)


def small_run_config(**kwargs):
    '''Fast settings for training in tests'''
    values = dict(epochs=3,
                  batch_size=64,
                  dim=8,
                  att_dim=8,
                  dim_v=8,
                  sample_sizes=[3, 3],
                  pv_epochs=2,
                  pv_min_count=1)
    values.update(kwargs)
    return RunConfig(values)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def two_paper_corpus():
    '''B cites A, A written by s1 alone'''
    return make_corpus(
        make_paper("A", authors=["s1"], year=2019),
        make_paper("B", authors=["s2"], year=2020, references=["A"]))


@pytest.fixture
def gradient_corpus():
    '''6 scholars, 4 papers, every relation has edges'''
    return fixture_corpus()


@pytest.fixture
def split_corpus():
    '''
    s1 has P1(2019, refs A, B) and P2(2021, refs B, C)
    Enough unrelated papers to draw negatives from
    '''
    papers = [
        make_paper("A", authors=["x1"], year=2010),
        make_paper("B", authors=["x2"], year=2011),
        make_paper("C", authors=["x3"], year=2012),
        make_paper("P1", authors=["s1"], year=2019, references=["A", "B"]),
        make_paper("P2", authors=["s1"], year=2021, references=["B", "C"]),
        make_paper("Q1", authors=["s2"], year=2020),
    ]
    for i in range(10):
        papers.append(make_paper("N%02u" % i, authors=["y%u" % i], year=2000))
    return make_corpus(*papers)
