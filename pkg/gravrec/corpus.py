'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Paper corpus: parse, index, citation mass, leave-one-out split, synthetic fixtures

Corpus file is one JSON object per line:
{"id": "p1", "title": "...", "abstract": "...", "year": 2020, "venue": "KDD",
 "keywords": ["a", "b"], "authors": [{"id": "s1", "name": "..", "org": ".."}],
 "references": ["p0"]}
'''

import json

import numpy as np

from .util import DataError, UsageError, warning


class ParseError(DataError):
    def __init__(self, lineno, s):
        DataError.__init__(self, 'line %u: %s' % (lineno, s))
        self.lineno = lineno


class DuplicateKey(DataError):
    pass


class InsufficientCandidates(DataError):
    pass


def debug(s=''):
    pass


class PaperRecord:
    def __init__(self,
                 paper_id,
                 title,
                 year,
                 author_ids,
                 abstract=None,
                 venue='',
                 keywords=None,
                 references=None,
                 author_names=None,
                 author_orgs=None):
        if not paper_id:
            raise ValueError('Empty paper id')
        if not author_ids:
            raise ValueError('Paper %s has no authors' % paper_id)
        self.paper_id = paper_id
        self.title = title
        self.abstract = abstract
        self.year = year
        self.venue = venue
        self.keywords = list(keywords or [])
        self.author_ids = list(author_ids)
        self.author_names = list(author_names or [''] * len(author_ids))
        # None where the record had no org
        self.author_orgs = list(author_orgs or [None] * len(author_ids))
        # Self citations are dropped, repeated ids collapse
        refs = []
        for ref in references or []:
            if ref != paper_id and ref not in refs:
                refs.append(ref)
        self.references = refs

    def text(self):
        '''Text fed to the paper content model'''
        if self.abstract:
            return self.title + ' ' + self.abstract
        return self.title

    def to_json(self):
        j = {
            "id": self.paper_id,
            "title": self.title,
        }
        if self.abstract is not None:
            j["abstract"] = self.abstract
        j["year"] = self.year
        j["venue"] = self.venue
        j["keywords"] = self.keywords
        authors = []
        for author_id, name, org in zip(self.author_ids, self.author_names,
                                        self.author_orgs):
            a = {"id": author_id, "name": name}
            if org is not None:
                a["org"] = org
            authors.append(a)
        j["authors"] = authors
        j["references"] = self.references
        return j

    @staticmethod
    def from_json(j):
        '''Raises ValueError on schema violations'''
        if not isinstance(j, dict):
            raise ValueError('record is not an object')
        for k in ('id', 'title', 'year', 'authors'):
            if k not in j:
                raise ValueError('missing "%s" field' % k)
        paper_id = j['id']
        if not isinstance(paper_id, str) or not paper_id:
            raise ValueError('"id" must be a non-empty string')
        if not isinstance(j['title'], str):
            raise ValueError('"title" must be a string')
        year = j['year']
        if isinstance(year, bool) or not isinstance(year, int):
            raise ValueError('"year" must be an integer')
        abstract = j.get('abstract')
        if abstract is not None and not isinstance(abstract, str):
            raise ValueError('"abstract" must be a string')
        venue = j.get('venue', '')
        if not isinstance(venue, str):
            raise ValueError('"venue" must be a string')
        keywords = j.get('keywords', [])
        if not isinstance(keywords, list) or not all(
                isinstance(k, str) for k in keywords):
            raise ValueError('"keywords" must be an array of strings')
        references = j.get('references', [])
        if not isinstance(references, list) or not all(
                isinstance(r, str) for r in references):
            raise ValueError('"references" must be an array of strings')
        authors = j['authors']
        if not isinstance(authors, list) or not authors:
            raise ValueError('"authors" must be a non-empty array')
        author_ids = []
        author_names = []
        author_orgs = []
        for a in authors:
            if not isinstance(a, dict) or not isinstance(
                    a.get('id'), str) or not a['id']:
                raise ValueError('author without a string "id"')
            # Same scholar listed twice on a paper counts once
            if a['id'] in author_ids:
                continue
            author_ids.append(a['id'])
            author_names.append(a.get('name', ''))
            author_orgs.append(a.get('org'))
        return PaperRecord(paper_id,
                           j['title'],
                           year,
                           author_ids,
                           abstract=abstract,
                           venue=venue,
                           keywords=keywords,
                           references=references,
                           author_names=author_names,
                           author_orgs=author_orgs)

    def __eq__(self, other):
        return isinstance(other, PaperRecord) and self.to_json(
        ) == other.to_json()

    def __repr__(self):
        return 'PaperRecord(%s, %u authors, %u refs)' % (
            self.paper_id, len(self.author_ids), len(self.references))


class CorpusStore:
    def __init__(self, papers=None):
        # paper_id => PaperRecord, file order
        self.papers = {}
        # scholar_id => [paper_id], first appearance order
        self.scholars = {}
        # scholar_id => in corpus citations received
        self.citation_mass = {}
        for paper in papers or []:
            self.add(paper)
        self.index()

    def add(self, paper):
        if paper.paper_id in self.papers:
            raise DuplicateKey('Duplicate paper id %s' % paper.paper_id)
        self.papers[paper.paper_id] = paper

    def index(self):
        '''Rebuild scholar index and citation mass from papers'''
        self.scholars = {}
        for paper in self.papers.values():
            for author_id in paper.author_ids:
                self.scholars.setdefault(author_id, []).append(paper.paper_id)
        self.citation_mass = dict((s, 0) for s in self.scholars)
        for paper in self.papers.values():
            for ref in paper.references:
                cited = self.papers.get(ref)
                # Out of corpus references carry no mass
                if cited is None:
                    continue
                for author_id in cited.author_ids:
                    self.citation_mass[author_id] += 1

    def in_corpus_references(self, paper_id):
        return [r for r in self.papers[paper_id].references if r in self.papers]

    def paper_ids(self):
        return list(self.papers.keys())

    def scholar_ids(self):
        return list(self.scholars.keys())

    def scholar_keywords(self, scholar_id):
        '''Case folded union of keywords over all authored papers'''
        ret = set()
        for paper_id in self.scholars[scholar_id]:
            for kw in self.papers[paper_id].keywords:
                kw = kw.strip().casefold()
                if kw:
                    ret.add(kw)
        return ret

    def scholar_venues(self, scholar_id):
        ret = set()
        for paper_id in self.scholars[scholar_id]:
            venue = self.papers[paper_id].venue.strip().casefold()
            if venue:
                ret.add(venue)
        return ret

    def scholar_orgs(self, scholar_id):
        ret = set()
        for paper_id in self.scholars[scholar_id]:
            paper = self.papers[paper_id]
            for author_id, org in zip(paper.author_ids, paper.author_orgs):
                if author_id == scholar_id and org:
                    org = org.strip().casefold()
                    if org:
                        ret.add(org)
        return ret

    def __eq__(self, other):
        return isinstance(
            other, CorpusStore) and list(self.papers.items()) == list(
                other.papers.items())

    def __repr__(self):
        return 'CorpusStore(%u papers, %u scholars)' % (len(
            self.papers), len(self.scholars))


def parse_jsonl(line_stream):
    '''
    Parse an iterable of text lines into a CorpusStore
    Blank lines are skipped, line numbers count from 1
    '''
    corpus = CorpusStore()
    for lineno, line in enumerate(line_stream, 1):
        if not line.strip():
            continue
        try:
            j = json.loads(line)
        except ValueError as e:
            raise ParseError(lineno, 'bad JSON: %s' % e)
        try:
            paper = PaperRecord.from_json(j)
        except ValueError as e:
            raise ParseError(lineno, str(e))
        if paper.paper_id in corpus.papers:
            raise DuplicateKey('line %u: duplicate paper id %s' %
                               (lineno, paper.paper_id))
        corpus.add(paper)
    corpus.index()
    debug('parsed %s' % (corpus, ))
    return corpus


def load_corpus(fn):
    with open(fn, encoding='utf-8') as f:
        return parse_jsonl(f)


def serialize_jsonl(corpus, fd):
    for paper in corpus.papers.values():
        fd.write(json.dumps(paper.to_json(), ensure_ascii=False) + '\n')


def save_corpus(corpus, fn):
    with open(fn, 'w', encoding='utf-8') as f:
        serialize_jsonl(corpus, f)


class SplitSpec:
    def __init__(self, train_positives=None, test_positives=None,
                 test_negatives=None):
        # scholar_id => set(paper_id)
        self.train_positives = train_positives or {}
        self.test_positives = test_positives or {}
        # scholar_id => [paper_id], draw order
        self.test_negatives = test_negatives or {}

    def scholars(self):
        return sorted(self.test_positives.keys())

    def positives(self, scholar_id):
        return self.train_positives.get(scholar_id, set()) | \
            self.test_positives.get(scholar_id, set())

    def candidates(self, scholar_id):
        '''Test candidate list: positives (sorted) then negatives'''
        return sorted(self.test_positives[scholar_id]) + list(
            self.test_negatives[scholar_id])

    def train_pairs(self):
        '''All (scholar, paper) training positives in a stable order'''
        ret = []
        for scholar_id in sorted(self.train_positives):
            for paper_id in sorted(self.train_positives[scholar_id]):
                ret.append((scholar_id, paper_id))
        return ret

    def __eq__(self, other):
        return isinstance(other, SplitSpec) and (
            self.train_positives == other.train_positives
            and self.test_positives == other.test_positives
            and self.test_negatives == other.test_negatives)

    def __repr__(self):
        return 'SplitSpec(%u scholars, %u train pairs)' % (len(
            self.test_positives), len(self.train_pairs()))


def latest_paper(corpus, paper_ids):
    '''Greatest year, ties go to the lexicographically greatest id'''
    return max(paper_ids, key=lambda p: (corpus.papers[p].year, p))


def leave_one_out_split(corpus, neg_seed, ratio=3):
    '''
    Positives are everything a scholar's papers cite (in corpus only)
    The latest paper's references are held out for test, the rest train
    Test negatives are ratio x positives, uniform over non-positives
    '''
    rng = np.random.default_rng(neg_seed)
    all_papers = corpus.paper_ids()
    split = SplitSpec()
    for scholar_id in sorted(corpus.scholars):
        bearing = [
            p for p in corpus.scholars[scholar_id]
            if corpus.in_corpus_references(p)
        ]
        if len(bearing) < 2:
            debug('%s: %u reference bearing papers, skip' %
                  (scholar_id, len(bearing)))
            continue
        latest = latest_paper(corpus, bearing)
        test = set(corpus.in_corpus_references(latest))
        train = set()
        for paper_id in bearing:
            if paper_id != latest:
                train.update(corpus.in_corpus_references(paper_id))
        # Overlap goes to test only
        train -= test
        positives = train | test
        candidates = [p for p in all_papers if p not in positives]
        need = ratio * len(test)
        if len(candidates) < need:
            raise InsufficientCandidates(
                '%s needs %u negatives but only %u candidates exist' %
                (scholar_id, need, len(candidates)))
        picks = rng.choice(len(candidates), size=need, replace=False)
        split.train_positives[scholar_id] = train
        split.test_positives[scholar_id] = test
        split.test_negatives[scholar_id] = [candidates[i] for i in picks]
    return split


GENERIC_WORDS = ('method', 'analysis', 'model', 'approach', 'results',
                 'framework', 'study', 'evaluation', 'data', 'system')


def random_words(rng, vocab, n):
    ret = []
    for _i in range(n):
        if rng.random() < 0.2:
            ret.append(GENERIC_WORDS[int(rng.integers(len(GENERIC_WORDS)))])
        else:
            ret.append(vocab[int(rng.integers(len(vocab)))])
    return ' '.join(ret)


def generate_synthetic(n_communities,
                       scholars_per,
                       papers_per_scholar,
                       intra_cite_prob,
                       seed,
                       refs_per_paper=5,
                       max_coauthors=2,
                       keywords_per_paper=4,
                       keyword_pool=12,
                       vocab_pool=30,
                       venues_per=2,
                       orgs_per=2):
    '''
    Planted community corpus
    Each community has its own keywords, title / abstract vocabulary, venues and orgs
    so co-topic / co-venue / co-org edges never cross communities
    '''
    for name, v in (('n_communities', n_communities),
                    ('scholars_per', scholars_per), ('papers_per_scholar',
                                                     papers_per_scholar)):
        if v < 1:
            raise UsageError('%s must be >= 1, got %s' % (name, v))
    if not 0.0 <= intra_cite_prob <= 1.0:
        raise UsageError('intra_cite_prob must be in [0, 1], got %s' %
                         intra_cite_prob)

    rng = np.random.default_rng(seed)
    papers = []
    # community => [paper_id]
    community_papers = []
    for c in range(n_communities):
        keywords = ['c%ukw%u' % (c, k) for k in range(keyword_pool)]
        vocab = ['topic%uterm%u' % (c, k) for k in range(vocab_pool)]
        venues = ['Venue C%u-%u' % (c, v) for v in range(venues_per)]
        orgs = ['Org C%u-%u' % (c, o) for o in range(orgs_per)]
        scholars = ['s%02u_%03u' % (c, i) for i in range(scholars_per)]
        scholar_org = dict(
            (s, orgs[int(rng.integers(len(orgs)))]) for s in scholars)
        this_papers = []
        for i, owner in enumerate(scholars):
            for j in range(papers_per_scholar):
                paper_id = 'p%02u_%03u_%02u' % (c, i, j)
                n_co = int(rng.integers(0, max_coauthors + 1))
                others = [s for s in scholars if s != owner]
                n_co = min(n_co, len(others))
                coauthors = []
                if n_co:
                    coauthors = [
                        others[k]
                        for k in rng.choice(len(others), n_co, replace=False)
                    ]
                authors = [owner] + coauthors
                kws = [
                    keywords[k] for k in rng.choice(
                        len(keywords), min(keywords_per_paper, len(keywords)),
                        replace=False)
                ]

                paper = PaperRecord(
                    paper_id,
                    random_words(rng, vocab, 8),
                    2010 + int(rng.integers(0, 12)),
                    authors,
                    abstract=random_words(rng, vocab, 30),
                    venue=venues[int(rng.integers(len(venues)))],
                    keywords=kws,
                    author_names=['Scholar %s' % a for a in authors],
                    author_orgs=[scholar_org[a] for a in authors])
                papers.append(paper)
                this_papers.append(paper_id)
        community_papers.append(this_papers)

    by_id = dict((p.paper_id, p) for p in papers)
    for c, this_papers in enumerate(community_papers):
        outside = [
            p for oc, ops in enumerate(community_papers) if oc != c
            for p in ops
        ]
        for paper_id in this_papers:
            refs = []
            for _draw in range(refs_per_paper):
                # Keep the draw count fixed so the stream doesn't depend on collisions
                intra = rng.random() < intra_cite_prob
                pool = this_papers if intra or not outside else outside
                ref = pool[int(rng.integers(len(pool)))]
                if ref != paper_id and ref not in refs:
                    refs.append(ref)
            by_id[paper_id].references = refs
    if not papers:
        warning('synthetic corpus is empty')
    return CorpusStore(papers)
