'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Heterogeneous scholar network
Split into one undirected graph per relation kind over a shared scholar universe
'''

import numpy as np

from .util import DataError, UsageError

COLLABORATION = 'collaboration'
COTOPIC = 'cotopic'
COVENUE = 'covenue'
COORG = 'coorg'
RELATION_KINDS = (COLLABORATION, COTOPIC, COVENUE, COORG)
DEFAULT_RELATIONS = (COLLABORATION, COTOPIC, COVENUE)
# "at least three identical keywords"
DEFAULT_MIN_SHARED_TOPIC = 3


class UnknownNode(DataError, KeyError):
    def __str__(self):
        return DataError.__str__(self)


def canonical_pair(a, b):
    if a < b:
        return (a, b)
    return (b, a)


class RelationGraph:
    def __init__(self, kind, nodes, edges=None):
        if kind not in RELATION_KINDS:
            raise UsageError('Unknown relation kind %s' % kind)
        self.kind = kind
        # Universe order, isolated nodes included
        self.nodes = list(nodes)
        self.node_index = dict((node, i) for i, node in enumerate(self.nodes))
        # canonical (a, b) => co-occurrence count
        self.edges = {}
        self.adjacency = dict((node, set()) for node in self.nodes)
        for (a, b), w in (edges or {}).items():
            self.add_edge(a, b, w)
        self._ordered = {}

    def add_edge(self, a, b, w):
        if a == b:
            raise ValueError('Self loop on %s' % a)
        if w < 1:
            raise ValueError('Edge %s-%s weight %s < 1' % (a, b, w))
        for node in (a, b):
            if node not in self.adjacency:
                raise UnknownNode(node)
        self.edges[canonical_pair(a, b)] = int(w)
        self.adjacency[a].add(b)
        self.adjacency[b].add(a)
        self._ordered = {}

    def weight(self, a, b):
        return self.edges.get(canonical_pair(a, b))

    def neighbors(self, node):
        try:
            return self.adjacency[node]
        except KeyError:
            raise UnknownNode('%s not in %s graph' % (node, self.kind))

    def ordered_neighbors(self, node):
        '''Neighbors sorted by universe position'''
        ret = self._ordered.get(node)
        if ret is None:
            ret = sorted(self.neighbors(node),
                         key=lambda n: self.node_index[n])
            self._ordered[node] = ret
        return ret

    def degree(self, node):
        return len(self.neighbors(node))

    def n_edges(self):
        return len(self.edges)

    def csr(self):
        '''
        Integer adjacency in universe order
        Returns (indptr, indices): neighbors of node i are indices[indptr[i]:indptr[i + 1]]
        Directed edge e = indptr[i] + position runs i => indices[e]
        '''
        indptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
        indices = []
        for i, node in enumerate(self.nodes):
            nbrs = self.ordered_neighbors(node)
            indices.extend(self.node_index[n] for n in nbrs)
            indptr[i + 1] = indptr[i] + len(nbrs)
        return indptr, np.array(indices, dtype=np.int64)

    def __repr__(self):
        return 'RelationGraph(%s, %u nodes, %u edges)' % (
            self.kind, len(self.nodes), len(self.edges))


def neighbors(graph, node):
    return graph.neighbors(node)


def sample_positions(degree, s, rng):
    '''Positions into a degree long neighbor list, all of them if degree <= s'''
    if s < 1:
        raise UsageError('sample size must be >= 1, got %s' % s)
    if degree <= s:
        return np.arange(degree, dtype=np.int64)
    return rng.choice(degree, size=s, replace=False).astype(np.int64)


def sample_neighbors(graph, node, s, rng):
    '''
    Fixed size uniform sample without replacement
    rng is a numpy Generator, same state => same sample
    '''
    nbrs = graph.ordered_neighbors(node)
    return [nbrs[i] for i in sample_positions(len(nbrs), s, rng)]


def shared_attribute_edges(attrs_by_scholar, min_shared):
    '''
    attrs_by_scholar: scholar => set of attribute values
    Returns canonical pair => number of distinct shared values, min_shared and up
    '''
    inverted = {}
    for scholar, attrs in attrs_by_scholar.items():
        for attr in attrs:
            inverted.setdefault(attr, []).append(scholar)
    counts = {}
    for attr in sorted(inverted):
        scholars = inverted[attr]
        for x in range(len(scholars)):
            for y in range(x + 1, len(scholars)):
                pair = canonical_pair(scholars[x], scholars[y])
                counts[pair] = counts.get(pair, 0) + 1
    return dict((pair, w) for pair, w in counts.items() if w >= min_shared)


def extract_relation(corpus, kind, min_shared=None):
    if min_shared is None:
        min_shared = DEFAULT_MIN_SHARED_TOPIC if kind == COTOPIC else 1
    if min_shared < 1:
        raise UsageError('min_shared must be >= 1, got %s' % min_shared)
    scholars = corpus.scholar_ids()
    if kind == COLLABORATION:
        counts = {}
        for paper in corpus.papers.values():
            authors = paper.author_ids
            for x in range(len(authors)):
                for y in range(x + 1, len(authors)):
                    pair = canonical_pair(authors[x], authors[y])
                    counts[pair] = counts.get(pair, 0) + 1
        edges = dict(
            (pair, w) for pair, w in counts.items() if w >= min_shared)
    elif kind == COTOPIC:
        edges = shared_attribute_edges(
            dict((s, corpus.scholar_keywords(s)) for s in scholars),
            min_shared)
    elif kind == COVENUE:
        edges = shared_attribute_edges(
            dict((s, corpus.scholar_venues(s)) for s in scholars), min_shared)
    elif kind == COORG:
        edges = shared_attribute_edges(
            dict((s, corpus.scholar_orgs(s)) for s in scholars), min_shared)
    else:
        raise UsageError('Unknown relation kind %s' % kind)
    return RelationGraph(kind, scholars, edges)


class HeterogeneousNetwork:
    def __init__(self, graphs):
        if len(graphs) < 2:
            raise UsageError(
                'Heterogeneous network needs >= 2 relation graphs, got %u' %
                len(graphs))
        self.graphs = list(graphs)
        self.nodes = list(self.graphs[0].nodes)
        for graph in self.graphs[1:]:
            if graph.nodes != self.nodes:
                raise DataError('%s graph has a different node universe' %
                                graph.kind)
        self.node_index = dict((node, i) for i, node in enumerate(self.nodes))

    @property
    def k(self):
        return len(self.graphs)

    def kinds(self):
        return [g.kind for g in self.graphs]

    def graph(self, kind):
        for g in self.graphs:
            if g.kind == kind:
                return g
        raise KeyError(kind)

    def summary(self):
        return dict((g.kind, g.n_edges()) for g in self.graphs)


def build_network(corpus, relations=DEFAULT_RELATIONS,
                  min_shared_topic=DEFAULT_MIN_SHARED_TOPIC):
    graphs = []
    for kind in relations:
        min_shared = min_shared_topic if kind == COTOPIC else 1
        graphs.append(extract_relation(corpus, kind, min_shared))
    return HeterogeneousNetwork(graphs)


def dump_graphs(network, fd):
    '''"<kind> <scholar_a> <scholar_b> <co_occurrence>" per edge, sorted'''
    lines = []
    for graph in network.graphs:
        for (a, b), w in graph.edges.items():
            lines.append('%s %s %s %u' % (graph.kind, a, b, w))
    for line in sorted(lines):
        fd.write(line + '\n')
