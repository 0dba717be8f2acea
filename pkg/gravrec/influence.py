'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Gravity based academic influence between neighboring scholars

F_ij = G * m_i * m_j / r_ij^2 with mass = in corpus citations and distance = 1 / interaction count
g_ij = F_ij / m_i = G * m_j / r_ij^2 is how much j pulls on i, so g is asymmetric
M_ij = softmax of g_ij over all of i's neighbors
'''

import math

import numpy as np

from .hetnet import COLLABORATION
from .numkernel import softmax_vec
from .util import DataError, NumericError, UsageError

DISTANCE_RELATION = 'relation'
DISTANCE_COLLABORATION = 'collaboration'


class MissingEdge(DataError, KeyError):
    def __str__(self):
        return DataError.__str__(self)


class DomainError(NumericError):
    pass


def academic_distance(graph, i, j):
    '''Reciprocal of the edge's co-occurrence count'''
    w = graph.weight(i, j)
    if w is None:
        raise MissingEdge('No %s edge %s-%s' % (graph.kind, i, j))
    return 1.0 / w


def gravity_force(mass_i, mass_j, r_ij, G=1.0):
    if not r_ij > 0:
        raise DomainError('distance must be > 0, got %s' % (r_ij, ))
    return G * mass_i * mass_j / r_ij**2


def influence_factor(mass_j, r_ij, G=1.0):
    if not r_ij > 0:
        raise DomainError('distance must be > 0, got %s' % (r_ij, ))
    if math.isinf(r_ij):
        return 0.0
    return G * mass_j / r_ij**2


def influence_row(gs):
    '''
    Softmax of one row of g
    Far below the row max exp underflows to 0, those entries are floored at the
    smallest positive float so every neighbor keeps M > 0
    '''
    M = softmax_vec(np.array(gs, dtype=np.float64))
    M = np.maximum(M, np.finfo(np.float64).tiny)
    return M / M.sum()


class InfluenceTable:
    def __init__(self, graph, G=1.0):
        self.graph = graph
        self.kind = graph.kind
        self.gravitational_constant = G
        # (i, j) => g_ij, both orientations of every edge
        self.g = {}
        # (i, j) => M_ij, rows sum to 1
        self.M = {}

    def row(self, i):
        '''(neighbors, M values) in universe order'''
        nbrs = self.graph.ordered_neighbors(i)
        return nbrs, [self.M[(i, j)] for j in nbrs]

    def edge_coefficients(self):
        '''M per directed edge, aligned with graph.csr()'''
        ret = []
        for i in self.graph.nodes:
            for j in self.graph.ordered_neighbors(i):
                ret.append(self.M[(i, j)])
        return np.array(ret, dtype=np.float64)

    def __repr__(self):
        return 'InfluenceTable(%s, %u directed edges, G=%g)' % (
            self.kind, len(self.g), self.gravitational_constant)


def build_table(graph,
                citation_mass,
                G=1.0,
                distance_source=DISTANCE_RELATION,
                collaboration=None):
    '''
    distance_source
    -relation: r from this graph's own co-occurrence weight
    -collaboration: r from the collaboration count everywhere, infinite (g = 0) for non collaborators
    '''
    if not G > 0:
        raise UsageError('gravitational constant must be > 0, got %s' % G)
    if distance_source == DISTANCE_COLLABORATION:
        if collaboration is None:
            if graph.kind != COLLABORATION:
                raise UsageError(
                    'collaboration distance needs the collaboration graph')
            collaboration = graph
    elif distance_source != DISTANCE_RELATION:
        raise UsageError('Unknown distance source %s' % distance_source)

    table = InfluenceTable(graph, G)
    for i in graph.nodes:
        nbrs = graph.ordered_neighbors(i)
        if not nbrs:
            continue
        gs = []
        for j in nbrs:
            if distance_source == DISTANCE_RELATION:
                r = academic_distance(graph, i, j)
            else:
                w = collaboration.weight(i, j)
                r = 1.0 / w if w else math.inf
            g = influence_factor(citation_mass[j], r, G)
            table.g[(i, j)] = g
            gs.append(g)
        for j, m in zip(nbrs, influence_row(gs)):
            table.M[(i, j)] = float(m)
    return table


def build_tables(network,
                 citation_mass,
                 G=1.0,
                 distance_source=DISTANCE_RELATION):
    collaboration = None
    if distance_source == DISTANCE_COLLABORATION:
        try:
            collaboration = network.graph(COLLABORATION)
        except KeyError:
            raise UsageError(
                'distance_source = collaboration needs the collaboration relation'
            )
    return [
        build_table(graph, citation_mass, G, distance_source, collaboration)
        for graph in network.graphs
    ]


def dump_tables(tables, fd):
    '''"<kind> <i> <j> <g_ij> <M_ij>" per directed edge, sorted'''
    lines = []
    for table in tables:
        for (i, j), g in table.g.items():
            lines.append('%s %s %s %r %r' % (table.kind, i, j, g, table.M[
                (i, j)]))
    for line in sorted(lines):
        fd.write(line + '\n')
