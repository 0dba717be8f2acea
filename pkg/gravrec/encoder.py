'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Multi-channel scholar encoder

Independent channels: one sample-and-aggregate stack per relation graph, own weights
Interdependent channel: one weight stack shared by every relation graph, outputs averaged
Fusion: per scholar softmax attention over the channel outputs

Aggregation for scholar i over sampled neighbors SN_i, all neighbors AN_i:
    agg_i = relu(1 / |SN_i| * sum_j M_ij / (sqrt(|AN_i|) sqrt(|AN_j|)) * u_j)
    u_i' = relu(W * concat(u_i, agg_i))
M_ij comes from the gravity table, is 1 (uniform) or is learned edge attention

Parameters live in one flat dict name => array so the optimizer, regularizer,
checkpoint and gradient check treat them alike:
    ind.<kind>.x            n x d input features of an independent channel
    ind.<kind>.w<l>         d x 2d layer weights
    ind.<kind>.p<l> / a<l>  attention mode edge parameters, d x d and 2d
    ic.x, ic.w<l>, ic.p<l>, ic.a<l>   same for the shared channel
    att.w, att.b, att.q     fusion attention
Forward passes return a cache that backward() turns into gradients of the same names
'''

import math

import numpy as np

from .hetnet import sample_neighbors, sample_positions
from .numkernel import DimensionError, check_shape, leaky_relu, relu, softmax_rows, softmax_vec, xavier_init
from .util import DataError, UsageError

GRAVITY = 'gravity'
UNIFORM = 'uniform'
ATTENTION = 'attention'


class InconsistentGraphs(DataError):
    pass


class EncoderConfig:
    def __init__(self,
                 layers=2,
                 sample_sizes=None,
                 dim=64,
                 att_dim=64,
                 influence_mode=GRAVITY,
                 use_interdependent=True,
                 leaky_slope=0.2):
        if sample_sizes is None:
            sample_sizes = [10] * layers
        self.layers = layers
        self.sample_sizes = list(sample_sizes)
        self.dim = dim
        self.att_dim = att_dim
        self.influence_mode = influence_mode
        self.use_interdependent = use_interdependent
        self.leaky_slope = leaky_slope
        self.validate()

    def validate(self):
        if self.layers < 1:
            raise UsageError('layers must be >= 1')
        if len(self.sample_sizes) != self.layers:
            raise UsageError('need %u sample sizes, got %u' %
                             (self.layers, len(self.sample_sizes)))
        if self.dim < 1 or self.att_dim < 1:
            raise UsageError('dims must be >= 1')
        if self.influence_mode not in (GRAVITY, UNIFORM, ATTENTION):
            raise UsageError('Unknown influence mode %s' %
                             self.influence_mode)

    @staticmethod
    def from_run_config(rc):
        return EncoderConfig(layers=rc.get('layers'),
                             sample_sizes=rc.get('sample_sizes'),
                             dim=rc.get('dim'),
                             att_dim=rc.get('att_dim'),
                             influence_mode=rc.get('influence_mode'),
                             use_interdependent=rc.get('use_interdependent'),
                             leaky_slope=rc.get('leaky_slope'))


class ChannelParams:
    '''One channel's view into the param dict'''
    def __init__(self, x, ws, edge=None):
        self.x = x
        self.ws = list(ws)
        # [(P, a)] per layer, attention mode only
        self.edge = edge

    @staticmethod
    def from_params(params, prefix, layers, with_edge):
        ws = [params['%s.w%u' % (prefix, l)] for l in range(layers)]
        edge = None
        if with_edge:
            edge = [(params['%s.p%u' % (prefix, l)],
                     params['%s.a%u' % (prefix, l)]) for l in range(layers)]
        return ChannelParams(params['%s.x' % prefix], ws, edge)


class AttentionParams:
    def __init__(self, w, b, q):
        self.w = w
        self.b = b
        self.q = q

    @staticmethod
    def from_params(params):
        return AttentionParams(params['att.w'], params['att.b'],
                               params['att.q'])


class ScholarEmbeddings:
    def __init__(self, independent, interdependent_parts, interdependent,
                 fused, alphas, kinds):
        # [U^r] per relation graph
        self.independent = independent
        # [U'^r], empty without the interdependent channel
        self.interdependent_parts = interdependent_parts
        # U' or None
        self.interdependent = interdependent
        # U
        self.fused = fused
        # n x channels, columns follow kinds then the interdependent channel
        self.alphas = alphas
        self.kinds = kinds

    def alpha(self, kind):
        return self.alphas[:, self.kinds.index(kind)]

    def alpha_interdependent(self):
        if self.interdependent is None:
            return None
        return self.alphas[:, -1]


class GraphArrays:
    '''Integer view of one relation graph plus per edge constants'''
    def __init__(self, graph, table=None):
        if table is not None and table.graph is not graph:
            raise InconsistentGraphs('influence table %s is for another graph'
                                     % table.kind)
        self.kind = graph.kind
        self.nodes = graph.nodes
        self.n = len(graph.nodes)
        self.indptr, self.indices = graph.csr()
        self.deg = np.diff(self.indptr)
        self.src = np.repeat(np.arange(self.n, dtype=np.int64), self.deg)
        self.n_edges = len(self.indices)
        # 1 / (sqrt(|AN_i|) sqrt(|AN_j|))
        self.norm = 1.0 / np.sqrt(
            (self.deg[self.src] * self.deg[self.indices]).astype(np.float64))
        if table is not None:
            self.gravity = table.edge_coefficients()
        else:
            self.gravity = None


def sample_edges(garr, s, rng):
    '''
    Sampled directed edge ids, node by node in universe order
    Consumes rng exactly like sample_neighbors() called per node
    '''
    eids = []
    for i in range(garr.n):
        deg = int(garr.deg[i])
        if not deg:
            continue
        eids.append(garr.indptr[i] + sample_positions(deg, s, rng))
    if not eids:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(eids)


def _edge_attention(garr, H, P, a, slope):
    '''Softmax over each node's full neighbor set of leaky(a . [P h_i, P h_j])'''
    d = H.shape[1]
    PH = H @ P.T
    src = garr.src
    dst = garr.indices
    s = PH[src] @ a[:d] + PH[dst] @ a[d:]
    e = leaky_relu(s, slope)
    mx = np.full(garr.n, -np.inf)
    np.maximum.at(mx, src, e)
    ex = np.exp(e - mx[src])
    sums = np.zeros(garr.n)
    np.add.at(sums, src, ex)
    M = ex / sums[src]
    return M, (PH, s, M)


def _edge_attention_backward(garr, H, P, a, slope, att_cache, dM):
    d = H.shape[1]
    PH, s, M = att_cache
    src = garr.src
    dst = garr.indices
    dot = np.zeros(garr.n)
    np.add.at(dot, src, M * dM)
    de = M * (dM - dot[src])
    ds = de * np.where(s > 0, 1.0, slope)
    da = np.concatenate([ds @ PH[src], ds @ PH[dst]])
    dPH = np.zeros_like(PH)
    np.add.at(dPH, src, ds[:, None] * a[None, :d])
    np.add.at(dPH, dst, ds[:, None] * a[None, d:])
    dP = dPH.T @ H
    dH = dPH @ P
    return dH, dP, da


def _layer_forward(garr, H, W, eids, mode, edge=None, slope=0.2):
    n, d = H.shape
    if n != garr.n:
        raise DimensionError('%u rows for a %u node graph' % (n, garr.n))
    check_shape('layer weight', W, (d, 2 * d))
    src = garr.src[eids]
    dst = garr.indices[eids]
    counts = np.bincount(src, minlength=n).astype(np.float64)
    att_cache = None
    if mode == GRAVITY:
        M = garr.gravity[eids]
    elif mode == UNIFORM:
        M = np.ones(len(eids))
    elif mode == ATTENTION:
        M_full, att_cache = _edge_attention(garr, H, edge[0], edge[1], slope)
        M = M_full[eids]
    else:
        raise UsageError('Unknown influence mode %s' % mode)
    # Everything but M, which attention mode differentiates through
    scale = garr.norm[eids] / counts[src]
    coef = M * scale
    pre_agg = np.zeros((n, d))
    np.add.at(pre_agg, src, coef[:, None] * H[dst])
    agg = relu(pre_agg)
    Z = np.concatenate([H, agg], axis=1)
    pre = Z @ W.T
    out = relu(pre)
    cache = (garr, H, W, eids, mode, edge, slope, src, dst, scale, coef,
             pre_agg, Z, pre, att_cache)
    return out, cache


def _layer_backward(cache, dout):
    (garr, H, W, eids, mode, edge, slope, src, dst, scale, coef, pre_agg, Z,
     pre, att_cache) = cache
    d = H.shape[1]
    dpre = dout * (pre > 0)
    dW = dpre.T @ Z
    dZ = dpre @ W
    dH = dZ[:, :d].copy()
    dpre_agg = dZ[:, d:] * (pre_agg > 0)
    np.add.at(dH, dst, coef[:, None] * dpre_agg[src])
    dedge = None
    if mode == ATTENTION:
        dcoef = np.sum(dpre_agg[src] * H[dst], axis=1)
        dM = np.zeros(garr.n_edges)
        np.add.at(dM, eids, dcoef * scale)
        dH_att, dP, da = _edge_attention_backward(garr, H, edge[0], edge[1],
                                                  slope, att_cache, dM)
        dH += dH_att
        dedge = (dP, da)
    return dH, dW, dedge


def _channel_forward(garr, cp, eids_per_layer, mode, slope):
    H = cp.x
    caches = []
    for l, eids in enumerate(eids_per_layer):
        edge = cp.edge[l] if cp.edge is not None else None
        H, cache = _layer_forward(garr, H, cp.ws[l], eids, mode, edge, slope)
        caches.append(cache)
    return H, caches


def _channel_backward(caches, dout):
    '''Returns (dx, [dW], [(dP, da)] or None)'''
    dws = [None] * len(caches)
    dedges = [None] * len(caches)
    dH = dout
    for l in range(len(caches) - 1, -1, -1):
        dH, dws[l], dedges[l] = _layer_backward(caches[l], dH)
    if dedges[0] is None:
        dedges = None
    return dH, dws, dedges


def _fuse_forward(chans, att):
    S = np.stack(chans)
    T = np.tanh(S @ att.w.T + att.b)
    omega = (T @ att.q).T
    alphas = softmax_rows(omega)
    U = np.einsum('nc,cnd->nd', alphas, S)
    return U, alphas, (S, T, alphas, att)


def _fuse_backward(cache, dU):
    S, T, alphas, att = cache
    dalpha = np.einsum('nd,cnd->nc', dU, S)
    dS = np.einsum('nc,nd->cnd', alphas, dU)
    domega = alphas * (dalpha - np.sum(alphas * dalpha, axis=1,
                                       keepdims=True))
    domega = domega.T
    dq = np.einsum('cn,cnk->k', domega, T)
    dpre = domega[:, :, None] * att.q[None, None, :] * (1.0 - T**2)
    dw = np.einsum('cnk,cnd->kd', dpre, S)
    db = dpre.sum(axis=(0, 1))
    dS += dpre @ att.w
    return list(dS), dw, db, dq


class Encoder:
    def __init__(self, network, tables, config):
        if config.influence_mode == GRAVITY and tables is None:
            raise UsageError('gravity mode needs influence tables')
        if tables is None:
            tables = [None] * network.k
        if len(tables) != network.k:
            raise InconsistentGraphs('%u tables for %u graphs' %
                                     (len(tables), network.k))
        self.config = config
        self.kinds = network.kinds()
        self.nodes = network.nodes
        self.n = len(network.nodes)
        self.graphs = [
            GraphArrays(g, t) for g, t in zip(network.graphs, tables)
        ]

    def channel_prefixes(self):
        ret = ['ind.%s' % kind for kind in self.kinds]
        if self.config.use_interdependent:
            ret.append('ic')
        return ret

    def init_params(self, rng):
        '''Xavier weights, zero biases, creation order fixed'''
        c = self.config
        d = c.dim
        params = {}
        for prefix in self.channel_prefixes():
            params['%s.x' % prefix] = xavier_init(self.n, d, rng)
            for l in range(c.layers):
                params['%s.w%u' % (prefix, l)] = xavier_init(d, 2 * d, rng)
                if c.influence_mode == ATTENTION:
                    params['%s.p%u' % (prefix, l)] = xavier_init(d, d, rng)
                    params['%s.a%u' % (prefix, l)] = xavier_init(
                        1, 2 * d, rng).reshape(2 * d)
        params['att.w'] = xavier_init(c.att_dim, d, rng)
        params['att.b'] = np.zeros(c.att_dim)
        params['att.q'] = xavier_init(1, c.att_dim, rng).reshape(c.att_dim)
        return params

    def draw_samples(self, rng):
        '''
        (channel prefix, graph index) => [edge ids per layer]
        Order: independent channels, then the shared channel once per graph
        '''
        samples = {}
        for r, garr in enumerate(self.graphs):
            samples[('ind.%s' % self.kinds[r], r)] = [
                sample_edges(garr, s, rng) for s in self.config.sample_sizes
            ]
        if self.config.use_interdependent:
            for r, garr in enumerate(self.graphs):
                samples[('ic', r)] = [
                    sample_edges(garr, s, rng)
                    for s in self.config.sample_sizes
                ]
        return samples

    def forward(self, params, samples):
        c = self.config
        with_edge = c.influence_mode == ATTENTION
        independent = []
        caches = {}
        for r, garr in enumerate(self.graphs):
            prefix = 'ind.%s' % self.kinds[r]
            cp = ChannelParams.from_params(params, prefix, c.layers,
                                           with_edge)
            out, caches[(prefix, r)] = _channel_forward(
                garr, cp, samples[(prefix, r)], c.influence_mode,
                c.leaky_slope)
            independent.append(out)
        parts = []
        interdependent = None
        chans = list(independent)
        if c.use_interdependent:
            cp = ChannelParams.from_params(params, 'ic', c.layers, with_edge)
            for r, garr in enumerate(self.graphs):
                out, caches[('ic', r)] = _channel_forward(
                    garr, cp, samples[('ic', r)], c.influence_mode,
                    c.leaky_slope)
                parts.append(out)
            interdependent = sum(parts) / len(parts)
            chans.append(interdependent)
        fused, alphas, caches['fuse'] = _fuse_forward(
            chans, AttentionParams.from_params(params))
        emb = ScholarEmbeddings(independent, parts, interdependent, fused,
                                alphas, self.kinds)
        return emb, caches

    def backward(self, caches, dU):
        '''Gradients of a loss w.r.t. every encoder param given dLoss/dU'''
        grads = {}
        dchans, grads['att.w'], grads['att.b'], grads['att.q'] = _fuse_backward(
            caches['fuse'], dU)
        for r in range(len(self.graphs)):
            prefix = 'ind.%s' % self.kinds[r]
            dx, dws, dedges = _channel_backward(caches[(prefix, r)],
                                                dchans[r])
            self._add_channel_grads(grads, prefix, dx, dws, dedges)
        if self.config.use_interdependent:
            k = len(self.graphs)
            dmean = dchans[-1] / k
            for r in range(k):
                dx, dws, dedges = _channel_backward(caches[('ic', r)], dmean)
                self._add_channel_grads(grads, 'ic', dx, dws, dedges)
        return grads

    @staticmethod
    def _add_channel_grads(grads, prefix, dx, dws, dedges):
        def add(name, g):
            if name in grads:
                grads[name] = grads[name] + g
            else:
                grads[name] = g

        add('%s.x' % prefix, dx)
        for l, dw in enumerate(dws):
            add('%s.w%u' % (prefix, l), dw)
        if dedges is not None:
            for l, (dP, da) in enumerate(dedges):
                add('%s.p%u' % (prefix, l), dP)
                add('%s.a%u' % (prefix, l), da)


def aggregate(l,
              node,
              graph,
              table,
              prev,
              sample_sizes,
              rng,
              mode=GRAVITY,
              edge=None,
              slope=0.2):
    '''
    Single scholar aggregation, prev rows follow graph.nodes
    Isolated scholars aggregate to zero
    '''
    sampled = sample_neighbors(graph, node, sample_sizes[l], rng)
    out = np.zeros(prev.shape[1])
    if not sampled:
        return out
    i = graph.node_index[node]
    deg_i = graph.degree(node)
    if mode == ATTENTION:
        P, a = edge
        d = prev.shape[1]
        nbrs = graph.ordered_neighbors(node)
        PH_i = P @ prev[i]
        e = [
            leaky_relu(
                np.array(a[:d] @ PH_i + a[d:] @ (P @ prev[graph.node_index[j]])),
                slope) for j in nbrs
        ]
        att = dict(zip(nbrs, softmax_vec(np.array(e, dtype=np.float64))))
    for j in sampled:
        if mode == GRAVITY:
            M = table.M[(node, j)]
        elif mode == UNIFORM:
            M = 1.0
        elif mode == ATTENTION:
            M = att[j]
        else:
            raise UsageError('Unknown influence mode %s' % mode)
        coef = M / (len(sampled) * math.sqrt(deg_i) *
                    math.sqrt(graph.degree(j)))
        out = out + coef * prev[graph.node_index[j]]
    return relu(out)


def layer_forward(l, W, graph, table, prev, rng, config, edge=None):
    garr = GraphArrays(graph, table)
    eids = sample_edges(garr, config.sample_sizes[l], rng)
    out, _cache = _layer_forward(garr, prev, W, eids, config.influence_mode,
                                 edge, config.leaky_slope)
    return out


def channel_forward(graph, cp, table, config, rng):
    '''Stack of config.layers layer_forward() applications, returns U^r'''
    H = cp.x
    for l in range(config.layers):
        edge = cp.edge[l] if cp.edge is not None else None
        H = layer_forward(l, cp.ws[l], graph, table, H, rng, config, edge)
    return H


def interdependent_forward(graphs, cp, tables, config, rng):
    '''Shared weights over every graph, U' = mean of the per graph outputs'''
    if not graphs:
        raise UsageError('need at least one graph')
    for graph in graphs[1:]:
        if graph.nodes != graphs[0].nodes:
            raise InconsistentGraphs('%s graph has a different node universe'
                                     % graph.kind)
    parts = [
        channel_forward(graph, cp, table, config, rng)
        for graph, table in zip(graphs, tables)
    ]
    return sum(parts) / len(parts), parts


def attention_fuse(independent, interdependent, att, use_interdependent=True):
    '''Returns (U, alphas) with alphas n x channels'''
    chans = list(independent)
    if use_interdependent:
        chans.append(interdependent)
    shape = chans[0].shape
    for chan in chans[1:]:
        if chan.shape != shape:
            raise DimensionError('channel shapes %s vs %s' %
                                 (shape, chan.shape))
    U, alphas, _cache = _fuse_forward(chans, att)
    return U, alphas


def encode(network, tables, params, config, rng):
    encoder = Encoder(network, tables, config)
    emb, _caches = encoder.forward(params, encoder.draw_samples(rng))
    return emb
