'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-ingest: parse a corpus and summarize what the model would see
'''

import argparse

from gravrec import influence
from gravrec.config import load_run_config
from gravrec.corpus import load_corpus
from gravrec.hetnet import build_network, dump_graphs
from gravrec.util import GravrecError, fatal, split_overrides, warning


def summarize(corpus, network):
    '''Deterministic "name: count" lines'''
    refs = sum(len(corpus.in_corpus_references(p)) for p in corpus.papers)
    lines = [
        'papers: %u' % len(corpus.papers),
        'scholars: %u' % len(corpus.scholars),
        'in corpus references: %u' % refs,
        'total citation mass: %u' % sum(corpus.citation_mass.values()),
    ]
    for kind, n in network.summary().items():
        lines.append('%s edges: %u' % (kind, n))
    return lines


def run(corpus_fn, rc, graphs_fn=None, influence_fn=None):
    '''Returns the summary lines after printing them'''
    corpus = load_corpus(corpus_fn)
    if not corpus.papers:
        warning('%s has no papers' % corpus_fn)
    network = build_network(corpus, rc.get('relations'),
                            rc.get('min_shared_topic'))
    lines = summarize(corpus, network)
    for line in lines:
        print(line)
    if graphs_fn:
        with open(graphs_fn, 'w', encoding='utf-8') as f:
            dump_graphs(network, f)
    if influence_fn:
        tables = influence.build_tables(network, corpus.citation_mass,
                                        rc.get('gravitational_constant'),
                                        rc.get('distance_source'))
        with open(influence_fn, 'w', encoding='utf-8') as f:
            influence.dump_tables(tables, f)
    return lines


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='parse a corpus and print paper / scholar / edge counts',
        epilog='Any config key can be overridden with --key value',
        allow_abbrev=False)
    parser.add_argument('-c', '--config', help='run config file')
    parser.add_argument('--dump-graphs', help='write every edge to this file')
    parser.add_argument('--dump-influence',
                        help='write g / M per directed edge to this file')
    args, rest = parser.parse_known_args(argv)
    try:
        rc = load_run_config(args.config, split_overrides(rest))
        run(rc.require_path('corpus'), rc, args.dump_graphs,
            args.dump_influence)
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
