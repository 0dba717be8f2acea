'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-train: corpus => relation graphs => influence tables => paper vectors => BPR model checkpoint
'''

import argparse
import os

from gravrec import influence
from gravrec.benchmark import Benchmark
from gravrec.config import ConfigError, config, load_run_config
from gravrec.content import load_vectors
from gravrec.corpus import leave_one_out_split, load_corpus
from gravrec.hetnet import build_network
from gravrec.recommender import TrainConfig, train
from gravrec.util import GravrecError, add_bool_arg, fatal, logwt, split_overrides


def run(rc):
    '''Returns the ModelCheckpoint, also written to rc's checkpoint path'''
    # Fail on paths before any compute
    corpus_fn = rc.require_path('corpus')
    vectors_fn = None
    if rc.get('vectors') and rc.get('use_content'):
        vectors_fn = rc.require_path('vectors')
    ckpt_fn = rc.get('checkpoint')
    if not ckpt_fn:
        raise ConfigError('checkpoint path not set')

    bench = Benchmark()
    try:
        print('Loading corpus %s' % corpus_fn)
        corpus = load_corpus(corpus_fn)
        print('%u papers, %u scholars' %
              (len(corpus.papers), len(corpus.scholars)))
        bench.lap('corpus')
        network = build_network(corpus, rc.get('relations'),
                                rc.get('min_shared_topic'))
        for kind, n in network.summary().items():
            print('  %s: %u edges' % (kind, n))
        split = leave_one_out_split(corpus, rc.get('split_seed'))
        print('Split: %u test scholars, %u train pairs' %
              (len(split.scholars()), len(split.train_pairs())))
        tc = TrainConfig.from_run_config(rc)
        tables = influence.build_tables(network, corpus.citation_mass,
                                        tc.gravitational_constant,
                                        tc.distance_source)
        bench.lap('graphs')
        doc_vectors = None
        if vectors_fn:
            print('Loading paper vectors %s' % vectors_fn)
            with open(vectors_fn, encoding='utf-8') as f:
                doc_vectors = load_vectors(f, corpus)
            bench.lap('vectors')
        ckpt = train(corpus,
                     network,
                     split,
                     tc,
                     doc_vectors=doc_vectors,
                     tables=tables)
        bench.lap('train')
        print('Writing %s' % ckpt_fn)
        ckpt.save(ckpt_fn)
        return ckpt
    finally:
        bench.stop()
        print('Completed in %s' % bench)
        print('Stages: %s' % bench.laps_str())


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='train a scholar => paper recommender',
        epilog='Any config key can be overridden with --key value',
        allow_abbrev=False)
    parser.add_argument('-c', '--config', help='run config file')
    add_bool_arg(parser, '--log', default=True, help='log to a timestamped file')
    args, rest = parser.parse_known_args(argv)
    try:
        rc = load_run_config(args.config, split_overrides(rest))
        if args.log:
            _outlog, _errlog, _outdate, _errdate = logwt(
                os.path.join(config.log_dir(), 'train'), 'train.log')
        run(rc)
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
