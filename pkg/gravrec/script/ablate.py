'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-ablate: train + evaluate model variants over several seeds
'''

import argparse
import os

from gravrec.ablation import DEFAULT_VARIANTS, ORG_VARIANTS, run_ablation
from gravrec.benchmark import Benchmark
from gravrec.config import config, load_run_config
from gravrec.corpus import load_corpus
from gravrec.util import GravrecError, UsageError, add_bool_arg, fatal, logwt, split_overrides


def parse_seeds(s):
    try:
        ret = [int(x) for x in s.split(',') if x.strip()]
    except ValueError:
        raise UsageError('Bad seed list %r' % s)
    if not ret:
        raise UsageError('Empty seed list')
    return ret


def run(rc,
        variants=DEFAULT_VARIANTS,
        seeds=(1, 2, 3),
        out_fn=None,
        plot_fn=None,
        workers=1):
    corpus = load_corpus(rc.require_path('corpus'))
    bench = Benchmark()
    try:
        table = run_ablation(corpus, rc, variants, seeds, workers=workers)
        print(table.text())
        if out_fn:
            with open(out_fn, 'w', encoding='utf-8') as f:
                f.write(table.dumps())
        if plot_fn:
            table.plot(plot_fn)
        return table
    finally:
        bench.stop()
        print('Completed in %s' % bench)


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='ablation sweep over model variants',
        epilog='Any config key can be overridden with --key value',
        allow_abbrev=False)
    parser.add_argument('-c', '--config', help='run config file')
    parser.add_argument('--variants',
                        default=','.join(DEFAULT_VARIANTS),
                        help='comma separated, from %s' %
                        ', '.join(DEFAULT_VARIANTS + ORG_VARIANTS))
    add_bool_arg(parser,
                 '--org',
                 default=False,
                 help='also run the co-organization variants')
    parser.add_argument('--seeds', default='1,2,3')
    parser.add_argument('--out', default='ablation.json')
    parser.add_argument('--plot', default=None, help='bar chart file name')
    add_bool_arg(parser, '--log', default=True, help='log to a timestamped file')
    args, rest = parser.parse_known_args(argv)
    try:
        rc = load_run_config(args.config, split_overrides(rest))
        variants = [v for v in args.variants.split(',') if v]
        if args.org:
            variants += [v for v in ORG_VARIANTS if v not in variants]
        if args.log:
            _outlog, _errlog, _outdate, _errdate = logwt(
                os.path.join(config.log_dir(), 'ablate'), 'ablate.log')
        run(rc, variants, parse_seeds(args.seeds), args.out, args.plot,
            config.workers())
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
