'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-evaluate: rebuild the split from the corpus and score the checkpoint on it
'''

import argparse
import os

from gravrec.benchmark import Benchmark
from gravrec.config import ConfigError, config, format_value, load_run_config
from gravrec.corpus import leave_one_out_split, load_corpus
from gravrec.evaluation import DEFAULT_KS, evaluate
from gravrec.recommender import ModelCheckpoint
from gravrec.util import GravrecError, add_bool_arg, fatal, logwt, split_overrides


# Switches that decide what model a checkpoint is
MODEL_FLAGS = ('influence_mode', 'use_interdependent', 'use_content',
               'relations', 'distance_source', 'gravitational_constant')
# Keys this run decides, the rest of the report config is the checkpoint's
EVAL_KEYS = ('corpus', 'checkpoint', 'report', 'split_seed')


def report_config(rc, ckpt):
    mismatched = [
        k for k in MODEL_FLAGS if k in ckpt.config and ckpt.config[k] != rc.get(k)
    ]
    if mismatched:
        raise ConfigError('Config does not match the checkpoint: %s' %
                          '; '.join('%s = %s, trained with %s' %
                                    (k, format_value(rc.get(k)),
                                     format_value(ckpt.config[k]))
                                    for k in mismatched))
    ret = dict(ckpt.config) if ckpt.config else rc.as_dict()
    for k in EVAL_KEYS:
        ret[k] = rc.get(k)
    return ret


def run(rc, ckpt=None, workers=None, ks=DEFAULT_KS):
    '''
    rc gives the corpus, split seed and report path
    The report echoes the checkpoint's training config
    Returns the MetricsReport
    '''
    corpus_fn = rc.require_path('corpus')
    if ckpt is None:
        ckpt = ModelCheckpoint.from_file_name(rc.require_path('checkpoint'))
    model_config = report_config(rc, ckpt)
    if workers is None:
        workers = config.workers()
    bench = Benchmark()
    try:
        corpus = load_corpus(corpus_fn)
        split = leave_one_out_split(corpus, rc.get('split_seed'))
        print('Evaluating %u scholars, %u workers' %
              (len(split.scholars()), workers))
        report = evaluate(ckpt, split, ks, workers=workers)
        report.config = model_config
        print(report.table())
        if rc.get('report'):
            print('Writing %s' % rc.get('report'))
            report.save(rc.get('report'))
        return report
    finally:
        bench.stop()
        print('Completed in %s' % bench)


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='evaluate a checkpoint with P@k / R@k / nDCG@k',
        epilog='Any config key can be overridden with --key value, '
        'ex: --checkpoint model.ckpt',
        allow_abbrev=False)
    parser.add_argument(
        '-c',
        '--config',
        help='run config file, default: the config stored in the checkpoint')
    parser.add_argument('--workers', type=int, default=None)
    add_bool_arg(parser, '--log', default=True, help='log to a timestamped file')
    args, rest = parser.parse_known_args(argv)
    try:
        overrides = split_overrides(rest)
        # Start from the training config so the split matches
        rc = load_run_config(args.config, overrides)
        ckpt = ModelCheckpoint.from_file_name(rc.require_path('checkpoint'))
        if not args.config:
            rc = load_run_config(None, overrides, base=ckpt.config)
        if args.log:
            _outlog, _errlog, _outdate, _errdate = logwt(
                os.path.join(config.log_dir(), 'evaluate'), 'evaluate.log')
        run(rc, ckpt=ckpt, workers=args.workers)
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
