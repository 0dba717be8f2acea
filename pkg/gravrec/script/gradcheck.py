'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-gradcheck: analytic vs finite difference gradients on the frozen fixture
Exit code 0 iff every parameter group passes
'''

import argparse
import sys

from gravrec.benchmark import Benchmark
from gravrec.config import load_run_config
from gravrec.gradcheck import GROUPS, format_table, gradcheck
from gravrec.util import GravrecError, NumericError, fatal, split_overrides


def run(rc, corrupt=None):
    '''Prints the table, returns [GroupResult]'''
    bench = Benchmark()
    results = gradcheck(rc, corrupt=corrupt)
    bench.stop()
    print(format_table(results))
    print('Completed in %s' % bench)
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='check model gradients against finite differences',
        epilog='Any config key can be overridden with --key value',
        allow_abbrev=False)
    parser.add_argument('-c', '--config', help='run config file')
    parser.add_argument('--corrupt',
                        choices=GROUPS,
                        help='perturb this group\'s analytic gradient')
    args, rest = parser.parse_known_args(argv)
    try:
        rc = load_run_config(args.config, split_overrides(rest))
        results = run(rc, args.corrupt)
    except GravrecError as e:
        fatal(e)
    failed = [r for r in results if not r.passed]
    if failed:
        print('%u parameter groups failed' % len(failed))
        sys.exit(NumericError.exit_code)


if __name__ == "__main__":
    main()
