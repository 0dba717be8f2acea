'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-recommend: top-k papers for one scholar from a checkpoint
'''

import argparse

from gravrec.recommender import ModelCheckpoint, recommend_topk
from gravrec.util import GravrecError, fatal


def run(ckpt_fn, scholar_id, k=10, candidates=None):
    '''Prints and returns [(paper_id, score)]'''
    ckpt = ModelCheckpoint.from_file_name(ckpt_fn)
    ranked = recommend_topk(ckpt, scholar_id, candidates, k)
    for rank, (paper_id, score) in enumerate(ranked, 1):
        print('%u %s %0.6f' % (rank, paper_id, score))
    return ranked


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='recommend papers for a scholar')
    parser.add_argument('checkpoint', help='checkpoint file')
    parser.add_argument('scholar', help='scholar id')
    parser.add_argument('-k', type=int, default=10, help='list length')
    parser.add_argument(
        '--candidates',
        help='comma separated paper ids, default: all but train positives')
    args = parser.parse_args(argv)
    candidates = None
    if args.candidates:
        candidates = [p for p in args.candidates.split(',') if p]
    try:
        run(args.checkpoint, args.scholar, args.k, candidates)
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
