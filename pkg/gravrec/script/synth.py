'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-synth: write a planted community corpus
'''

import argparse

from gravrec.corpus import generate_synthetic, save_corpus
from gravrec.util import GravrecError, fatal


def run(out_fn,
        n_communities=4,
        scholars_per=25,
        papers_per_scholar=6,
        intra_cite_prob=0.9,
        seed=7):
    corpus = generate_synthetic(n_communities, scholars_per,
                                papers_per_scholar, intra_cite_prob, seed)
    save_corpus(corpus, out_fn)
    print('Wrote %s: %u papers, %u scholars' %
          (out_fn, len(corpus.papers), len(corpus.scholars)))
    return corpus


def main(argv=None):
    parser = argparse.ArgumentParser(
        description='generate a synthetic corpus with planted communities')
    parser.add_argument('out', nargs='?', default='synth.jsonl')
    parser.add_argument('--communities', type=int, default=4)
    parser.add_argument('--scholars', type=int, default=25,
                        help='scholars per community')
    parser.add_argument('--papers', type=int, default=6,
                        help='papers per scholar')
    parser.add_argument('--intra-cite-prob', type=float, default=0.9)
    parser.add_argument('--seed', type=int, default=7)
    args = parser.parse_args(argv)
    try:
        run(args.out, args.communities, args.scholars, args.papers,
            args.intra_cite_prob, args.seed)
    except GravrecError as e:
        fatal(e)


if __name__ == "__main__":
    main()
