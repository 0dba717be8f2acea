'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

gr-plot-loss: loss curves from timestamped training logs

2026-03-02T10:31:30.832544: epoch 1 loss 12431.221837
2026-03-02T10:31:33.221719: epoch 2 loss 11021.004112
'''

import argparse
import re

import dateutil.parser

EPOCH_RE = re.compile(r"^([0-9T\.\-\:]+): epoch ([0-9]+) loss ([^ ]+)\s*$")


def load_epochs(fn):
    '''Yields (datetime, epoch, loss), a log may hold several runs'''
    for l in open(fn, encoding='utf-8'):
        m = EPOCH_RE.match(l)
        if not m:
            continue
        dt = dateutil.parser.isoparse(m.group(1))
        yield dt, int(m.group(2)), float(m.group(3))


def load_curve(fn, wall=False):
    '''
    Last run in the log only: a run restarts when the epoch index stops increasing
    x is epoch or minutes since the first epoch line
    '''
    rows = []
    for row in load_epochs(fn):
        if rows and row[1] <= rows[-1][1]:
            rows = []
        rows.append(row)
    if not rows:
        raise ValueError('%s: no epoch lines' % fn)
    t0 = rows[0][0]
    if wall:
        xs = [(dt - t0).total_seconds() / 60.0 for dt, _e, _l in rows]
    else:
        xs = [e for _dt, e, _l in rows]
    return xs, [l for _dt, _e, l in rows]


def main(argv=None):
    import matplotlib.pyplot as plt

    parser = argparse.ArgumentParser(description='plot training loss')
    parser.add_argument('--title', default='BPR training loss')
    parser.add_argument('--save', default=None)
    parser.add_argument('--wall',
                        action="store_true",
                        help='x axis in minutes instead of epochs')
    parser.add_argument('--log-y', action="store_true")
    parser.add_argument('fns', nargs='+', help='file,label')
    args = parser.parse_args(argv)

    label = None
    for arg in args.fns:
        parts = arg.split(",")
        if len(parts) == 1:
            fn = parts[0]
            label = None
        elif len(parts) == 2:
            fn, label = parts
        else:
            parser.error('expect file or file,label: %s' % arg)
        xs, losses = load_curve(fn, args.wall)
        print("%s: %u epochs, final loss %g" % (fn, len(losses), losses[-1]))
        plt.plot(xs, losses, label=label)
    if args.wall:
        plt.xlabel('t (min)')
    else:
        plt.xlabel('Epoch')
    plt.ylabel('loss')
    if args.log_y:
        plt.yscale('log')
    plt.title(args.title)
    if label:
        plt.legend()
    if args.save:
        plt.savefig(args.save)
    else:
        plt.show()


if __name__ == "__main__":
    main()
