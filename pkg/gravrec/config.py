'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Two layers of configuration:
-Config: per machine JSON file (~/.gravrc) for things like log directory and worker count
-RunConfig: per run flat "key = value" file mirroring the training / ablation knobs
'''

import json
import multiprocessing
import os

from .util import UsageError


class ConfigError(UsageError):
    pass


class Config:
    def __init__(self, fn=None):
        if fn is None:
            fn = Config.get_default_fn()
        if fn and os.path.exists(fn):
            js = open(fn).read()
        else:
            js = "{}"
        self.json = json.loads(js)

    @staticmethod
    def get_default_fn():
        home = os.getenv('HOME')
        if not home:
            return None
        return os.path.join(home, '.gravrc')

    def getx(self, ks, default=None):
        root = self.json
        for k in ks.split('.'):
            if k in root:
                root = root[k]
            else:
                return default
        return root

    def get(self, k, default=None):
        if k in self.json:
            return self.json[k]
        else:
            return default

    def log_dir(self):
        env = os.getenv('GRAVREC_LOG_DIR', None)
        if env:
            return env
        return self.get('log_dir', 'gravrec_log')

    def workers(self):
        """evaluation worker processes"""
        env = os.getenv('GRAVREC_WORKERS', None)
        if env is not None:
            ret = int(env)
        else:
            ret = int(self.getx('eval.workers', 1))
        if ret:
            return ret
        else:
            return multiprocessing.cpu_count()


config = Config()

RELATIONS = ('collaboration', 'cotopic', 'covenue', 'coorg')
INFLUENCE_MODES = ('gravity', 'uniform', 'attention')
DISTANCE_SOURCES = ('relation', 'collaboration')

# Order here is the order keys are echoed into reports
DEFAULTS = (
    ('corpus', ''),
    ('checkpoint', 'model.ckpt'),
    ('report', 'report.json'),
    # Optional precomputed paper vectors, skips PV-DBOW training
    ('vectors', ''),
    ('epochs', 100),
    ('batch_size', 1024),
    ('dim', 64),
    ('learning_rate', 0.001),
    ('reg_weight', 0.0005),
    ('seed', 1),
    ('split_seed', 1),
    ('layers', 2),
    ('sample_sizes', [10, 10]),
    ('att_dim', 64),
    ('influence_mode', 'gravity'),
    ('use_interdependent', True),
    ('use_content', True),
    ('relations', ['collaboration', 'cotopic', 'covenue']),
    ('min_shared_topic', 3),
    ('distance_source', 'relation'),
    ('gravitational_constant', 1.0),
    ('leaky_slope', 0.2),
    ('dim_v', 64),
    ('pv_epochs', 50),
    ('pv_negatives', 5),
    ('pv_lr', 0.025),
    ('pv_min_count', 2),
    ('fd_eps', 1e-5),
    ('grad_tolerance', 1e-4),
)
DEFAULTS_MAP = dict(DEFAULTS)


def parse_bool(s):
    v = s.strip().lower()
    if v in ('true', '1', 'yes', 'on'):
        return True
    if v in ('false', '0', 'no', 'off'):
        return False
    raise ValueError('Bad boolean %r' % s)


def parse_value(k, s):
    '''Parse string s into the type of k's default'''
    default = DEFAULTS_MAP[k]
    try:
        if isinstance(default, bool):
            return parse_bool(s)
        if isinstance(default, int):
            return int(s)
        if isinstance(default, float):
            return float(s)
        if isinstance(default, list):
            elem = type(default[0])
            return [elem(x.strip()) for x in s.split(',') if x.strip()]
        return s.strip()
    except ValueError:
        raise ConfigError('Bad value for %s: %r' % (k, s))


def format_value(v):
    if isinstance(v, bool):
        return 'true' if v else 'false'
    if isinstance(v, list):
        return ','.join(str(x) for x in v)
    return str(v)


def parse_text(text):
    '''"key = value" lines => raw string dict, # starts a comment'''
    values = {}
    for lineno, line in enumerate(text.split('\n'), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError('line %u: expect key = value, got %r' %
                              (lineno, line))
        k, v = line.split('=', 1)
        values[k.strip()] = v.strip()
    return values


class RunConfig:
    def __init__(self, values=None):
        self.values = dict((k, list(v) if isinstance(v, list) else v)
                           for k, v in DEFAULTS)
        if values:
            self.update(values)

    @staticmethod
    def from_text(text, overrides=None):
        ret = RunConfig(parse_text(text))
        if overrides:
            ret.update(overrides)
        return ret

    @staticmethod
    def from_file_name(fn, overrides=None):
        if not os.path.exists(fn):
            raise ConfigError('Config file %s does not exist' % fn)
        return RunConfig.from_text(open(fn, encoding='utf-8').read(),
                                   overrides)

    def update(self, values):
        for k, v in values.items():
            if k not in DEFAULTS_MAP:
                raise ConfigError('Unknown config key %s' % k)
            if isinstance(v, str):
                v = parse_value(k, v)
            elif isinstance(v, list):
                v = list(v)
            self.values[k] = v
        self.validate()

    def get(self, k):
        return self.values[k]

    def copy(self, **kwargs):
        ret = RunConfig(self.values)
        if kwargs:
            ret.update(kwargs)
        return ret

    def validate(self):
        v = self.values
        for k in ('epochs', 'batch_size', 'dim', 'layers', 'att_dim',
                  'min_shared_topic', 'dim_v', 'pv_epochs', 'pv_negatives',
                  'pv_min_count'):
            if v[k] < 1:
                raise ConfigError('%s must be >= 1, got %s' % (k, v[k]))
        for k in ('learning_rate', 'gravitational_constant', 'pv_lr',
                  'fd_eps', 'grad_tolerance'):
            if not v[k] > 0:
                raise ConfigError('%s must be > 0, got %s' % (k, v[k]))
        if v['reg_weight'] < 0:
            raise ConfigError('reg_weight must be >= 0')
        if len(v['sample_sizes']) != v['layers']:
            raise ConfigError('sample_sizes needs %u entries, got %u' %
                              (v['layers'], len(v['sample_sizes'])))
        if min(v['sample_sizes']) < 1:
            raise ConfigError('sample_sizes must be >= 1')
        if v['influence_mode'] not in INFLUENCE_MODES:
            raise ConfigError('influence_mode must be one of %s' %
                              (', '.join(INFLUENCE_MODES), ))
        if v['distance_source'] not in DISTANCE_SOURCES:
            raise ConfigError('distance_source must be one of %s' %
                              (', '.join(DISTANCE_SOURCES), ))
        if len(v['relations']) < 2:
            raise ConfigError('Need at least two relations, got %s' %
                              (v['relations'], ))
        for r in v['relations']:
            if r not in RELATIONS:
                raise ConfigError('Unknown relation %s' % r)
        if len(set(v['relations'])) != len(v['relations']):
            raise ConfigError('Duplicate relation in %s' % v['relations'])

    def require_path(self, k):
        fn = self.values[k]
        if not fn:
            raise ConfigError('%s path not set' % k)
        if not os.path.exists(fn):
            raise ConfigError('%s path %s does not exist' % (k, fn))
        return fn

    def as_dict(self):
        return dict((k, self.values[k]) for k, _v in DEFAULTS)

    def dumps(self):
        return ''.join('%s = %s\n' % (k, format_value(self.values[k]))
                       for k, _v in DEFAULTS)


def load_run_config(fn=None, overrides=None, base=None):
    '''
    Defaults, then base (ex: a checkpoint's config), then the file, then overrides
    '''
    rc = RunConfig(base)
    if fn:
        if not os.path.exists(fn):
            raise ConfigError('Config file %s does not exist' % fn)
        rc.update(parse_text(open(fn, encoding='utf-8').read()))
    if overrides:
        rc.update(overrides)
    return rc
