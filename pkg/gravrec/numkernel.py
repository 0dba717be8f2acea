'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Dense float64 math shared by the encoder, content model and recommender
A "Dense" is just a 2D float64 numpy array
'''

import math

import numpy as np
from scipy import special

from .util import NumericError, UsageError


class DimensionError(NumericError):
    pass


class EvaluationError(NumericError):
    pass


def check_shape(name, a, shape):
    if a.shape != tuple(shape):
        raise DimensionError('%s: expect shape %s, got %s' %
                             (name, tuple(shape), a.shape))


def dense(values, rows=None, cols=None):
    '''Row major values => (rows, cols) float64, all finite'''
    ret = np.array(values, dtype=np.float64)
    if rows is not None:
        if ret.size != rows * cols:
            raise DimensionError('%u values for a %ux%u matrix' %
                                 (ret.size, rows, cols))
        ret = ret.reshape(rows, cols)
    if not np.all(np.isfinite(ret)):
        raise EvaluationError('non-finite matrix entry')
    return ret


def xavier_init(rows, cols, rng):
    '''Uniform on +/- sqrt(6 / (rows + cols))'''
    if rows < 1 or cols < 1:
        raise UsageError('bad xavier shape %sx%s' % (rows, cols))
    bound = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


def matmul(a, b):
    if a.shape[-1] != b.shape[0]:
        raise DimensionError('matmul %s x %s' % (a.shape, b.shape))
    return a @ b


def transpose(a):
    return a.T.copy()


def concat_rows(a, b):
    '''Row i of the result is concat(a[i], b[i])'''
    if a.shape[0] != b.shape[0]:
        raise DimensionError('concat_rows %s, %s' % (a.shape, b.shape))
    return np.concatenate([a, b], axis=1)


def relu(x):
    return np.maximum(x, 0.0)


def leaky_relu(x, slope=0.2):
    return np.where(x > 0, x, slope * x)


def tanh(x):
    return np.tanh(x)


def sigmoid(x):
    return special.expit(x)


def log_sigmoid(x):
    return special.log_expit(x)


def softmax_vec(x):
    # scipy subtracts the max before exponentiating
    return special.softmax(np.asarray(x, dtype=np.float64))


def softmax_rows(x):
    return special.softmax(x, axis=1)


def l2_norm_sq(x):
    return float(np.sum(np.square(x)))


class AdamState:
    def __init__(self, shape, beta1=0.9, beta2=0.999, eps=1e-8):
        self.first_moment = np.zeros(shape)
        self.second_moment = np.zeros(shape)
        self.step_count = 0
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def copy(self):
        ret = AdamState(self.first_moment.shape, self.beta1, self.beta2,
                        self.eps)
        ret.first_moment = self.first_moment.copy()
        ret.second_moment = self.second_moment.copy()
        ret.step_count = self.step_count
        return ret


def adam_step(param, grad, state, lr):
    '''Returns (new param, new state), inputs untouched'''
    if param.shape != grad.shape or param.shape != state.first_moment.shape:
        raise DimensionError('adam: param %s, grad %s, state %s' %
                             (param.shape, grad.shape,
                              state.first_moment.shape))
    ret = state.copy()
    ret.step_count += 1
    ret.first_moment = state.beta1 * state.first_moment + (1 -
                                                           state.beta1) * grad
    ret.second_moment = state.beta2 * state.second_moment + (
        1 - state.beta2) * grad**2
    m_hat = ret.first_moment / (1 - state.beta1**ret.step_count)
    v_hat = ret.second_moment / (1 - state.beta2**ret.step_count)
    return param - lr * m_hat / (np.sqrt(v_hat) + state.eps), ret


class Adam:
    '''Owns one AdamState per named parameter'''
    def __init__(self, lr=0.001):
        self.lr = lr
        self.states = {}

    def step(self, params, grads):
        '''Update params dict in place'''
        for name in sorted(grads):
            state = self.states.get(name)
            if state is None:
                state = AdamState(params[name].shape)
            params[name], self.states[name] = adam_step(
                params[name], grads[name], state, self.lr)


def finite_difference_gradient(f, params, eps=1e-5):
    '''
    Central differences of scalar f at params
    params is an array or a dict of arrays, perturbed in place and restored
    Returns gradient(s) of the same structure
    '''
    if not 1e-7 <= eps <= 1e-3:
        raise UsageError('eps must be in [1e-7, 1e-3], got %s' % eps)
    if isinstance(params, dict):
        return dict((name, _fd_one(f, params[name], eps))
                    for name in sorted(params))
    return _fd_one(f, params, eps)


def _fd_one(f, x, eps):
    if not x.flags.c_contiguous:
        raise UsageError('finite differences need a contiguous array')
    grad = np.zeros_like(x, dtype=np.float64)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for k in range(flat.size):
        orig = flat[k]
        flat[k] = orig + eps
        fp = f()
        flat[k] = orig - eps
        fm = f()
        flat[k] = orig
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise EvaluationError('non-finite function value at coordinate %u'
                                  % k)
        gflat[k] = (fp - fm) / (2 * eps)
    return grad


def relative_error(analytic, numeric):
    '''|a - n| / (|a| + |n|) over the whole array, 0 when both vanish'''
    num = float(np.linalg.norm(analytic - numeric))
    den = float(np.linalg.norm(analytic) + np.linalg.norm(numeric))
    if den < 1e-12:
        return 0.0
    return num / den
