"""Exact low-degree Wigner bound for discrete priors.

The bound is a polynomial of degree D in the squared overlaps, so its mean
is a finite combination of joint moments E[s^2i t^2j]. Those come from the
bivariate moment generating function (E exp(alpha a + beta b))^n, truncated
at total degree 2D; every coefficient is nonnegative, so repeated squaring
in floating point is stable.
"""
import math

import numpy as np

from corrspike.lowdeg import _product_law


def _mul(x, y, K):
    out = np.zeros((K, K))
    for i in range(K):
        for j in range(K - i):
            if x[i, j]:
                out[i:, j:] += x[i, j] * y[:K - i, :K - j]
    return out


def exact_adv_wigner(spec, lam, mu, n, D):
    K = 2 * D + 1
    a, b, p = _product_law(spec)
    fa = [math.factorial(i) for i in range(K)]
    m = np.zeros((K, K))
    for ai, bi, pi in zip(a, b, p):
        m += pi * np.outer([ai**i / fa[i] for i in range(K)], [bi**j / fa[j] for j in range(K)])
    res, base, e = np.eye(K)[:1].T @ np.eye(K)[:1], m, n
    while e:
        if e & 1:
            res = _mul(res, base, K)
        base, e = _mul(base, base, K), e >> 1
    total = 0.0
    for k in range(D + 1):
        for i in range(k + 1):
            mom = res[2 * i, 2 * (k - i)] * fa[2 * i] * fa[2 * (k - i)]
            total += (math.comb(k, i) * lam ** (2 * i) * mu ** (2 * (k - i)) * mom
                      / (2.0 * n) ** k / math.factorial(k))
    return total
