"""Independent payoff oracle: exact enumeration of the protocol outcome
space.

For every potential requester (weight alpha), every favor type (uniform),
and every availability vector over the requester's neighbors
(product-Bernoulli), the requester's benefit and the uniformly selected
provider's cost are accumulated with exact weights. Exponential in degree;
meant for cross-checking the closed-form engine on small graphs only.

Deliberately independent of favornet.payoff: no shared helpers.
"""

from __future__ import annotations

import math
from itertools import product

from favornet.model import Network, Society


def expected_payoffs(net: Network, society: Society) -> list[float]:
    matrix = society.matrix
    n = society.n
    alpha = society.alpha
    n_f = matrix.n_favor_types
    terms: list[list[float]] = [[] for _ in range(n)]
    for r in range(n):
        nbrs = net.neighbors(r)
        for f in range(n_f):
            base = alpha / n_f
            for avail in product((0, 1), repeat=len(nbrs)):
                prob = base
                able = []
                for j, a in zip(nbrs, avail):
                    p_jf = matrix.provision_probability(j, f)
                    prob *= p_jf if a else (1.0 - p_jf)
                    if a:
                        able.append(j)
                if prob == 0.0 or not able:
                    continue
                terms[r].append(prob * society.types[r].v)
                for j in able:
                    terms[j].append(-prob * society.types[j].c / len(able))
    return [math.fsum(t) for t in terms]
