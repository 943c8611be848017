"""Independent high-precision oracles for the scorer and similarity tests.

Run with: python3 softmax_cosine_oracle.py
The printed values are frozen into tests/unit/test_scorer.cpp,
tests/unit/test_metrics.cpp and the acceptance suite.
"""
from mpmath import mp, mpf, exp, sqrt

mp.dps = 50


def softmax(lp):
    zs = [exp(mpf(x)) for x in lp]
    s = sum(zs)
    return [z / s for z in zs]


print("softmax(-1,-2,-3,-4) =", [mp.nstr(p, 20) for p in softmax([-1, -2, -3, -4])])
print("softmax(-0.1,-5,-5,-5)[0] =", mp.nstr(softmax(["-0.1", -5, -5, -5])[0], 20))
u, v = [1, 2, 3], [4, 5, 6]
dot = sum(a * b for a, b in zip(u, v))
print("cosine((1,2,3),(4,5,6)) =", mp.nstr(mpf(dot) / (sqrt(sum(a * a for a in u)) * sqrt(sum(b * b for b in v))), 20))
