"""Standalone oracle: recompute every numeric constant frozen into the test suite.

Run:  python tests/oracles/frozen_values.py

Everything here is computed from first principles with mpmath at 30 decimal
digits, deliberately WITHOUT importing the package under test.  The inverse of
the entropy-like function uses mpmath's own root finder, not the package's
bracketed Newton iteration, so a frozen value that both sides reproduce has
been obtained by two genuinely different routes.

The printed values are copied by hand into the tests (grep for "frozen").
"""

from __future__ import annotations

import math

import mpmath as mp

mp.mp.dps = 30


def h(x):
    """(1+x)*log(1+x) - x, the exponent kernel of the one-sided tail bound."""
    x = mp.mpf(x)
    return (1 + x) * mp.log(1 + x) - x


def h_inv(y):
    """Inverse of h on [0, inf), via mpmath bisection + Newton polish."""
    y = mp.mpf(y)
    if y == 0:
        return mp.mpf(0)
    lo, hi = mp.mpf(0), mp.mpf(1)
    while h(hi) < y:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if h(mid) < y:
            lo = mid
        else:
            hi = mid
    x = (lo + hi) / 2
    for _ in range(8):
        x = x - (h(x) - y) / mp.log(1 + x)
    assert abs(h(x) - y) < mp.mpf(10) ** -25
    return x


def kl_bernoulli(p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    return q * mp.log(q / p) + (1 - q) * mp.log((1 - q) / (1 - p))


def bennett(mean, t):
    return mp.exp(-mp.mpf(mean) * h(mp.mpf(t) / mp.mpf(mean)))


def show(name, value, digits=15):
    print(f"{name} = {mp.nstr(mp.mpf(value), digits)}")


# ----------------------------------------------------------------------------
# Upper-quantile integral of the community weight profile W = s + X for each
# supported mixing distribution (E[X] = 1 in every standard row), and the
# scale-free objective J(alpha) = I(alpha)^2 / (2 alpha) whose maximum fixes
# the detectability threshold multiplier.
# ----------------------------------------------------------------------------

S = mp.mpf("0.1")


def upper_integral(dist, alpha):
    a = mp.mpf(alpha)
    if dist == "degenerate":
        return a * (S + 1)
    if dist == "bernoulli":  # X = t * Bernoulli(q), q = 1/2, t = 2
        q, t = mp.mpf("0.5"), mp.mpf(2)
        return S * a + t * min(a, q)
    if dist == "uniform":  # X ~ Uniform(0, 2)
        b = mp.mpf(2)
        return S * a + b * a * (2 - a) / 2
    if dist == "exponential":  # X ~ Exp(1)
        return a * (S + 1 - mp.log(a))
    raise ValueError(dist)


def J(dist, alpha):
    a = mp.mpf(alpha)
    return upper_integral(dist, a) ** 2 / (2 * a)


def maximize_J(dist):
    """Coarse grid then golden-section refinement; independent of any
    closed-form stationarity condition."""
    grid = [mp.mpf(i) / 4096 for i in range(1, 4097)]
    best = max(grid, key=lambda a: J(dist, a))
    lo = max(best - mp.mpf(1) / 4096, mp.mpf(10) ** -9)
    hi = min(best + mp.mpf(1) / 4096, mp.mpf(1))
    phi = (mp.sqrt(5) - 1) / 2
    c, d = hi - phi * (hi - lo), lo + phi * (hi - lo)
    for _ in range(120):
        if J(dist, c) < J(dist, d):
            lo = c
            c, d = d, lo + phi * (hi - lo)
        else:
            hi = d
            c, d = hi - phi * (hi - lo), c
    a_star = (lo + hi) / 2
    return a_star, J(dist, a_star)


def main():
    print("# exponent kernel fixed points")
    show("h(1)            ", h(1))                      # 2 ln 2 - 1
    show("h(e-1)          ", h(mp.e - 1))               # exactly 1
    show("h(4)            ", h(4))
    show("h(19)           ", h(19))
    show("h_inv(2/1.21)   ", h_inv(mp.mpf(2) / mp.mpf("1.21")))
    show("kl(0.1, 0.2)    ", kl_bernoulli("0.1", "0.2"))
    show("bennett(1, e-1) ", bennett(1, mp.e - 1))      # exactly 1/e
    show("bennett(.6, 2.4)", bennett("0.6", "2.4"))

    print("\n# known-probability scan statistic fixtures")
    # homogeneous p=0.1, |D|=4, e(D)=3, n=100: mean 0.6, overshoot ratio 4
    stat1 = mp.mpf("0.6") * h(4) / (4 * mp.log(25))
    show("stat_known(p=.1,k=4,e=3,n=100)", stat1)
    # planted 6-clique in n=50 at p=0.05: mean 0.75, e(D)=15, overshoot 19
    stat2 = mp.mpf("0.75") * h(19) / (6 * mp.log(mp.mpf(50) / 6))
    show("stat_known(6-clique,n=50,p=.05)", stat2)

    print("\n# blind-probability estimator fixtures (n=1024, |D|=4)")
    floor = (mp.mpf(16) / 1024) * mp.log(256) ** 4
    show("variance_floor(k=4,n=1024)", floor)
    x = mp.mpf(30) / floor - 1
    stat3 = floor * h(x) / (4 * mp.log(256))
    show("stat_unknown(e=30)        ", stat3)

    print("\n# detectability thresholds, scale-free regime (s = 0.1, E[X] = 1)")
    for dist in ("degenerate", "bernoulli", "uniform", "exponential"):
        a_star, j_star = maximize_J(dist)
        rho = 1 + h_inv(1 / j_star)
        print(f"{dist:12s} alpha* = {mp.nstr(a_star, 12)}  "
              f"1/J* = {mp.nstr(1 / j_star, 12)}  rho* = {mp.nstr(rho, 12)}")
    print("closed-form cross-checks:")
    show("  degenerate  1/J", 2 / (S + 1) ** 2)
    show("  bernoulli   1/J", min(2 / (mp.mpf("0.5") * (S + 2) ** 2),
                                  2 / (S + 1) ** 2))
    show("  uniform     1/J", mp.mpf(27) / 4 * 2 / (2 + S) ** 3)
    show("  exponential 1/J", mp.exp(1 - S) / 2)
    show("  exponential alpha*", mp.exp(S - 1))
    show("  uniform     alpha*", (2 + S) / 3)

    print("\n# vanishing-density variant: same rows with argument scaled by n^(-1/4)")
    n = mp.mpf(10) ** 8
    for dist in ("degenerate", "bernoulli", "uniform", "exponential"):
        _, j_star = maximize_J(dist)
        rho = 1 + h_inv(1 / (j_star * n ** mp.mpf("0.25")))
        print(f"{dist:12s} rho*(n=1e8) = {mp.nstr(rho, 12)}")

    print("\n# two-weight-class prefix switch (r = 100, ratio R = 6.5)")
    r, R = 100, mp.mpf("6.5")
    thresh = (r - 1 + R ** 2) / (R - 1) ** 2
    show("switch threshold on m", thresh)
    # brute-force argmax of mean-edges/size over ALL prefix sizes k
    for m in (4, 5):
        def objective(k):
            large = min(k, m)
            small = k - large
            tot = large * R + small        # weights in units of w_min
            sq = large * R ** 2 + small
            return (tot ** 2 - sq) / (2 * k)
        best_k = max(range(1, r + 1), key=objective)
        print(f"m = {m}: argmax prefix size = {best_k} "
              f"({'large-only' if best_k == m else 'whole community'})")

    print("\n# null-calibration union-bound series (n=512, r=8, eps=0.5)")
    n_, r_, eps = 512, 8, mp.mpf("0.5")
    series = sum((mp.e * (mp.mpf(k) / n_) ** (eps / 2)) ** k
                 for k in range(1, r_ + 1))
    show("series sum      ", series)
    lead = mp.e * (mp.mpf(r_) / n_) ** (eps / 2)
    show("geometric bound ", lead / (1 - lead) if lead < 1 else mp.inf)

    print("\n# power-experiment threshold (n=512, r=8, p=0.05, target=1)")
    mult = (mp.mpf(7) * mp.mpf("0.05")) / (2 * mp.log(64))  # E0/(r ln(n/r))
    rho_star = 1 + h_inv(1 / mult)
    show("rho*            ", rho_star)
    show("2 rho*          ", 2 * rho_star)
    show("1/p cap         ", mp.mpf(20))
    # the run uses rho = 20 (clique); statistic at D = C under the clique:
    stat_c = mp.mpf(28) * mp.mpf("0.05") * h(19) / (8 * mp.log(64))
    show("clique statistic", stat_c)

    print("\n# tail bounds for the empirical Bennett check (mean 4.5)")
    for t in (2, 5, 10):
        show(f"bound(t={t})      ", bennett(mp.mpf("4.5"), t))

    print("\n# homogeneous threshold example (n=1000, r=30, p=0.01)")
    arg = 2 * mp.log(mp.mpf(1000) / 30) / (29 * mp.mpf("0.01"))
    show("h_inv argument  ", arg)
    show("rho*            ", 1 + h_inv(arg))

    print("\n# slow-growth audit example (n=1e6, r=floor(ln^4 n))")
    ln_n = mp.log(mp.mpf(10) ** 6)
    r_audit = int(mp.floor(ln_n ** 4))
    print(f"r = {r_audit}")
    show("ln r / ln n     ", mp.log(r_audit) / ln_n)

    print("\n# ceil(r^(1/3)) reference table")
    for r3 in (1, 7, 8, 9, 26, 27, 28, 63, 64, 65, 1000):
        k = int(mp.ceil(mp.cbrt(mp.mpf(r3)) - mp.mpf(10) ** -20))
        print(f"ceil({r3}^(1/3)) = {k}")

    print("\n# rank-one estimator identity spot check (exact equality)")
    ws = [mp.mpf(w) / 100 for w in (12, 11, 10, 9, 8, 7, 6, 5, 4, 3)]
    S_ = sum(ws)
    for ksub in (1, 2, 3):
        sd = sum(ws[:ksub])
        sqd = sum(w ** 2 for w in ws[:ksub])
        assert S_ - sd >= sd
        x1 = S_ ** 2 / 2
        x2 = sd * (S_ - sd)
        est = (mp.sqrt(x1) - mp.sqrt(x1 - 2 * x2)) ** 2 / 4 - sqd / 2
        direct = (sd ** 2 - sqd) / 2
        assert abs(est - direct) < mp.mpf(10) ** -25
    print("identity holds exactly for descending prefixes (checked k=1..3)")


if __name__ == "__main__":
    main()
