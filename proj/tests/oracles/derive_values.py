"""Independent reference values for the unit tests.

Run `python3 derive_values.py > oracle_values.hpp` to regenerate the header.
Uses numpy/scipy only; nothing here calls the C++ library.
"""
import math

import numpy as np
from scipy import integrate, optimize, stats


def example1(t):
    a, b = t
    r2 = math.sqrt(2.0)
    return min(
        3 + 0.1 * (a - b) ** 2 - r2 * (a + b) / 2,
        3 + 0.1 * (a - b) ** 2 + r2 * (a + b) / 2,
        (a - b) + 3 * r2,
        -(a - b) + 3 * r2,
    )


def example2(t):
    c1, c2, m, r, t1, f1 = t
    w0 = math.sqrt((c1 + c2) / m)
    return 3 * r - abs(2 * f1 / (m * w0**2) * math.sin(w0 * t1 / 2))


def example3(t):
    a, b = t
    return -(a * a + 4) * (b - 1) / 20 + math.sin(2.5 * a) + 2


def example4(t, c):
    a, b = t
    return min(c - 1 - b + math.exp(-a * a / 10) + (a / 5) ** 4, c * c / 2 - a * b)


def lognormal_params(mean, sd):
    s2 = math.log(1 + (sd / mean) ** 2)
    return math.log(mean) - s2 / 2, math.sqrt(s2)


def example5(t, sd=0.2):
    d = len(t)
    return d + 3 * sd * math.sqrt(d) - sum(t)


def example5_u(u, sd=0.2):
    mu, s = lognormal_params(1.0, sd)
    return example5([math.exp(mu + s * x) for x in u], sd)


def eff(mean, sd, eps):
    lo, hi = -eps, eps

    def integrand(x):
        return (eps - abs(x)) * stats.norm.pdf(x, loc=mean, scale=sd)

    val, _ = integrate.quad(integrand, lo, hi, points=[0.0], epsabs=1e-14, epsrel=1e-12)
    return val


def beta_example5(d):
    cons = {"type": "eq", "fun": lambda u: example5_u(u)}
    res = optimize.minimize(lambda u: 0.5 * u @ u, np.full(d, 1.0), constraints=[cons], tol=1e-12,
                            options={"maxiter": 500})
    return float(np.linalg.norm(res.x))


def quad(f, lo, hi, points=None):
    val, _ = integrate.quad(f, lo, hi, points=points, limit=500, epsabs=0.0, epsrel=1e-12)
    return val


def pf_example1():
    # Rotated coordinates v1 = (u1+u2)/sqrt2, v2 = (u1-u2)/sqrt2: failure is |v2| >= 3 or |v1| >= 3 + 0.2 v2^2.
    inner = quad(lambda v2: stats.norm.pdf(v2) * 2 * stats.norm.sf(3 + 0.2 * v2 * v2), -3.0, 3.0)
    return 2 * stats.norm.sf(3.0) + inner


def pf_example3():
    # g <= 0 iff theta2 >= 1 + 20 (sin(2.5 theta1) + 2) / (theta1^2 + 4).
    def f(a):
        return stats.norm.pdf(a - 1.5) * stats.norm.sf(1 + 20 * (math.sin(2.5 * a) + 2) / (a * a + 4) - 2.5)

    return quad(f, -12.0, 15.0, points=[1.5])


def pf_example4(c):
    # For fixed u1 the failure set in u2 is a union of half-lines.
    def f(u1):
        t1 = c - 1 + math.exp(-u1 * u1 / 10) + (u1 / 5) ** 4
        if u1 > 0:
            p = stats.norm.sf(min(t1, c * c / 2 / u1))
        elif u1 < 0:
            p = stats.norm.sf(t1) + stats.norm.cdf(c * c / 2 / u1)
        else:
            p = stats.norm.sf(t1)
        return stats.norm.pdf(u1) * p

    return quad(f, -40.0, 40.0, points=[0.0])


def pf_example5_d2(sd=0.2):
    mu, s = lognormal_params(1.0, sd)
    threshold = 2 + 3 * sd * math.sqrt(2)

    def f(z):
        rest = threshold - math.exp(mu + s * z)
        p = 1.0 if rest <= 0 else stats.norm.sf((math.log(rest) - mu) / s)
        return stats.norm.pdf(z) * p

    z_cut = (math.log(threshold) - mu) / s
    return quad(f, -12.0, z_cut) + stats.norm.sf(z_cut)


def gm_pdf(u, centers):
    u = np.asarray(u)
    return float(np.mean([stats.multivariate_normal(mean=c).pdf(u) for c in centers]))


def main():
    mu02, s02 = lognormal_params(1.0, 0.2)
    values = {
        "kExample1AtOrigin": example1((0.0, 0.0)),
        "kExample2AtMean": example2((1.0, 0.1, 1.0, 0.5, 1.0, 1.0)),
        "kExample3AtMean": example3((1.5, 2.5)),
        "kExample3AtOrigin": example3((0.0, 0.0)),
        "kExample4C3AtOrigin": example4((0.0, 0.0), 3.0),
        "kExample4C3At12": example4((1.0, 2.0), 3.0),
        "kExample5D2AtMean": example5([1.0, 1.0]),
        "kExample5D2Sd2AtMean": example5([1.0, 1.0], 2.0),
        "kLognormal02LogLocation": mu02,
        "kLognormal02LogScale": s02,
        "kLognormal02AtU1": math.exp(mu02 + s02),
        "kUniformStdAtU05": math.sqrt(3.0) * (2 * stats.norm.cdf(0.5) - 1),
        "kPhiMinus3": stats.norm.cdf(-3.0),
        "kPhiMinus4": stats.norm.cdf(-4.0),
        "kPhiInvOf0975": stats.norm.ppf(0.975),
        "kEffMean03Sd05Eps1": eff(0.3, 0.5, 1.0),
        "kEffMeanM2Sd04Eps08": eff(-2.0, 0.4, 0.8),
        "kGmPdfTwoCenters": gm_pdf([0.5, -0.25], [np.array([1.0, 0.0]), np.array([-1.0, 2.0])]),
        "kStdNormalPdf2dAt1_1": stats.multivariate_normal(mean=[0, 0]).pdf([1.0, 1.0]),
        "kBetaExample5D2": beta_example5(2),
        "kExample1PfExact": pf_example1(),
        "kExample3PfExact": pf_example3(),
        "kExample4C3PfExact": pf_example4(3.0),
        "kExample4C4PfExact": pf_example4(4.0),
        "kExample4C5PfExact": pf_example4(5.0),
        "kExample5D2PfExact": pf_example5_d2(),
    }
    print("#pragma once")
    print()
    print("// Generated by tests/oracles/derive_values.py; do not edit by hand.")
    print()
    print("namespace oracle {")
    print()
    for name, value in values.items():
        print(f"inline constexpr double {name} = {float(value)!r};")
    print()
    print("}  // namespace oracle")


if __name__ == "__main__":
    main()
