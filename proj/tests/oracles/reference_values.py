"""Independent reference values frozen into the C++ tests.

Uses sympy (exact integration), mpmath (30-digit quadrature) and scipy (one
triple integral); shares no code with the library. Run: python3 tests/oracles/reference_values.py
"""

import mpmath as mp
import sympy as sp
from scipy import integrate

mp.mp.dps = 30


def show(name, value):
    print(f"{name} = {mp.nstr(mp.mpf(value), 17)}", flush=True)


def fgm():
    a, u, v = sp.symbols("a u v")
    C = u * v * (1 + a * (1 - u) * (1 - v))
    c = sp.diff(C, u, v)
    tau = sp.simplify(4 * sp.integrate(C * c, (u, 0, 1), (v, 0, 1)) - 1)
    rs = sp.simplify(12 * sp.integrate(C - u * v, (u, 0, 1), (v, 0, 1)))
    gini = sp.simplify(4 * (sp.integrate(C.subs(v, 1 - u), (u, 0, 1)) - sp.integrate(u - C.subs(v, u), (u, 0, 1))))
    beta = sp.simplify(4 * C.subs({u: sp.Rational(1, 2), v: sp.Rational(1, 2)}) - 1)
    print("fgm kendall", tau, "spearman", rs, "gini", gini, "blomqvist", beta, flush=True)
    # Exp(1) margins: x = -log(1-u); rho = Cov / Cov^C with Var = 1.
    x, y = sp.symbols("x y", positive=True)
    F1, F2 = 1 - sp.exp(-x), 1 - sp.exp(-y)
    dens = sp.diff(C.subs({u: F1, v: F2}), x, y)
    exy = sp.integrate(sp.expand(x * y * dens), (x, 0, sp.oo), (y, 0, sp.oo))
    print("fgm exp1 rho", sp.simplify(exy - 1))


def egm3():
    a12, a13, a23, a123 = sp.symbols("a12 a13 a23 a123")
    u = sp.symbols("u1:4")
    b = [1 - 2 * ui for ui in u]
    dens = 1 + a12 * b[0] * b[1] + a13 * b[0] * b[2] + a23 * b[1] * b[2] + a123 * b[0] * b[1] * b[2]
    e = sp.integrate(u[0] * u[1] * u[2] * dens, *[(ui, 0, 1) for ui in u])
    rho = sp.simplify((e - sp.Rational(1, 8)) / (sp.Rational(1, 4) - sp.Rational(1, 8)))
    ub = [1 - ui for ui in u]
    C = u[0] * u[1] * u[2] * (1 + a12 * ub[0] * ub[1] + a13 * ub[0] * ub[2] + a23 * ub[1] * ub[2] + a123 * ub[0] * ub[1] * ub[2])
    num = sp.integrate(C - u[0] * u[1] * u[2], *[(ui, 0, 1) for ui in u])
    kappa = sp.simplify(num / (sp.Rational(1, 4) - sp.Rational(1, 8)))
    print("egm3 rho", rho, " kappa", kappa)


def pareto(a0, a):
    a0, a = mp.mpf(a0), mp.mpf(a)
    t = a0 + a

    def surv(*x):
        return (1 + max(x)) ** (-a0) * mp.fprod((1 + xi) ** (-a) for xi in x)

    # Tail integrals split along the diagonals where max() switches branch.
    pair = 2 * mp.quad(lambda x1: mp.quad(lambda x2: surv(x1, x2), [0, x1]), [0, mp.inf])
    # Triple integral in double precision on the ordered region x3 < x2 < x1,
    # with x1 = s / (1 - s) mapping (0, 1) onto (0, inf).
    fa0, fa = float(a0), float(a)

    def ordered(x3, x2, s):
        x1 = s / (1 - s)
        return (1 + x1) ** (-fa0 - fa) * ((1 + x2) * (1 + x3)) ** (-fa) / (1 - s) ** 2

    triple, _ = integrate.tplquad(ordered, 0, 1, 0, lambda s: s / (1 - s), 0, lambda s, x2: x2,
                                  epsabs=0, epsrel=1e-12)
    triple *= 6
    mean = 1 / (t - 1)
    comon_pair = mp.quad(lambda p: ((1 - p) ** (-1 / t) - 1) ** 2, [0, 1])
    comon_triple = mp.quad(lambda p: ((1 - p) ** (-1 / t) - 1) ** 3, [0, 1])
    show(f"pareto({a0},{a}) pair", pair)
    show(f"pareto({a0},{a}) triple", triple)
    show(f"pareto({a0},{a}) comon_triple", comon_triple)
    show(f"pareto({a0},{a}) rho", (triple - mean ** 3) / (comon_triple - mean ** 3))
    show(f"pareto({a0},{a}) rho_c", (pair - mean ** 2) / (comon_pair - mean ** 2))


def isserlis():
    S = [[1.0, 0.5, 0.3, 0.4], [0.5, 1.0, 0.7, 0.6], [0.3, 0.7, 1.0, 0.5], [0.4, 0.6, 0.5, 1.0]]
    total = S[0][1] * S[2][3] + S[0][2] * S[1][3] + S[0][3] * S[1][2]
    print("pinned 4x4 pairing sum", total)
    # Non-central m = 3: E[X1 X2 X3] = m1 m2 m3 + m1 s23 + m2 s13 + m3 s12.
    m = [1.0, -0.5, 2.0]
    T = [[1.0, 0.3, -0.2], [0.3, 2.0, 0.4], [-0.2, 0.4, 1.5]]
    print("m3 moment", m[0] * m[1] * m[2] + m[0] * T[1][2] + m[1] * T[0][2] + m[2] * T[0][1])


def bivariate_normal():
    def phi2(h, k, r):
        s = mp.sqrt(1 - r * r)
        return mp.quad(lambda x: mp.npdf(x) * mp.ncdf((k - r * x) / s), [-mp.inf, h])

    for h, k, r in [("1.0", "-0.5", "0.6"), ("-2.0", "1.5", "-0.7"), ("0.3", "0.3", "0.95")]:
        show(f"Phi2({h},{k};{r})", phi2(mp.mpf(h), mp.mpf(k), mp.mpf(r)))


def example31():
    two_pi = 2 * mp.pi
    for name, f in [("sin", mp.sin), ("cos", mp.cos), ("sincos", lambda z: mp.sin(z) * mp.cos(z))]:
        show(f"E[{name} Z]", mp.quad(f, [0, mp.pi / 2, mp.pi, 3 * mp.pi / 2, two_pi]) / two_pi)
    x = mp.mpf("0.72")
    p = (mp.pi - 2 * mp.asin(x)) / two_pi
    show("tail product at 0.72", p * p)
    show("joint tail at 0.72", max(0, mp.acos(x) - mp.asin(x)) / two_pi)


if __name__ == "__main__":
    fgm()
    egm3()
    pareto(1, 4)
    pareto(2, 5)
    isserlis()
    bivariate_normal()
    example31()
