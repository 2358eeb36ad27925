"""Reference values frozen into the unit tests, computed independently with mpmath.

Run: python3 tools/oracle_values.py
"""

import mpmath as mp

mp.mp.dps = 40


def psi(n, x):
    x = mp.mpf(x)
    return mp.hermite(n, x) * mp.exp(-x * x / 2) / mp.sqrt(2**n * mp.factorial(n) * mp.sqrt(mp.pi))


def series_coeff(k, l):
    s = mp.mpf(0)
    for n in range(l + 1):
        s += mp.binomial(l, n) * (-1) ** (l - n) / mp.sqrt(mp.rf(n + 1, k))
    return mp.factorial(l + k) / (2 ** (l + mp.mpf(k) / 2) * mp.factorial(2 * l + k)) * s


def f_series_sum(n, k):
    return mp.nsum(lambda l: mp.binomial(n + l - 1, l) / mp.sqrt(mp.rf(l + 1, k)), [0, mp.inf],
                   method="euler-maclaurin")


def ker1(x):
    x = mp.mpf(x)
    f = lambda t: mp.hyp1f1(2, 1.5, -x * x * mp.tanh(t)) / (mp.sqrt(t) * mp.cosh(t) ** 2)
    return mp.pi ** mp.mpf(-1.5) * x * mp.quad(f, [0, 1, 5, 40])


def ker2(x):
    x = mp.mpf(x)

    def f(t):
        return mp.besseli(0, t) * (mp.exp(-2 * t) / mp.sinh(t)
                                   - mp.hyp1f1(2, 0.5, -x * x * mp.tanh(t)) / (mp.cosh(t) ** 2 * mp.sinh(t)))

    return mp.quad(f, [0, 1, 5, 20, 60]) / (2 * mp.pi)


def squeezed_amplitudes(r, n_max):
    # S(xi)|0> with xi = -r (real, negative): positive coefficients.
    c = [mp.mpf(0)] * (n_max + 1)
    for m in range(n_max // 2 + 1):
        c[2 * m] = (mp.tanh(r) / 2) ** m * mp.sqrt(mp.factorial(2 * m)) / (mp.factorial(m) * mp.sqrt(mp.cosh(r)))
    return c


def displaced_fock_amplitudes(alpha, n, n_max):
    a2 = abs(alpha) ** 2
    c = []
    for m in range(n_max + 1):
        if m >= n:
            v = mp.sqrt(mp.factorial(n) / mp.factorial(m)) * alpha ** (m - n) * mp.laguerre(n, m - n, a2)
        else:
            v = mp.sqrt(mp.factorial(m) / mp.factorial(n)) * (-mp.conj(alpha)) ** (n - m) * mp.laguerre(m, n - m, a2)
        c.append(v * mp.exp(-a2 / 2))
    return c


def moment(c, k, renormalize=True):
    norm = sum(abs(v) ** 2 for v in c) if renormalize else 1
    return sum(c[n + k] * mp.conj(c[n]) for n in range(len(c) - k)) / norm


def show(label, value):
    if isinstance(value, mp.mpc):
        print(f"{label}: {mp.nstr(value.real, 17)} {mp.nstr(value.imag, 17)}")
    else:
        print(f"{label}: {mp.nstr(value, 17)}")


if __name__ == "__main__":
    for n, x in [(0, 0.3), (1, -1.2), (10, 2.5), (50, 3.0), (200, 12.0), (1000, 30.0), (30, 9.0)]:
        show(f"psi({n}, {x})", psi(n, x))
    for n, x in [(5, 1.3), (12, -0.7), (25, 4.0)]:
        show(f"H({n}, {x})", mp.hermite(n, x))
    for a, b, y in [(3, 0.5, -4), (2, 1.5, -100), (12, 0.5, -150), (1.5, 2.5, -30), (0.5, 1.5, -2),
                    (2, 0.5, -0.01), (7, 1.5, -60), (2, 1.5, -43.4), (2, 1.5, -43.6)]:
        show(f"Phi({a}, {b}, {y})", mp.hyp1f1(a, b, y))
    for t in [0.5, 10, 15, 15.5, 50]:
        show(f"I0({t})", mp.besseli(0, t))
        show(f"I0s({t})", mp.besseli(0, t) * mp.exp(-t))
    for k, l in [(1, 0), (1, 1), (2, 3), (3, 10), (5, 40), (4, 25)]:
        show(f"C({k}, {l})", series_coeff(k, l))
    for n, k in [(1, 3), (1, 4), (1, 5), (2, 5), (2, 6), (3, 9)]:
        show(f"S_{n}({k})", f_series_sum(n, k))
    for x in [0.25, 1.0, 2.0, 3.5]:
        show(f"ker1({x})", ker1(x))
    base = ker2(0.5)
    for x in [1.0, 2.0, 3.5]:
        show(f"ker2({x}) - ker2(0.5)", ker2(x) - base)

    show("coherent alpha=1 Psi_1", mp.exp(-1) * mp.nsum(lambda n: 1 / (mp.factorial(n) * mp.sqrt(n + 1)), [0, mp.inf]))
    r = mp.mpf("1.31")
    show("sinh^2(1.31)", mp.sinh(r) ** 2)
    full = squeezed_amplitudes(r, 600)
    for n_max in [20, 100]:
        c = full[: n_max + 1]
        norm = sum(v * v for v in c)
        show(f"squeezed n_max={n_max} leakage", 1 - norm)
        show(f"squeezed n_max={n_max} <n>", sum(i * c[i] ** 2 for i in range(len(c))) / norm)
        for k in [2, 4, 8]:
            show(f"squeezed n_max={n_max} Psi_{k}", moment(c, k))
    for k in [2, 4, 8]:
        show(f"squeezed untruncated Psi_{k}", moment(full, k))
    alpha = mp.mpf("-1.5")
    full = displaced_fock_amplitudes(alpha, 2, 200)
    c = full[:61]
    show("displaced n_max=60 leakage", 1 - sum(abs(v) ** 2 for v in c))
    for k in [1, 2, 3, 8]:
        show(f"displaced Psi_{k}", moment(full, k))
