"""Independent 40-digit evaluation of the bound constants.

Everything is computed from first principles with mpmath: d_alpha and sigma by oscillatory
quadrature, moments by quadrature against the density, L by maximisation. Prints a Rust
table consumed by crates/core/tests/constants_oracle.rs.
"""

from mpmath import mp, mpf, quad, quadosc, gamma as G, beta as B, sin, cos, tan, pi, log, findroot, inf

mp.dps = 40


def half_line(al):
    """∫₀^∞ (1 - cos u)/u^{1+α} du; past 1 the non-oscillating part is integrated exactly."""
    # u = s^k with k = 1/(2-α) removes the u^{1-α} endpoint singularity.
    k = 1 / (2 - al)
    near = quad(lambda t: 2 * sin(t ** k / 2) ** 2 / t ** (k * (1 + al)) * k * t ** (k - 1), [0, 1])
    return near + 1 / al - quadosc(lambda u: cos(u) / u ** (1 + al), [1, inf], omega=1)


def d_alpha(al):
    return 1 / half_line(al)


def sigma(al, a):
    return (a * al * 2 * half_line(al)) ** (1 / al)


def etas(al, delta):
    dt = delta * tan(pi * al / 2)
    e1 = max(G(1 / al) / (pi * al), (al - 1) * (1 + dt) * (2 + dt) * G((al - 1) / al) / pi)
    e2 = B(2 / al, 1 - 1 / al) * max(G(2 / al) / (pi * al), (1 + dt) * (1 + 2 * al + al * dt) / pi)
    fac = (4 * al + 2 * al ** ((2 * al - 2) / al) - 1) / (al - 1)
    b4 = max(G(1 / al) / al, al * 2 ** (al - 1) * sin(al * pi / 2) * G((1 + al) / 2) * G(al / 2) / pi ** mpf(1.5))
    return e1, e2, fac * e1, fac * b4


class PowerTail:
    """Density (1 ± δ)(Aα|x|^{-α-1} + b(α+γ)|x|^{-α-γ-1}) on ±x ≥ x0."""

    def __init__(self, al, a, delta, b, g, l=None):
        self.al, self.a, self.delta, self.b, self.g = map(mpf, (al, a, delta, b, g))
        al, a, b, g = self.al, self.a, self.b, self.g
        mass = lambda x: 2 * (a * x ** -al + b * x ** (-al - g)) - 1
        lo = (-(al + g) * b / (al * a)) ** (1 / g) if b < 0 else mpf("1e-6")
        hi = mpf(2)
        while mass(hi) > 0:
            hi *= 2
        self.x0 = findroot(mass, (lo * (1 + mpf("1e-30")) if b < 0 else lo, hi), solver="bisect") if b != 0 else (2 * a) ** (1 / al)
        if l is None:
            inner = lambda x: x ** g * abs(x ** al / 2 - a)
            cands = [self.x0, min(self.x0, (2 * a * g / (al + g)) ** (1 / al))]
            l = max([abs(b)] + [inner(x) for x in cands])
            # Grid scan guards against a missed interior maximum.
            scan = max(inner(self.x0 * k / 2000) for k in range(1, 2001))
            assert scan <= l * (1 + mpf("1e-20")), (scan, l)
        self.l = mpf(l)

    def dens(self, x):
        al, a, b, g = self.al, self.a, self.b, self.g
        w = (1 + self.delta) if x > 0 else (1 - self.delta)
        y = abs(x)
        return w * (a * al * y ** (-al - 1) + b * (al + g) * y ** (-al - g - 1))

    def expect(self, h, kink=None):
        # x = ±x0 e^u turns the power tails into exponential ones.
        x0 = self.x0

        def side(sign):
            pts = [0, inf]
            if kink is not None and sign * kink > x0:
                pts = [0, log(sign * kink / x0), inf]
            return quad(lambda u: h(sign * x0 * mp.exp(u)) * self.dens(sign * x0 * mp.exp(u)) * x0 * mp.exp(u), pts)

        return side(1) + side(-1)

    def moments(self):
        mass = self.expect(lambda x: 1)
        assert abs(mass - 1) < mpf("1e-30"), mass
        mean = self.expect(lambda x: x)
        absm = self.expect(lambda x: abs(x))
        frac = self.expect(lambda x: abs(x - mean) ** (2 - self.al), kink=mean)
        return mean, absm, frac


def constants(law, n, m):
    al, a, l, g, delta = law.al, law.a, law.l, law.g, law.delta
    n, m = mpf(n), mpf(m)
    d, s = d_alpha(al), sigma(al, a)
    e1, e2, e3, e4 = etas(al, delta)
    mean, absm, fracm = law.moments()
    frac = d * fracm / ((2 - al) * (al - 1) * s ** (2 - al))
    mix = absm * abs(mean) / s ** 2
    ta = (2 * a) ** (2 / al)
    k = 8 * al ** 2 * (a + l) - 4 * l
    num = 8 * al ** 2 * (a + l) - 4 * al * l
    q1, q2 = num / ((al - 1) * e3), num / ((al - 1) * e4)
    crit = 2 - al
    regime = "above" if g > crit else ("boundary" if g == crit else "between")
    base = n ** (1 - 2 / al)
    rn = {"above": base, "boundary": base * abs(log(s * n ** (1 / al))),
          "between": n ** (-(al - 1) * g / (al * (1 - g)))}[regime]
    if regime == "above":
        r1 = 8 * ta / s ** 2 * (2 / (2 - al) + 2 * l / (al + g - 2) * (2 * a) ** (-(al + g) / al)) * e2
    elif regime == "boundary":
        r1 = (4 * (4 * ta / (2 - al) + 8 * l / (al - 1)) * e2 + k / (al - 1)) / s ** 2
    else:
        r1 = s ** ((al - g) / (g - 1)) * (4 * (4 * ta / (2 - al) + 8 * l / (2 - al - g)) * e2 + k / (al - 1))
    c1 = (16 * frac + 12 * mix) * e2 + r1

    def nonuniform(eta, q, e, e_between):
        moment = (4 * frac + 3 * mix) * eta * m ** -e
        if regime == "above":
            case = 2 * ta / s ** 2 * (2 / (2 - al) + 2 * l / (al + g - 2) * (2 * a) ** (-(al + g) / al)) * m ** -e
        elif regime == "boundary":
            case = ((4 * ta / (2 - al) + 8 * l / (al - 1)) + q) / s ** 2 * e * log(m) * m ** -e
        else:
            case = s ** ((al - g) / (g - 1)) * ((4 * ta / (2 - al) + 8 * l / (2 - al - g)) + q) * m ** -e_between
        return moment + eta * case

    c2 = nonuniform(e3, q1, 2 * (al - 1) / (3 * al - 1), 2 * (al - 1) ** 2 / ((3 * al - 1) * (1 - g)))
    c3 = None
    if delta == 0:
        c3 = nonuniform(e4, q2, (al ** 2 - 1) / (al ** 2 + 2 * al - 1),
                        (al ** 2 - 1) * (al - 1) / ((al ** 2 + 2 * al - 1) * (1 - g)))
    return dict(d_alpha=d, sigma=s, eta1=e1, eta2=e2, eta3=e3, eta4=e4, q1=q1, q2=q2, rn=rn, c1=c1, c2m=c2, c3m=c3,
                l=l, mean=mean, abs_mean=absm, frac_centered=fracm)


CASES = [
    ("pareto", (1.2,), 1000, 2),
    ("pareto", (1.5,), 1000, 4),
    ("pareto", (1.8,), 100, 2),
    ("power_tail", (1.5, 0.5, 0.3, 0.2, 0.5), 1000, 2),
    ("power_tail", (1.5, 0.5, 0.0, 0.2, 0.3), 1000, 4),
    ("power_tail", (1.6, 0.4, -0.4, -0.1, 0.9), 500, 3),
]

KEYS = ["d_alpha", "sigma", "l", "mean", "abs_mean", "frac_centered", "eta1", "eta2", "eta3", "eta4", "q1", "q2", "rn",
        "c1", "c2m", "c3m"]


def law_of(kind, args):
    if kind == "pareto":
        return PowerTail(args[0], 0.5, 0, 0, 2, l=mpf(1) / 2)
    return PowerTail(*args)


def main():
    print("// Generated by tools/constants_oracle.py (mpmath, 40 digits).")
    print("pub const CASES: &[Case] = &[")
    for kind, args, n, m in CASES:
        c = constants(law_of(kind, args), n, m)
        fields = ", ".join(
            f"{k}: {'None' if c[k] is None else 'Some(' + mp.nstr(c[k], 20) + ')'}" if k == "c3m" else f"{k}: {mp.nstr(c[k], 20)}"
            for k in KEYS)
        argl = ", ".join(repr(float(x)) for x in args)
        print(f"    Case {{ kind: \"{kind}\", args: &[{argl}], n: {float(n)}, m: {float(m)}, {fields} }},")
    print("];")


if __name__ == "__main__":
    main()
