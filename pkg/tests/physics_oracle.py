"""Brute-force reference values for the cylinder sums and integrals.

Everything here is evaluated in the unfolded form: orders over all
integers ``|j| <= J`` and wavenumbers over the whole real line, using
mpmath with ``K_j`` from upward recurrence off ``K_0, K_1`` (no ratio
ladders, no log space) and dense graded Gauss-Legendre panels.  Run
``python tests/physics_oracle.py`` to regenerate the constants frozen in
``tests/golden.py``; a second pass with doubled panels reports the
oracle's own convergence.
"""
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 20
ORDERS = 60
# integrands fall like exp(-2 |k| d); stop at exp(-2 * DECAYS)
DECAYS = 18.0


def i_values(x, J, extra=40):
    """I_0..I_J by Miller's backward recurrence normalised to mpmath's I_0."""
    x = mp.mpf(x)
    top = J + extra + int(x)
    vals = [mp.mpf(0)] * (top + 2)
    vals[top] = mp.mpf(1) * mp.mpf(10) ** -30
    for j in range(top, 0, -1):
        vals[j - 1] = vals[j + 1] + 2 * j / x * vals[j]
    scale = mp.besseli(0, x) / vals[0]
    return [v * scale for v in vals[: J + 1]]


def k_values(x, J):
    x = mp.mpf(x)
    K = [mp.besselk(0, x), mp.besselk(1, x)]
    for j in range(1, J):
        K.append(K[j - 1] + 2 * j / x * K[j])
    return K


class Radial:
    """F_j and D_j = d/drho K_j(|k| rho) / K_j(|k| a) for j = 0..J at one k."""

    def __init__(self, k, a, rho, J):
        x = abs(mp.mpf(k))
        Kr = k_values(x * rho, J + 2)
        Ka = k_values(x * a, J + 1)
        self.F = [Kr[j] / Ka[j] for j in range(J + 1)]
        self.D = [-x * (Kr[abs(j - 1)] + Kr[j + 1]) / 2 / Ka[j] for j in range(J + 1)]


def panels(kinks, L, scale, refine=1):
    """Graded panel edges on [-L, L]: geometric towards each kink, uniform elsewhere.

    The grading reaches 2^-40 of the scale so the log singularity of
    I_0 K_0 at k = 0 is resolved.
    """
    pts = {-L, L}
    for c in kinks:
        for s in (-1, 1):
            for e in range(0, 40):
                pts.add(c + s * scale * 2.0 ** (-e))
    step = scale / refine
    pts.update(np.arange(-L, L, step).tolist())
    return np.array(sorted(p for p in pts if -L <= p <= L))


def integrate(f, edges, n=20):
    x, w = np.polynomial.legendre.leggauss(n)
    total = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo < 1e-14:
            continue
        c, h = (lo + hi) / 2, (hi - lo) / 2
        for xi, wi in zip(x, w):
            v = f(c + h * xi)
            v = [h * wi * t for t in v]
            total = v if total is None else [s + t for s, t in zip(total, v)]
    return total


def xi_oracle(a, rho, refine=1, J=ORDERS):
    """(Xi_rho, Xi_phi, Xi_z) = -(1/pi) sum_j int dk I_j/K_j(|k|a) * {..} over all j, k."""

    def f(k):
        if k == 0:
            return [0, 0, 0]
        r = Radial(k, a, rho, J)
        x = abs(k) * a
        Ka = k_values(x, J + 1)
        Iv = i_values(x, J)
        out = [mp.mpf(0)] * 3
        for j in range(-J, J + 1):
            m = abs(j)
            P = Iv[m] * Ka[m]
            out[0] += P * r.D[m] ** 2
            out[1] += j * j * P * r.F[m] ** 2 / rho**2
            out[2] += k * k * P * r.F[m] ** 2
        return out

    edges = panels([0.0], DECAYS / (rho - a), 1.0 / (rho - a), refine)
    return [-v / mp.pi for v in integrate(f, edges)]


def u0_oracle(a, rho, refine=1, J=ORDERS):
    def f(k):
        if k == 0:
            return [0]
        r = Radial(k, a, rho, J)
        x = abs(k) * a
        Ka = k_values(x, J + 1)
        Iv = i_values(x, J)
        return [sum(Iv[abs(j)] * Ka[abs(j)] * r.F[abs(j)] ** 2 for j in range(-J, J + 1))]

    edges = panels([0.0], DECAYS / (rho - a), 1.0 / (rho - a), refine)
    return -integrate(f, edges)[0] / mp.pi


def _pair(f_pair, kinks, a, rho, refine):
    edges = panels(kinks, DECAYS / (rho - a) + max(abs(c) for c in kinks), 1.0 / (rho - a), refine)
    return integrate(f_pair, edges)


def lateral_z_oracle(a, d, k_c, refine=1, J=ORDERS):
    """S = sum_j int dk F_j(k) F_j(k + k_c)."""
    rho = a + d

    def f(k):
        r0, r1 = Radial(k, a, rho, J), Radial(k + k_c, a, rho, J)
        return [sum(r0.F[abs(j)] * r1.F[abs(j)] for j in range(-J, J + 1))]

    return _pair(f, [0.0, -k_c], a, rho, refine)[0]


def lateral_phi_oracle(a, d, N, refine=1, J=ORDERS):
    """S = sum_j int dk F_j(k) F_{j+N}(k)."""
    rho = a + d

    def f(k):
        r = Radial(k, a, rho, J + N)
        return [sum(r.F[abs(j)] * r.F[abs(j + N)] for j in range(-J - N, J + 1))]

    return _pair(f, [0.0], a, rho, refine)[0]


def r_z_oracle(a, rho, k_c, refine=1, J=ORDERS):
    """(R_rho_rho, R_phi_phi, R_zz, R_rho_z) from the two-sided first-order kernels.

    With j' = j and k' = k - k_c:
    C-part  -(1/(pi a)) sum int {D D', j^2 F F'/rho^2, k k' F F'},
    B-part  +(1/(pi a)) sum int [k F D' - k' D F'].
    """

    def f(k):
        r0, r1 = Radial(k, a, rho, J), Radial(k - k_c, a, rho, J)
        kp = k - k_c
        out = [mp.mpf(0)] * 4
        for j in range(-J, J + 1):
            m = abs(j)
            F, D, Fp, Dp = r0.F[m], r0.D[m], r1.F[m], r1.D[m]
            out[0] += D * Dp
            out[1] += j * j * F * Fp / rho**2
            out[2] += k * kp * F * Fp
            out[3] += k * F * Dp - kp * D * Fp
        return out

    vals = _pair(f, [0.0, k_c], a, rho, refine)
    p = 1 / (mp.pi * a)
    return [-p * vals[0], -p * vals[1], -p * vals[2], p * vals[3]]


def r_phi_oracle(a, rho, N, refine=1, J=ORDERS):
    """(R_rho_rho, R_phi_phi, R_zz, R_rho_phi) with j' = j - N and k' = k."""

    def f(k):
        r = Radial(k, a, rho, J + N)
        out = [mp.mpf(0)] * 4
        for j in range(-J, J + N + 1):
            jp = j - N
            F, D, Fp, Dp = r.F[abs(j)], r.D[abs(j)], r.F[abs(jp)], r.D[abs(jp)]
            out[0] += D * Dp
            out[1] += j * jp * F * Fp / rho**2
            out[2] += k * k * F * Fp
            out[3] += (j * F * Dp - jp * D * Fp) / rho
        return out

    vals = _pair(f, [0.0], a, rho, refine)
    p = 1 / (mp.pi * a)
    return [-p * vals[0], -p * vals[1], -p * vals[2], p * vals[3]]


def two_sided(family, a, rho, shift, q, J=300):
    """Unfolded order sum ``sum_{|j|<=J} [g_j(q) + g_j(-q)]`` of one family at one wavenumber.

    Returns ``(components, fold)``: the folded primed sum over ``j >= 0`` of
    the library's summand must equal ``components / fold`` (the fold factor
    also absorbs the sign flip of the cross terms, whose folded form comes
    from shifting the summation variable).
    ``shift`` is ``k_c`` for the axial families and ``N`` for the azimuthal ones.
    """
    with mp.workdps(30):
        out = None
        for s in (1, -1):
            vals = _two_sided_at(family, a, rho, shift, s * mp.mpf(q), J)
            out = vals if out is None else [x + y for x, y in zip(out, vals)]
    return out, _FOLD[family](rho)


def _table(k, a, rho, J):
    """F_j, D_j at ``|k|`` indexed by signed order."""
    r = Radial(k, a, rho, J)
    return (lambda j: r.F[abs(j)]), (lambda j: r.D[abs(j)])


def _two_sided_at(family, a, rho, shift, q, J):
    if family in ("u0", "xi"):
        F, D = _table(q, a, rho, J)
        x = abs(q) * a
        Ka, Iv = k_values(x, J + 1), i_values(x, J)
        P = lambda j: Iv[abs(j)] * Ka[abs(j)]
        if family == "u0":
            return [sum(P(j) * F(j) ** 2 for j in range(-J, J + 1))]
        return [sum(P(j) * D(j) ** 2 for j in range(-J, J + 1)),
                sum(j * j * P(j) * F(j) ** 2 for j in range(-J, J + 1)) / rho**2,
                sum(q * q * P(j) * F(j) ** 2 for j in range(-J, J + 1))]
    if family == "lateral_z":
        F0, _ = _table(q, a, rho, J)
        F1, _ = _table(q + shift, a, rho, J)
        return [sum(F0(j) * F1(j) for j in range(-J, J + 1))]
    if family == "lateral_phi":
        N = int(shift)
        F, _ = _table(q, a, rho, J + N)
        return [sum(F(j) * F(j + N) for j in range(-J, J + 1))]
    if family == "r_z":
        h = mp.mpf(shift) / 2
        # k = q + h, k' = k - k_c = q - h for the diagonal kernels
        Fk, Dk = _table(q + h, a, rho, J)
        Fp, Dp = _table(q - h, a, rho, J)
        # the cross kernel after substituting its own shifts
        Fq, _ = _table(q, a, rho, J)
        _, Dm = _table(q - shift, a, rho, J)
        _, Du = _table(q + shift, a, rho, J)
        js = range(-J, J + 1)
        return [sum(Dk(j) * Dp(j) for j in js),
                sum(j * j * Fk(j) * Fp(j) for j in js) / rho**2,
                sum((q * q - h * h) * Fk(j) * Fp(j) for j in js),
                sum(q * Fq(j) * (Dm(j) - Du(j)) for j in js)]
    if family == "r_phi":
        N = int(shift)
        F, D = _table(q, a, rho, J + N)
        js = range(-J, J + 1)
        return [sum(D(j) * D(j - N) for j in js),
                sum(j * (j - N) * F(j) * F(j - N) for j in js) / rho**2,
                sum(q * q * F(j) * F(j - N) for j in js),
                sum((j * F(j) * D(j - N) - (j - N) * D(j) * F(j - N)) for j in js) / rho]
    raise ValueError(family)


# two-sided sum / folded primed sum, per component
_FOLD = {
    "u0": lambda rho: [4],
    "xi": lambda rho: [4, 4, 4],
    "lateral_z": lambda rho: [2],
    "lateral_phi": lambda rho: [2],
    "r_z": lambda rho: [4, 4, 4, -4],
    "r_phi": lambda rho: [2, 2, 2, -4 / rho],
}


CASES = {
    "XI_A1_R2": lambda r: xi_oracle(1.0, 2.0, r),
    "U0_A1_R2": lambda r: [u0_oracle(1.0, 2.0, r)],
    "SZ_A1_D1_KC10": lambda r: [lateral_z_oracle(1.0, 1.0, 10.0, r)],
    "SPHI_A1_D1_N10": lambda r: [lateral_phi_oracle(1.0, 1.0, 10, r)],
    "RZ_A1_R1P5_KC6": lambda r: r_z_oracle(1.0, 1.5, 6.0, r),
    "RPHI_A1_R1P5_N6": lambda r: r_phi_oracle(1.0, 1.5, 6, r),
}

if __name__ == "__main__":
    check = "--check" in sys.argv
    names = [n for n in sys.argv[1:] if not n.startswith("--")] or list(CASES)
    for name in names:
        v1 = CASES[name](1)
        line = f"{name} = ({', '.join(mp.nstr(v, 20) for v in v1)},)"
        if check:
            v2 = CASES[name](2)
            spread = max(abs((x - y) / y) for x, y in zip(v1, v2))
            line += f"  # panel-doubling change {mp.nstr(spread, 3)}"
        print(line, flush=True)
