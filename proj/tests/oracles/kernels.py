"""Reference values for the interaction kernel tests.

Free-space profile: closed form with 1F1, cross-checked by oscillatory
quadrature of the 1D inverse Fourier integral. Torus profile: direct sum of
the Fourier series on a very fine mode set.
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 30
N, kappa, kappa_hat, beta, d = 256, 0.23, 0.03, 0.5, 1
kN = mp.mpf(N) ** (kappa / d)
khN = mp.mpf(N) ** (kappa_hat / d)
s = 1 / kN**2 + 1 / khN**2


def profile_quad(r):
    f = lambda x: x**beta * mp.e ** (-s * x**2 / 2) * mp.sin(x * r)
    return -mp.quadosc(f, [0, mp.inf], omega=r) / mp.pi


def profile_closed(r):
    a = (d + beta + 1) / mp.mpf(2)
    nu = mp.mpf(d) / 2
    return (-(2 * mp.pi) ** (-nu) * r * mp.gamma(a)
            / (2 ** (nu + 1) * (s / 2) ** a * mp.gamma(nu + 1))
            * mp.hyp1f1(a, nu + 1, -r**2 / (2 * s)))


print("kappa_N", kN, "kappa_hat_N", khN, "variance", s)
for r in [0.5, 1, 2, 5]:
    print("free", r, mp.nstr(profile_closed(r), 17), mp.nstr(profile_quad(r), 17))

al = mp.mpf("0.85")
print("c_1", 4**al * mp.gamma(0.5 + al) / (mp.sqrt(mp.pi) * abs(mp.gamma(-al))))

L = 16 * np.pi
M = 2**20
k = np.fft.fftfreq(M, d=1.0 / M)
xi = 2 * np.pi * k / L
safe = np.where(xi == 0, 1.0, np.abs(xi))
mult = 1j * xi * safe ** (beta - 1)
mult[0] = 0
G = np.exp(-float(s) * xi**2 / 2)
for r in [0.5, 2, 5, 10, 20]:
    v = np.real(np.sum(mult * G * np.exp(1j * xi * r))) / L
    print("torus", r, repr(v))
