"""Independent high-precision values frozen into the C++ tests.

Flat chart, m = 1, lambda = 1:
  F u(z, xi) = int e^{i xi (z - y) - |xi| (z - y)^2} (1 + i (z - y) sgn xi) u(y) dy
"""
import mpmath as mp

mp.mp.dps = 30


def fbi(u_lo, u_hi, z, xi, u=lambda y: 1):
    s = mp.sign(xi)
    a = abs(xi)
    f = lambda y: mp.e ** (1j * xi * (z - y) - a * (z - y) ** 2) * (1 + 1j * (z - y) * s) * u(y)
    pts = [u_lo, z, u_hi] if u_lo < z < u_hi else [u_lo, u_hi]
    return mp.quad(f, pts)


for xi in (20, 40, -20):
    v = fbi(-1, 1, 0, xi)
    print(f"indicator[-1,1] z=0 xi={xi}: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")

# Heaviside: the Gaussian decays fast, so [0, 12/sqrt|xi|] is the whole line.
for xi in (2, 4, 8, 16, 32, 64, -2, -64):
    v = fbi(0, 12 / mp.sqrt(abs(xi)), 0, xi)
    print(f"heaviside z=0 xi={xi}: |xi||F| = {mp.nstr(abs(xi) * abs(v), 17)}")

# Dirac at 0: F = e^{i xi z - |xi| z^2} (1 + i z sgn xi)
z, xi = mp.mpf("0.3"), mp.mpf(5)
v = mp.e ** (1j * xi * z - xi * z ** 2) * (1 + 1j * z)
print(f"dirac z=0.3 xi=5: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")

# Gaussian e^{-y^2}, z = 0.2, xi = 6
v = fbi(-12, 12, mp.mpf("0.2"), 6, lambda y: mp.e ** (-y * y))
print(f"gaussian z=0.2 xi=6: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")

# Plemelj: b(1/(x + i0)) paired with psi0(x) = e^{-x^2}: p.v. part 0, delta part -i pi.
print(f"bv 1/z vs e^(-x^2): {mp.nstr(-mp.pi, 17)}i")

# Bump integral for psi normalisation: int_0^1 u^{m-1} e^{-1/(1-u)} du
for m in (1, 2):
    print(f"psi profile moment m={m}: {mp.nstr(mp.quad(lambda u: u ** (m - 1) * mp.e ** (-1 / (1 - u)), [0, 1]), 17)}")

# Wedge pairing of z^2 with a Gaussian test: int x^2 e^{-x^2} dx = sqrt(pi)/2
print(f"bv z^2 vs e^(-x^2): {mp.nstr(mp.sqrt(mp.pi) / 2, 17)}")
