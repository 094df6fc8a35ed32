"""Hydrostatic reference densities for the adiabatic and isothermal backgrounds.

Integrates dp/dphi = -rho(p) with classical RK4 in 40-digit arithmetic,
independent of the closed-form profiles, and prints the values that
crates/core/tests/scenarios.rs freezes. Halving the step changes no printed
digit.
"""

import mpmath as mp

mp.mp.dps = 40
gamma, R, p0, g = mp.mpf("1.4"), mp.mpf(287), mp.mpf(100000), mp.mpf("9.81")
K = p0 * (R / p0) ** gamma


def adiabatic_rho(theta):
    # constant theta: rho theta = (p / K)^(1 / gamma)
    return lambda phi, p: -((p / K) ** (1 / gamma)) / theta


def isothermal_rho(T):
    return lambda phi, p: -p / (R * T)


def integrate(rhs, phi_end, steps):
    h = phi_end / steps
    phi, p = mp.mpf(0), p0
    for _ in range(steps):
        k1 = rhs(phi, p)
        k2 = rhs(phi + h / 2, p + h / 2 * k1)
        k3 = rhs(phi + h / 2, p + h / 2 * k2)
        k4 = rhs(phi + h, p + h * k3)
        p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        phi += h
    return p


for name, rhs, to_rho in [
    ("adiabatic theta=300", adiabatic_rho(mp.mpf(300)), lambda p: (p / K) ** (1 / gamma) / 300),
    ("isothermal T=250", isothermal_rho(mp.mpf(250)), lambda p: p / (R * 250)),
]:
    for height in [250, 1000, 5000]:
        p = integrate(rhs, g * height, 4 * height)
        print(f"{name} z={height}: rho={mp.nstr(to_rho(p), 20)} p={mp.nstr(p, 20)}")
