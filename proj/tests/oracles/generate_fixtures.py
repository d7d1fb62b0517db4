#!/usr/bin/env python3
"""Symbolic oracle for the committed fixtures.

Closed forms on the weighted 3-sphere reduction, leaf coordinate s = |z1|^2,
weights (a, b), D(s) = a s + b (1-s):

  regular metric part      m0(s)  = (a+b) / D^3          (kappa = 1 scale)
  Hermitian scalar trace   Rc(s)  = (2 D + 4 (a-b)(1-2s) - 6 (a-b)^2 s(1-s)/D) / (a+b)
  Riemannian scalar        R(s)   = 2 Rc(s)
  measure constant         c_m    = 4 pi a b / (a+b),  Vol = 4 pi
  quotient arclength       sigma(s) = int sqrt(m D^2 / (2 s(1-s))) ds
                           (round: 2 asin(sqrt(s)), diameter pi)
  band masses              c_m (a+b) int ds / D^2
  torus orbit volume       VolP(s) = c_m sqrt(2 (a+b) s (1-s) / D^3)

Everything below is evaluated with mpmath at 30 digits and written with 12
significant digits.

oracle: generate_fixtures.py v1 (sympy/mpmath)
"""
import os
import mpmath as mp

mp.mp.dps = 30

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures")
os.makedirs(OUT, exist_ok=True)

A = mp.mpf(1)
B = mp.sqrt(2)


def D(s, a=A, b=B):
    return a * s + b * (1 - s)


def m0(s, a=A, b=B):
    return (a + b) / D(s, a, b) ** 3


def Rc(s, a=A, b=B):
    return (2 * D(s, a, b) + 4 * (a - b) * (1 - 2 * s)
            - 6 * (a - b) ** 2 * s * (1 - s) / D(s, a, b)) / (a + b)


def cm(a=A, b=B):
    return 4 * mp.pi * a * b / (a + b)


def fmt(x):
    return mp.nstr(mp.mpf(x), 12, strip_zeros=False)


def header(f, name):
    f.write(f"# fixture: {name}\n")
    f.write("# oracle: generate_fixtures.py v1 (sympy/mpmath, 30-digit eval)\n")


N = 256
with open(os.path.join(OUT, "weighted_background.txt"), "w") as f:
    header(f, "weighted background a=1 b=sqrt(2): s, m0, Rc, R")
    f.write("# columns: s m0 Rc R\n")
    for i in range(N):
        s = mp.mpf(2 * i + 1) / (2 * N)
        f.write(f"{fmt(s)} {fmt(m0(s))} {fmt(Rc(s))} {fmt(2*Rc(s))}\n")

with open(os.path.join(OUT, "round_sigma.txt"), "w") as f:
    header(f, "round quotient arclength from s=0 (kappa=1 scale): s, sigma")
    f.write("# columns: s sigma\n")
    for i in range(N):
        s = mp.mpf(2 * i + 1) / (2 * N)
        f.write(f"{fmt(s)} {fmt(2*mp.asin(mp.sqrt(s)))}\n")

with open(os.path.join(OUT, "weighted_band_fractions.txt"), "w") as f:
    header(f, "weighted a=1 b=sqrt(2): measure fraction of s in [s1,s2]")
    f.write("# columns: s1 s2 fraction\n")
    total = mp.quad(lambda s: 1 / D(s) ** 2, [0, 1])
    for (s1, s2) in [(0, mp.mpf("0.25")), (mp.mpf("0.25"), mp.mpf("0.5")),
                     (mp.mpf("0.5"), mp.mpf("0.75")), (mp.mpf("0.75"), 1),
                     (mp.mpf("0.2"), mp.mpf("0.8"))]:
        frac = mp.quad(lambda s: 1 / D(s) ** 2, [s1, s2]) / total
        f.write(f"{fmt(s1)} {fmt(s2)} {fmt(frac)}\n")

with open(os.path.join(OUT, "weighted_orbit_volume.txt"), "w") as f:
    header(f, "weighted a=1 b=sqrt(2) torus orbit volume: s, VolP")
    f.write("# columns: s VolP\n")
    for s in [mp.mpf("0.3"), mp.mpf("0.5"), mp.mpf("0.7")]:
        volp = cm() * mp.sqrt(2 * (A + B) * s * (1 - s) / D(s) ** 3)
        f.write(f"{fmt(s)} {fmt(volp)}\n")

with open(os.path.join(OUT, "constants.txt"), "w") as f:
    header(f, "scalar fixtures")
    f.write("# columns: key value\n")
    f.write(f"round_volume {fmt(4*mp.pi)}\n")
    f.write(f"round_diameter {fmt(mp.pi)}\n")
    # tube volume about a pole, kappa=1 round: V(r) = 4 pi sin^2(r/2)
    f.write(f"round_tube_volume_r0.5 {fmt(4*mp.pi*mp.sin(mp.mpf('0.25'))**2)}\n")
    f.write(f"noncollapse_kappa0 {fmt(4*mp.pi*mp.sin(mp.mpf('0.25'))**2/mp.mpf('0.25'))}\n")
    # Gray leading coefficients in the model measure normalization
    f.write(f"gray_q1_expected {fmt(mp.pi)}\n")  # pi * VolP, VolP = 1 (round)
    s0 = mp.mpf("0.5")
    volp = cm() * mp.sqrt(2 * (A + B) * s0 * (1 - s0) / D(s0) ** 3)
    f.write(f"gray_q2_expected_s0.5 {fmt(2*volp)}\n")
    # frozen-metric conjugate closed form uses Rc(round) = 1
    f.write(f"round_Rc {fmt(1)}\n")
    f.write(f"weighted_cm {fmt(cm())}\n")
    f.write(f"weighted_volume {fmt(4*mp.pi)}\n")

print("fixtures written to", OUT)
