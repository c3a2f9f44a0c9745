#!/usr/bin/env python3
"""Independent reference values for the C++ tests.

Direct summations and hand formulas written without reference to the C++
implementation. Run it to regenerate the frozen constants in tests/*.cpp.
"""
import math

# Table 1 parameters
BETA, SIGMA = 3.0, 1.732
S, DMAX, SIGMA_SN = 0.625, 0.0283, 0.0446


def pdr_terms(n, tau):
    s = sum(S * (1.0 - math.cos(DMAX * (k - 1) * tau)) for k in range(1, n + 1))
    g = sum(S * math.sin(DMAX * (k - 1) * tau) for k in range(1, n + 1))
    return s + SIGMA_SN, g


def fim(user, beacons, beta=BETA, sigma=SIGMA):
    c = (10.0 * beta / (sigma * math.log(10.0))) ** 2
    jxx = jyy = jxy = 0.0
    for bx, by in beacons:
        a = math.atan2(by - user[1], bx - user[0])
        d2 = (bx - user[0]) ** 2 + (by - user[1]) ** 2
        jxx += math.cos(a) ** 2 / d2
        jyy += math.sin(a) ** 2 / d2
        jxy += math.sin(a) * math.cos(a) / d2
    return c, c * jxx, c * jxy, c * jyy


def main():
    print("predict(10) =", -59.0 - 30.0 * math.log10(10.0))
    print("predict(0.5) =", repr(-59.0 - 30.0 * math.log10(0.5)))

    four = [(5, 0), (-5, 0), (0, 5), (0, -5)]
    c, jxx, jxy, jyy = fim((0, 0), four)
    det = jxx * jyy - jxy * jxy
    vx, vy = jyy / det, jxx / det
    print("c =", repr(c))
    print("fim4 jxx, jxy, jyy =", repr(jxx), repr(jxy), repr(jyy))
    print("crlb4 var, trace, rmse =", repr(vx), repr(vx + vy), repr(math.sqrt(vx + vy)))

    for n in (2, 3, 80):
        s, g = pdr_terms(n, 1.0)
        print(f"tau=1 n={n}: sigma_s={s!r} sigma_g={g!r} rmse={math.hypot(s, g)!r}")
    s, g = pdr_terms(80, 0.5)
    print(f"tau=0.5 n=80: sigma_s={s!r} sigma_g={g!r}")

    s2, g2 = pdr_terms(2, 1.0)
    fr = math.sqrt(vx * s2 ** 2 / (vx + s2 ** 2) + vy * g2 ** 2 / (vy + g2 ** 2))
    print("fused_rmse(crlb4, pdr n=2) =", repr(fr))


if __name__ == "__main__":
    main()
