"""Reference values for the logarithmic and Stolarsky means at 50 digits.

Prints Rust array literals consumed by crates/core/tests/means_oracle.rs.
"""
import mpmath as mp

mp.mp.dps = 50


def logmean(a, b):
    if a == b:
        return a
    return (b - a) / (mp.log(b) - mp.log(a))


def stolarsky(g, a, b):
    if a == b:
        return a
    return (g - 1) / g * (b**g - a**g) / (b ** (g - 1) - a ** (g - 1))


gamma = mp.mpf("1.4")
print("// (a, b, log_mean, stolarsky_1_4)")
for a_str in ["1.0", "0.37", "1234.5"]:
    for k in range(16, 2, -1):
        for m in ["1", "3"]:
            a = float(a_str)
            b = a * (1.0 + float(m + "e-" + str(k)))
            if b == a:
                continue
            am, bm = mp.mpf(a), mp.mpf(b)
            print(f"    ({a!r}, {b!r}, {mp.nstr(logmean(am, bm), 20)}, {mp.nstr(stolarsky(gamma, am, bm), 20)}),")
print("// far apart")
for a, b in [(1.0, 2.0), (1.0, float(mp.e)), (0.5, 7.25), (1e-3, 1e3)]:
    am, bm = mp.mpf(a), mp.mpf(b)
    print(f"    ({a!r}, {b!r}, {mp.nstr(logmean(am, bm), 20)}, {mp.nstr(stolarsky(gamma, am, bm), 20)}),")
