"""Writes the Al(x)Ga(1-x)As refractive-index table used by the example config.

Modified single-effective-oscillator fit (Afromowitz, Solid State Commun. 15,
59 (1974)), evaluated below the direct gap only.
"""
import argparse
import csv
import math

HC_EV_NM = 1239.84198


def index(lambda_nm, x):
    e = HC_EV_NM / lambda_nm
    e0 = 3.65 + 0.871 * x + 0.179 * x * x
    ed = 36.1 - 2.45 * x
    eg = 1.424 + 1.266 * x + 0.26 * x * x
    eta = math.pi * ed / (2 * e0**3 * (e0**2 - eg**2))
    n2 = (1 + ed / e0 + ed * e * e / e0**3
          + eta * e**4 / math.pi * math.log((2 * e0**2 - eg**2 - e * e) / (eg**2 - e * e)))
    return math.sqrt(n2)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--x", type=float, default=0.4, help="aluminium fraction")
    p.add_argument("--start", type=float, default=640.0)
    p.add_argument("--stop", type=float, default=2000.0)
    p.add_argument("--step", type=float, default=5.0)
    p.add_argument("out")
    a = p.parse_args()
    n = int(round((a.stop - a.start) / a.step))
    with open(a.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["lambda_nm", "n"])
        for i in range(n + 1):
            lam = a.start + i * a.step
            w.writerow([f"{lam:.1f}", f"{index(lam, a.x):.6f}"])


if __name__ == "__main__":
    main()
