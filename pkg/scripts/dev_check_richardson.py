"""Check h^4 scaling and Richardson extrapolation of Morse eigenvalues."""
import math

import numpy as np

from dimerspec import radial
from dimerspec.potential import MoleculeSystem, make_morse


def morse_exact(d_e, a, mu, asym, v):
    w = a * math.sqrt(2.0 * d_e / mu)
    x = w / (4.0 * d_e)
    return asym - d_e + w * (v + 0.5) - w * x * (v + 0.5) ** 2


d_e, a, r_e, asym = 0.02, 0.72, 4.0, 0.0
mu = 12000.0
curve = make_morse(d_e, a, r_e, asym, label="g")

errs = {}
for ppw in (40, 80):
    system = MoleculeSystem(reduced_mass=mu, ground=curve, excited=(), dipoles=())
    levels = radial.bound_levels(system, "g", 0, ppw=ppw)
    errs[ppw] = np.array([lv.energy - morse_exact(d_e, a, mu, asym, lv.v)
                          for lv in levels])
    rel = np.array([abs(e) / abs(morse_exact(d_e, a, mu, asym, i))
                    for i, e in enumerate(errs[ppw])])
    print(f"ppw={ppw}: max rel (v<=20) {rel[:21].max():.2e}  (all) {rel.max():.2e}")

ratio = errs[40][:21] / errs[80][:21]
print("h^4 ratio (expect ~16):", np.round(ratio[1:], 1))

rich = (16.0 * errs[80] - errs[40]) / 15.0
exact = np.array([morse_exact(d_e, a, mu, asym, v) for v in range(len(rich))])
rel_rich = np.abs(rich) / np.abs(exact)
print("richardson max rel (v<=20):", rel_rich[:21].max())
print("richardson max rel (all):  ", rel_rich.max())
