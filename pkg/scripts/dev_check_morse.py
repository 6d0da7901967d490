"""Dev sanity check: Morse eigenvalues vs the closed form, timing, node counts."""
import math
import time

import numpy as np

from dimerspec import radial
from dimerspec.potential import MoleculeSystem, make_morse


def morse_exact(d_e, a, r_e, mu, asym, v):
    w = a * math.sqrt(2.0 * d_e / mu)
    x = w / (4.0 * d_e)
    return asym - d_e + w * (v + 0.5) - w * x * (v + 0.5) ** 2


def main():
    d_e, a, r_e, asym = 0.02, 0.72, 4.0, 0.0
    mu = 12000.0
    lam = math.sqrt(2 * mu * d_e) / a
    n_exact = math.floor(lam - 0.5) + 1
    print(f"lambda={lam:.3f} -> expect {n_exact} levels")

    curve = make_morse(d_e, a, r_e, asym, label="g")
    system = MoleculeSystem(reduced_mass=mu, ground=curve, excited=(), dipoles=())

    t0 = time.time()
    levels = radial.bound_levels(system, "g", 0)
    t1 = time.time()
    print(f"found {len(levels)} levels in {t1-t0:.2f}s (first call incl. jit)")

    errs = []
    for lv in levels:
        e_exact = morse_exact(d_e, a, r_e, mu, asym, lv.v)
        rel = abs(lv.energy - e_exact) / abs(e_exact)
        errs.append(rel)
        if lv.v < 21 or lv.v > len(levels) - 3:
            print(f"v={lv.v:3d} E={lv.energy:+.12e} exact={e_exact:+.12e} rel={rel:.2e}")
    print("max rel err (v<=20):", max(errs[:21]))
    print("max rel err (all):  ", max(errs))

    t0 = time.time()
    system2 = MoleculeSystem(reduced_mass=mu, ground=curve, excited=(), dipoles=())
    radial.bound_levels(system2, "g", 0)
    print(f"second cold-cache solve: {time.time()-t0:.2f}s")

    # wavefunction checks
    wf = radial.wavefunction(system, levels[0])
    print("v=0 nodes:", sum(1 for i in range(1, wf.values.size)
                            if wf.values[i-1]*wf.values[i] < 0))
    from dimerspec._numutil import simpson_uniform
    print("norm:", simpson_uniform(wf.values**2, wf.step))
    wf5 = radial.wavefunction(system, levels[5])
    print("v=5 node count:", radial._node_count_of(wf5.values))


if __name__ == "__main__":
    main()
