"""Positivity and decay band of the extended kernel's cosine transform.

For the kernel extended linearly beyond ``r0 = 1`` and cut off at ``b``,
prints ``min V_hat`` on ``[0, omega_max]`` and the ratio ``C/c`` of the band
containing ``V_hat(omega) (1 + omega**2)**((1-a)/2)``.

    python3 scripts/fourier_band.py --b 2 3 4
"""

import argparse

import numpy as np

from carleman1d.kernels import KernelSpec, kernel_fourier


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--b", type=float, nargs="+", default=[2.0])
    parser.add_argument("--omega-max", type=float, default=100.0)
    parser.add_argument("--n-omega", type=int, default=2001)
    args = parser.parse_args()

    omegas = np.linspace(0.0, args.omega_max, args.n_omega)
    kernels = {"dislocation": KernelSpec(0.0, "dislocation"), "log": KernelSpec(0.0), "riesz a=0.5": KernelSpec(0.5)}
    print(f"{'kernel':>12} {'b':>5} {'shift c':>10} {'min V_hat':>11} {'c':>9} {'C':>9} {'C/c':>7}")
    for name, kernel in kernels.items():
        for b in args.b:
            four = kernel_fourier(kernel, b=b, omega_grid=omegas)
            lo, hi = four.band
            print(
                f"{name:>12} {b:5.2f} {four.shift:10.4f} {np.min(four.values):11.3e} "
                f"{lo:9.4f} {hi:9.4f} {four.band_ratio:7.2f}"
            )


if __name__ == "__main__":
    main()
