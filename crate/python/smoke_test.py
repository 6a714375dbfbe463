#!/usr/bin/env python3
"""Smoke test for the reduced_weyl_py extension module.

Builds the cdylib if needed, loads it from the cargo target directory, and
exercises each exposed entry point on the disk/SO(2) oracle case (reduced
volume 2, counting coefficient 1/pi, exponent 1/2).

Usage: python3 python/smoke_test.py [--release]
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module(release: bool):
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "reduced-weyl-py"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=ROOT, check=True)
    built = ROOT / "target" / profile / "libreduced_weyl_py.so"
    if not built.exists():  # e.g. macOS
        built = ROOT / "target" / profile / "libreduced_weyl_py.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    stage = Path(tempfile.mkdtemp(prefix="reduced_weyl_py."))
    shutil.copy2(built, stage / f"reduced_weyl_py{suffix}")
    sys.path.insert(0, str(stage))
    import reduced_weyl_py

    return reduced_weyl_py


def main():
    rw = load_module("--release" in sys.argv[1:])
    print(f"loaded reduced_weyl_py {rw.__version__}")

    action = rw.Action.planar_so2(2)
    assert action.ambient_dim == 2 and action.group_dim == 1 and not action.is_finite
    domain = rw.Domain.disk(1.0)
    symbol = rw.Symbol.euclidean_power(2)

    resid = rw.symbol_invariance_residual(symbol, action)
    assert resid <= 1e-10, f"invariance residual {resid}"
    skew = rw.Symbol.quadratic_form([[1.0, 0.0], [0.0, 2.0]])
    assert rw.symbol_invariance_residual(skew, action) > 1e-3

    mc = rw.volume_mc(action, symbol, domain, n_samples=20_000, seed=7)
    assert abs(mc["value"] - 2.0) <= max(3 * mc["stderr"], 1e-6), mc
    quad = rw.volume_quadrature(action, symbol, domain, resolution=(24, 24, 8))
    assert abs(quad["value"] - 2.0) <= 1e-4, quad
    print(f"reduced volume: mc {mc['value']:.6f} ± {mc['stderr']:.1e}, "
          f"quadrature {quad['value']:.6f}")

    pred = rw.predict_counting(action, 0, symbol, domain, quad["value"])
    assert abs(pred["coefficient"] - 1 / math.pi) < 1e-4, pred
    assert abs(pred["exponent"] - 0.5) < 1e-12, pred

    spec = rw.Spectrum.disk(1.0)
    grid = [10 ** (3 + 3 * i / 23) for i in range(24)]
    counts = spec.counts(0, grid)
    assert counts == sorted(counts) and counts[-1] > 100
    eigs = spec.eigenvalues(0, 100.0)
    assert abs(eigs[0][0] - 5.783186) < 1e-4, eigs[:1]  # j_{0,1}^2

    fit = rw.fit_counts(grid, counts)
    assert abs(fit["exponent"] - 0.5) <= 0.02, fit
    assert abs(fit["coefficient"] - pred["coefficient"]) <= 0.05 * pred["coefficient"], fit
    print(f"counting fit: C {fit['coefficient']:.5f} (predicted {pred['coefficient']:.5f}), "
          f"p {fit['exponent']:.4f}")

    c4 = rw.Action.cyclic(4)
    assert c4.is_finite and c4.group_dim == 0
    square = rw.Domain.box_([math.pi / 2, math.pi / 2])
    fd = rw.Spectrum.finite_difference(square, c4, math.pi / 40)
    n = fd.counts(0, [fd.validity_ceiling])[0]
    assert n >= 5, n

    rep = rw.oscillatory_convergence(action, 0, 1.0, 0.25, 0.75, [0.8, 0.4])
    assert rep["abs_error"][1] < rep["abs_error"][0], rep
    print(f"oscillatory errors {rep['abs_error']}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
