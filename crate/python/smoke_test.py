#!/usr/bin/env python3
"""Smoke test for the nh_lattice_py extension module.

Builds the cdylib if needed, stages it under the importable name, and
exercises the main entry points against known values.

Usage: python3 python/smoke_test.py [--release]
"""

import argparse
import importlib.util
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_and_load(release: bool):
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "nh-lattice-py"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=REPO, check=True)

    built = REPO / "target" / profile / "libnh_lattice_py.so"
    if not built.exists():  # macOS fallback
        built = REPO / "target" / profile / "libnh_lattice_py.dylib"
    if not built.exists():
        sys.exit(f"built library not found under target/{profile}/")

    stage = Path(tempfile.mkdtemp(prefix="nh_lattice_py_"))
    target = stage / "nh_lattice_py.so"
    shutil.copy2(built, target)

    spec = importlib.util.spec_from_file_location("nh_lattice_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def check(name, condition, detail=""):
    status = "ok" if condition else "FAILED"
    print(f"  {name}: {status} {detail}")
    if not condition:
        sys.exit(1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--release", action="store_true", help="build with --release")
    args = parser.parse_args()

    nh = build_and_load(args.release)
    print(f"loaded nh_lattice_py {nh.__version__}")

    # Open dimer: eigenvalues -1 and +1.
    h2 = nh.hamiltonian(2, 1, 1, 0, 0)
    vals = nh.eigenvalues(h2)
    check("dimer spectrum", abs(vals[0] + 1) < 1e-12 and abs(vals[1] - 1) < 1e-12, f"{vals}")

    # Numeric spectrum matches the closed form on the boundary family.
    numeric = nh.eigenvalues(nh.family_matrix(10, 1, 4, 0.5, 0.0))
    exact = nh.spectrum_closed_form(10, 1, 4, 0.5, 0.0)
    dist = nh.multiset_distance(numeric, exact)
    check("closed-form agreement", dist < 1e-8, f"distance {dist:.3e}")

    # Chain and transformed partner are isospectral.
    a = nh.eigenvalues(nh.family_matrix(8, 1, 2 + 1j, 0.75, 0.3))
    b = nh.eigenvalues(nh.family_matrix(8, 1, 2 + 1j, 0.75, 0.3, tilde=True))
    dist = nh.multiset_distance(a, b)
    check("isospectral pair", dist < 1e-8, f"distance {dist:.3e}")

    # Four-site open chain hits the golden-ratio cosines.
    golden = (1 + math.sqrt(5)) / 2
    obc = sorted(z.real for z in nh.spectrum_obc(4, 1))
    check(
        "open-chain values",
        abs(obc[0] + golden) < 1e-12 and abs(obc[3] - golden) < 1e-12,
        f"{[round(x, 6) for x in obc]}",
    )

    # Discriminant of the four-site boundary scan is (r + 3)^2.
    q = 4.0
    r = -1.25
    energies, delta, alpha_sq = nh.spectrum_n4(
        1, q, r * math.e ** (2 * q), math.e ** (-2 * q)
    )
    check("n4 discriminant", abs(delta - (r + 3) ** 2) < 1e-9, f"delta {delta:.6f}")
    check("n4 alpha_sq", abs(alpha_sq - r) < 1e-9)

    # Exceptional point of the same scan sits at r = -3.
    reports = nh.find_exceptional_points(4, 1, 4, "r", -5.0, 0.0, steps=300)
    check(
        "exceptional point",
        len(reports) == 1 and abs(reports[0]["parameter"] + 3) < 1e-6,
        f"{reports}",
    )

    # Skin effect: right modes decay at rho * Re(q).
    profile = nh.skin_profile(10, 1, 4, 0.5, 0.0)
    check(
        "skin decay rate",
        abs(profile["decay_rate"] - 2.0) < 0.04 and profile["side"] == "left",
        f"rate {profile['decay_rate']:.4f}, side {profile['side']}",
    )

    # Eigensystem internals: residuals and defectivity flag.
    es = nh.eigensystem(nh.family_matrix(6, 1, 3, 0.25, 1.0))
    check("residuals", es["max_residual"] < 1e-10, f"{es['max_residual']:.3e}")
    jordan = [[0, 1], [0, 0]]
    check("defective flag", nh.eigensystem(jordan)["defective"])

    # Branch tracking over a short sweep.
    trace = nh.sweep(6, 1, 4, "rho", [0.0, 0.1, 0.2, 0.3], phi=0.0)
    check(
        "sweep shape",
        len(trace["trajectories"]) == 6
        and all(len(t) == len(trace["grid"]) for t in trace["trajectories"]),
    )

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
