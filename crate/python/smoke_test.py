"""Smoke test for the membrane_kit_py extension module.

Build the extension first (`cargo build -p membrane-kit-py`), then run
`python3 python/smoke_test.py`. The script locates the built cdylib in the
cargo target directory, loads it, and exercises the main entry points.
"""

import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    names = ["libmembrane_kit_py.so", "membrane_kit_py.dll", "libmembrane_kit_py.dylib"]
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in names
    ]
    for path in candidates:
        if path.exists():
            spec = importlib.util.spec_from_file_location("membrane_kit_py", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("extension not found; run `cargo build -p membrane-kit-py` first")


def main():
    mk = load_module()

    # Stress evaluation.
    nh = mk.Material.neo_hookean(0.1)
    assert abs(nh.uniaxial_stress(2.0) - 0.1 * (2.0 - 2.0**-2)) < 1e-12
    gent = mk.Material.gent(0.1, 100.0)
    assert gent.equibiaxial_stress(1.5) > nh.equibiaxial_stress(1.5) * 0.9

    # Fit round-trip on noise-free synthetic data.
    pts = [(l - 1.0, 0.1 * (l - l**-2)) for l in [1.1 + 0.1 * i for i in range(40)]]
    fit = mk.fit_model(pts, "neohookean")
    assert fit.converged and fit.rms_residual < 1e-8
    mu = fit.material.ground_shear_modulus()
    assert abs(mu - 0.1) < 1e-6, mu

    # Ideal sphere limit point: lambda = 7^(1/6).
    sphere = mk.sphere_ballooning(nh, 0.6, 21.0, 5.0)
    assert sphere.found
    assert abs(sphere.stretch_at_limit - 7.0 ** (1 / 6)) < 1e-6

    # Cap-model ballooning and the coupled simulation.
    balloon = mk.find_ballooning(gent, 21.0, 0.6)
    assert balloon.found and balloon.p_balloon_kpa > 0
    states = mk.pressure_stretch_curve(gent, 21.0, 0.6, 3.0, 256)
    assert all(abs(t * s * s - 0.6) < 1e-12 for (_, s, _, t, _) in states)
    samples, ruptured = mk.simulate_source_coupled(
        gent, 21.0, 0.6, 1.5 * balloon.p_balloon_kpa, 2.0e5, 6.0, 1e-3
    )
    assert not ruptured
    quiet = [(k * 1e-3, 0.0) for k in range(1000)]
    marks = mk.detect_inflation_phases(quiet + [(t + 1.0, p) for (t, p) in samples])
    assert marks is not None and marks[0] < marks[1] < marks[2] < marks[3]

    # Cycle segmentation.
    trace = []
    for c in range(50):
        for k in range(20):
            phase = k * 8.0 / 20
            trace.append((c * 8.0 + phase, 10.0 if 1.0 <= phase < 2.5 else 0.0))
    n, failure = mk.segment_cycles(trace, 8.0)
    assert (n, failure) == (50, None), (n, failure)

    # Stretch and curvature oracles.
    semi = [
        (21.0 * math.cos(a), 21.0 * math.sin(a))
        for a in [math.pi * i / 49 for i in range(50)]
    ]
    assert abs(mk.stretch_from_profile(semi, 42.0) - math.pi / 2) < 1e-3
    r = 60.0 / math.pi
    markers = [(r * math.cos(a), r * math.sin(a)) for a in [math.pi * i / 8 for i in range(9)]]
    radius, curvature, bend = mk.curvature_from_markers(markers)
    assert abs(radius - r) < 1e-6 and abs(bend - 180.0) < 0.5

    # G-code emit and byte-identical re-emit.
    text = mk.membrane_gcode(diameter=42.0, layers=1)
    assert text.startswith("G21") and "M83" in text
    assert mk.reemit_gcode(text) == text

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
