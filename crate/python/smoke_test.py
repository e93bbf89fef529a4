"""Smoke test for the sphere_re_py extension.

Build and install with `maturin develop -m crates/python/Cargo.toml` (or copy
the built shared library next to this file as `sphere_re_py.so`), then run
`python python/smoke_test.py`.
"""

import json
import math

import sphere_re_py as sr


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = sr.Masses(1.0, 1.0, 1.0)
    assert m.total == 3.0

    # Right-angled equilateral triangle: omega^2 = M = 3 for unit masses.
    lre = sr.lre_solve(math.pi / 2, math.pi / 2, math.pi / 2, masses=m)
    close(lre.omega2, 3.0, 1e-12)
    assert lre.relative_residual < 1e-10
    assert sum(1 for c in lre.cos_thetas if c > 0) == 3

    # A printed five-digit isosceles shape polishes onto the exact solution.
    pol = sr.lre_solve(1.0472, 1.33240, 1.33240, polish=True)
    close(pol.omega2, 3.85072, 1e-4)
    roots = sr.isosceles_lre_roots(pol.shape.sides[0])
    assert any(abs(r - pol.shape.sides[1]) < 1e-6 for r in roots)

    # Collinear solution with unequal masses, taken from a scan hit.
    hit = next(h for h in sr.ere_scan(grid=24, masses=(1.0, 2.0, 3.0)) if h["solution"])
    ere = sr.solve_ere(hit["shape"]["a"], hit["shape"]["x"], masses=(1.0, 2.0, 3.0))
    assert ere.relative_residual < 1e-10
    assert ere.omega2 is not None and ere.omega2 > 0

    iso = sr.isosceles_ere(2 * math.pi / 3)
    assert iso["branch"] == "fixed-point" and iso["omega2"] == 0.0

    hits = sr.ere_scan(grid=24)
    classes = {h["class"] for h in hits}
    assert classes == {"isosceles", "scalene"}, classes

    r = math.sqrt(78) / 9
    cbrt = lambda v: math.copysign(abs(v) ** (1 / 3), v)
    close(math.cos(sr.critical_angle()), -1 + 0.5 * (cbrt(1 + r) + cbrt(1 - r)), 1e-12)
    close(sr.critical_angle(), 1.8124, 1e-4)

    axes = sr.principal_axes(sr.Shape.equilateral(1.0))
    assert [a[0] for a in axes] == sorted(a[0] for a in axes)

    # Verification round trip through JSON.
    cand = sr.Candidate.from_json(lre.candidate().to_json())
    report = cand.verify(t_end=2.0)
    assert report.passed, report.to_dict()
    reports = sr.verify_batch([cand, ere.candidate()], t_end=1.0)
    assert len(reports) == 2
    json.dumps(reports[0].to_dict())

    try:
        sr.Shape(3.0, 3.0, 3.0)
    except sr.ValidationError:
        pass
    else:
        raise AssertionError("unrealizable shape accepted")

    try:
        sr.lre_solve(1.0, 1.2, 1.3)
    except sr.NumericalError:
        pass
    else:
        raise AssertionError("non-equilibrium shape accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
