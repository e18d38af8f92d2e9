"""Smoke test for the zetaglue_py extension module.

Build first (see README), then run: python3 python/smoke_test.py
"""

import json
import math

import zetaglue_py as zg


def close(a, b, tol):
    assert abs(a - b) < tol, f"{a} vs {b}"


def main():
    point = zg.CrossSection.point()
    for length in (0.5, 1.0, 2.0, math.pi):
        close(zg.log_det_cylinder(point, length, "d", "d").log_det, math.log(2 * length), 1e-12)
    r = zg.log_det_cylinder(point, 1.0, "r", "r", alpha=1.0)
    close(r.log_det, math.log(6.0), 1e-12)
    close(sum(t[2] for t in r.terms), r.log_det, 1e-15)

    oracle, err = zg.oracle_log_det(1.0, "r", "r", n=4000, alpha=1.0)
    close(oracle, math.log(6.0), 1e-7)
    assert err < 1e-6

    circle = zg.CrossSection.circle(2 * math.pi)
    close(circle.log_det_star(), 2 * math.log(2 * math.pi), 1e-12)
    value, residue = circle.zeta(-0.5, False)
    close(value, -1.0 / 6.0, 1e-12)
    assert residue == 0.0
    assert circle.kernel_dim() == 1

    g = zg.glue_check(circle, 2.0, 0.7)
    assert g.residual < 1e-8 and g.phase_match, g
    g = zg.glue_check(circle, 2.0, 0.7, alpha=0.3)
    assert g.residual < 1e-8 and g.phase_match, g
    json.loads(g.to_json())

    entries, zeros = zg.interface_spectrum(circle, '{"kind": "both_ends", "length": 1.0}', 0.0, 10.0)
    assert zeros == 1 and len(entries) > 0
    zg.interface_log_det(circle, '{"kind": "cut_left", "a": 0.7}', 0.3)

    close(zg.qd_det_segment(1e6, 1.0, 1.0), 1e6 + 1 + 2e3, 1e-6)

    try:
        zg.log_det_cylinder(zg.CrossSection.circle(6.2831853), 1.0, "r", "r", alpha=-1.0)
    except zg.InadmissibleError:
        pass
    else:
        raise AssertionError("collision was not rejected")

    report = json.loads(zg.run(json.dumps({"command": "det", "cross": "point", "L": 1, "bc": "dd"})))
    close(report["value"], math.log(2.0), 1e-15)

    print("python smoke test passed")


if __name__ == "__main__":
    main()
