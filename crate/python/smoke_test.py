"""Smoke test for the affine_hls extension module.

Build and run from the repository root:

    cargo build -p affine-hls-py --features extension-module
    python3 python/smoke_test.py

The script looks for the built library under target/ when the module is not
installed.
"""

import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import affine_hls

        return affine_hls
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for suffix in ("so", "dylib"):
            lib = ROOT / "target" / profile / f"libaffine_hls.{suffix}"
            if lib.exists():
                spec = importlib.util.spec_from_file_location("affine_hls", lib)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("affine_hls not built; run cargo build -p affine-hls-py --features extension-module")


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    m = load()

    assert close(m.gamma(5.0), 24.0, 1e-14)
    assert close(m.beta(2.0, 3.0), 1.0 / 12.0, 1e-14)
    assert close(m.unit_ball_volume(3), 4.0 * math.pi / 3.0, 1e-14)
    assert close(m.inclusion_constant(1.0, 1), 1.0, 1e-14)
    assert m.hls_sharp_constant(1, 0.5) > 0.0

    rep = json.loads(m.verify("thm13", 'n = 1\nalpha = 0.5\nf = { family = "simplex-exp" }\nh = { family = "simplex-exp" }\n'))
    assert rep["pass"] and rep["near_equality"][0], rep

    rep = json.loads(m.verify("identity-3b", 'n = 2\ngrid = 32\nf = { family = "ball-indicator" }\nh = { family = "ball-indicator" }\n'))
    assert rep["pass"]
    assert all(close(v, math.pi**2 / 2.0, 5e-3) for v in rep["values"]), rep["values"]

    try:
        m.verify("thm11", "n = 1\nalpha = 1.0\n")
    except ValueError as e:
        assert "regime" in str(e)
    else:
        raise AssertionError("alpha = n must be rejected")

    nodes, radii = m.s_alpha_radii("gaussian", "gaussian", 2, 1.0, 16)
    assert len(nodes) == len(radii) == 16
    assert max(radii) - min(radii) < 1e-8 * max(radii)

    v = m.dual_mixed_volume("ball", "ball:radius=2", 2, 1.0)
    assert close(v, 2.0 * math.pi, 1e-12), v

    body = json.loads(m.body_export('n = 2\nalpha = 1.0\ngrid = 16\n'))
    assert len(body["polyline"]) == 17

    print("affine_hls smoke test passed")


if __name__ == "__main__":
    main()
