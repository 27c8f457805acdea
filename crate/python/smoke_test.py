"""Smoke test for the `ortholog` extension module.

Build first:
    cargo build --release -p ortholog-python
    cp target/release/libortholog.so python/ortholog.so
then run `python3 python/smoke_test.py` from the repository root.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import ortholog

A = ortholog.Tetrahedron([[0, 0, 0], [3, 0.2, 0.1], [0.7, 2.5, -0.3], [0.9, 0.8, 2.2]])


def main():
    sols = ortholog.solve(A, seed=7, restarts=8)
    assert sols, "no solutions"
    b = sols[0]
    assert max(abs(r) for r in ortholog.orthosect_residuals(A, b)) < 1e-10

    s = ortholog.verify_sphere(A, b)
    assert s["max_residual"] < 1e-7, s["max_residual"]
    assert len(s["points"]) == 6

    c = ortholog.conjugate(A, b)
    back = ortholog.conjugate(A, c)
    err = max(math.dist(p, q) for p, q in zip(back.vertices, b.vertices))
    assert err < 1e-7 * A.diameter(), err

    fam = ortholog.trace_family(A, b, 5, 0.02)
    assert len(fam["samples"]) >= 2
    assert max(fam["max_residuals"]) < 1e-9

    oa, ob = ortholog.orthology_centers(A, b)
    assert len(oa) == 3 and len(ob) == 3

    try:
        ortholog.Tetrahedron([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, math.nan]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-finite vertex accepted")

    print(f"ok: {len(sols)} solutions, sphere residual {s['max_residual']:.1e}, involution {err:.1e}")


if __name__ == "__main__":
    main()
