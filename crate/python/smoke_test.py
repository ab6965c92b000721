"""Smoke test for the treedet_py extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import math

import treedet_py as td


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    p3 = td.Tree.parse("3\n0 1\n1 2\n")
    assert p3.n == 3 and p3.edges() == [(0, 1), (1, 2)]

    nu, mm, log_mm = td.max_matching(p3)
    assert (nu, mm) == (1, 2) and close(log_mm, math.log(2))
    assert td.matching_polynomial(p3) == [0, 2, 0, 1]

    law = td.uncovered_law(p3)
    assert set(law) == {(0,), (2,)}
    assert all(close(p, 0.5) for p in law.values())

    kernel = td.kernel_projection(p3)
    assert close(kernel[0][0], 0.5) and close(kernel[0][2], -0.5)
    det_law = td.exact_law(kernel)
    assert all(close(det_law[s], law[s]) for s in law)
    assert close(td.entropy_chain_rule(kernel, seed=7), math.log(2))
    assert td.kernel_row(p3, 0) == [0.5, 0.0, -0.5]

    star = td.gen_star(3)
    assert close(td.inclusion_prob(td.kernel_projection(star), [1, 2]), 1 / 3)
    assert td.rank_exact(star) == 2

    z = 0.5
    s, _ = p3.bipartition(0)
    ptemp = td.positive_temp_projection(p3, z, s)
    for o in range(3):
        row = td.kernel_row(p3, o, z, s)
        assert all(close(a, b, 1e-10) for a, b in zip(row, ptemp[o]))
    assert td.verify_boltzmann(p3, z)["passed"]

    for tree in td.free_trees(7):
        report = td.verify_uncovered(tree)
        assert report["passed"], report

    t2 = td.gen_kary(2, 2)
    assert td.max_matching(t2)[1] == 8
    sample = td.sample_uniform_max_matching(t2, 1)
    assert len(sample) == 2
    assert td.reconstruct_matching(t2, [v for v in range(7) if all(v not in e for e in sample)]) == sample

    value, tail = td.canopy_limit(3, 100)
    assert close(value, 0.2991228, 1e-6) and tail < 1e-12
    seq = td.pelda_sequence(40)
    assert close(seq[40], 0.5, 1e-6) and all(x == 0.0 for x in seq[1::2])

    try:
        td.gen_path(0)
    except ValueError:
        pass
    else:
        raise AssertionError("empty path accepted")

    print("treedet_py", td.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
