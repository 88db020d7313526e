"""Smoke test for the massey_py extension.

Build and install first:
    pip install maturin
    pip install --no-build-isolation -e crates/py
then run:
    python3 python/smoke_test.py
"""

import itertools
import random

import massey_py as m


def matmul(a, b, q):
    size = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(size)) % q for j in range(size)] for i in range(size)]


def check_unitri():
    x = m.UniTri(3, [[1, 1, 2, 0], [0, 1, 0, 1], [0, 0, 1, 2], [0, 0, 0, 1]])
    y = m.UniTri.elementary(3, 3, 0, 2, 2)
    assert (x * y).matrix() == matmul(x.matrix(), y.matrix(), 3)
    assert (x * x.inverse()).is_identity()
    assert x ** 9 == m.UniTri.identity(3, 3)
    assert x ** -1 == x.inverse()
    assert hash(x * y) == hash(m.UniTri(3, matmul(x.matrix(), y.matrix(), 3)))
    c = x.commutator(y)
    assert c.lcs_level() >= 2
    assert x.tau().tau() == x
    for bad in ([[1, 0], [1, 1]], [[2, 0], [0, 1]], [[1, 0, 0], [0, 1]]):
        try:
            m.UniTri(2, bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {bad}")


def check_outer_exponent():
    for n, p in [(3, 2), (3, 3), (4, 2), (4, 3)]:
        r = m.outer_exponent(n, p)
        assert r["e"] == p, r
    assert m.outer_exponent(4, 2)["class_count"] == 40
    try:
        m.outer_exponent(6, 3, max_elems=1000)
    except m.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")


def check_conjugation():
    rng = random.Random(5)
    n, p = 4, 3
    cc = m.ConjClasses(n, p)
    assert len(cc) > 0 and cc.u1_order() == p ** 6
    for _ in range(200):
        sigma = [rng.randrange(p) for _ in range(n)]
        rows = [[int(i == j) for j in range(n + 1)] for i in range(n + 1)]
        for i in range(n + 1):
            for j in range(i + 2, n + 1):
                rows[i][j] = rng.randrange(p)
        q = m.UniTri(p, rows)
        s = m.UniTri(p, [[1 if i == j else (sigma[i] if j == i + 1 else 0) for j in range(n + 1)] for i in range(n + 1)])
        direct = matmul(matmul(s.matrix(), q.matrix(), p), s.inverse().matrix(), p)
        assert m.conjugate_by_lift(sigma, q).matrix() == direct
        c = cc.class_of(q)
        assert cc.act(sigma, c) == cc.class_of(m.UniTri(p, direct))
    assert sum(cc.class_size(c) for c in range(len(cc))) == cc.u1_order()


def check_groups():
    q8 = m.Group.quaternion()
    assert q8.order() == 8 and not q8.is_abelian()
    assert max(q8.element_order(g) for g in range(8)) == 4
    v4 = m.Group.product(m.Group.cyclic(2), m.Group.cyclic(2))
    assert v4.order() == 4 and v4.is_abelian()
    u1 = m.Group.generated_by([m.UniTri.elementary(3, 2, i, j) for i, j in [(0, 2), (1, 3), (0, 3)]])
    assert u1.order() == 8 and u1.is_abelian()
    u = m.Group.generated_by([m.UniTri.elementary(3, 2, i, i + 1) for i in range(3)])
    assert u.order() == 64 and not u.is_abelian()
    assert m.Group.from_table(q8.table()).order() == 8
    b = q8.bogomolov()
    assert isinstance(b, dict)
    try:
        m.Group.from_table([[0, 1], [1, 1]])
    except ValueError:
        pass
    else:
        raise AssertionError("accepted a non-group table")


def check_massey():
    d4 = m.Group.dihedral(4)
    zero = [[0] * len(d4.generators())] * 3
    assert m.massey_defined(d4, zero, 2) and m.massey_vanishes(d4, zero, 2)
    z3 = m.Group.cyclic(3)
    r = m.massey_product(z3, [[1], [1], [1]], 3)
    assert r["defined"] and not r["vanishes"]
    assert not m.massey_defined(m.Group.quaternion(), [[1, 0], [1, 1], [0, 1]], 2)
    # a cup product of two distinct characters of Z/2 × Z/2 does not vanish
    v4 = m.Group.elementary_abelian(2, 2)
    assert not m.massey_vanishes(v4, [[1, 0], [0, 1]], 2)
    # every lift of the Z/3 triple product is a homomorphism into U/Z
    for lift in r["lifts"]:
        g = lift["images"][0]
        assert g[0][1] == g[1][2] == g[2][3] == 1


def check_embedding():
    gen = m.UniTri(2, [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [0, 0, 0, 1]])
    lift = m.solve_embedding(m.Group.cyclic(4), [gen], "center")
    assert lift is not None
    assert (lift[0] ** 4).is_identity()
    assert all(lift[0].entry(i, i + 1) == 1 for i in range(3))
    assert m.solve_embedding(m.Group.cyclic(2), [gen], "u1") is None


def check_brauer():
    cc = m.ConjClasses(4, 2)
    r = cc.brauer([([1, 1, 0, 1], 1), ([1, 0, 1, 1], 1)])
    assert (r["sha_dim"], r["formula_dim"], r["sha_b0_dim"]) == (1, 1, 0), r
    assert r["sha_in_formula"] and r["formula_in_h1"]
    n3 = m.ConjClasses(3, 2)
    scan = n3.sandwich_scan()
    assert scan["rows"] and all(row["report"]["formula_dim"] == 0 for row in scan["rows"])
    try:
        cc.brauer([([1, 1, 0], 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("accepted a short generator")


def check_prs():
    for n, p in [(4, 2), (5, 3)]:
        for r, s in itertools.product(range(1, n - 1), repeat=2):
            rep = m.prs_check(n, p, r, s)
            assert rep["passed"], rep


def main():
    checks = [
        check_unitri,
        check_outer_exponent,
        check_conjugation,
        check_groups,
        check_massey,
        check_embedding,
        check_brauer,
        check_prs,
    ]
    for f in checks:
        f()
        print(f"ok  {f.__name__}")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
