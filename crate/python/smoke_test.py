"""Quick end-to-end check of the `thl` extension module."""

import cmath
import json

import thl

x0, x1 = thl.GroupElement.x0(), thl.GroupElement.x1()
e = thl.GroupElement.identity()

assert (x0 * x0.invert()).reduce() == e
assert not x0.is_oriented()
assert not x1.is_oriented()
assert thl.Tree("(l((ll)l))").signs() == "+-++"
assert thl.propagate(["(ll)", "l"], "+-") == "+--"

fam = thl.enumerate_oriented(6)
assert len(fam) == 51, len(fam)

assert all(g.is_oriented() for g in fam)
g = fam[-1]
pd = json.loads(thl.link_pd(g))
assert len(pd["crossings"]) > 0

_, text = thl.homfly(e)
assert text == "1", text
assert abs(thl.phi(e, 5, 1) - 1) < 1e-12
assert abs(thl.phi(g, 5, 1)) <= 1 + 1e-9

for r, k in [(4, 1), (5, 1), (6, 2), (7, 2)]:
    m = thl.element_gram(fam[:12], r, k)
    eigs = thl.hermitian_eigenvalues(m)
    assert eigs[0] > -1e-8, (r, k, eigs[0])

d = thl.delta(5, 1)
assert abs(d - (-cmath.sin(2 * cmath.pi / 5) / cmath.sin(cmath.pi / 5)).real) < 1e-12
assert thl.shading_orientable(g) and not thl.shading_orientable(x0)

print("python smoke test: ok")
