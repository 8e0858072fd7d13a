"""Probe: print realizable port-operator combos per sector for a geometry."""

from braidbench import geometry as geo, verify as vf
from braidbench.gf2 import Basis, nullspace_combos


def probe(g, labels=None):
    rep = geo.validate(g)
    if not rep.ok:
        print(rep.summary())
        return
    cx = vf.build_complex(g)
    if labels is None:
        labels = sorted({l for (l, _p) in cx.patterns})
    for sector, kind in (("X", "primal"), ("Z", "dual")):
        sec = cx.sector(kind)
        fb = Basis()
        for v in sec.face_vectors:
            fb.insert(v)
        res = [fb.reduce(vf.chain_vector(sec, cx.patterns[(l, sector)])) for l in labels]
        combos = nullspace_combos(res)
        canon = Basis()
        for c in combos:
            canon.insert(c)
        print(f"{sector} sector:")
        for c in canon.canonical_rows():
            names = [labels[i] for i in range(len(labels)) if (c >> i) & 1]
            print("   " + " ".join(f"{sector}_{n}" for n in names))
    return cx
