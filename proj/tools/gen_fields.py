#!/usr/bin/env python3
"""Regenerate config/fields.conf from PARI/GP (via cypari2).

Only needed when adding fields; the C++ library re-validates every datum
written here when it loads the file.
"""
import math
import sys
from fractions import Fraction

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9, silent=True)
zk = pari("(nf)->nf.zk")
fu = pari("(b)->b.fu")
cls = pari("(b)->b.no")


def coeffs_low_first(poly):
    d = int(pari.poldegree(poly))
    return [int(pari.polcoef(poly, i)) for i in range(d + 1)]


def frac(v):
    f = Fraction(int(pari.numerator(v)), int(pari.denominator(v)))
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def flat(mat):
    return " ".join(str(v) for row in mat for v in row)


class Field:
    def __init__(self, name, poly, abelian=None, resolvent=None):
        self.name = name
        self.poly = pari(poly)
        self.n = int(pari.poldegree(self.poly))
        self.nf = pari.nfinit(self.poly)
        if self.n > 1 and int(self.nf[3]) == 1:
            # keep the power basis when it is already integral
            self.nf = pari.nfinit([self.poly, [pari(f"x^{i}") for i in range(self.n)]])
        self.bnf = pari.bnfinit(self.nf, 1) if self.n > 1 else None
        self.abelian = abelian          # (poly of max abelian subfield, conductor)
        self.resolvent = resolvent      # (poly, conductor) used for the p prescreen
        self.extra = []
        self.autos = list(pari.nfgaloisconj(self.nf)) if self.n > 1 else [pari("x")]
        self.mats = [self.aut_matrix(a) for a in self.autos]
        order = sorted(range(len(self.mats)), key=lambda i: (self.mats[i] != self.ident(), flat(self.mats[i])))
        self.autos = [self.autos[i] for i in order]
        self.mats = [self.mats[i] for i in order]

    def ident(self):
        return [[int(i == j) for j in range(self.n)] for i in range(self.n)]

    def coords(self, elt):
        return [int(c) for c in pari.nfalgtobasis(self.nf, elt)]

    def image_matrix(self, source_basis, image_of_root):
        cols = []
        for w in source_basis:
            img = pari.subst(pari.lift(w), "x", image_of_root)
            cols.append(self.coords(pari.Mod(img, self.poly)))
        return [[cols[j][i] for j in range(len(cols))] for i in range(self.n)]

    def aut_matrix(self, image_of_x):
        return self.image_matrix(list(zk(self.nf)), image_of_x)

    def emit(self):
        nf = self.nf
        out = [f"[{self.name}]"]
        out.append("poly = " + " ".join(str(c) for c in coeffs_low_first(self.poly)))
        rows = [" ".join(frac(pari.polcoef(w, i)) for i in range(self.n)) for w in zk(nf)]
        out.append("basis = " + " | ".join(rows))
        out.append(f"discriminant = {int(nf[2])}")
        out.append(f"signature = {int(nf[1][0])} {int(nf[1][1])}")
        out.append(f"index = {int(nf[3])}")
        if self.bnf is not None:
            assert int(pari.bnfcertify(self.bnf)) == 1
            out.append(f"class_number = {int(cls(self.bnf))}")
            units = list(fu(self.bnf))
        else:
            out.append("class_number = 1")
            units = []
        out.append(f"torsion = {int(pari.nfrootsof1(nf)[0])}")
        if units:
            out.append("units = " + " | ".join(" ".join(map(str, self.coords(u))) for u in units))
        out.append("automorphisms = " + " | ".join(flat(m) for m in self.mats))
        if self.abelian is not None:
            p, f = self.abelian
            out.append(f"abelian_conductor = {f}")
            out.append("abelian_subgroup = " + " ".join(map(str, subgroup_for(pari(p), f))))
        if self.resolvent is not None:
            p, f = self.resolvent
            out.append(f"resolvent_conductor = {f}")
            out.append("resolvent_subgroup = " + " ".join(map(str, subgroup_for(pari(p), f))))
        return out + self.extra


def subgroup_for(poly, conductor):
    """Residues mod conductor of primes splitting completely in the abelian field."""
    n = int(pari.poldegree(poly))
    if n == 1:
        return [1 % max(conductor, 1)] if conductor > 1 else [0]
    disc = int(pari.nfdisc(poly))
    elems = []
    for a in range(1, conductor + 1):
        if math.gcd(a, conductor) != 1:
            continue
        p = a + conductor * (1000 // conductor + 1)
        while not (pari.isprime(p) and disc % p != 0):
            p += conductor
        if len(pari.polrootsmod(poly, p)) == n:
            elems.append(a % conductor)
    assert len(elems) * n == int(pari.eulerphi(conductor)), (poly, conductor, elems)
    return sorted(elems)


def cm_extras(K, real, subfields, h_sigma, h_khat):
    z = pari.polroots(K.poly)[0]
    conj_index = None
    for i, a in enumerate(K.autos):
        if abs(pari.subst(pari.lift(a), "x", z) - pari.conj(z)) < 1e-15:
            conj_index = i
    assert conj_index is not None, K.name
    K.extra.append(f"conj = {conj_index}")
    inc = pari.nfisincl(real.poly, K.poly)
    K.extra.append(f"real_subfield = {real.name}")
    K.extra.append("real_embedding = " + flat(K.image_matrix(list(zk(real.nf)), pari.lift(inc[0]))))
    for sub in subfields:
        inc = pari.nfisincl(sub.poly, K.poly)
        K.extra.append(f"cm_subfield = {sub.name} : " + flat(K.image_matrix(list(zk(sub.nf)), pari.lift(inc[0]))))
    K.extra.append(f"h_sigma_hat = {h_sigma}")
    K.extra.append(f"h_k_hat = {h_khat}")
    K.extra.append("hypothesis_star = assumed")


def squarefree(d):
    return all(d % (p * p) for p in range(2, math.isqrt(d) + 1))


def main():
    fields = [Field("Q", "x", abelian=("x", 1))]
    reals = {}
    for d in range(2, 51):
        if squarefree(d):
            disc = d if d % 4 == 1 else 4 * d
            reals[d] = Field(f"Qsqrt{d}", f"x^2-{d}", abelian=(f"x^2-{d}", disc))
            fields.append(reals[d])
    z7p = Field("Qzeta7plus", "x^3+x^2-2*x-1", abelian=("x^3+x^2-2*x-1", 7))
    z9p = Field("Qzeta9plus", "x^3-3*x+1", abelian=("x^3-3*x+1", 9))
    g12p = Field("Q24_144_27plus", "x^3-24*x^2+144*x-27")
    g24p = Field("Q35_364_1183plus", "x^3-35*x^2+364*x-1183", abelian=("x^3-35*x^2+364*x-1183", 7))
    fields += [z7p, z9p, g12p, g24p]

    Qi = Field("Qi", "x^2+1", abelian=("x^2+1", 4))
    Qm3 = Field("Qsqrtm3", "x^2+x+1", abelian=("x^2+x+1", 3))
    Qm5 = Field("Qsqrtm5", "x^2+5", abelian=("x^2+5", 20))
    q42 = Field("Q4_2", "x^4+4*x^2+2", abelian=("x^4+4*x^2+2", 16))
    z5 = Field("Qzeta5", "x^4+x^3+x^2+x+1", abelian=("x^4+x^3+x^2+x+1", 5))
    q813 = Field("Q8_13", "x^4+8*x^2+13", abelian=("x^2-3", 12), resolvent=("x^2-13", 13))
    z9 = Field("Qzeta9", "x^6+x^3+1", abelian=("x^6+x^3+1", 9))
    g12 = Field("Q24_144_27", "x^6+24*x^4+144*x^2+27", abelian=("x^2+x+1", 3))
    g24 = Field("Q35_364_1183", "x^6+35*x^4+364*x^2+1183", abelian=("x^3-35*x^2+364*x-1183", 7))
    cm_extras(Qi, fields[0], [], 1, 1)
    cm_extras(Qm3, fields[0], [], 1, 1)
    cm_extras(Qm5, fields[0], [], 1, 2)
    cm_extras(q42, reals[2], [], 1, 1)
    cm_extras(z5, reals[5], [], 1, 1)
    cm_extras(q813, reals[3], [], 2, 2)
    cm_extras(z9, z9p, [Qm3], 1, 1)
    cm_extras(g12, g12p, [Qm3], 1, 2)
    cm_extras(g24, g24p, [], 4, 16)
    fields += [Qi, Qm3, Qm5, q42, z5, q813, z9, g12, g24]

    out = ["# Number field data, regenerate with tools/gen_fields.py.",
           "# Element coordinates are over the integral basis. Each basis row gives",
           "# power-basis coordinates. Matrices are row-major; column j is the image",
           "# of basis element j.",
           ""]
    for F in fields:
        out += F.emit() + [""]
    sys.stdout.write("\n".join(out))


if __name__ == "__main__":
    main()
