#!/usr/bin/env python3
"""Reference oracle for the 2D descriptor set.

Generates data/golden_descriptors.csv for the 25-molecule fixture set in
data/fixtures.csv. This script is an independent implementation (Python +
networkx + numpy) of the published descriptor formulas and is kept separate
from the Rust implementation it validates.

Note on provenance: the usual reference toolkit (RDKit) is not installable
in the build environment (no package available on the mirror), so the golden
values are computed from the primary literature instead:

  - Wildman & Crippen, J. Chem. Inf. Comput. Sci. 1999, 39, 868 (atomic
    logP / molar refractivity contributions; simplified rule-based atom
    typing documented below)
  - Labute, J. Mol. Graph. Model. 2000, 18, 464 (approximate per-atom
    accessible surface area from 2D structure; half-cap overlap variant)
  - Ertl, Rohde, Selzer, J. Med. Chem. 2000, 43, 3714 (TPSA, N/O set)
  - Kier & Hall, molecular connectivity chi indices and kappa shape indices
  - Burden, J. Chem. Inf. Comput. Sci. 1989, 29, 225 (BCUT matrix scheme)

Usage: python3 tools/golden_gen.py [fixtures.csv] [out.csv]
"""

import csv
import itertools
import math
import sys

import networkx as nx
import numpy as np

# ---------------------------------------------------------------------------
# element tables (shared constants of the descriptor definition)

ELEMENTS = {
    "H": (1, 1.0080, 1.007825, 1),
    "B": (5, 10.8110, 11.009305, 3),
    "C": (6, 12.0110, 12.0, 4),
    "N": (7, 14.0070, 14.003074, 5),
    "O": (8, 15.9990, 15.994915, 6),
    "F": (9, 18.9984, 18.998403, 7),
    "Si": (14, 28.0855, 27.976927, 4),
    "P": (15, 30.9738, 30.973762, 5),
    "S": (16, 32.0650, 31.972071, 6),
    "Cl": (17, 35.4530, 34.968853, 7),
    "Br": (35, 79.9040, 78.918337, 7),
    "I": (53, 126.9045, 126.904473, 7),
}

VDW = {"H": 1.20, "B": 1.92, "C": 1.70, "N": 1.55, "O": 1.52, "F": 1.47,
       "Si": 2.10, "P": 1.80, "S": 1.80, "Cl": 1.75, "Br": 1.85, "I": 1.98}
COV = {"H": 0.31, "B": 0.84, "C": 0.76, "N": 0.71, "O": 0.66, "F": 0.57,
       "Si": 1.11, "P": 1.07, "S": 1.05, "Cl": 1.02, "Br": 1.20, "I": 1.39}

ALLOWED_VALENCE = {
    ("H", 0): [1], ("B", 0): [3], ("B", -1): [4],
    ("C", 0): [4], ("C", 1): [3], ("C", -1): [3],
    ("N", 0): [3], ("N", 1): [4], ("N", -1): [2],
    ("O", 0): [2], ("O", 1): [3], ("O", -1): [1],
    ("F", 0): [1], ("F", -1): [0], ("Cl", 0): [1], ("Cl", -1): [0],
    ("Br", 0): [1], ("Br", -1): [0], ("I", 0): [1], ("I", -1): [0],
    ("Si", 0): [4], ("P", 0): [3, 5], ("P", 1): [4],
    ("S", 0): [2, 4, 6], ("S", 1): [3], ("S", -1): [1],
}

SLOGP_EDGES = [-0.4, -0.2, 0.0, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4]
SMR_EDGES = [1.29, 1.82, 2.24, 2.45, 2.75, 3.05, 3.63, 3.8, 4.0]

HK_ALPHA = {
    ("C", "sp3"): 0.0, ("C", "sp2"): -0.13, ("C", "sp"): -0.22, ("C", "ar"): -0.13,
    ("N", "sp3"): -0.04, ("N", "sp2"): -0.20, ("N", "sp"): -0.29, ("N", "ar"): -0.20,
    ("O", "sp3"): -0.04, ("O", "sp2"): -0.20, ("O", "ar"): -0.20,
    ("F", "*"): -0.07, ("Cl", "*"): 0.29, ("Br", "*"): 0.48, ("I", "*"): 0.73,
    ("P", "*"): 0.43, ("S", "*"): 0.35, ("Si", "*"): 0.38, ("B", "*"): 0.24,
}

# ---------------------------------------------------------------------------
# minimal SMILES parser (organic subset + brackets + rings + aromatics)


class Mol:
    def __init__(self):
        self.el = []          # element symbol
        self.charge = []
        self.h = []           # implicit hydrogens
        self.arom = []
        self.h_fixed = []
        self.g = nx.Graph()   # bond graph, edge attr "order" in {1,2,3,1.5}


def parse(smiles):
    m = Mol()
    prev = None
    stack = []
    pend = None
    ring = {}
    i = 0
    s = smiles

    def add_atom(el, charge, h, arom, fixed):
        nonlocal prev, pend
        idx = len(m.el)
        m.el.append(el)
        m.charge.append(charge)
        m.h.append(h)
        m.arom.append(arom)
        m.h_fixed.append(fixed)
        m.g.add_node(idx)
        if prev is not None:
            order = pend if pend is not None else (
                1.5 if m.arom[prev] and arom else 1)
            m.g.add_edge(prev, idx, order=order)
        pend = None
        prev = idx

    def close(num):
        nonlocal pend
        if num in ring:
            other, o_order = ring.pop(num)
            order = pend if pend is not None else o_order
            if order is None:
                order = 1.5 if m.arom[other] and m.arom[prev] else 1
            m.g.add_edge(other, prev, order=order)
        else:
            ring[num] = (prev, pend)
        pend = None

    while i < len(s):
        c = s[i]
        if c == "(":
            stack.append(prev)
            i += 1
        elif c == ")":
            prev = stack.pop()
            i += 1
        elif c in "-=#:":
            pend = {"-": 1, "=": 2, "#": 3, ":": 1.5}[c]
            i += 1
        elif c.isdigit():
            close(int(c))
            i += 1
        elif c == "%":
            close(int(s[i + 1:i + 3]))
            i += 3
        elif c == "[":
            j = s.index("]", i)
            body = s[i + 1:j]
            k = 0
            if k + 1 < len(body) and body[k:k + 2] in ELEMENTS:
                el, arom, k = body[k:k + 2], False, k + 2
            elif body[k] in ELEMENTS:
                el, arom, k = body[k], False, k + 1
            elif body[k] in "cnos":
                el, arom, k = body[k].upper(), True, k + 1
            else:
                raise ValueError(f"bad bracket atom {body}")
            h = 0
            if k < len(body) and body[k] == "H":
                k += 1
                h = 1
                d = ""
                while k < len(body) and body[k].isdigit():
                    d += body[k]
                    k += 1
                if d:
                    h = int(d)
            charge = 0
            if k < len(body) and body[k] in "+-":
                sign = 1 if body[k] == "+" else -1
                k += 1
                if k < len(body) and body[k].isdigit():
                    charge = sign * int(body[k])
                    k += 1
                else:
                    charge = sign
                    while k < len(body) and body[k] in "+-":
                        charge += sign
                        k += 1
            assert k == len(body), f"unparsed bracket tail {body[k:]}"
            add_atom(el, charge, h, arom, True)
            i = j + 1
        else:
            if s[i:i + 2] in ("Cl", "Br"):
                add_atom(s[i:i + 2], 0, 0, False, False)
                i += 2
            elif c in "BCNOPSFI":
                add_atom(c, 0, 0, False, False)
                i += 1
            elif c in "cnos":
                add_atom(c.upper(), 0, 0, True, False)
                i += 1
            else:
                raise ValueError(f"unexpected {c!r} in {s}")
    assert not ring and not stack

    kekule_aromatics(m)
    assign_h(m)
    return m


def rings_sssr(m):
    return [list(r) for r in nx.minimum_cycle_basis(m.g)]


def kekule_aromatics(m):
    # explicit Kekulé 6-rings of C/N get aromatic flags
    for ring in nx.minimum_cycle_basis(m.g):
        if len(ring) != 6 or not all(m.el[a] in "CN" for a in ring):
            continue
        sub = m.g.subgraph(ring)
        orders = sorted(d["order"] for _, _, d in sub.edges(data=True))
        if orders == [1, 1, 1, 2, 2, 2] and all(sub.degree(a) == 2 for a in ring):
            # check alternation by walking the cycle
            cyc = nx.cycle_basis(sub)[0]
            seq = [sub[cyc[k]][cyc[(k + 1) % 6]]["order"] for k in range(6)]
            if seq in ([1, 2] * 3, [2, 1] * 3):
                for a in ring:
                    m.arom[a] = True


def explicit_valence(m, a):
    units = 0
    narom = 0
    for b in m.g[a]:
        o = m.g[a][b]["order"]
        if o == 1.5:
            narom += 1
            units += 2
        else:
            units += int(o) * 2
    v = units // 2
    if narom and m.el[a] in ("C", "N", "B"):
        v += 1
    return v


def assign_h(m):
    for a in range(len(m.el)):
        ev = explicit_valence(m, a)
        allowed = ALLOWED_VALENCE.get((m.el[a], m.charge[a]))
        if m.h_fixed[a]:
            assert ev + m.h[a] in allowed, f"valence {ev + m.h[a]} for {m.el[a]}"
        else:
            v = min(x for x in allowed if x >= ev)
            m.h[a] = v - ev


# ---------------------------------------------------------------------------
# helpers

def heavy(m):
    return [a for a in range(len(m.el)) if m.el[a] != "H"]


def total_h(m, a):
    return m.h[a] + sum(1 for b in m.g[a] if m.el[b] == "H")


def bond_orders(m, a):
    return [m.g[a][b]["order"] for b in m.g[a]]


def hyb(m, a):
    if m.arom[a]:
        return "ar"
    orders = bond_orders(m, a)
    if 3 in orders or orders.count(2) >= 2:
        return "sp"
    if 2 in orders:
        return "sp2"
    return "sp3"


def in_ring_atoms(m):
    out = set()
    for r in rings_sssr(m):
        out.update(r)
    return out


# ---------------------------------------------------------------------------
# Crippen atom typing (simplified rule list; first match wins)

def crippen_type(m, a):
    el = m.el[a]
    h = total_h(m, a)
    nbrs = list(m.g[a])
    nb_el = [m.el[b] for b in nbrs]
    orders = bond_orders(m, a)
    hetero = [b for b in nbrs if m.el[b] not in ("C", "H")]
    arom_nb = [b for b in nbrs if m.arom[b]]

    def dbl_to(pred):
        return [b for b in nbrs if m.g[a][b]["order"] == 2 and pred(b)]

    if el == "C":
        if m.arom[a]:
            if h >= 1:
                return (0.1581, 3.350)       # C18 aromatic CH
            for x, v in (("F", (0.0, 3.257)), ("Cl", (0.2450, 3.564)),
                         ("Br", (0.1980, 3.180)), ("I", (0.0, 3.104))):
                if x in nb_el:
                    return v                 # C14-C17
            if dbl_to(lambda b: True):
                return (-0.8186, 3.135)      # C25 exocyclic double
            subst = [b for b in nbrs if m.g[a][b]["order"] != 1.5]
            if not subst:
                return (0.2955, 4.346)       # C19 ring fusion
            s = subst[0]
            if m.arom[s]:
                return (0.2713, 3.904)       # C20 biaryl
            return {"C": (0.1360, 3.509), "N": (0.4619, 4.067),
                    "O": (0.5437, 3.853), "S": (0.1893, 2.673)}.get(
                m.el[s], (-0.5443, 4.041))   # C21-C24 / C13
        if 2 in orders or 3 in orders:
            if dbl_to(lambda b: m.el[b] in ("N", "O", "S")):
                return (-0.2783, 5.007)      # C5 C=heteroatom
            if hetero or arom_nb:
                return (0.0017, 3.888)       # C7 sp2/sp with heteroatom
            return (0.1551, 3.513)           # C6 plain sp2/sp
        if hetero:
            return (-0.2035, 2.753) if h >= 2 else (-0.2051, 2.731)  # C3/C4
        if arom_nb:
            if h == 3:
                return (0.08452, 2.464) if m.el[arom_nb[0]] == "C" \
                    else (-0.1444, 2.412)    # C8/C9
            return {2: (-0.0516, 2.488), 1: (0.1193, 2.582),
                    0: (-0.0967, 2.576)}[h]  # C10-C12
        return (0.1441, 2.503) if h >= 2 else (0.0, 2.433)  # C1/C2
    if el == "N":
        if m.arom[a]:
            return (-0.3239, 2.202) if m.charge[a] == 0 else (-1.1190, 0.0)
        if m.charge[a] > 0:
            if h >= 1:
                return (-1.9500, 0.0)        # N10
            if 2 in orders or 3 in orders:
                return (0.2887, 3.359)       # N14
            return (-0.3396, 0.2604)         # N13
        if m.charge[a] < 0:
            return (-0.4806, 2.134)          # NS
        if 3 in orders:
            return (0.01508, 1.725)          # N9 nitrile
        if 2 in orders:
            if h == 0 and len(nbrs) >= 2:
                return (0.1836, 2.428)       # N6
            return (0.08387, 1.757)          # N5
        if h == 2:
            return (-1.0270, 2.827) if arom_nb else (-1.0190, 2.262)
        if h == 1:
            return (-0.5188, 3.000) if arom_nb else (-0.7096, 2.173)
        return (-0.4458, 2.819) if arom_nb else (-0.3187, 1.839)
    if el == "O":
        if m.arom[a]:
            return (0.1552, 1.080)           # O1
        if m.charge[a] < 0:
            if "N" in nb_el:
                return (-0.3339, 0.7774)     # O6
            if "S" in nb_el:
                return (-1.1890, 0.0)        # O7
            if any(m.el[b] == "C" and any(
                    m.g[b][c]["order"] == 2 and m.el[c] == "O"
                    for c in m.g[b]) for b in nbrs):
                return (-1.3260, 0.0)        # O12 carboxylate
            return (-0.1188, 0.6865)
        if h >= 1:
            return (-0.2893, 0.8238)         # O2 hydroxyl
        if 2 in orders:
            p = nbrs[orders.index(2)]
            if m.el[p] in ("N", "O"):
                return (0.0335, 3.367)       # O5
            if m.arom[p]:
                return (1.1890, 3.135)       # O8
            if m.el[p] == "C":
                others = [c for c in m.g[p] if c != a]
                if any(m.g[p][c]["order"] == 2 and m.el[c] == "O" for c in others):
                    return (0.4833, 0.3890)  # O11 CO2-like
                if any(m.el[c] in ("N", "O", "F", "Cl", "Br", "I") for c in others):
                    return (0.1129, 0.2215)  # O10 ester/acyl-X
                return (-0.1526, 0.0)        # O9 ketone/aldehyde
            return (-0.1188, 0.6865)
        if len(nbrs) == 2:
            return (0.4833, 1.182) if arom_nb else (-0.0684, 1.085)  # O4/O3
        return (-0.1188, 0.6865)             # OS
    if el in ("F", "Cl", "Br", "I"):
        if m.charge[a] != 0:
            return (-2.9960, 0.0)
        return {"F": (0.4202, 1.108), "Cl": (0.6895, 5.853),
                "Br": (0.8456, 8.927), "I": (0.8857, 14.02)}[el]
    if el == "P":
        return (0.8612, 6.920)
    if el == "S":
        if m.arom[a]:
            return (0.6237, 6.691)
        if m.charge[a] != 0:
            return (-0.0024, 7.365)
        return (0.6482, 7.591)
    if el in ("B", "Si"):
        return (-0.3808, 5.754)
    return (0.08129, 3.243)


def crippen_h(m, parent):
    el = m.el[parent]
    if el == "O":
        for b in m.g[parent]:
            if m.el[b] == "C" and any(
                    m.g[b][c]["order"] == 2 and m.el[c] == "O" for c in m.g[b]):
                return (0.2980, 1.805)       # H4 acid
        return (-0.2677, 1.395)              # H2 alcohol
    if el == "N":
        return (0.2142, 0.9627)              # H3
    if el in ("C", "Si", "B"):
        return (0.1230, 1.057)               # H1
    return (0.1125, 1.112)                   # HS


# ---------------------------------------------------------------------------
# Labute-style per-atom accessible surface area (half-cap overlap)

def ideal_bond_length(el_a, el_b, order):
    return COV[el_a] + COV[el_b] - 0.14 * (order - 1.0)


def labute_asa(m):
    hv = heavy(m)
    contrib = {}
    h_total = 0.0
    for a in hv:
        ra = VDW[m.el[a]]
        area = 4.0 * math.pi * ra * ra
        neighbors = [(m.el[b], m.g[a][b]["order"]) for b in m.g[a]]
        neighbors += [("H", 1.0)] * m.h[a]
        for el_b, order in neighbors:
            rb = VDW[el_b]
            d = ideal_bond_length(m.el[a], el_b, order)
            d = min(max(abs(ra - rb), d), ra + rb)
            cap_h = ra - (d * d + ra * ra - rb * rb) / (2.0 * d)
            area -= math.pi * ra * cap_h     # half of the spherical cap
        contrib[a] = area
        for _ in range(m.h[a]):
            rb = VDW["H"]
            d = ideal_bond_length(m.el[a], "H", 1.0)
            d = min(max(abs(ra - rb), d), ra + rb)
            cap_h = rb - (d * d + rb * rb - ra * ra) / (2.0 * d)
            h_total += 4.0 * math.pi * rb * rb - math.pi * rb * cap_h
    return contrib, h_total


# ---------------------------------------------------------------------------
# TPSA (Ertl, N/O contributions)

def tpsa(m):
    total = 0.0
    for a in heavy(m):
        el, h, ch = m.el[a], total_h(m, a), m.charge[a]
        orders = bond_orders(m, a)
        if el == "N":
            if m.arom[a]:
                total += 15.79 if h >= 1 else 12.89
            elif ch == 1 and 2 in orders:
                total += 11.68
            elif ch != 0:
                pass
            elif 3 in orders:
                total += 23.79
            elif 2 in orders:
                total += 23.85 if h >= 1 else 12.36
            else:
                total += {0: 3.24, 1: 12.03}.get(h, 26.02)
        elif el == "O":
            if m.arom[a]:
                total += 13.14
            elif ch == -1:
                total += 23.06
            elif ch != 0:
                pass
            elif 2 in orders:
                total += 17.07
            elif h >= 1:
                total += 20.23
            else:
                total += 9.23
    return total


# ---------------------------------------------------------------------------
# chi / kappa

def deltas(m):
    dn, dv = {}, {}
    for a in heavy(m):
        z, _, _, zv = ELEMENTS[m.el[a]]
        h = total_h(m, a)
        n = zv - h
        dn[a] = float(n)
        dv[a] = float(n) if z <= 10 else (zv - h) / float(z - zv - 1)
    return dn, dv


def simple_paths_k_edges(m, k):
    hv = set(heavy(m))
    paths = set()

    def extend(path):
        if len(path) == k + 1:
            paths.add(min(tuple(path), tuple(reversed(path))))
            return
        for b in m.g[path[-1]]:
            if b in hv and b not in path:
                extend(path + [b])

    for a in sorted(hv):
        extend([a])
    return [list(p) for p in paths]


def chi_indices(m):
    dn, dv = deltas(m)
    out = {}
    for tag, d in (("n", dn), ("v", dv)):
        for a, val in d.items():
            assert val >= 0, f"degenerate delta at atom {a}"
        # zero deltas (e.g. CH4) contribute nothing, per Kier-Hall practice
        out[f"Chi0{tag}"] = sum(v ** -0.5 for v in d.values() if v > 0)
        for k in range(1, 5):
            s = 0.0
            for p in simple_paths_k_edges(m, k):
                prod = 1.0
                for a in p:
                    prod *= d[a]
                if prod > 0:
                    s += prod ** -0.5
            out[f"Chi{k}{tag}"] = s
    return out


def kappa_indices(m):
    hv = heavy(m)
    alpha = 0.0
    for a in hv:
        el = m.el[a]
        key = (el, hyb(m, a)) if (el, hyb(m, a)) in HK_ALPHA else (el, "*")
        alpha += HK_ALPHA.get(key, 0.0)
    A = float(len(hv))
    p1 = float(len([1 for a, b in m.g.edges if m.el[a] != "H" and m.el[b] != "H"]))
    p2 = float(len(simple_paths_k_edges(m, 2)))
    p3 = float(len(simple_paths_k_edges(m, 3)))
    k1 = (A + alpha) * (A + alpha - 1) ** 2 / (p1 + alpha) ** 2 if p1 + alpha > 0 else 0.0
    k2 = (A + alpha - 1) * (A + alpha - 2) ** 2 / (p2 + alpha) ** 2 if p2 + alpha > 0 and A >= 2 else 0.0
    if p3 + alpha > 0 and A >= 3:
        if int(A) % 2 == 1:
            k3 = (A + alpha - 1) * (A + alpha - 3) ** 2 / (p3 + alpha) ** 2
        else:
            k3 = (A + alpha - 3) * (A + alpha - 2) ** 2 / (p3 + alpha) ** 2
    else:
        k3 = 0.0
    return {"Kappa1": k1, "Kappa2": k2, "Kappa3": k3, "HallKierAlpha": alpha}


# ---------------------------------------------------------------------------
# BCUT2D

def bcut(m, diag):
    hv = heavy(m)
    n = len(hv)
    idx = {a: i for i, a in enumerate(hv)}
    B = np.full((n, n), 0.001)
    for a, b, d in m.g.edges(data=True):
        if m.el[a] == "H" or m.el[b] == "H":
            continue
        B[idx[a], idx[b]] = B[idx[b], idx[a]] = 0.1 * d["order"]
    for a in hv:
        B[idx[a], idx[a]] = diag[a]
    ev = np.linalg.eigvalsh(B)
    return float(ev[-1]), float(ev[0])


# ---------------------------------------------------------------------------
# fragments

def sp3_c(m, a):
    return m.el[a] == "C" and not m.arom[a] and all(
        o == 1 for o in bond_orders(m, a))


def fragments(m):
    hal = ("F", "Cl", "Br", "I")
    fr = dict.fromkeys(
        ["fr_nitrile", "fr_nitrite", "fr_allylic_oxid", "fr_halogen",
         "fr_ether", "fr_ketone", "fr_alkyl_halide", "fr_epoxide"], 0)
    seen = {k: set() for k in fr}

    def hit(key, atoms):
        s = frozenset(atoms)
        if s not in seen[key]:
            seen[key].add(s)
            fr[key] += 1

    for a in heavy(m):
        el = m.el[a]
        for b in m.g[a]:
            o = m.g[a][b]["order"]
            if el == "C" and m.el[b] == "N" and o == 3:
                hit("fr_nitrile", (a, b))
            if el in hal and m.el[b] == "C":
                hit("fr_halogen", (a, b))
                if sp3_c(m, b):
                    hit("fr_alkyl_halide", (a, b))
        if el == "N" and m.charge[a] == 0:
            singles = [b for b in m.g[a]
                       if m.g[a][b]["order"] == 1 and m.el[b] == "O"]
            doubles = [b for b in m.g[a]
                       if m.g[a][b]["order"] == 2 and m.el[b] == "O"]
            for s in singles:
                for d in doubles:
                    hit("fr_nitrite", (s, a, d))
        if el == "O" and total_h(m, a) == 0 and len(m.g[a]) == 2 and all(
                m.g[a][b]["order"] == 1 and m.el[b] == "C" for b in m.g[a]):
            hit("fr_ether", tuple(m.g[a]) + (a,))
        if el == "C" and not m.arom[a]:
            dbl_o = [b for b in m.g[a]
                     if m.g[a][b]["order"] == 2 and m.el[b] == "O"]
            c_nb = [b for b in m.g[a]
                    if m.el[b] == "C" and m.g[a][b]["order"] == 1]
            if dbl_o and len(c_nb) >= 2:
                hit("fr_ketone", (c_nb[0], a, dbl_o[0], c_nb[1]))
        if sp3_c(m, a) and total_h(m, a) >= 1:
            for b in m.g[a]:
                if m.el[b] == "C" and not m.arom[b]:
                    for c in m.g[b]:
                        if c != a and m.el[c] == "C" and m.g[b][c]["order"] == 2:
                            hit("fr_allylic_oxid", (a, b, c))
    for ring in rings_sssr(m):
        if len(ring) == 3:
            els = sorted(m.el[a] for a in ring)
            if els == ["C", "C", "O"]:
                hit("fr_epoxide", tuple(ring))
    return fr


# ---------------------------------------------------------------------------
# Morgan environment density

def morgan_density(m, max_radius=3):
    def mix(z):
        z = (z + 0x9E3779B97F4A7C15) & (1 << 64) - 1
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (1 << 64) - 1
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (1 << 64) - 1
        return z ^ (z >> 31)

    n = len(m.el)
    inv = []
    for a in range(n):
        z, _, _, _ = ELEMENTS[m.el[a]]
        seed = (z | ((m.charge[a] & 0xFF) << 8) | (total_h(m, a) << 16)
                | (int(m.arom[a]) << 24) | (int(a in in_ring_atoms(m)) << 25)
                | (len(m.g[a]) << 32))
        inv.append(mix(seed))
    rounds = [list(inv)]
    bond_key = {1: 0x517CC1B727220A95, 2: 0x2545F4914F6CDD1D,
                3: 0x27D4EB2F165667C5, 1.5: 0x9E3779B97F4A7C15}
    for r in range(max_radius):
        nxt = []
        for a in range(n):
            env = sorted(mix(inv[b] ^ bond_key[m.g[a][b]["order"]])
                         for b in m.g[a])
            h = mix(inv[a] ^ (r + 1))
            for e in env:
                h = mix((h * 0x9E3779B97F4A7C15 + e) & (1 << 64) - 1)
            nxt.append(h)
        rounds.append(nxt)
        inv = nxt

    # bond count of the r-ball of each atom, for the growth rule
    def ball_edge_count(a, r):
        dist = nx.single_source_shortest_path_length(m.g, a, cutoff=r)
        return sum(1 for x, y in m.g.edges if x in dist and y in dist)

    out = {}
    distinct = set(rounds[0])
    for radius in range(1, max_radius + 1):
        for a in range(n):
            if ball_edge_count(a, radius) > ball_edge_count(a, radius - 1):
                distinct.add(rounds[radius][a])
        out[f"FpDensityMorgan{radius}"] = len(distinct) / len(heavy(m))
    return out


# ---------------------------------------------------------------------------
# full vector

def vsa_bins(props, asas, edges):
    bins = [0.0] * (len(edges) + 1)
    for p, s in zip(props, asas):
        k = 0
        while k < len(edges) and p >= edges[k]:
            k += 1
        bins[k] += s
    return bins


def featurize(m):
    hv = heavy(m)
    out = {}
    mw = sum(ELEMENTS[m.el[a]][1] for a in range(len(m.el)))
    mw += sum(m.h) * ELEMENTS["H"][1]
    emw = sum(ELEMENTS[m.el[a]][2] for a in range(len(m.el)))
    emw += sum(m.h) * ELEMENTS["H"][2]
    out["MolWt"] = mw
    out["ExactMolWt"] = emw
    out["HeavyAtomCount"] = len(hv)
    out["HeavyAtomMolWt"] = mw - (sum(m.h) + sum(
        1 for a in range(len(m.el)) if m.el[a] == "H")) * ELEMENTS["H"][1]
    out["NumValenceElectrons"] = sum(
        ELEMENTS[m.el[a]][3] - m.charge[a] for a in range(len(m.el))) + sum(m.h)
    out["NumHeteroatoms"] = sum(1 for a in hv if m.el[a] not in ("C", "H"))
    out["NOCount"] = sum(1 for a in hv if m.el[a] in ("N", "O"))
    out["NHOHCount"] = sum(total_h(m, a) for a in hv if m.el[a] in ("N", "O"))
    out["NumHDonors"] = sum(
        1 for a in hv if m.el[a] in ("N", "O") and total_h(m, a) >= 1)
    out["NumHAcceptors"] = sum(1 for a in hv if m.el[a] in ("N", "O"))
    cs = [a for a in hv if m.el[a] == "C"]
    out["FractionCSP3"] = (
        sum(1 for a in cs if sp3_c(m, a)) / len(cs)) if cs else 0.0

    ring_atoms = in_ring_atoms(m)
    rot = 0
    for a, b, d in m.g.edges(data=True):
        if d["order"] != 1 or m.el[a] == "H" or m.el[b] == "H":
            continue
        if frozenset((a, b)) in {frozenset((x, y)) for r in rings_sssr(m)
                                 for x, y in zip(r, r[1:] + r[:1])
                                 if m.g.has_edge(x, y)}:
            continue
        deg_a = sum(1 for x in m.g[a] if m.el[x] != "H")
        deg_b = sum(1 for x in m.g[b] if m.el[x] != "H")
        if deg_a >= 2 and deg_b >= 2:
            rot += 1
    out["NumRotatableBonds"] = rot

    rings = rings_sssr(m)
    out["RingCount"] = len(rings)

    def ring_stats(pred):
        return sum(1 for r in rings if pred(r))

    def all_arom(r):
        return all(m.arom[a] for a in r)

    def saturated(r):
        sub = m.g.subgraph(r)
        return all(d["order"] == 1 for _, _, d in sub.edges(data=True)) and \
            not any(m.arom[a] for a in r)

    def hetero_ring(r):
        return any(m.el[a] != "C" for a in r)

    out["NumAromaticRings"] = ring_stats(all_arom)
    out["NumAliphaticRings"] = ring_stats(lambda r: not all_arom(r))
    out["NumSaturatedRings"] = ring_stats(saturated)
    out["NumAromaticHeterocycles"] = ring_stats(
        lambda r: all_arom(r) and hetero_ring(r))
    out["NumAliphaticHeterocycles"] = ring_stats(
        lambda r: not all_arom(r) and hetero_ring(r))
    out["NumSaturatedHeterocycles"] = ring_stats(
        lambda r: saturated(r) and hetero_ring(r))

    logps = {a: crippen_type(m, a)[0] for a in hv}
    mrs = {a: crippen_type(m, a)[1] for a in hv}
    hlogp = sum(m.h[a] * crippen_h(m, a)[0] for a in hv)
    hmr = sum(m.h[a] * crippen_h(m, a)[1] for a in hv)
    out["MolLogP"] = sum(logps.values()) + hlogp
    out["MolMR"] = sum(mrs.values()) + hmr

    asa, h_asa = labute_asa(m)
    out["LabuteASA"] = sum(asa.values()) + h_asa
    out["TPSA"] = tpsa(m)

    order = sorted(hv)
    slogp = vsa_bins([logps[a] for a in order], [asa[a] for a in order],
                     SLOGP_EDGES)
    smr = vsa_bins([mrs[a] for a in order], [asa[a] for a in order], SMR_EDGES)
    for k in range(10):
        out[f"SlogP_VSA{k + 1}"] = slogp[k]
        out[f"SMR_VSA{k + 1}"] = smr[k]

    out.update(chi_indices(m))
    out.update(kappa_indices(m))

    mass = {a: ELEMENTS[m.el[a]][1] for a in hv}
    chg = {a: float(m.charge[a]) for a in hv}
    for tag, diag in (("MW", mass), ("CHG", chg), ("LOGP", logps)):
        hi, lo = bcut(m, diag)
        out[f"BCUT2D_{tag}HI"] = hi
        out[f"BCUT2D_{tag}LOW"] = lo

    out.update(fragments(m))
    out.update(morgan_density(m))
    return out


NAME_ORDER = [
    "MolWt", "ExactMolWt", "HeavyAtomCount", "HeavyAtomMolWt",
    "NumValenceElectrons", "NumHeteroatoms", "NOCount", "NHOHCount",
    "NumHDonors", "NumHAcceptors", "FractionCSP3", "NumRotatableBonds",
    "RingCount", "NumAromaticRings", "NumAliphaticRings", "NumSaturatedRings",
    "NumAromaticHeterocycles", "NumAliphaticHeterocycles",
    "NumSaturatedHeterocycles", "MolLogP", "MolMR", "LabuteASA", "TPSA",
] + [f"SlogP_VSA{k}" for k in range(1, 11)] \
  + [f"SMR_VSA{k}" for k in range(1, 11)] \
  + [f"Chi{k}n" for k in range(5)] + [f"Chi{k}v" for k in range(5)] \
  + ["Kappa1", "Kappa2", "Kappa3", "HallKierAlpha"] \
  + ["BCUT2D_MWHI", "BCUT2D_MWLOW", "BCUT2D_CHGHI", "BCUT2D_CHGLOW",
     "BCUT2D_LOGPHI", "BCUT2D_LOGPLOW"] \
  + ["fr_nitrile", "fr_nitrite", "fr_allylic_oxid", "fr_halogen",
     "fr_ether", "fr_ketone", "fr_alkyl_halide", "fr_epoxide"] \
  + ["FpDensityMorgan1", "FpDensityMorgan2", "FpDensityMorgan3"]


def main():
    fixtures = sys.argv[1] if len(sys.argv) > 1 else "data/fixtures.csv"
    out_path = sys.argv[2] if len(sys.argv) > 2 else "data/golden_descriptors.csv"
    rows = []
    with open(fixtures) as f:
        for rec in csv.DictReader(f):
            m = parse(rec["smiles"])
            vals = featurize(m)
            rename = {"BCUT2D_CHGLO": "BCUT2D_CHGLOW"}
            vals = {rename.get(k, k): v for k, v in vals.items()}
            rows.append((rec["id"], rec["smiles"], vals))
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "smiles"] + NAME_ORDER)
        for rid, smi, vals in rows:
            w.writerow([rid, smi] + [repr(round(float(vals[n]), 10))
                                     for n in NAME_ORDER])
    print(f"wrote {out_path} ({len(rows)} molecules x {len(NAME_ORDER)} descriptors)")


if __name__ == "__main__":
    main()
