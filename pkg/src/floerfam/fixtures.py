"""Bundled fixtures: circle, two factor circles in a torus, a corrupted sign, random."""

from __future__ import annotations

import os
import random
from fractions import Fraction
from typing import Dict, Tuple

from .ainf_core import AInfCategory, Generator, dumps_category
from .decoration import Decoration
from .novikov import NovikovScalar

ONE = NovikovScalar.one()


def circle() -> Tuple[AInfCategory, Decoration]:
    """One object L with hom = span{1, e}, |e| = 1, the cohomology of a circle.

    mu^1(1) = e - e is the pair of flow lines around the two halves of the
    circle; the second one winds once, so the family differential is (1 - z) e.
    """
    gens = [Generator("1", "L", "L", 0), Generator("e", "L", "L", 1)]
    cat = AInfCategory(["L"], gens, "z", {"L": "1"}, "circle")
    deco = Decoration(1)
    cat.add_mu(("1",), "e", ONE)
    cat.add_mu(("1",), "e", -ONE)
    deco.set((("1",), "e", 1), [(1,)])
    cat.add_mu(("1", "1"), "1", ONE)
    cat.add_mu(("1", "e"), "e", -ONE)
    cat.add_mu(("e", "1"), "e", ONE)
    deco.set((("e", "1"), "e", 0), [(0,), (1,)])
    return cat, deco


def corrupted_sign() -> Tuple[AInfCategory, Decoration]:
    """The circle with the sign of mu^2(e, 1) flipped."""
    cat, deco = circle()
    idx = cat.find_entry(("e", "1"), "e")
    bad = cat.replace_entry(idx, -ONE)
    bad.name = "corrupted-sign"
    return bad, deco


def torus() -> Tuple[AInfCategory, Decoration]:
    """The two factor circles of a 2-torus, decorated in the product lattice Z^2.

    Objects L1, L2 are copies of the circle fixture; L1 winds in the first
    lattice direction and L2 in the second.  They are mutually orthogonal.
    """
    gens = [Generator("1a", "L1", "L1", 0), Generator("ea", "L1", "L1", 1),
            Generator("1b", "L2", "L2", 0), Generator("eb", "L2", "L2", 1)]
    cat = AInfCategory(["L1", "L2"], gens, "z", {"L1": "1a", "L2": "1b"}, "torus")
    deco = Decoration(2)
    for one, e, vec in (("1a", "ea", (1, 0)), ("1b", "eb", (0, 1))):
        cat.add_mu((one,), e, ONE)
        cat.add_mu((one,), e, -ONE)
        deco.set(((one,), e, 1), [vec])
        cat.add_mu((one, one), one, ONE)
        cat.add_mu((one, e), e, -ONE)
        cat.add_mu((e, one), e, ONE)
        deco.set(((e, one), e, 0), [(0, 0), vec])
    return cat, deco


def random_fixture(seed: int, size: int) -> Tuple[AInfCategory, Decoration]:
    """Upper-triangular path category with associative, T-weighted composition.

    Objects 0..size-1, one degree-0 generator x_ij for i < j plus units.
    mu^2(x_jk, x_ij) = T^{h_ij + h_jk - h_ik} x_ik is associative for any
    heights h; the decoration is a coboundary, so it is always consistent.
    """
    rng = random.Random(seed)
    objs = [f"O{i}" for i in range(size)]
    gens = [Generator(f"u{i}", objs[i], objs[i], 0) for i in range(size)]
    h: Dict[Tuple[int, int], Fraction] = {}
    for i in range(size):
        for j in range(i + 1, size):
            gens.append(Generator(f"x{i}_{j}", objs[i], objs[j], 0))
            h[(i, j)] = Fraction(rng.randint(0, 6), rng.choice([1, 2, 3]))
    pot = [tuple(rng.randint(-1, 1) for _ in range(2)) for _ in range(size)]
    cat = AInfCategory(objs, gens, "z", {objs[i]: f"u{i}" for i in range(size)}, f"random-{seed}-{size}")
    for i in range(size):
        cat.add_mu((f"u{i}", f"u{i}"), f"u{i}", ONE)
        for j in range(i + 1, size):
            x = f"x{i}_{j}"
            cat.add_mu((x, f"u{i}"), x, ONE)
            cat.add_mu((f"u{j}", x), x, ONE)
            for k in range(j + 1, size):
                e = h[(i, j)] + h[(j, k)] - h[(i, k)]
                cat.add_mu((f"x{j}_{k}", x), f"x{i}_{k}", NovikovScalar.T(e))
    # right slot of mu2(a, b) is pot(target a) - pot(source a): a coboundary
    deco = Decoration(2)
    idx = {o: n for n, o in enumerate(objs)}
    for ent in cat.entries:
        a = cat.generators[ent.inputs[0]]
        s, t = idx[a.source], idx[a.target]
        w = tuple(pot[t][c] - pot[s][c] for c in range(2))
        deco.set(ent.address, [(0, 0), w])
    return cat, deco


FIXTURES = ("circle", "torus", "corrupted-sign", "random")


def build_fixture(name: str, seed: int = 0, size: int = 3) -> Tuple[AInfCategory, Decoration]:
    if name == "circle":
        return circle()
    if name == "torus":
        return torus()
    if name == "corrupted-sign":
        return corrupted_sign()
    if name == "random":
        return random_fixture(seed, size)
    raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")


def generate_fixture(name: str, out_dir: str, seed: int = 0, size: int = 3) -> Dict[str, str]:
    """Write ``<name>.category.json`` and ``<name>.decoration.json``; return the paths."""
    cat, deco = build_fixture(name, seed, size)
    os.makedirs(out_dir, exist_ok=True)
    stem = name if name != "random" else f"random-{seed}-{size}"
    paths = {"category": os.path.join(out_dir, f"{stem}.category.json"),
             "decoration": os.path.join(out_dir, f"{stem}.decoration.json")}
    with open(paths["category"], "w", encoding="utf-8") as fh:
        fh.write(dumps_category(cat))
    with open(paths["decoration"], "w", encoding="utf-8") as fh:
        fh.write(deco.dumps())
    return paths
