"""Group diagrams (G, H, K-, K+), the group/fiber catalog, suspension and join
builders, fiber types, Euler characteristics and the CM decision procedures."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .algebra import (
    AlgebraError,
    AlgebraMorphism,
    FailsAt,
    FreeGCAlgebra,
    Generator,
    Polynomial,
    default_bound,
    parse_polynomial,
    sum_image_report,
    surjectivity_report,
    SurjectiveUpTo,
)
from .invariants import (
    CMVerdict,
    COHEN_MACAULAY,
    DEFAULT_SEED,
    NOT_COHEN_MACAULAY,
    cm_from_invariants,
    krull_dimension,
    zero_divisor_witness,
)
from .models import borel_model, embed, homogeneous_model, ring_truncation

SULLIVAN_ASSUMED = "classifying spaces of H, K-, K+ are Sullivan spaces (assumed, identity-component data)"


class DiagramError(ValueError):
    """Invalid diagram or catalog input; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class JoinRefused(DiagramError):
    pass


# --- groups ----------------------------------------------------------------------

@dataclass(frozen=True)
class CompactGroupData:
    name: str
    rank: int
    generators: Tuple[Generator, ...]
    weyl_order: int
    dim: Optional[int] = None
    components: int = 1
    invariant_ring: bool = False

    def __post_init__(self):
        if len(self.generators) != self.rank:
            raise DiagramError(f"{self.name}: rank {self.rank} but {len(self.generators)} generators")
        for g in self.generators:
            if g.degree < 2 or g.degree % 2:
                raise DiagramError(f"{self.name}: generator {g.name} has degree {g.degree}, need even >= 2")
        if self.weyl_order < 1 or self.components < 1:
            raise DiagramError(f"{self.name}: Weyl order and component count must be positive")

    @property
    def algebra(self) -> FreeGCAlgebra:
        return FreeGCAlgebra(self.generators)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    def renamed(self, suffix: str) -> "CompactGroupData":
        gens = tuple(Generator(g.name + suffix, g.degree) for g in self.generators)
        return CompactGroupData(self.name, self.rank, gens, self.weyl_order, self.dim,
                                self.components, self.invariant_ring)

    def to_json(self) -> dict:
        out = {"name": self.name, "rank": self.rank,
               "generators": [{"name": g.name, "degree": g.degree} for g in self.generators],
               "weyl_order": self.weyl_order}
        if self.dim is not None:
            out["dim"] = self.dim
        if self.components != 1:
            out["components"] = self.components
        if self.invariant_ring:
            out["invariant_ring"] = True
        return out


def product_group(a: CompactGroupData, b: CompactGroupData) -> CompactGroupData:
    dim = a.dim + b.dim if a.dim is not None and b.dim is not None else None
    return CompactGroupData(f"{a.name}x{b.name}", a.rank + b.rank, a.generators + b.generators,
                            a.weyl_order * b.weyl_order, dim, a.components * b.components,
                            a.invariant_ring or b.invariant_ring)


def _parse_generators(raw, path: str) -> Tuple[Generator, ...]:
    items: List[Tuple[str, int]] = []
    if isinstance(raw, Mapping):
        items = list(raw.items())
    elif isinstance(raw, list):
        for i, g in enumerate(raw):
            if isinstance(g, Mapping) and "name" in g and "degree" in g:
                items.append((g["name"], g["degree"]))
            elif isinstance(g, (list, tuple)) and len(g) == 2:
                items.append((g[0], g[1]))
            else:
                raise DiagramError("expected {name, degree} or [name, degree]", f"{path}[{i}]")
    else:
        raise DiagramError("generators must be a list or a mapping", path)
    try:
        return tuple(Generator(str(n), int(d)) for n, d in items)
    except (AlgebraError, TypeError, ValueError) as exc:
        raise DiagramError(str(exc), path) from None


def parse_group(raw, path: str, catalog: Optional["Catalog"] = None) -> CompactGroupData:
    if isinstance(raw, str):
        catalog = catalog or load_catalog()
        if raw not in catalog.groups:
            raise DiagramError(f"unknown group {raw!r}", path)
        return catalog.groups[raw]
    if not isinstance(raw, Mapping):
        raise DiagramError("group entry must be a name or an object", path)
    gens = _parse_generators(raw.get("generators", []), f"{path}.generators")
    try:
        return CompactGroupData(
            name=str(raw.get("name", path)),
            rank=int(raw.get("rank", len(gens))),
            generators=gens,
            weyl_order=int(raw.get("weyl_order", 1)),
            dim=int(raw["dim"]) if raw.get("dim") is not None else None,
            components=int(raw.get("components", 1)),
            invariant_ring=bool(raw.get("invariant_ring", False)),
        )
    except DiagramError as exc:
        raise DiagramError(str(exc), path) from None


def parse_morphism(raw, source: CompactGroupData, target: CompactGroupData, path: str) -> AlgebraMorphism:
    if not isinstance(raw, Mapping):
        raise DiagramError("expected a mapping generator -> expression", path)
    src, tgt = source.algebra, target.algebra
    images = {}
    for name, expr in raw.items():
        if name not in src:
            raise DiagramError(f"unknown generator {name!r} of {source.name}", f"{path}.{name}")
        try:
            images[name] = parse_polynomial(str(expr), tgt)
        except AlgebraError as exc:
            raise DiagramError(str(exc), f"{path}.{name}") from None
    try:
        return AlgebraMorphism(src, tgt, images)
    except AlgebraError as exc:
        raise DiagramError(str(exc), path) from None


# --- diagrams --------------------------------------------------------------------

@dataclass
class GroupDiagram:
    G: CompactGroupData
    H: CompactGroupData
    Kminus: CompactGroupData
    Kplus: CompactGroupData
    iota_minus: AlgebraMorphism
    iota_plus: AlgebraMorphism
    options: Dict = field(default_factory=dict)
    annotations: Dict[str, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        for side, K in (("Kminus", self.Kminus), ("Kplus", self.Kplus)):
            if not self.H.rank <= K.rank <= self.G.rank:
                raise DiagramError(
                    f"rank condition rank H <= rank K <= rank G fails ({self.H.rank}, {K.rank}, {self.G.rank})", side)
        if self.iota_minus.source != self.Kminus.algebra or self.iota_minus.target != self.H.algebra:
            raise DiagramError("iota_minus must map H*(BK-) to H*(BH)", "iota_minus")
        if self.iota_plus.source != self.Kplus.algebra or self.iota_plus.target != self.H.algebra:
            raise DiagramError("iota_plus must map H*(BK+) to H*(BH)", "iota_plus")

    @property
    def ranks(self) -> Tuple[int, int, int, int]:
        return self.G.rank, self.H.rank, self.Kminus.rank, self.Kplus.rank

    @property
    def max_degree(self) -> int:
        d = self.options.get("max_degree")
        return int(d) if d is not None else default_bound(self.H.algebra)

    @property
    def uses_invariant_rings(self) -> bool:
        return any(g.invariant_ring for g in (self.H, self.Kminus, self.Kplus))

    @property
    def dimension(self) -> Optional[int]:
        """dim X = dim G/H + 1, when group dimensions are known."""
        if self.G.dim is None or self.H.dim is None:
            return None
        return self.G.dim - self.H.dim + 1

    def to_json(self) -> dict:
        out = {
            "G": self.G.to_json(), "H": self.H.to_json(),
            "Kminus": self.Kminus.to_json(), "Kplus": self.Kplus.to_json(),
            "iota_minus": self.iota_minus.image_strings(),
            "iota_plus": self.iota_plus.image_strings(),
            "options": dict(self.options),
        }
        if self.annotations:
            out["fiber_annotations"] = dict(self.annotations)
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, raw, catalog: Optional["Catalog"] = None) -> "GroupDiagram":
        if not isinstance(raw, Mapping):
            raise DiagramError("diagram must be a JSON object")
        for key in ("G", "H", "Kminus", "Kplus", "iota_minus", "iota_plus"):
            if key not in raw:
                raise DiagramError("missing field", key)
        G, H, Km, Kp = (parse_group(raw[k], k, catalog) for k in ("G", "H", "Kminus", "Kplus"))
        phi = parse_morphism(raw["iota_minus"], Km, H, "iota_minus")
        psi = parse_morphism(raw["iota_plus"], Kp, H, "iota_plus")
        options = raw.get("options") or {}
        if not isinstance(options, Mapping):
            raise DiagramError("options must be an object", "options")
        md = options.get("max_degree")
        if md is not None and (not isinstance(md, int) or md < 2):
            raise DiagramError("max_degree must be an integer >= 2", "options.max_degree")
        ann = raw.get("fiber_annotations") or {}
        return cls(G, H, Km, Kp, phi, psi, dict(options), dict(ann), str(raw.get("name", "")))


@dataclass
class HomogeneousPair:
    """G/H with the restriction map H*(BG) -> H*(BH)."""

    G: CompactGroupData
    H: CompactGroupData
    iota: AlgebraMorphism
    options: Dict = field(default_factory=dict)
    name: str = ""

    @property
    def dimension(self) -> Optional[int]:
        if self.G.dim is None or self.H.dim is None:
            return None
        return self.G.dim - self.H.dim

    def to_json(self) -> dict:
        out = {"G": self.G.to_json(), "H": self.H.to_json(), "iota": self.iota.image_strings()}
        if self.options:
            out["options"] = dict(self.options)
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, raw, catalog: Optional["Catalog"] = None) -> "HomogeneousPair":
        if not isinstance(raw, Mapping):
            raise DiagramError("pair must be a JSON object")
        for key in ("G", "H", "iota"):
            if key not in raw:
                raise DiagramError("missing field", key)
        G, H = parse_group(raw["G"], "G", catalog), parse_group(raw["H"], "H", catalog)
        iota = parse_morphism(raw["iota"], G, H, "iota")
        return cls(G, H, iota, dict(raw.get("options") or {}), str(raw.get("name", "")))


def _same_group(a: CompactGroupData, b: CompactGroupData, iota: AlgebraMorphism) -> bool:
    return a == b or (a.algebra == b.algebra and iota.is_identity())


def suspension_diagram(G: CompactGroupData, H: CompactGroupData, iota: AlgebraMorphism,
                       options: Optional[Dict] = None) -> GroupDiagram:
    """(G, H, G, G): both induced maps equal iota."""
    if _same_group(G, H, iota):
        raise DiagramError("H must be a proper subgroup of G")
    return GroupDiagram(G, H, G, G, iota, iota, dict(options or {}), name=f"Susp({G.name}/{H.name})")


def _rename(p: Polynomial, algebra: FreeGCAlgebra) -> Polynomial:
    """Same exponent vectors, new algebra with the same generator order and degrees."""
    return Polynomial(algebra, p.terms)


def join_diagram(left: Tuple[CompactGroupData, CompactGroupData, AlgebraMorphism],
                 right: Tuple[CompactGroupData, CompactGroupData, AlgebraMorphism],
                 options: Optional[Dict] = None) -> GroupDiagram:
    """(G1 x G2, H1 x H2, G1 x H2, H1 x G2) with tensor-product induced maps.

    Generator names get suffixes _1 and _2 so the factors never collide.
    """
    (G1, H1, i1), (G2, H2, i2) = left, right
    if _same_group(G1, H1, i1) or _same_group(G2, H2, i2):
        raise DiagramError("each H_i must be a proper subgroup of G_i")
    G1, H1, G2, H2 = G1.renamed("_1"), H1.renamed("_1"), G2.renamed("_2"), H2.renamed("_2")
    G, H = product_group(G1, G2), product_group(H1, H2)
    Km, Kp = product_group(G1, H2), product_group(H1, G2)
    Halg = H.algebra
    phi_images = {g.name: embed(_rename(i1.images[g.name[:-2]], H1.algebra), Halg) for g in G1.generators}
    phi_images.update({g.name: Halg.gen(g.name) for g in H2.generators})
    psi_images = {g.name: Halg.gen(g.name) for g in H1.generators}
    psi_images.update({g.name: embed(_rename(i2.images[g.name[:-2]], H2.algebra), Halg) for g in G2.generators})
    phi = AlgebraMorphism(Km.algebra, Halg, phi_images)
    psi = AlgebraMorphism(Kp.algebra, Halg, psi_images)
    name = f"{left[0].name}/{left[1].name} * {right[0].name}/{right[1].name}"
    return GroupDiagram(G, H, Km, Kp, phi, psi, dict(options or {}), name=name)


# --- fiber types -------------------------------------------------------------------

@dataclass(frozen=True)
class FiberType:
    tag: str
    n: Optional[int] = None

    KINDS = ("RationalOddSphere", "W7Type", "B13Type", "EvenType", "Unknown")

    def __str__(self):
        return f"{self.tag}({self.n})" if self.n is not None else self.tag

    @classmethod
    def parse(cls, text: str) -> "FiberType":
        text = text.strip()
        if text.endswith(")") and "(" in text:
            tag, n = text[:-1].split("(", 1)
            return cls(tag, int(n))
        return cls(text)


_W7_PATTERN = {0: 1, 2: 1, 5: 1, 7: 1}
_B13_PATTERN = {0: 1, 2: 1, 4: 1, 9: 1, 11: 1, 13: 1}


def classify_betti(betti: Iterable[int]) -> FiberType:
    nonzero = {d: b for d, b in enumerate(betti) if b}
    odd = [d for d in nonzero if d % 2]
    if len(nonzero) == 2 and len(odd) == 1 and nonzero[0] == 1 and nonzero[odd[0]] == 1:
        return FiberType("RationalOddSphere", odd[0])
    if nonzero == _W7_PATTERN:
        return FiberType("W7Type")
    if nonzero == _B13_PATTERN:
        return FiberType("B13Type")
    if not odd:
        return FiberType("EvenType")
    return FiberType("Unknown")


def fiber_bound(K: CompactGroupData, H: CompactGroupData) -> int:
    if K.dim is not None and H.dim is not None:
        return K.dim - H.dim
    # top class of the model sits at most in degree sum(deg x_i - 1)
    return sum(d - 1 for d in K.degrees)


def fiber_betti(K: CompactGroupData, H: CompactGroupData, iota: AlgebraMorphism) -> List[int]:
    return homogeneous_model(iota).betti(fiber_bound(K, H))


def fiber_type(K: CompactGroupData, H: CompactGroupData, iota: AlgebraMorphism) -> FiberType:
    """Rational type of K/H read off the homogeneous-model betti numbers."""
    return classify_betti(fiber_betti(K, H, iota))


# --- Euler characteristic ----------------------------------------------------------

def homogeneous_euler_characteristic(G: CompactGroupData, K: CompactGroupData) -> int:
    """chi(G/K): Weyl-order ratio (with components) at equal rank, 0 otherwise."""
    if K.rank != G.rank:
        return 0
    num, den = G.weyl_order * G.components, K.weyl_order * K.components
    if num % den:
        raise DiagramError(f"Weyl order {num} of {G.name} not divisible by {den} of {K.name}")
    return num // den


def euler_characteristic(diagram: GroupDiagram) -> int:
    """chi(G/K-) + chi(G/K+) - chi(G/H); chi(G/K) = |W_G|/|W_K| at equal rank, else 0."""
    d = diagram
    chi = homogeneous_euler_characteristic
    return chi(d.G, d.Kminus) + chi(d.G, d.Kplus) - chi(d.G, d.H)


@dataclass(frozen=True)
class EulerClassification:
    case: str
    predicted_sign: Optional[int]
    chi: int

    @property
    def consistent(self) -> bool:
        if self.predicted_sign is None:
            return True
        return (self.chi > 0) - (self.chi < 0) == self.predicted_sign


def euler_classification(diagram: GroupDiagram) -> EulerClassification:
    """Sign of chi(X) predicted from dimension parity, coranks and the Euler
    characteristics of the normal fibers, for positively curved diagrams.

    Diagrams violating the rank constraints of positive curvature get case
    "not-positively-curved" and no prediction.
    """
    d = diagram
    dim = d.dimension
    if dim is None:
        raise DiagramError("group dimensions are required to classify by Euler characteristic")
    chi = euler_characteristic(d)
    cH = d.G.rank - d.H.rank
    cm, cp = d.G.rank - d.Kminus.rank, d.G.rank - d.Kplus.rank
    if dim % 2 == 0:
        if cH == 1 and min(cm, cp) == 0:
            return EulerClassification("even-dimensional", 1, chi)
        return EulerClassification("not-positively-curved", None, chi)
    if cH == cm == cp == 0:
        em = homogeneous_euler_characteristic(d.Kminus, d.H)
        ep = homogeneous_euler_characteristic(d.Kplus, d.H)
        if min(em, ep) == 1:
            return EulerClassification("odd, corank zero, a normal fiber with chi 1", 1, chi)
        if em == ep == 2:
            return EulerClassification("odd, corank zero, both normal fibers with chi 2", 0, chi)
        return EulerClassification("odd, corank zero, normal fibers with chi >= 2 and >= 3", -1, chi)
    if cH == 2 and min(cm, cp) == 1:
        return EulerClassification("odd, principal corank 2, a singular corank 1", 0, chi)
    return EulerClassification("not-positively-curved", None, chi)


# --- decisions ---------------------------------------------------------------------

def _hypotheses(diagram: GroupDiagram) -> List[str]:
    if diagram.uses_invariant_rings:
        return ["invariant rings supplied directly; the Sullivan hypothesis does not hold, "
                "so the verdict comes from direct computation"]
    return [SULLIVAN_ASSUMED]


def cm_decide(diagram: GroupDiagram, bound: Optional[int] = None, seed: int = DEFAULT_SEED) -> CMVerdict:
    D = bound if bound is not None else diagram.max_degree
    _, rh, rm, rp = diagram.ranks
    hyp = _hypotheses(diagram)
    ranks = {"H": rh, "Kminus": rm, "Kplus": rp}
    if not diagram.uses_invariant_rings:
        if rh == rm == rp:
            return CMVerdict(COHEN_MACAULAY, "RankEquality", D, f"rank H = rank K- = rank K+ = {rh}",
                             exact=True, certificate={"ranks": ranks}, hypotheses=hyp)
        if max(rm, rp) <= rh + 1:
            rep = sum_image_report(diagram.iota_minus, diagram.iota_plus, D)
            if isinstance(rep, FailsAt):
                cert = {"ranks": ranks, "sum_of_images": {"fails_at": rep.degree, "missing": str(rep.missing)}}
                w = zero_divisor_witness(diagram, D)
                if w is not None:
                    cert["zero_divisor"] = w.to_json()
                return CMVerdict(NOT_COHEN_MACAULAY, "ZeroDivisorGap", D,
                                 f"sum-of-images fails at degree {rep.degree}, missing class {rep.missing}",
                                 exact=True, certificate=cert, hypotheses=hyp)
            return CMVerdict(COHEN_MACAULAY, "SumSurjective", D,
                             f"corank ≤ 1, sum surjective through {D}",
                             exact=False, certificate={"ranks": ranks, "sum_surjective_through": D},
                             hypotheses=hyp)
    ring = ring_truncation(borel_model(diagram, D), D)
    verdict = cm_from_invariants(ring, krull_dimension(diagram), seed)
    verdict.hypotheses = hyp
    verdict.certificate["ranks"] = ranks
    return verdict


SPACE_FORM_TYPES = ("RationalOddSphere", "EvenType")


def orbifold_check(diagram: GroupDiagram, bound: Optional[int] = None) -> CMVerdict:
    """Diagrams whose normal fibers are spherical space forms are always CM.

    Both fibers must be rational odd spheres or even-dimensional space forms
    (rationally a point or an even sphere); annotations, when present, must
    agree with the betti check.
    """
    D = bound if bound is not None else diagram.max_degree
    sides = {}
    for side, K, iota in (("Kminus", diagram.Kminus, diagram.iota_minus),
                          ("Kplus", diagram.Kplus, diagram.iota_plus)):
        betti = fiber_betti(K, diagram.H, iota)
        ft = classify_betti(betti)
        ann = diagram.annotations.get(side)
        if ann is not None and FiberType.parse(ann) != ft and FiberType.parse(ann).tag != ft.tag:
            raise DiagramError(f"annotation {ann} disagrees with the betti check ({ft})", f"fiber_annotations.{side}")
        if ft.tag not in SPACE_FORM_TYPES or (ft.tag == "EvenType" and sum(betti) > 2):
            raise DiagramError(f"normal fiber K/H of type {ft} is not a spherical space form", side)
        sides[side] = (ft, iota)
    _, rh, rm, rp = diagram.ranks
    if rh == rm == rp:
        return CMVerdict(COHEN_MACAULAY, "RankEquality", D, "spherical space-form fibers with equal ranks",
                         certificate={"fibers": {k: str(v[0]) for k, v in sides.items()}})
    for side, (ft, iota) in sides.items():
        if ft.tag == "RationalOddSphere":
            rep = surjectivity_report(iota, D)
            if isinstance(rep, SurjectiveUpTo):
                return CMVerdict(COHEN_MACAULAY, "SumSurjective", D,
                                 f"odd-sphere fiber on {side}: its induced map is surjective through {D}",
                                 exact=False, certificate={"fibers": {k: str(v[0]) for k, v in sides.items()},
                                                           "surjective_side": side})
    raise DiagramError("no surjective odd-sphere side although ranks differ")


# --- catalog -----------------------------------------------------------------------

@dataclass(frozen=True)
class FiberEntry:
    name: str
    G: CompactGroupData
    H: CompactGroupData
    iota: AlgebraMorphism
    expected: FiberType
    note: str = ""

    @property
    def pair(self) -> Tuple[CompactGroupData, CompactGroupData, AlgebraMorphism]:
        return self.G, self.H, self.iota


@dataclass
class Catalog:
    groups: Dict[str, CompactGroupData]
    fibers: Dict[str, FiberEntry]
    representatives: Dict[str, str]
    diagrams: Dict[str, dict]

    def fiber(self, key: str) -> FiberEntry:
        """A catalog fiber by name, or the representative of a fiber-type tag."""
        if key in self.fibers:
            return self.fibers[key]
        tag = FiberType.parse(key).tag if key else key
        if tag in self.representatives:
            return self.fibers[self.representatives[tag]]
        raise DiagramError(f"fiber not in catalog: {key}")

    def diagram(self, name: str) -> GroupDiagram:
        if name not in self.diagrams:
            raise DiagramError(f"diagram not in catalog: {name}")
        d = GroupDiagram.from_json(self.diagrams[name], self)
        d.name = d.name or name
        return d

    def suspensions(self) -> Dict[str, GroupDiagram]:
        return {n: suspension_diagram(*f.pair) for n, f in self.fibers.items()}


def _load_catalog_data(raw: dict) -> Catalog:
    groups = {}
    for name, g in raw["groups"].items():
        g = dict(g)
        g.setdefault("name", name)
        groups[name] = parse_group(g, f"groups.{name}")
    probe = Catalog(groups, {}, {}, {})
    fibers = {}
    for name, f in raw["fibers"].items():
        G, H = parse_group(f["G"], f"fibers.{name}.G", probe), parse_group(f["H"], f"fibers.{name}.H", probe)
        iota = parse_morphism(f["iota"], G, H, f"fibers.{name}.iota")
        fibers[name] = FiberEntry(name, G, H, iota, FiberType.parse(f["type"]), f.get("note", ""))
    return Catalog(groups, fibers, dict(raw.get("representatives", {})), dict(raw.get("diagrams", {})))


@lru_cache(maxsize=1)
def load_catalog() -> Catalog:
    text = resources.files("borelcm").joinpath("data/catalog.json").read_text()
    return _load_catalog_data(json.loads(text))


# --- non-CM join generator ---------------------------------------------------------

NONCM_TYPES = ("W7Type", "B13Type", "EvenType")


def noncm_join_generator(left: str, right: str, catalog: Optional[Catalog] = None,
                         options: Optional[Dict] = None) -> GroupDiagram:
    """Join diagram of two catalog fibers whose cohomogeneity one action is not CM.

    Each argument is a catalog fiber name or a fiber-type tag (resolved to the
    catalog representative). Raises JoinRefused when the join would be CM: a
    fiber with surjective induced map (rational odd sphere), two even fibers
    (all ranks agree), or a fiber type outside W7/B13/even.
    """
    catalog = catalog or load_catalog()
    entries, types = [], []
    for key in (left, right):
        if key and FiberType.parse(key).tag == "Unknown":
            raise JoinRefused(f"fiber type {key} is not among {', '.join(NONCM_TYPES)}")
        e = catalog.fiber(key)
        entries.append(e)
        types.append(fiber_type(*e.pair))
    for e, t in zip(entries, types):
        if t.tag == "RationalOddSphere":
            raise JoinRefused(f"{e.name} is {t}: its induced map is surjective, so the join is Cohen-Macaulay")
        if t.tag not in NONCM_TYPES:
            raise JoinRefused(f"{e.name} has fiber type {t}, not among {', '.join(NONCM_TYPES)}")
    if types[0].tag == types[1].tag == "EvenType":
        raise JoinRefused("both fibers are even-dimensional: all ranks agree, so the join is Cohen-Macaulay")
    d = join_diagram(entries[0].pair, entries[1].pair, options)
    if d.H.rank >= max(d.Kminus.rank, d.Kplus.rank):
        raise JoinRefused("rank H is not below max rank K+-")
    d.annotations = {"Kminus": str(types[0]), "Kplus": str(types[1])}
    return d
