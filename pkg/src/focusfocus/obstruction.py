"""Decision rules for the complexity of focus-focus singularities on a 4-manifold.

The engine encodes conclusions, not cohomology computations. A descriptor
either names a catalog manifold, whose topological facts are known, or is
``generic`` and carries user-asserted facts (compactness, dim H^2, whether
pi_2 vanishes).

Generic rules, for requested complexity ``n``:

* ``n = 1`` is always admissible: simple focus-focus points are local and
  live in standard R^4.
* ``n >= 2`` needs a Lagrangian sphere with self-intersection +-2, so
  ``pi_2(M) != 0``.
* compact ``M``: the n sphere classes and [omega] are independent, so
  ``dim H^2 >= n``.
* noncompact ``M``: ``dim H^2 >= n - 1``.

Catalog refinements sharpen these bounds (see :data:`RULE_NOTES`).
"""
from __future__ import annotations

from dataclasses import dataclass, field

ADMISSIBLE = "admissible"
FORBIDDEN = "forbidden"
CONDITIONAL = "conditional"

KINDS = ("cp2", "product_surfaces", "surface_times_plane", "cotangent_surface", "e3_orbit", "so4_orbit", "generic")

# Self-intersection of a Lagrangian sphere equals its Euler characteristic.
LAGRANGIAN_SPHERE_SELF_INTERSECTION = 2

RULE_NOTES = {
    "simple_always": "complexity 1 has no topological obstruction",
    "pi2_trivial": "complexity >= 2 needs a sphere with nonzero self-intersection",
    "compact_h2_bound": "compact: dim H^2 >= n",
    "noncompact_h2_bound": "noncompact: dim H^2 >= n - 1",
    "surface_x_sphere_zero_self_intersection":
        "M_g x S^2, g > 0: every sphere class is a multiple of the fiber and has self-intersection 0",
    "s2xs2_equal_areas":
        "S^2 x S^2: with (-1) omega^2 orienting opposite to the product, a Lagrangian sphere has "
        "self-intersection -2 and class a - b, which has zero symplectic area only for equal factor areas",
    "s2_x_plane_zero_self_intersection":
        "S^2 x R^2: every sphere is homotopic to a multiple of the factor sphere, self-intersection 0",
    "cotangent_sphere_exact_form":
        "T*S^2 with omega = d alpha + pi^* kappa: complexity 2 needs [omega] = 0, i.e. kappa exact",
    "cotangent_higher_genus":
        "T*M_g (g > 0) and T*N_mu: only simple singularities",
    "e3_orbit_area":
        "regular e(3)* orbit is T*S^2 with sphere area 4 pi m; complexity 2 needs m = 0",
    "so4_orbit_areas":
        "regular so(4)* orbit is S^2_s x S^2_p with areas 4 pi s, 4 pi p; complexity 2 needs s = p, i.e. m = 0",
    "realized_e3_model":
        "complexity 2 is realized on the e(3)* orbit m = 0 by H = |m|^2/2 + q3^2, G = m3",
    "realized_lambda_model":
        "complexity 2 is realized on the so(4)* orbit m = 0 by the same pair under the lambda bracket",
}


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Topological description of a symplectic 4-manifold.

    Parameters by ``kind``:

    * ``product_surfaces``: ``g1``, ``g2``; optional ``factor_areas`` for S^2 x S^2.
    * ``surface_times_plane``: ``g``.
    * ``cotangent_surface``: ``orientable``, ``g_or_mu`` (genus, or number of
      cross-caps when nonorientable), ``magnetic_exact``.
    * ``e3_orbit`` / ``so4_orbit``: ``m`` (the ``m.q = m q`` orbit parameter).
      ``so4_orbit`` may instead give ``factor_areas`` as the (s, p) radii.
    * ``generic``: ``compact``, ``dim_h2``, ``pi2_trivial``.
    """

    kind: str
    g1: int = 0
    g2: int = 0
    g: int = 0
    orientable: bool = True
    g_or_mu: int = 0
    magnetic_exact: bool = False
    m: float | None = None
    factor_areas: tuple[float, float] | None = None
    compact: bool = True
    dim_h2: int = 0
    pi2_trivial: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.kind == "generic" and self.dim_h2 < 0:
            raise ValueError("dim_h2 must be >= 0")
        if self.kind == "cotangent_surface":
            if self.g_or_mu < 0:
                raise ValueError("g_or_mu must be >= 0")
            if not self.orientable and self.g_or_mu < 1:
                raise ValueError("a nonorientable surface needs mu >= 1 cross-caps")
        if self.kind in ("product_surfaces",) and (self.g1 < 0 or self.g2 < 0):
            raise ValueError("genus must be >= 0")
        if self.kind == "surface_times_plane" and self.g < 0:
            raise ValueError("genus must be >= 0")
        if self.kind == "e3_orbit" and self.m is None:
            raise ValueError("e3_orbit needs m")
        if self.kind == "so4_orbit" and self.m is None and self.factor_areas is None:
            raise ValueError("so4_orbit needs m or factor_areas")

    # -- topological facts -------------------------------------------------

    def facts(self) -> tuple[bool, int, bool]:
        """``(compact, dim H^2, pi_2 trivial)``."""
        k = self.kind
        if k == "generic":
            return self.compact, self.dim_h2, self.pi2_trivial
        if k == "cp2":
            return True, 1, False
        if k == "product_surfaces":
            # H^2(M_g1 x M_g2) = H^2 (x) H^0 + H^1 (x) H^1 + H^0 (x) H^2
            return True, 2 + 4 * self.g1 * self.g2, self.g1 > 0 and self.g2 > 0
        if k == "surface_times_plane":
            return False, 1, self.g > 0
        if k == "cotangent_surface":
            if self.orientable:
                return False, 1, self.g_or_mu > 0
            # N_mu: H^2 = 0; pi_2 nontrivial only for RP^2
            return False, 0, self.g_or_mu != 1
        if k == "e3_orbit":
            return False, 1, False    # T*S^2
        if k == "so4_orbit":
            return True, 2, False     # S^2 x S^2
        raise AssertionError(k)

    def to_generic(self) -> "ManifoldDescriptor":
        c, h2, p2 = self.facts()
        return ManifoldDescriptor("generic", compact=c, dim_h2=h2, pi2_trivial=p2)

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        for key in ("g1", "g2", "g", "orientable", "g_or_mu", "magnetic_exact", "m", "factor_areas",
                    "compact", "dim_h2", "pi2_trivial"):
            v = getattr(self, key)
            if v != getattr(ManifoldDescriptor, key, None):
                d[key] = list(v) if isinstance(v, tuple) else v
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ManifoldDescriptor":
        d = dict(d)
        if "factor_areas" in d and d["factor_areas"] is not None:
            d["factor_areas"] = tuple(float(a) for a in d["factor_areas"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown descriptor fields: {sorted(unknown)}")
        return cls(**d)


@dataclass
class Verdict:
    status: str
    max_complexity: int | None = None
    condition: str | None = None
    rule_trace: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "max_complexity": self.max_complexity,
            "condition": self.condition,
            "rule_trace": list(self.rule_trace),
        }


def _so4_equal(desc: ManifoldDescriptor) -> bool | None:
    if desc.m is not None:
        return desc.m == 0
    a, b = desc.factor_areas
    return a == b


def _refinement(desc: ManifoldDescriptor, n: int) -> tuple[str, str | None, str] | None:
    """Catalog rule for ``n >= 2`` not already forbidden by the generic bounds.

    Returns ``(status, condition, rule name)`` or ``None`` when no refinement applies.
    """
    k = desc.kind
    if k == "product_surfaces":
        g1, g2 = desc.g1, desc.g2
        if (g1 == 0) != (g2 == 0):
            return FORBIDDEN, None, "surface_x_sphere_zero_self_intersection"
        if g1 == 0 and g2 == 0:
            if n >= 3:
                return FORBIDDEN, None, "compact_h2_bound"
            if desc.factor_areas is not None and desc.factor_areas[0] != desc.factor_areas[1]:
                return FORBIDDEN, None, "s2xs2_equal_areas"
            return CONDITIONAL, "equal_factor_areas", "s2xs2_equal_areas"
    if k == "surface_times_plane" and desc.g == 0:
        return FORBIDDEN, None, "s2_x_plane_zero_self_intersection"
    if k == "cotangent_surface":
        if desc.orientable and desc.g_or_mu == 0:
            if n >= 3:
                return FORBIDDEN, None, "noncompact_h2_bound"
            if not desc.magnetic_exact:
                return FORBIDDEN, None, "cotangent_sphere_exact_form"
            return CONDITIONAL, "magnetic_form_exact", "cotangent_sphere_exact_form"
        return FORBIDDEN, None, "cotangent_higher_genus"
    if k == "e3_orbit":
        if n >= 3:
            return FORBIDDEN, None, "noncompact_h2_bound"
        if desc.m != 0:
            return FORBIDDEN, None, "e3_orbit_area"
        return CONDITIONAL, "m_equals_zero", "e3_orbit_area"
    if k == "so4_orbit":
        if n >= 3:
            return FORBIDDEN, None, "compact_h2_bound"
        if not _so4_equal(desc):
            return FORBIDDEN, None, "so4_orbit_areas"
        return CONDITIONAL, "m_equals_zero", "so4_orbit_areas"
    return None


def _generic_bound(compact: bool, dim_h2: int, pi2_trivial: bool) -> int:
    if pi2_trivial:
        return 1
    return max(dim_h2 if compact else dim_h2 + 1, 1)


def _evaluate(desc: ManifoldDescriptor, n: int) -> Verdict:
    trace = []
    if n == 1:
        return Verdict(ADMISSIBLE, None, None, ["simple_always"])
    compact, h2, pi2_trivial = desc.facts()
    if pi2_trivial:
        return Verdict(FORBIDDEN, None, None, ["pi2_trivial"])
    trace.append("pi2_nontrivial")
    if compact:
        if n > h2:
            return Verdict(FORBIDDEN, None, None, trace + ["compact_h2_bound"])
        trace.append("compact_h2_ok")
    else:
        if n - 1 > h2:
            return Verdict(FORBIDDEN, None, None, trace + ["noncompact_h2_bound"])
        trace.append("noncompact_h2_ok")
    ref = _refinement(desc, n)
    if ref is None:
        return Verdict(ADMISSIBLE, None, None, trace)
    status, cond, rule = ref
    trace.append(rule)
    if status == CONDITIONAL and desc.kind == "e3_orbit":
        trace.append("realized_e3_model")
    if status == CONDITIONAL and desc.kind in ("so4_orbit", "product_surfaces"):
        trace.append("realized_lambda_model")
    return Verdict(status, None, cond, trace)


def max_complexity(desc: ManifoldDescriptor) -> int:
    """Largest ``n`` that the rules do not forbid."""
    compact, h2, p2 = desc.facts()
    bound = _generic_bound(compact, h2, p2)
    best = 1
    for n in range(2, bound + 1):
        if _evaluate(desc, n).status != FORBIDDEN:
            best = n
    return best


def admits_complexity(desc: ManifoldDescriptor, n: int) -> Verdict:
    """Decide whether a focus-focus singularity of complexity ``n`` is possible on ``desc``."""
    if n < 1:
        raise ValueError("complexity must be >= 1")
    v = _evaluate(desc, int(n))
    v.max_complexity = max_complexity(desc)
    return v


def catalog_descriptors() -> dict[str, ManifoldDescriptor]:
    """Named manifolds with a known verdict, including the e(3)* and so(4)* orbits."""
    return {
        "cp2": ManifoldDescriptor("cp2"),
        "T2xT2": ManifoldDescriptor("product_surfaces", g1=1, g2=1),
        "M2xM3": ManifoldDescriptor("product_surfaces", g1=2, g2=3),
        "T2xS2": ManifoldDescriptor("product_surfaces", g1=1, g2=0),
        "M2xS2": ManifoldDescriptor("product_surfaces", g1=2, g2=0),
        "S2xS2": ManifoldDescriptor("product_surfaces", g1=0, g2=0),
        "S2xS2_equal": ManifoldDescriptor("product_surfaces", g1=0, g2=0, factor_areas=(1.0, 1.0)),
        "S2xS2_unequal": ManifoldDescriptor("product_surfaces", g1=0, g2=0, factor_areas=(1.0, 2.0)),
        "S2xR2": ManifoldDescriptor("surface_times_plane", g=0),
        "T2xR2": ManifoldDescriptor("surface_times_plane", g=1),
        "T*S2_exact": ManifoldDescriptor("cotangent_surface", orientable=True, g_or_mu=0, magnetic_exact=True),
        "T*S2_magnetic": ManifoldDescriptor("cotangent_surface", orientable=True, g_or_mu=0, magnetic_exact=False),
        "T*T2": ManifoldDescriptor("cotangent_surface", orientable=True, g_or_mu=1, magnetic_exact=True),
        "T*RP2": ManifoldDescriptor("cotangent_surface", orientable=False, g_or_mu=1, magnetic_exact=True),
        "T*N2": ManifoldDescriptor("cotangent_surface", orientable=False, g_or_mu=2, magnetic_exact=True),
        "e3_m0": ManifoldDescriptor("e3_orbit", m=0.0),
        "e3_m0.3": ManifoldDescriptor("e3_orbit", m=0.3),
        "so4_m0": ManifoldDescriptor("so4_orbit", m=0.0),
        "so4_m0.5": ManifoldDescriptor("so4_orbit", m=0.5),
    }


def descriptor_from_name(name: str) -> ManifoldDescriptor:
    """Parse CLI shorthands.

    ``cp2``, ``s2xs2`` / ``s2xs2:a,b`` (factor areas), ``product:g1,g2``,
    ``surface-plane:g``, ``cotangent:g[:exact]``, ``cotangent-nonorientable:mu``,
    ``e3:m``, ``so4:m``, ``generic:compact|noncompact,dim_h2,pi2|nopi2``, or any
    name from :func:`catalog_descriptors`.
    """
    cat = catalog_descriptors()
    if name in cat:
        return cat[name]
    head, _, rest = name.partition(":")
    args = [a for a in rest.split(",") if a] if rest else []
    try:
        if head == "cp2":
            return ManifoldDescriptor("cp2")
        if head == "s2xs2":
            areas = tuple(float(a) for a in args) if args else None
            return ManifoldDescriptor("product_surfaces", g1=0, g2=0, factor_areas=areas)
        if head == "product":
            return ManifoldDescriptor("product_surfaces", g1=int(args[0]), g2=int(args[1]))
        if head == "surface-plane":
            return ManifoldDescriptor("surface_times_plane", g=int(args[0]))
        if head == "cotangent":
            g, _, flag = rest.partition(":")
            return ManifoldDescriptor("cotangent_surface", orientable=True, g_or_mu=int(g),
                                      magnetic_exact=(flag == "exact"))
        if head == "cotangent-nonorientable":
            return ManifoldDescriptor("cotangent_surface", orientable=False, g_or_mu=int(args[0]))
        if head == "e3":
            return ManifoldDescriptor("e3_orbit", m=float(args[0]))
        if head == "so4":
            return ManifoldDescriptor("so4_orbit", m=float(args[0]))
        if head == "generic":
            return ManifoldDescriptor("generic", compact=args[0] == "compact", dim_h2=int(args[1]),
                                      pi2_trivial=args[2] == "nopi2")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"cannot parse manifold {name!r}: {exc}") from exc
    raise ValueError(f"unknown manifold {name!r}")


def _same(a: Verdict, b: Verdict) -> bool:
    return a.status == b.status and a.max_complexity == b.max_complexity


def consistency_check(max_n: int = 5) -> dict:
    """Cross-check catalog verdicts against the generic rules and known equivalences.

    A contradiction is recorded when a catalog entry admits (or conditionally
    admits) a complexity the generic facts alone forbid, when ``n = 1`` is
    forbidden, when forbidden is not monotone in ``n``, or when two
    descriptors of the same manifold disagree.
    """
    contradictions = []
    checked = 0
    for name, desc in catalog_descriptors().items():
        gen = desc.to_generic()
        seen_forbidden = False
        for n in range(1, max_n + 1):
            v, vg = admits_complexity(desc, n), admits_complexity(gen, n)
            checked += 1
            if vg.status == FORBIDDEN and v.status != FORBIDDEN:
                contradictions.append(f"{name} n={n}: generic rules forbid, catalog says {v.status}")
            if n == 1 and v.status == FORBIDDEN:
                contradictions.append(f"{name}: n=1 forbidden")
            if seen_forbidden and v.status != FORBIDDEN:
                contradictions.append(f"{name} n={n}: not monotone")
            seen_forbidden |= v.status == FORBIDDEN
            if v.status == FORBIDDEN and not n > v.max_complexity:
                contradictions.append(f"{name} n={n}: forbidden but n <= max_complexity")
            if v.status == CONDITIONAL and not v.condition:
                contradictions.append(f"{name} n={n}: conditional without condition")

    pairs = [
        ("cp2 vs generic", catalog_descriptors()["cp2"], ManifoldDescriptor("generic", compact=True, dim_h2=1)),
        ("so4 m=0 vs S2xS2 equal", ManifoldDescriptor("so4_orbit", m=0.0),
         ManifoldDescriptor("product_surfaces", factor_areas=(1.0, 1.0))),
        ("so4 m!=0 vs S2xS2 unequal", ManifoldDescriptor("so4_orbit", m=0.5),
         ManifoldDescriptor("product_surfaces", factor_areas=(1.0, 2.0))),
        ("e3 m=0 vs T*S2 exact", ManifoldDescriptor("e3_orbit", m=0.0),
         ManifoldDescriptor("cotangent_surface", g_or_mu=0, magnetic_exact=True)),
        ("e3 m!=0 vs T*S2 magnetic", ManifoldDescriptor("e3_orbit", m=0.3),
         ManifoldDescriptor("cotangent_surface", g_or_mu=0, magnetic_exact=False)),
    ]
    for label, a, b in pairs:
        for n in range(1, max_n + 1):
            checked += 1
            va, vb = admits_complexity(a, n), admits_complexity(b, n)
            if not _same(va, vb):
                contradictions.append(f"{label} n={n}: {va.status}/{va.max_complexity} vs {vb.status}/{vb.max_complexity}")
    return {"checked": checked, "contradictions": contradictions}

