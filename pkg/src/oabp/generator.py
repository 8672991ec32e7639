"""Seed-efficient polynomial map whose image hits every nonzero ordered
branching program of bounded read.

The map G_k over a field F sends l(k) + 2k seed variables to 2^k outputs,
where l(k) = 2rk + 1 for the read bound r.  It is built recursively:

* level 0 is the single coordinate z_1;
* level k+1 duplicates level k, shifts the copy's seeds by a translation
  map T built from Lagrange interpolation bases (T's image contains every
  point with at most r nonzero coordinates), and tags each output slot j
  with u_{k+1} * L_j(v_{k+1}) so single outputs can be bumped independently.

Seed variables are named z1..zl, u1..uk, v1..vk.  The last 2r z-variables
play the role of the translation inputs at the top level.  Evaluation mirrors
the recursion numerically and never expands anything symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .errors import FieldError, StructureError
from .fields import Field, enumerate_points
from .poly import SparsePoly

_BUILD_CACHE: dict = {}


def z_count(k: int, r: int) -> int:
    """Number of z-seeds at level k for read bound r."""
    if k < 0 or r < 1:
        raise StructureError(f"need k >= 0 and r >= 1, got k={k}, r={r}")
    return 2 * r * k + 1


def seed_count(k: int, r: int) -> int:
    return z_count(k, r) + 2 * k


def seed_names(k: int, r: int) -> tuple[str, ...]:
    """Declared seed variables, z-block then u-block then v-block."""
    zs = [f"z{i}" for i in range(1, z_count(k, r) + 1)]
    us = [f"u{i}" for i in range(1, k + 1)]
    vs = [f"v{i}" for i in range(1, k + 1)]
    return tuple(zs + us + vs)


def points_needed(k: int, r: int) -> int:
    return max(seed_count(k, r), 2**k)


@dataclass(frozen=True)
class GeneratorParams:
    """Level k, read bound r, field, and the interpolation point prefix.

    points must hold at least max(l(k)+2k, 2^k) distinct field elements;
    passing None picks the canonical enumeration of that length.
    """

    k: int
    r: int
    field: Field
    points: tuple

    @staticmethod
    def create(k: int, r: int, field: Field, points: Sequence | None = None) -> "GeneratorParams":
        need = points_needed(k, r)
        if points is None:
            points = enumerate_points(field, need)
        points = tuple(points)
        if len(points) < need:
            raise FieldError(
                f"level {k} with read bound {r} needs {need} distinct points, "
                f"got {len(points)}"
            )
        if len(set(points)) != len(points):
            raise FieldError("interpolation points must be distinct")
        return GeneratorParams(k, r, field, points)


@dataclass(frozen=True)
class PolyMap:
    """A tuple of polynomials over named seed variables."""

    inputs: tuple[str, ...]
    outputs: tuple[SparsePoly, ...]

    @property
    def arity(self) -> int:
        return len(self.inputs)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)


def lagrange_basis(field: Field, points: Sequence, i: int, var) -> SparsePoly:
    """i-th (1-based) Lagrange basis polynomial over the points, in var."""
    if not 1 <= i <= len(points):
        raise StructureError(f"basis index {i} out of range 1..{len(points)}")
    alpha_i = points[i - 1]
    num = SparsePoly.const(field, field.one())
    denom = field.one()
    w = SparsePoly.variable(field, var)
    for j, alpha_j in enumerate(points):
        if j == i - 1:
            continue
        num = num.mul(w.sub(SparsePoly.const(field, alpha_j)))
        denom = field.mul(denom, field.sub(alpha_i, alpha_j))
    return num.scale(field.inv(denom))


def _lagrange_value(field: Field, points: Sequence, i: int, at) -> Any:
    """Value of the i-th basis polynomial at a point, no symbols involved."""
    alpha_i = points[i - 1]
    num = field.one()
    denom = field.one()
    for j, alpha_j in enumerate(points):
        if j == i - 1:
            continue
        num = field.mul(num, field.sub(at, alpha_j))
        denom = field.mul(denom, field.sub(alpha_i, alpha_j))
    return field.div(num, denom)


def shift_map(k: int, r: int, field: Field, points: Sequence) -> PolyMap:
    """Translation map T: 2r inputs y_1..y_{2r} to l(k)+2k outputs.

    Component j is sum_i y_i * H_j(y_{r+i}) with H the Lagrange basis over
    the first l(k)+2k points.  Fixing y_{r+i} to the j-th point and zeroing
    the other pairs makes the output y_i times the j-th unit vector, so the
    image covers every vector with at most r nonzero entries.
    """
    m = seed_count(k, r)
    if len(points) < m:
        raise FieldError(f"translation map needs {m} points, got {len(points)}")
    base = tuple(points[:m])
    ys = [f"y{i}" for i in range(1, 2 * r + 1)]
    outputs = []
    for j in range(1, m + 1):
        acc = SparsePoly.zero(field)
        for i in range(1, r + 1):
            basis = lagrange_basis(field, base, j, ys[r + i - 1])
            acc = acc.add(basis.mul(SparsePoly.variable(field, ys[i - 1])))
        outputs.append(acc)
    return PolyMap(tuple(ys), tuple(outputs))


def _shift_values(params: GeneratorParams, y_vals: Sequence) -> list:
    """Numeric counterpart of shift_map at level params.k."""
    field = params.field
    r = params.r
    m = seed_count(params.k, r)
    base = params.points[:m]
    out = []
    for j in range(1, m + 1):
        acc = field.zero()
        for i in range(1, r + 1):
            acc = field.add(
                acc,
                field.mul(y_vals[i - 1], _lagrange_value(field, base, j, y_vals[r + i - 1])),
            )
        out.append(acc)
    return out


def selector_map(k: int, field: Field, points: Sequence) -> PolyMap:
    """Slot tags (u * L_1(v), ..., u * L_{2^k}(v)) over points[:2^k]."""
    if k < 1:
        raise StructureError(f"selector level must be >= 1, got {k}")
    width = 2**k
    if len(points) < width:
        raise FieldError(f"selector needs {width} points, got {len(points)}")
    u = SparsePoly.variable(field, f"u{k}")
    outputs = tuple(
        u.mul(lagrange_basis(field, points[:width], j, f"v{k}"))
        for j in range(1, width + 1)
    )
    return PolyMap((f"u{k}", f"v{k}"), outputs)


def build_generator(params: GeneratorParams) -> PolyMap:
    """Symbolic form of the level-k map; cached per (k, r, field, points).

    Feasible for small k only; evaluation via eval_generator stays cheap at
    every level.
    """
    key = (params.k, params.r, params.field.config, params.points[: points_needed(params.k, params.r)])
    got = _BUILD_CACHE.get(key)
    if got is None:
        got = _build(params.k, params.r, params.field, params.points)
        _BUILD_CACHE[key] = got
    return got


def _build(k: int, r: int, field: Field, points: tuple) -> PolyMap:
    if k == 0:
        return PolyMap(seed_names(0, r), (SparsePoly.variable(field, "z1"),))
    inner = _build(k - 1, r, field, points)
    lc = z_count(k - 1, r)
    shift = shift_map(k - 1, r, field, points)
    # the 2r fresh z-variables feed the translation map
    y_of = {f"y{i}": f"z{lc + i}" for i in range(1, 2 * r + 1)}
    shift_components = [
        SparsePoly(
            field,
            {
                tuple((y_of[v], e) for v, e in mono): c
                for mono, c in comp.terms.items()
            },
        )
        for comp in shift.outputs
    ]
    inner_names = seed_names(k - 1, r)
    images: dict = {}
    for name, t_comp in zip(inner_names, shift_components):
        images[name] = SparsePoly.variable(field, name).add(t_comp)
    shifted = tuple(comp.compose(images) for comp in inner.outputs)
    select = selector_map(k, field, points)
    halves = inner.outputs + shifted
    outputs = tuple(select.outputs[j].add(halves[j]) for j in range(2**k))
    return PolyMap(seed_names(k, r), outputs)


def eval_generator(params: GeneratorParams, assignment: Sequence) -> tuple:
    """Value of the level-k map at a seed assignment.

    The assignment lists values for z1..zl, u1..uk, v1..vk in that order.
    Recursive: splits off the top-level translation inputs and selector pair,
    shifts the inner seeds numerically, and combines the two half-evaluations.
    """
    k, r, field = params.k, params.r, params.field
    expect = seed_count(k, r)
    if len(assignment) != expect:
        raise StructureError(
            f"level {k} expects {expect} seed values, got {len(assignment)}"
        )
    return _eval(k, r, field, params.points, tuple(assignment))


def _eval(k: int, r: int, field: Field, points: tuple, assignment: tuple) -> tuple:
    if k == 0:
        return (assignment[0],)
    lc_prev = z_count(k - 1, r)
    lc = z_count(k, r)
    zs = assignment[:lc]
    us = assignment[lc : lc + k]
    vs = assignment[lc + k :]
    inner_assignment = zs[:lc_prev] + us[: k - 1] + vs[: k - 1]
    y_vals = zs[lc_prev:lc]
    prev_params = GeneratorParams(k - 1, r, field, points)
    t_vals = _shift_values(prev_params, y_vals)
    shifted_inner = tuple(
        field.add(a, t) for a, t in zip(inner_assignment, t_vals)
    )
    first = _eval(k - 1, r, field, points, inner_assignment)
    second = _eval(k - 1, r, field, points, shifted_inner)
    halves = first + second
    width = 2**k
    u_k, v_k = us[-1], vs[-1]
    out = []
    for j in range(1, width + 1):
        tag = field.mul(u_k, _lagrange_value(field, points[:width], j, v_k))
        out.append(field.add(tag, halves[j - 1]))
    return tuple(out)


@dataclass(frozen=True)
class DegreeBounds:
    component_bound: int
    composition_bound: int


def degree_bounds(k: int, r: int) -> DegreeBounds:
    """Per-variable degree bound for one component, and the safe bound for
    compositions with a multilinear polynomial over 2^k variables.

    The component bound multiplies, over the levels below k, the degree
    growth of one shift step; a multilinear n-variate polynomial composed
    with 2^k components multiplies it by at most 2^k.
    """
    prod = 1
    for j in range(1, k):
        m = seed_count(j, r)
        prod *= m * (m - 1)
    return DegreeBounds(component_bound=prod, composition_bound=(2**k) * prod)


@dataclass(frozen=True)
class DegreeAudit:
    """Measured (or soundly bounded) per-variable degrees of each component."""

    k: int
    r: int
    exact: bool
    per_component: tuple[dict, ...]

    def max_degree(self) -> int:
        return max(
            (max(d.values(), default=0) for d in self.per_component), default=0
        )


# levels up to this expand symbolically in well under a second
_EXACT_AUDIT_LEVEL = 2


def audit_component_degrees(params: GeneratorParams) -> DegreeAudit:
    """Per-variable degrees of every component of the level-k map.

    Levels <= 2 are expanded and measured exactly.  Level 3 reuses the exact
    level-2 expansion and propagates degrees through the final shift step
    monomial by monomial; that yields an upper bound (sound for checking the
    bound of degree_bounds), since substitution can only cancel, never grow.
    """
    k, r, field, points = params.k, params.r, params.field, params.points
    if k <= _EXACT_AUDIT_LEVEL:
        pm = build_generator(params)
        return DegreeAudit(
            k, r, True, tuple(c.individual_degrees() for c in pm.outputs)
        )
    if k != _EXACT_AUDIT_LEVEL + 1:
        raise StructureError(
            f"degree audit supports levels up to {_EXACT_AUDIT_LEVEL + 1}, got {k}"
        )
    inner = build_generator(GeneratorParams(k - 1, r, field, points))
    lc = z_count(k - 1, r)
    shift = shift_map(k - 1, r, field, points)
    y_of = {f"y{i}": f"z{lc + i}" for i in range(1, 2 * r + 1)}
    # per-variable degrees of each substitution image z_i + T_i
    image_degrees: dict[str, dict[str, int]] = {}
    for name, comp in zip(seed_names(k - 1, r), shift.outputs):
        degs: dict[str, int] = {name: 1}
        for v, e in comp.individual_degrees().items():
            w = y_of[v]
            degs[w] = max(degs.get(w, 0), e)
        image_degrees[name] = degs
    select = selector_map(k, field, points)
    per_component: list[dict] = []
    width = 2**k
    for j in range(width):
        inner_comp = inner.outputs[j % len(inner.outputs)]
        degs = dict(select.outputs[j].individual_degrees())
        if j < len(inner.outputs):
            for v, e in inner_comp.individual_degrees().items():
                degs[v] = max(degs.get(v, 0), e)
        else:
            # composed copy: bound each variable over the monomials
            for mono, _ in inner_comp.terms.items():
                acc: dict[str, int] = {}
                for v, e in mono:
                    for w, d in image_degrees[v].items():
                        acc[w] = acc.get(w, 0) + e * d
                for w, d in acc.items():
                    degs[w] = max(degs.get(w, 0), d)
        per_component.append(degs)
    return DegreeAudit(k, r, False, tuple(per_component))


def y_alias(k: int, r: int, i: int) -> str:
    """Name of the top-level translation input y_i (an alias into the z-block)."""
    if k < 1:
        raise StructureError("level 0 has no translation inputs")
    if not 1 <= i <= 2 * r:
        raise StructureError(f"alias index {i} out of range 1..{2 * r}")
    return f"z{z_count(k - 1, r) + i}"
