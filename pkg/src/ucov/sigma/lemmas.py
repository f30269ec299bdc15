"""Covering numbers of whole groups, and the quotient and perfect-group transfer checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, InvariantViolation
from .instance import covers_group, expand_cover, reduce_instance
from .models import FiniteGroupModel, quotient
from .solver import INFINITY, enumerate_optimal_covers, exact_sigma
from .subgroups import all_subgroups_brute


@dataclass
class GroupSigma:
    sigma: float | int
    result: object = None  # SigmaResult, None for cyclic groups
    maximals: object = None
    instance: object = None
    verified: bool = True


def sigma_of_group(g: FiniteGroupModel, maximals=None, budget: int = 10**6) -> GroupSigma:
    """sigma(G) with the cover re-checked element by element; infinity for cyclic groups."""
    if g.is_cyclic():
        return GroupSigma(INFINITY)
    L = maximals or all_subgroups_brute(g)
    L.require_complete()
    inst = reduce_instance(g, L)
    res = exact_sigma(inst, budget=budget)
    sets = L.sets
    chosen = expand_cover(inst, res.cover)
    if not covers_group(g, sets, chosen):
        raise InvariantViolation("solver cover misses an element of G")
    val = res.sigma if res.sigma is not None else None
    return GroupSigma(val, res, L, inst, True)


def _contains(S: np.ndarray, N: np.ndarray) -> bool:
    return bool(np.isin(N, S).all())


@dataclass
class QuotientReport:
    sigma_G: float | int
    sigma_Q: float | int
    inequality_holds: bool
    equal: bool
    n_containing_cover: str  # "found" | "none" | "undetermined by search" | "n/a"
    optimal_covers: int
    restricted_sigma: float | int | None
    consistent: bool
    details: dict = field(default_factory=dict)


def quotient_sigma_check(g: FiniteGroupModel, N, cap: int = 10**6) -> QuotientReport:
    N = np.unique(np.asarray(N, dtype=np.int64))
    if not g.is_normal(N):
        raise DomainError("N is not a normal subgroup")
    Q = quotient(g, N)
    sg = sigma_of_group(g)
    sq = sigma_of_group(Q)
    ineq = sg.sigma <= sq.sigma
    if not ineq:
        raise InvariantViolation(f"sigma(G) = {sg.sigma} exceeds sigma(G/N) = {sq.sigma}")
    equal = sg.sigma == sq.sigma
    if sg.sigma == INFINITY:
        return QuotientReport(sg.sigma, sq.sigma, ineq, equal, "n/a", 0, None, True, {"quotient_order": Q.order})
    inst, sets = sg.instance, sg.maximals.sets
    covers, capped = enumerate_optimal_covers(inst, sg.sigma, cap=cap)
    has_N = [any(_contains(sets[k], N) for k in grp) for grp in inst.col_groups]
    found = any(all(has_N[c] for c in cov) for cov in covers)
    verdict = "found" if found else ("undetermined by search" if capped else "none")
    # independent route: restrict to N-containing columns and solve again
    keep = [c for c, h in enumerate(has_N) if h]
    try:
        restricted = exact_sigma(inst.restrict_columns(keep)).sigma
    except DomainError:
        restricted = INFINITY
    consistent = (found == (restricted == sg.sigma)) if verdict != "undetermined by search" else True
    if verdict != "undetermined by search":
        consistent = consistent and (equal == found)
    return QuotientReport(
        sg.sigma, sq.sigma, ineq, equal, verdict, len(covers), restricted, consistent,
        {"quotient_order": Q.order, "N_order": len(N), "capped": capped},
    )


@dataclass
class PerfectReport:
    perfect: bool
    center_order: int
    maximals_contain_center: bool
    maximals_contain_center_or_commutator: bool
    sigma_G: float | int | None
    sigma_GZ: float | int | None
    equal: bool | None


def perfect_transfer_check(g: FiniteGroupModel) -> PerfectReport:
    Z = g.center
    D = g.commutator_subgroup
    perfect = len(D) == g.order
    if g.is_cyclic():
        return PerfectReport(perfect, len(Z), True, True, INFINITY, None, None)
    L = all_subgroups_brute(g)
    contain_Z = all(_contains(m, Z) for m in L.sets)
    contain_either = all(_contains(m, Z) or _contains(m, D) for m in L.sets)
    if not contain_either:
        raise InvariantViolation("a maximal subgroup contains neither the center nor the commutator subgroup")
    if not perfect:
        return PerfectReport(False, len(Z), contain_Z, contain_either, None, None, None)
    if not contain_Z:
        raise InvariantViolation("perfect group with a maximal subgroup missing the center")
    sg = sigma_of_group(g, L)
    sz = sigma_of_group(quotient(g, Z))
    if sg.sigma != sz.sigma:
        raise InvariantViolation(f"sigma(G) = {sg.sigma} but sigma(G/Z) = {sz.sigma}")
    return PerfectReport(True, len(Z), contain_Z, contain_either, sg.sigma, sz.sigma, True)
