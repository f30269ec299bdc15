"""End-to-end covering numbers of U3(q)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvariantViolation
from ..group import GroupTable
from .instance import expand_cover, reduce_instance
from .solver import exact_sigma
from .subgroups import harvest_maximals_u3


@dataclass
class U3Sigma:
    q: int
    result: object
    maximals: object
    instance: object
    cover_classes: dict
    covered: int

    def as_dict(self) -> dict:
        d = self.result.as_dict()
        d.update(
            q=self.q,
            inventory=self.maximals.inventory(),
            harvest=self.maximals.certificate,
            reduction=self.instance.provenance | {"column_classes": None},
            cover_classes=self.cover_classes,
            covered=self.covered,
        )
        d["reduction"].pop("column_classes")
        return d


def sigma_u3(q: int, t: GroupTable | None = None, seed: int = 0, budget: int = 10**6, time_limit=None, jobs: int = 1, log=None) -> U3Sigma:
    t = t or GroupTable.build(q)
    L = harvest_maximals_u3(q, t, seed=seed, log=log)
    L.require_complete()
    inst = reduce_instance(t, L)
    res = exact_sigma(inst, budget=budget, time_limit=time_limit, jobs=jobs)
    sets, labels = L.sets, L.labels
    chosen = expand_cover(inst, res.cover)
    seen = np.zeros(t.order, dtype=bool)
    for j in chosen:
        seen[sets[j]] = True
    if not seen.all():
        raise InvariantViolation("solver cover misses an element of U3(q)")
    classes: dict[str, int] = {}
    for j in chosen:
        classes[labels[j]] = classes.get(labels[j], 0) + 1
    return U3Sigma(q, res, L, inst, classes, int(seen.sum()))
