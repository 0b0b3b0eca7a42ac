"""Builders shared across the test modules."""

from __future__ import annotations

import numpy as np

import oracles
from reqrank.domain import RatingCell, RatingMatrix, Role, Stakeholder


def make_roles(ranks):
    return tuple(Role(f"r{k + 1:02d}", f"Role {k + 1}", rank)
                 for k, rank in enumerate(ranks))


def make_matrix(stakeholder_ids, requirement_ids, cells, scale=(0.0, 5.0)):
    return RatingMatrix(tuple(stakeholder_ids), tuple(requirement_ids),
                        {k: RatingCell(float(v)) for k, v in cells.items()},
                        scale[0], scale[1])


def random_instance(rng: np.random.Generator):
    """Random project of up to 15 roles x 15 stakeholders x 15 requirements
    with integer ratings.

    Instances where two requirements with different rating columns have
    exactly equal rational importance are redrawn: float summation could
    order such a pair either way, so no deterministic expectation exists.
    """
    while True:
        n_roles = int(rng.integers(1, 6))
        n_stake = int(rng.integers(n_roles, 16))
        n_req = int(rng.integers(1, 16))

        role_ranks = rng.permutation(n_roles) + 1
        roles = tuple(Role(f"r{k + 1:02d}", f"Role {k + 1}", int(role_ranks[k]))
                      for k in range(n_roles))
        assignment = [roles[i % n_roles].id for i in range(n_stake)]
        rng.shuffle(assignment)
        sids = [f"s{i + 1:02d}" for i in range(n_stake)]
        members: dict[str, list[str]] = {r.id: [] for r in roles}
        for sid, role_id in zip(sids, assignment):
            members[role_id].append(sid)
        rank_of: dict[str, int] = {}
        for role in roles:
            out = rng.permutation(len(members[role.id])) + 1
            for sid, rk in zip(members[role.id], out):
                rank_of[sid] = int(rk)
        stakeholders = tuple(Stakeholder(sid, sid.upper(), role_id, rank_of[sid])
                             for sid, role_id in zip(sids, assignment))

        rids = [f"q{j + 1:02d}" for j in range(n_req)]
        cells = {}
        for sid in sids:
            for rid in rids:
                if rng.random() < 0.5:
                    cells[(sid, rid)] = int(rng.integers(0, 6))

        _, _, project_w = oracles.influence_oracle(
            [(r.id, r.rank) for r in roles],
            [(s.id, s.role_id, s.within_role_rank) for s in stakeholders])
        importance = oracles.importance_oracle(cells, project_w, rids)
        columns = {rid: tuple(sorted((sid, v) for (sid, r2), v in cells.items()
                                     if r2 == rid))
                   for rid in rids}
        clash = any(importance[a] == importance[b] and columns[a] != columns[b]
                    for i, a in enumerate(rids) for b in rids[i + 1:])
        if clash:
            continue
        matrix = make_matrix(sids, rids, cells)
        return roles, stakeholders, matrix, cells
