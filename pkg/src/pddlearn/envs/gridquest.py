"""Static grid quest: read the rules text, fetch the right item, defeat a monster.

Walking onto an item cell picks the item up; walking onto a monster cell
resolves combat. Contact with a monster while not carrying the item that beats
it is fatal and resets the episode. Partial observability reveals atoms by
visitation: everything within Chebyshev distance 1 of a visited cell.
"""

from __future__ import annotations

import re

from ..pddl.model import Atom, Constant, GroundAction
from ..pddl.semantics import holds
from .base import EnvConfig, SymbolicEnv, TaskSpec, load_task

_CELL_RE = re.compile(r"^r(\d+)c(\d+)$")


def cell_coords(name: str) -> tuple[int, int] | None:
    m = _CELL_RE.match(name)
    return (int(m.group(1)), int(m.group(2))) if m else None


class GridQuestEnv(SymbolicEnv):
    env_id = "gridquest"

    def __init__(self, config: EnvConfig, task: TaskSpec | None = None):
        task = task or load_task("gridquest", config.task_id)
        super().__init__(config, task)

    # -- fatal contact ---------------------------------------------------------

    def _is_fatal(self, action: GroundAction) -> bool:
        if not action.name.startswith("move-"):
            return False
        dest = action.args[1]
        carrying = {a.args[0].name for a in self._state if a.predicate == "carrying"}
        beats = {(a.args[0].name, a.args[1].name)
                 for a in self._state if a.predicate == "beats"}
        for atom in self._state:
            if atom.predicate == "monster-at" and atom.args[1].name == dest:
                monster = atom.args[0].name
                if not any((item, monster) in beats for item in carrying):
                    return True
        return False

    # -- visibility by visitation ----------------------------------------------

    def _agent_cell(self) -> str | None:
        for atom in self._state:
            if atom.predicate == "at":
                return atom.args[0].name
        return None

    def _visible_atoms(self) -> frozenset[Atom]:
        here = self._agent_cell()
        coords = cell_coords(here) if here else None
        if coords is None:
            return self._state
        r0, c0 = coords
        near = set()
        for name, typ in self.task.objects:
            if typ != "cell":
                continue
            rc = cell_coords(name)
            if rc and max(abs(rc[0] - r0), abs(rc[1] - c0)) <= 1:
                near.add(name)
        visible: set[Atom] = set()
        for atom in self._state:
            cells = [t.name for t in atom.args
                     if isinstance(t, Constant) and cell_coords(t.name)]
            if not cells or all(c in near for c in cells):
                visible.add(atom)
        return frozenset(visible)
