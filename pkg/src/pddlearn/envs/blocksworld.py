"""Table-top block stacking with an optional mis-release noise model.

With probability p, an applicable stack or putdown releases the held block
onto a uniformly random clear target (another clear block or the table)
instead of the commanded one. Pickup and unstack are never corrupted.
"""

from __future__ import annotations

from ..pddl.model import Condition, GroundAction, ground_atom
from ..pddl.semantics import ground as ground_schema
from .base import EnvConfig, EnvError, SymbolicEnv, TaskSpec, load_task

TABLE = "table"


class BlocksWorldEnv(SymbolicEnv):
    env_id = "blocksworld"

    def __init__(self, config: EnvConfig, task: TaskSpec | None = None):
        task = task or load_task("blocksworld", config.task_id)
        if config.observability != "full":
            raise EnvError("blocksworld supports full observability only")
        super().__init__(config, task)

    def _corrupt_effect(self, action: GroundAction) -> Condition | None:
        if action.name not in ("stack", "putdown"):
            return None
        if self.config.noise_probability <= 0.0:
            return None
        self.noise_eligible_steps += 1
        if self._rng.random() >= self.config.noise_probability:
            return None
        held = action.args[0]
        commanded = action.args[1] if action.name == "stack" else TABLE
        clear_blocks = sorted(
            a.args[0].name for a in self._state
            if a.predicate == "clear" and a.args[0].name != held)
        targets = [t for t in [TABLE, *clear_blocks] if t != commanded]
        if not targets:
            return None
        target = self._rng.choice(targets)
        domain = self.task.domain
        if target == TABLE:
            schema = domain.action_map["putdown"]
            _, eff = ground_schema(schema, (held,), domain, self._truth_problem)
        else:
            schema = domain.action_map["stack"]
            _, eff = ground_schema(schema, (held, target), domain, self._truth_problem)
        return eff


def blocks_on_table_atoms(blocks: list[str]) -> frozenset:
    """Initial state with every block on the table, arm empty."""
    atoms = {ground_atom("arm-empty")}
    for b in blocks:
        atoms.add(ground_atom("on-table", b))
        atoms.add(ground_atom("clear", b))
    return frozenset(atoms)
