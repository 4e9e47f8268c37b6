import numpy as np
import structlog

from Harmonator.commanding import Invocation, RunOpts, sim_command
from Harmonator.floquet import delta_epsilon_map, extended_delta_epsilon_map

log = structlog.get_logger()

# delta_eps/nu disagreement with the extended matrix that gets a warning
ORACLE_WARN = 1e-4


@sim_command(
    name="floquet-map",
    description="Smallest quasi-energy splitting over drive strength and detuning.",
)
def floquet_map(inv: Invocation, opts: RunOpts) -> None:
    cfg = inv.run_config
    atom = cfg.atom()
    e0 = np.asarray(cfg.e0_values, dtype=float) * cfg.omega0
    det = np.asarray(cfg.detuning_values, dtype=float) * cfg.omega0
    floquet = inv.settings.floquet
    matrix = delta_epsilon_map(
        atom, e0, det, steps=floquet.steps_per_period, threads=inv.threads
    )
    if not np.all(np.isfinite(matrix)):
        log.warning("floquet.map.non_finite", count=int(np.sum(~np.isfinite(matrix))))
    check = extended_delta_epsilon_map(
        atom, e0, det, blocks=floquet.oracle_blocks, threads=inv.threads
    )
    deviation = float(np.nanmax(np.abs(matrix - check)))
    if deviation > ORACLE_WARN:
        log.warning("floquet.map.oracle_mismatch", max_deviation=deviation)
    inv.writer.table(
        "delta_epsilon_map.txt",
        ["dE0/omega0", *[f"{d:.10g}" for d in cfg.detuning_values]],
        np.column_stack([cfg.e0_values, matrix]),
        {
            "units": "rows dE0/(hbar omega0), columns Delta/omega0, values delta_eps/nu",
            "omega0": repr(cfg.omega0),
            "oracle_blocks": floquet.oracle_blocks,
            "oracle_max_deviation": repr(deviation),
        },
    )
