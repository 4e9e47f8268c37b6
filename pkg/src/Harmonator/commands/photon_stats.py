# src/Harmonator/commands/photon_stats.py
import numpy as np
import structlog

from Harmonator.commanding import Invocation, RunOpts, sim_command
from Harmonator.commands.common import run_fock, units_meta
from Harmonator.export import nan_if_none
from Harmonator.fock import FockHistory, g2_equal_time, mandel_summary, photon_statistics
from Harmonator.sweeps import run_ordered

log = structlog.get_logger()

SHOWN_PROBABILITIES = 6


def _write_mode_statistics(inv: Invocation, history: FockHistory, mode: int, name: str) -> None:
    cfg = inv.run_config
    fock = inv.settings.fock
    pulse = cfg.pulse()
    states = history.states()
    stats = [photon_statistics(s, mode, fock.q_floor) for s in states]
    rows = []
    for t, st in zip(history.times, stats):
        probs = np.zeros(SHOWN_PROBABILITIES)
        n = min(SHOWN_PROBABILITIES, st.distribution.size)
        probs[:n] = st.distribution[:n]
        rows.append([t / pulse.period, st.mean, nan_if_none(st.mandel_q), *probs])
    summary = mandel_summary(
        history.times, [s.mandel_q for s in stats], pulse.tau, pulse.period, fock.average_cycles
    )
    freq = history.template.mode_frequencies[mode] / pulse.nu
    meta = units_meta(
        pulse,
        mode_frequency_over_nu=repr(freq),
        q_min_during=repr(summary.min_during),
        q_max_during=repr(summary.max_during),
        q_min_after=repr(summary.min_after),
        q_mean_after=repr(summary.mean_after),
        q_positive_fraction_after=repr(summary.positive_fraction_after),
        norm_drift=repr(history.max_norm_drift),
        edge_population=repr(history.max_edge_population),
    )
    inv.writer.table(
        name,
        ["t/T", "N", "Q_M", *[f"P{k}" for k in range(SHOWN_PROBABILITIES)]],
        rows,
        meta,
    )
    log.info(
        "photon_stats.mode.completed",
        mode_frequency_over_nu=freq,
        q_mean_after=summary.mean_after,
        q_min_during=summary.min_during,
    )


@sim_command(
    name="photon-stats",
    description="Exact one- or two-mode runs: photon statistics, Mandel Q and g2.",
)
def photon_stats(inv: Invocation, opts: RunOpts) -> None:
    cfg = inv.run_config
    if cfg.harmonics:

        def one_harmonic(h: float) -> None:
            history = run_fock(inv, [h])
            _write_mode_statistics(inv, history, 0, f"stats_h{h:.6g}.txt")

        run_ordered(one_harmonic, list(cfg.harmonics), inv.threads)
        return

    history = run_fock(inv, cfg.mode_frequencies)
    for mode in range(history.template.n_modes):
        _write_mode_statistics(inv, history, mode, f"stats_mode{mode + 1}.txt")
    if history.template.n_modes == 2:
        q_floor = inv.settings.fock.q_floor
        pulse = cfg.pulse()
        rows = []
        for t, state in zip(history.times, history.states()):
            g11 = g2_equal_time(state, 0, 0, q_floor)
            g22 = g2_equal_time(state, 1, 1, q_floor)
            g12 = g2_equal_time(state, 0, 1, q_floor)
            rows.append(
                [
                    t / pulse.period,
                    nan_if_none(g11.value),
                    nan_if_none(g22.value),
                    nan_if_none(g12.value),
                    nan_if_none(g11.literal),
                    nan_if_none(g22.literal),
                ]
            )
        inv.writer.table(
            "g2.txt",
            ["t/T", "g2_11", "g2_22", "g2_12", "g2_11_literal", "g2_22_literal"],
            rows,
            units_meta(pulse),
        )
