# src/Harmonator/commands/audit.py
import structlog

from Harmonator.commanding import Invocation, RunOpts, sim_command
from Harmonator.commands.common import run_fock, units_meta
from Harmonator.errors import ConfigError
from Harmonator.fock import cross_term_audit

log = structlog.get_logger()


@sim_command(
    name="audit",
    description="Two-mode exact run checking the terms dropped by the mean-field closure.",
)
def audit(inv: Invocation, opts: RunOpts) -> None:
    cfg = inv.run_config
    if len(cfg.mode_frequencies) != 2:
        raise ConfigError("the audit needs exactly two modes", key="mode_frequencies")
    history = run_fock(inv, cfg.mode_frequencies)
    report = cross_term_audit(history)
    pulse = cfg.pulse()
    inv.writer.text(
        "audit.txt",
        report.to_text(pulse.period),
        units_meta(pulse, max_factorization_error=repr(report.max_factorization_error)),
    )
    log.info("audit.completed", max_ratio=report.max_ratio, degenerate=report.degenerate)
