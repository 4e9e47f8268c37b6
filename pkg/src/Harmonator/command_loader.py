"""Import every module in ``Harmonator.commands`` so its ``@sim_command`` registrations run."""

import importlib
import pkgutil

import Harmonator.commands as commands_pkg


def load_all_commands() -> list[str]:
    """Import command modules once; returns the module names found."""
    found = []
    for info in pkgutil.iter_modules(commands_pkg.__path__, f"{commands_pkg.__name__}."):
        if info.name.rsplit(".", 1)[-1].startswith("_"):
            continue
        importlib.import_module(info.name)
        found.append(info.name)
    return found
