"""Python interface to the DAG-ledger access-control simulator.

The heavy lifting happens in the C++ core; this package exposes scenario
configuration, single runs and Monte-Carlo batches. Results come back as
plain dicts of lists so they drop straight into numpy / pandas.

    import dagsim
    cfg = dagsim.scenario("spam-no-repeer")
    result = dagsim.run(cfg, seed=1)
    print(result["mean_total_dr"])
"""

from dagsim._core import (
    ConfigError,
    builtin_scenarios,
    run,
    run_batch,
    scenario,
    validate,
    write_outputs,
    zipf_weights,
)

__all__ = [
    "ConfigError",
    "builtin_scenarios",
    "run",
    "run_batch",
    "scenario",
    "validate",
    "write_outputs",
    "zipf_weights",
]
