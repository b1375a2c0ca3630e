from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ModuleArguments:
    scenario: Optional[str] = field(
        default=None,
        metadata={"help": "Path to the JSON scenario file. Required by every subcommand except selfcheck."},
    )
    out: Optional[str] = field(
        default=None,
        metadata={
            "help": "Where to write the trajectory (simulate) or the per-start outcomes (basin). Overrides output.path of the scenario."
        },
    )
    seed: int = field(
        default=0,
        metadata={"help": "Seed for every sampled check (rank check, selfcheck suites, critical point scan). Default is 0."},
    )
    jobs: int = field(
        default=1,
        metadata={"help": "Number of worker threads for batch runs. Default is 1."},
    )
    log_level: str = field(
        default="info",
        metadata={
            "help": "Provide logging level. Example --log_level debug, default=info."
        },
    )
