from dataclasses import dataclass, field
from typing import Optional


@dataclass
class BasinArguments:
    grid_density: int = field(
        default=500,
        metadata={
            "help": "Number of deterministic starts placed in the free space. 1 runs the scenario's own start. Default is 500."
        },
    )
    basin_dt: Optional[float] = field(
        default=None,
        metadata={"help": "Integration step for the basin runs. Defaults to the scenario's dt."},
    )
