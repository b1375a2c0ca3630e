from dataclasses import dataclass, field
from typing import List


@dataclass
class SelfcheckArguments:
    n_list: List[int] = field(
        default_factory=lambda: [1, 2, 3, 5],
        metadata={"help": "Sphere dimensions the suites run on. Default is 1 2 3 5."},
    )
    samples: int = field(
        default=10000,
        metadata={"help": "Random samples per suite; derived suites use a fraction of it. Default is 10000."},
    )
    perturbation: float = field(
        default=0.0,
        metadata={"help": "Offset injected into intermediate values so the suites must fail. Testing hook, keep at 0."},
    )
