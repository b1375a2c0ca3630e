from dataclasses import dataclass, field


@dataclass
class ScanArguments:
    scan_samples: int = field(
        default=20000,
        metadata={"help": "Uniform samples of the open sphere world for the critical point scan. Default is 20000."},
    )
    scan_threshold: float = field(
        default=1e-2,
        metadata={
            "help": "Flag samples whose gradient norm is below this fraction of the median norm. Default is 0.01."
        },
    )
