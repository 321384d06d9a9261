from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class ReconResult:
    image: np.ndarray
    method_id: str
    per_block_iterations: np.ndarray | None = None
