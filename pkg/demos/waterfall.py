"""Frame error rate of the small Z4 code against SNR for both iterative
decoders and the ML decoder.  Prints one CSV table per decoder.

    python3 demos/waterfall.py [frames] [workers]
"""
import sys

from nblpdec.code import example_matrix
from nblpdec.sim import SimConfig, run_sweep, write_csv

frames = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1

for decoder in ("basic", "subgrad", "ml"):
    cfg = SimConfig(matrix=example_matrix(), decoder=decoder, snr_db=(0, 2, 4, 6),
                    max_frames=frames, target_frame_errors=200, source="random",
                    seed=5, workers=workers)
    print(f"# decoder = {decoder}")
    print(write_csv(run_sweep(cfg)))
