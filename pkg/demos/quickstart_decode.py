"""Send one codeword of the small Z4 code over a noisy QPSK channel and
decode it three ways: coordinate ascent, subgradient ascent and brute-force ML.

    python3 demos/quickstart_decode.py [snr_db] [seed]
"""
import sys

import numpy as np

from nblpdec import basic, subgradient
from nblpdec.channel import llr_matrix, psk, sigma_from_snr_db, transmit_awgn
from nblpdec.code import example_matrix, is_codeword
from nblpdec.dual import prepare
from nblpdec.oracle import enumerate_code, exhaustive_ml

snr_db = float(sys.argv[1]) if len(sys.argv) > 1 else 3.0
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1
rng = np.random.default_rng(seed)

H = example_matrix()
print("parity-check matrix over", H.ring.token)
print(H.to_dense())

words = np.array(enumerate_code(H))
c = words[rng.integers(len(words))]
print("\nsent      ", c)

mod = psk(H.ring)
sigma = sigma_from_snr_db(snr_db)
y = transmit_awgn(mod.points[c], sigma, rng)
llr = llr_matrix(mod, y, sigma)
print(f"SNR {snr_db} dB, sigma {sigma:.3f}")
print("hard decisions", np.concatenate([np.zeros((H.n, 1)), llr], axis=1).argmin(axis=1))

graph = prepare(H)
for name, res in [
    ("basic (min-sum)", basic.decode(graph, llr)),
    ("basic (kappa=4)", basic.decode(graph, llr, basic.BasicConfig(kappa=4.0))),
    ("subgradient", subgradient.decode(graph, llr)),
]:
    print(f"{name:16s}", res.symbols, res.status.value, f"after {res.iterations} iteration(s)")

ml = exhaustive_ml(H, llr, words)
print(f"{'ML':16s}", ml, "codeword" if is_codeword(H, ml) else "?")
