"""Physical constants, CODATA 2018 (exact in the 2019 SI).

    h    = 6.62607015e-34 J s           (exact)
    hbar = h / 2pi = 1.054571817646...e-34 J s
    k_B  = 1.380649e-23 J/K             (exact)
"""
import math

PLANCK_H = 6.62607015e-34
HBAR = PLANCK_H / (2.0 * math.pi)
K_B = 1.380649e-23
TWO_PI = 2.0 * math.pi
