"""Shared samplers for random operating points."""
import math

import numpy as np

from magnon_metrology.model import PhysicalParams, build_model

MHZ = 2 * math.pi * 1e6


def random_params(rng: np.random.Generator) -> PhysicalParams:
    """Log-uniform rates around the baseline; may be unstable."""
    gamma_c = MHZ * 10 ** rng.uniform(0, 1.7)
    return PhysicalParams.baseline(
        gamma_c=gamma_c,
        gamma_m=MHZ * 10 ** rng.uniform(0.7, 1.9),
        g_mc=MHZ * 10 ** rng.uniform(0.5, 1.9),
        delta_c=MHZ * rng.uniform(-100, 100),
        delta_m=MHZ * rng.uniform(-50, 50),
        lambda_opa=gamma_c * rng.uniform(0, 3),
        theta=rng.uniform(0, 2 * math.pi),
        power=10 ** rng.uniform(-2, 0),
        temperature=rng.uniform(0, 0.5),
    )


def margin(p: PhysicalParams) -> float:
    """max Re eig(A) / ||A||_2."""
    A = build_model(p).drift
    return float(np.linalg.eigvals(A).real.max() / np.linalg.norm(A, 2))


def random_stable_params(rng: np.random.Generator, min_margin: float = 1e-3) -> PhysicalParams:
    while True:
        p = random_params(rng)
        if margin(p) < -min_margin:
            return p


def stable_sample(seed: int, n: int, min_margin: float = 1e-3):
    rng = np.random.default_rng(seed)
    return [random_stable_params(rng, min_margin) for _ in range(n)]
