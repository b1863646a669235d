from dataclasses import dataclass

import numpy as np

from profile_variance_monitor.application.ports.wavelet_transform import (
    WaveletTransformPort,
)
from profile_variance_monitor.domain.models.profile import (
    Profile,
    WaveletBasisSpec,
    WaveletDecomposition,
)
from profile_variance_monitor.domain.models.simulation import ProfileGenSpec

UNIFORM_BOUND = 5.0


@dataclass
class ProfileGenerator:
    """
    Builds random contaminated profiles in the wavelet domain:

    1. start from the DWT of a zero vector
    2. fill the scaling block and every detail level below the finest with
       Uniform(-5, 5) draws
    3. place N_s structural coefficients of size k sigma sqrt(2 ln n), with
       random signs, at distinct random positions of the finest level
    4. invert the transform and add Normal(0, sigma^2) noise

    Structure positions and coefficient draws are fresh for every profile.
    """

    transform: WaveletTransformPort

    def noiseless_coefficients(
        self, spec: ProfileGenSpec, rng: np.random.Generator
    ) -> WaveletDecomposition:
        m = spec.m
        coefficients = np.zeros(spec.n)
        coefficients[:m] = rng.uniform(-UNIFORM_BOUND, UNIFORM_BOUND, size=m)

        count = spec.structural_count
        if count:
            positions = rng.choice(m, size=count, replace=False)
            signs = rng.choice((-1.0, 1.0), size=count)
            coefficients[m + positions] = signs * spec.structural_size
        return WaveletDecomposition(coefficients, j0=spec.j0, basis=spec.basis)

    def noiseless(self, spec: ProfileGenSpec, rng: np.random.Generator) -> Profile:
        return self.transform.idwt(
            self.noiseless_coefficients(spec, rng), WaveletBasisSpec(spec.basis)
        )

    def generate(
        self, spec: ProfileGenSpec, rng: np.random.Generator, index: int = 0
    ) -> Profile:
        signal = self.noiseless(spec, rng)
        noise = rng.normal(0.0, spec.sigma, size=spec.n)
        return Profile(signal.values + noise, index=index)
