"""Expected number of specular points on a rough line between a source and a viewer.

Compares the exact reflection-geometry total with the linearized one for a few
source/viewer heights over a unit Gaussian-covariance surface (lambda2=1, lambda4=3).
"""

from ricewaves.spectral_model import GaussianCovariance
from ricewaves.specular1d import SpecularConfig, sp1_exact_expectation, sp2_expectation

model = GaussianCovariance(1.0, 1.0)
print(f"{'h1':>6} {'h2':>6} {'exact':>10} {'linearized':>11}")
for h1, h2 in [(100.0, 100.0), (90.0, 110.0), (50.0, 150.0), (20.0, 20.0)]:
    exact, _ = sp1_exact_expectation(h1, h2, lambda2=1.0, lambda4=3.0)
    approx = sp2_expectation(SpecularConfig.from_heights(h1, h2, model))
    print(f"{h1:6.0f} {h2:6.0f} {exact:10.4f} {approx:11.4f}")
