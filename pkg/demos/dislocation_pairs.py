"""Pair correlation of phase singularities in an isotropic monochromatic wave field."""

import math

from ricewaves.dislocations import DislocationModel, correlation_A
from ricewaves.spectral_model import RingSpectrum

ring = RingSpectrum(1.0)
d2 = DislocationModel(ring).mean_density
print(f"mean density d2 = {d2:.6f} (1/(4 pi) = {1 / (4 * math.pi):.6f})")
print(f"{'r':>5} {'A(r)':>10} {'A/d2^2':>8}")
for r in (0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0):
    a = correlation_A(ring, r)
    print(f"{r:5.2f} {a:10.6f} {a / d2 ** 2:8.4f}")
