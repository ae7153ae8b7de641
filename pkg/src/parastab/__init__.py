"""parastab: exact-arithmetic stability calculus for flagged residue systems.

Subpackages cover exact linear algebra over Q and F_p (`exactnum`), weighted
flag numerology and slope stability (`parabolic_core`), residue-matrix systems
with Harder-Narasimhan / Jordan-Hoelder filtrations (`fuchsian`), the
Hilbert-Mumford weight calculus on products of Grassmannians (`git_grass`),
a one-chart logarithmic differential operator algebra (`logops`), and the
gcd certificate for fine moduli (`fine_moduli`).  `cli` is the batch front
end (`parastab <kind> --in job.json`).
"""

__version__ = "0.1.0"
