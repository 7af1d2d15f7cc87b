"""axdecomp: axial vectors, axonal operators and planar-rotation factorizations.

Everything lives over one real inner-product space `(R^n, G)` with `G` symmetric positive
definite (`axdecomp.space.Space`).

What axdecomp provides
- Axial vectors of a basis: the direction making one common angle with every basis vector, the
  axis it spans and the associated cone (`axdecomp.basis_axis`).
- The operator taxonomy (planar rotations, planar reflections, scalars, diagonal-in-basis maps,
  shears and general axonal maps), their matrices and classifiers (`axdecomp.operators`).
- Constructive factorizations (`axdecomp.decompose`):
  - any invertible operator as `D o A o R` (diagonal in a basis, axonal, planar rotation),
  - any conformal operator as a scalar times at most one reflection times planar rotations
    (n - 1 planar factors in total),
  - any orthogonal operator as at most one reflection times planar rotations,
  - an axonal operator as a general axonal map after a shear.
- Certificate checking, seeded generators and a closed-form oracle for n = 2, 3 (`axdecomp.verify`).
- A JSON-in/JSON-out CLI (`axdecomp.cli:main`, also `python -m axdecomp`).

Conventions
- Factor lists are in application order: `[F1, ..., Fk]` means `Fk o ... o F1`.
- Numeric thresholds come from one frozen `Tolerance` value passed explicitly.

Key exports from this module
- `__version__` only; import the submodules directly.
"""

from __future__ import annotations

__all__ = ["__version__"]

__version__ = "0.1.0"
