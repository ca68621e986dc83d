"""Mass-constrained minimization and estimate checks for the energy

    E_Z(u) = int 1/2 |grad u|^2 + 1/2 u^2 (1 - u)^2 - Z u/|x|  +  D(u),

with ``D`` the Coulomb self-repulsion, over ``u >= 0`` with fixed mass.

Modules: ``fields`` (grids, fields, projections, checkpoints), ``coulomb``
(free-space potentials), ``energy``, ``minimize``, ``verify`` and ``cli``.
"""

__version__ = "0.1.0"
