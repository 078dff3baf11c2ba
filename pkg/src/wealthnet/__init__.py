"""Wealth-exchange dynamics on networks.

Library layout:

* ``graphs`` -- network generators (random, small-world, scale-free,
  core-periphery) and edge-list I/O
* ``dynamics`` -- the coupled multiplicative/exchange process and the
  single-agent reference processes
* ``analytic`` -- closed-form densities, CDFs and exact samplers
* ``inference`` -- tail/body/mixture fitting and goodness of fit
* ``correlations`` -- assortativity by degree and wealth, degree-wealth
  correlation, parameter sweeps
* ``cli`` -- command-line experiment runner
"""

__version__ = "0.1.0"
