"""Exact reflection arrangements of finite Coxeter groups.

Builds root systems and reflection groups for the finite Coxeter types,
constructs their intersection lattices with exact arithmetic, and checks a
family of orbit-counting and characteristic-polynomial identities by
independent routes.  The ``coxlat`` command line entry point lives in
:mod:`coxlat.cli`.
"""

__version__ = "0.1.0"
