"""Numerical laboratory for a cutoff scalar field coupled to a hydrogen-like atom.

The package evaluates the closed-form constants of the model, computes the
shell integrals behind them, builds truncated position x Fock representations
of the Hamiltonian at desk scale, and verifies the advertised inequalities
and operator identities on the computed ground states.

Submodules are imported lazily so that the command-line entry point can pin
threading environment variables before numpy is loaded.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "model",
    "closedform",
    "quadrature",
    "fockspace",
    "particle",
    "spectral",
    "observables",
    "verify",
    "cli",
)

__all__ = list(_SUBMODULES) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        return importlib.import_module("." + name, __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
