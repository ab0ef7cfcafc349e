"""Modal workbench for space-time variational formulations.

Thin wrapper over the compiled core: formulation assembly, inf-sup spectra,
norm-identity residuals, closed-form counterexample data and the experiment
registry driven by the `stvf` CLI.
"""

from stvf._core import (
    __version__,
    adjoint_conjugation_check,
    convergence_study,
    counterexample_closed_forms,
    embedding_cq,
    experiments,
    formulations,
    infsup_constants,
    norm_identity_residual,
    run_experiment,
    stability_constant,
)

__all__ = [
    "__version__",
    "adjoint_conjugation_check",
    "convergence_study",
    "counterexample_closed_forms",
    "embedding_cq",
    "experiments",
    "formulations",
    "infsup_constants",
    "norm_identity_residual",
    "run_experiment",
    "stability_constant",
]
