"""Reference implementations and randomized cross-checks for the engine."""
from .classical import classical_chase
from .differential import (
    CheckOptions,
    CheckResult,
    DifferentialReport,
    SuiteReport,
    differential_check,
    ground_goals,
    negative_control_instance,
    run_suite,
    shrink,
)
from .fixpoint import naive_fixpoint
from .generators import Caps, Instance, random_datalog, random_stratified, random_weakly_acyclic
from .homomorphism import find_ndf_homomorphism
from .laws import check_tnorm_laws, install_broken_tnorm
from .models import sample_models
from .strata import verify_stratification

__all__ = [
    "classical_chase", "naive_fixpoint", "find_ndf_homomorphism", "verify_stratification",
    "check_tnorm_laws", "install_broken_tnorm", "sample_models",
    "Caps", "Instance", "random_datalog", "random_weakly_acyclic", "random_stratified",
    "CheckOptions", "CheckResult", "DifferentialReport", "SuiteReport",
    "differential_check", "ground_goals", "run_suite", "shrink", "negative_control_instance",
]
