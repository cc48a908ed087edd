"""Product of labelled environments and reward machines."""

from src.product.enumeration import (
    OVERFLOW,
    EpsilonCycle,
    ExplicitProductMDP,
    ExplosionGuard,
    default_stack_cap,
    enumerate_bounded_product,
    export_triplets,
    machine_push_bound,
)
from src.product.product_mdp import (
    ProductState,
    ProductStep,
    RolloutResult,
    normalize_return,
    product_step,
    reset_product,
    rollout,
)
from src.product.runners import CraRunner, MachineRunner, MachineStep, PdrmRunner, as_runner

__all__ = [
    "CraRunner",
    "EpsilonCycle",
    "ExplicitProductMDP",
    "ExplosionGuard",
    "MachineRunner",
    "MachineStep",
    "OVERFLOW",
    "PdrmRunner",
    "ProductState",
    "ProductStep",
    "RolloutResult",
    "as_runner",
    "default_stack_cap",
    "enumerate_bounded_product",
    "export_triplets",
    "machine_push_bound",
    "normalize_return",
    "product_step",
    "reset_product",
    "rollout",
]
