"""Exact arithmetic for quantum cluster algebras and abstract cluster structures."""

from .lattice import Basis, BilinearForm, Label, LatticeElement, LinearMap, smith_normal_form, smith_invariants
from .qtorus import QLaurent, QuantumTorus
from .seed import Seed, mutate_seed, validate
from .engine import ExchangeGraph, Frame, explore, verify_laurent
from .acs import AcsTruncation, acs_from_seed, principal_part, verify_acs
from .acscat import AcsMorphism, verify_morphism
from .surface import Triangulation, acs_from_polygon, enumerate_triangulations
from .rcm import ExAdmissibleMap, induced_acs_morphism

__version__ = "0.1.0"

__all__ = [
    "AcsMorphism",
    "AcsTruncation",
    "Basis",
    "BilinearForm",
    "ExAdmissibleMap",
    "ExchangeGraph",
    "Frame",
    "Label",
    "LatticeElement",
    "LinearMap",
    "QLaurent",
    "QuantumTorus",
    "Seed",
    "Triangulation",
    "acs_from_polygon",
    "acs_from_seed",
    "enumerate_triangulations",
    "explore",
    "induced_acs_morphism",
    "mutate_seed",
    "principal_part",
    "smith_invariants",
    "smith_normal_form",
    "validate",
    "verify_acs",
    "verify_laurent",
    "verify_morphism",
]
