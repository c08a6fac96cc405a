"""
casp-forge
Finite-domain CSPs compiled to ground logic programs under the direct,
support, bound and range encodings, with a nogood propagation engine, a
CDNL solver and brute-force consistency oracles to check them against.
"""

from .asp_program import Atom, GroundProgram, ProgramBuilder, Rule
from .cdnl_solver import SolverConfig, SolveResult, extract_solution, solve
from .consistency_oracles import DomainState, enforce_ac_binary, enforce_bound, enforce_domain, enforce_range
from .csp_model import Constraint, CspInstance, VariableDecl, evaluate, normalize
from .encoders import EncodingKind, encode
from .errors import CaspForgeError
from .propagation_engine import compile_program, propagate_encoding, unit_propagate

__version__ = "0.1.0"
