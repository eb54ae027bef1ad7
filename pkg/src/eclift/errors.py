"""Exception hierarchy for the eclift library.

Every error names the operation whose contract failed, so the CLI can print
``error [weierstrass.validate_curve] SingularCurve: ...`` without guessing.
"""


class EcliftError(Exception):
    """Base class for all domain errors raised by the library."""

    contract = "eclift"

    def __init__(self, message: str, contract: str | None = None):
        super().__init__(message)
        if contract is not None:
            self.contract = contract


class UsageError(EcliftError):
    """Invalid command-line input (exit code 2)."""
    contract = "cli.run"


class ContractViolation(EcliftError):
    """An identity the library relies on did not hold: a bug, not bad input."""


# --- finite-field ---

class NonPrime(EcliftError):
    contract = "finite_field.make_field"


class CharTooSmall(EcliftError):
    contract = "finite_field.make_field"


class FieldTooLarge(EcliftError):
    contract = "finite_field.make_field"


class DivisionByZero(EcliftError):
    contract = "finite_field.fq_arith"


class ArithmeticOverflow(EcliftError):
    """A value left the checked signed 64-bit range."""
    contract = "cm_order.weil_counts"


# --- weierstrass ---

class SingularCurve(EcliftError):
    contract = "weierstrass.validate_curve"


class PointNotOnCurve(EcliftError):
    contract = "weierstrass.add_points"


# --- cm-order ---

class SingularMatrix(EcliftError):
    contract = "cm_order.snf_2x2"


class TooManyPoints(EcliftError):
    contract = "cm_order.fixed_lattice"


# --- modclass / spherecurve ---

class NoFeasibleClass(EcliftError):
    contract = "modclass.find_embedding_class"


class Infeasible(EcliftError):
    contract = "sphere_curve.solve_curve"


class PoleCollision(EcliftError):
    contract = "sphere_curve.solve_curve"


class NoConvergence(EcliftError):
    contract = "sphere_curve.solve_curve"


# --- hopfmap ---

class OutOfDomain(EcliftError):
    contract = "hopf_map.embed_point"


class ProjectionPole(EcliftError):
    contract = "hopf_map.embed_point"


class ShearMisaligned(EcliftError):
    contract = "hopf_map.generate_mesh"


# --- emit / frobcheck ---

class EmptyMesh(EcliftError):
    contract = "emit.write_obj"


class BadResidue(EcliftError):
    contract = "frob_check.reduce_mod_p"
