"""
Error types for casp-forge
Every message starts with the short phrase callers match on
"""


class CaspForgeError(ValueError):
    """Root of every error raised by casp-forge."""


class IncompleteAssignmentError(CaspForgeError):
    def __init__(self, missing):
        super().__init__(f"incomplete assignment: no value for {', '.join(sorted(missing))}")
        self.missing = frozenset(missing)


class DomainViolationError(CaspForgeError):
    def __init__(self, variable, value):
        super().__init__(f"domain violation: {variable}={value} is outside its domain")
        self.variable = variable
        self.value = value


class DegenerateScopeError(CaspForgeError):
    def __init__(self, constraint_id, size, detail=None):
        detail = detail or f"has {size} variable(s), need at least 2"
        super().__init__(f"degenerate scope: {constraint_id} {detail}")


class EmptyDomainError(CaspForgeError):
    def __init__(self, variable):
        super().__init__(f"empty domain: {variable}")
        self.variable = variable


class OracleTooLargeError(CaspForgeError):
    def __init__(self, size, limit):
        super().__init__(f"oracle too large: {size} exceeds the limit of {limit}")


class UntransformedProgramError(CaspForgeError):
    def __init__(self, rule):
        super().__init__(f"untransformed program: {rule} is not a normal rule")


class NotTightError(CaspForgeError):
    def __init__(self):
        super().__init__("not tight: the positive dependency graph has a cycle")


class NoExtensionalFormError(CaspForgeError):
    def __init__(self, constraint_id):
        super().__init__(f"no extensional form: {constraint_id}")


class RegionBlowUpError(CaspForgeError):
    def __init__(self, constraint_id, tuples):
        super().__init__(f"region blow-up: {constraint_id} has {tuples} forbidden tuples")


class NotAModelError(CaspForgeError):
    def __init__(self, detail):
        super().__init__(f"not a model: {detail}")


class CspSyntaxError(CaspForgeError):
    def __init__(self, message, line, column):
        super().__init__(f"syntax error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownVariableError(CaspForgeError):
    def __init__(self, name, constraint_id=None):
        where = f" in {constraint_id}" if constraint_id else ""
        super().__init__(f"unknown variable: {name}{where}")
        self.name = name


class ArityMismatchError(CaspForgeError):
    def __init__(self, constraint_id, expected, got):
        super().__init__(f"arity mismatch: {constraint_id} expects {expected}-tuples, got {got}")


class ConfigurationError(CaspForgeError):
    def __init__(self, variable, raw):
        super().__init__(f"configuration error: {variable}={raw!r} is not valid")


class InvalidGeneratorArgumentError(CaspForgeError):
    pass
