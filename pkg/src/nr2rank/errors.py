class ValidationError(ValueError):
    """Input data violates a structural requirement (negative weight, unknown node, ...)."""


class ParseError(ValidationError):
    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class ParameterError(ValueError):
    """A numeric or named parameter is outside its legal range."""


class SolverError(RuntimeError):
    pass
