"""Exception hierarchy shared by every stage of the pipeline."""


class TezlaError(Exception):
    pass


# -- frontend -----------------------------------------------------------------

class ParseError(TezlaError):
    pass


class MichelsonSyntaxError(ParseError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


class MichelineError(ParseError):
    """Malformed Micheline JSON or a document of the wrong shape."""


class UnsupportedFeature(ParseError):
    def __init__(self, name, kind="instruction"):
        self.name = name
        self.kind = kind
        super().__init__(f"unsupported {kind}: {name}")


class UnsupportedInstruction(UnsupportedFeature):
    def __init__(self, name):
        super().__init__(name, "instruction")

    @property
    def opcode(self):
        return self.name


class UnsupportedType(UnsupportedFeature):
    def __init__(self, name):
        super().__init__(name, "type")


# -- decompiler ---------------------------------------------------------------

class DecompileError(TezlaError):
    pass


class StackUnderflow(DecompileError):
    def __init__(self, instruction, needed, had):
        self.instruction = instruction
        self.needed = needed
        self.had = had
        super().__init__(f"{instruction}: needs {needed} stack slots, has {had}")


class StackDepthMismatch(DecompileError):
    pass


class NonUnitExitDepth(DecompileError):
    pass


class BodyStackShapeError(DecompileError):
    pass


class StackTypeError(DecompileError):
    pass


# -- IR / analyses ------------------------------------------------------------

class InvalidProgram(TezlaError):
    """A Program that violates SSA or def-before-use was handed to a consumer."""


class TezlaSyntaxError(TezlaError):
    pass


class AnalysisError(TezlaError):
    pass


class SolverDivergence(AnalysisError):
    pass


class FetchError(TezlaError):
    pass
