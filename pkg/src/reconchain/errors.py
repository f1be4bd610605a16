"""Exception hierarchy shared by every pipeline stage."""


class ReconChainError(Exception):
    """Base class for all errors raised by reconchain."""


class FatalStageError(ReconChainError):
    """Errors that abort a pipeline run (exit status 3)."""


# scanner
class InvalidTarget(ReconChainError, ValueError):
    pass


class MalformedXml(ReconChainError):
    pass


class UnsupportedSchema(ReconChainError):
    pass


class ScannerNotFound(FatalStageError):
    def __init__(self, binary: str):
        super().__init__(f"scanner binary {binary!r} not found on PATH")
        self.binary = binary


class ScanFailed(FatalStageError):
    def __init__(self, phase: str, returncode: int, stderr: str):
        super().__init__(f"scan phase {phase} exited with status {returncode}: {stderr.strip()}")
        self.phase = phase
        self.returncode = returncode
        self.stderr = stderr


# enricher
class InvalidCveId(ReconChainError, ValueError):
    pass


class OutOfRange(ReconChainError, ValueError):
    pass


class ConfigError(FatalStageError):
    pass


# exploiter
class MalformedIndex(ReconChainError):
    pass


class FetchFailed(ReconChainError):
    pass


# nlp agent
class BudgetTooSmall(ReconChainError):
    def __init__(self, budget: int, skeleton: int):
        super().__init__(f"token budget {budget} is below the irreducible digest size ({skeleton})")
        self.budget = budget
        self.skeleton = skeleton


class ProviderError(ReconChainError):
    pass


# reporter
class InconsistentInput(ReconChainError, ValueError):
    pass


class TemplateError(FatalStageError):
    def __init__(self, message: str, placeholder: str | None = None):
        super().__init__(message)
        self.placeholder = placeholder


# orchestrator
class UsageError(ReconChainError):
    pass


class SchemaMismatch(FatalStageError):
    pass


class CorruptArtifact(FatalStageError):
    pass


class ProjectLocked(FatalStageError):
    pass
