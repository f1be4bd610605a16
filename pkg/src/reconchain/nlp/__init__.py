from .agent import (
    ValidationResult,
    finding_digest,
    generate_executive_summary,
    generate_findings,
    screen_narratives,
    validate_narrative,
)
from .digest import compact_context, estimate_tokens
from .prompts import PromptTemplate, load_prompts
from .providers import CompletionProvider, ProviderParams, RemoteProvider, StubProvider

__all__ = [
    "CompletionProvider",
    "PromptTemplate",
    "ProviderParams",
    "RemoteProvider",
    "StubProvider",
    "ValidationResult",
    "compact_context",
    "estimate_tokens",
    "finding_digest",
    "generate_executive_summary",
    "generate_findings",
    "load_prompts",
    "screen_narratives",
    "validate_narrative",
]
