"""Chat-completion access, structured problem summaries and prompt assembly."""
from .gateway import (
    Gateway,
    GatewayError,
    LlmConfig,
    RemoteBackend,
    ScriptedBackend,
    ScriptRule,
    Transcript,
    sha256_text,
)
from .prompts import (
    TARGETS,
    ExtractionError,
    FewShot,
    StructureShot,
    data_interface,
    extract_spec,
    generate_spec,
    generation_prompt,
    load_few_shots,
    load_structure_shots,
    refine_prompt,
    refine_spec,
    structure_problem,
    structure_prompt,
)
from .structured import (
    ParseError,
    StructuredProblem,
    SymbolMeta,
    check_structured,
    normalize_structured,
    parse_structured,
    render_structured,
)

__all__ = [
    "TARGETS",
    "ExtractionError",
    "FewShot",
    "Gateway",
    "GatewayError",
    "LlmConfig",
    "ParseError",
    "RemoteBackend",
    "ScriptRule",
    "ScriptedBackend",
    "StructureShot",
    "StructuredProblem",
    "SymbolMeta",
    "Transcript",
    "check_structured",
    "data_interface",
    "extract_spec",
    "generate_spec",
    "generation_prompt",
    "load_few_shots",
    "load_structure_shots",
    "normalize_structured",
    "parse_structured",
    "refine_prompt",
    "refine_spec",
    "render_structured",
    "sha256_text",
    "structure_problem",
    "structure_prompt",
]
