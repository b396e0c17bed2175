from .derive import (
    Derivation,
    DerivationError,
    DepthExceededError,
    NoWindowBoundError,
    Node,
    check_tiling,
    derive,
)
from .dsl import (
    GrammarError,
    GrammarSyntaxError,
    RepeatSpec,
    RuleSet,
    SplitSpec,
    UndefinedSymbolError,
    WeightError,
    format_rules,
    load_rules,
    parse_rules,
)
from .ops import InfeasibleSplitError, component_split, repeat_split, split_scope
