"""Style-imitation music generation with exactly-constrained Markov models."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    DeadEnd,
    EmptyCorpus,
    GridMismatch,
    Infeasible,
    MalformedToken,
    OrderNotPositive,
    SequenceTooShort,
    StylechainError,
    UnboundedLength,
    UnknownToken,
    UnreachableTotal,
    UnsupportedConstraint,
)
from .model import MarkovModel, estimate, random_walk, sequence_logprob
from .tokens import (
    Alphabet,
    Corpus,
    LeadSheet,
    Token,
    TokenSequence,
    leadsheet_to_sequences,
    parse_corpus,
    serialize_corpus,
)
from .trellis import (
    BiasField,
    Trellis,
    UnaryConstraint,
    build_trellis,
    most_probable,
    sample,
    solve_alldifferent,
)

__version__ = "0.1.0"
