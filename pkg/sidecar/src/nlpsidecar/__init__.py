"""NLP sidecar: embeddings, lemmatization, and dependency parsing served
over HTTP or written offline in the corpus file formats the analysis
toolkit consumes."""

__version__ = "0.1.0"

from .batch import run_batch
from .encoder import HashedLexicalEncoder, load_encoder
from .service import create_app
