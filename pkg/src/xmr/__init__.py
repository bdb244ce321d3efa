"""Cross-modal association rules between image activations and story words.

The pipeline: ingest features and annotations, encode them as cross-modal
transactions, mine frequent itemsets, keep the vision-to-word rules, then
infer and score semantic concepts for new photo streams.
"""

from .errors import XmrError
from .evaluation import (
    DEFAULT_GRID,
    EvalReport,
    EvalStream,
    comprehensive_score,
    evaluate,
    reference_labels,
    render_table,
    save_reports,
    threshold_sweep,
)
from .inference import ConceptSet, infer_image, infer_stream, save_concepts
from .ingest import (
    AnnotationTable,
    FeatureTable,
    Story,
    StoryImage,
    Vocabulary,
    build_vocabulary,
    load_annotations,
    load_features,
    load_vocabulary,
    save_vocabulary,
    tokenize,
)
from .miner import (
    FrequentItemset,
    FrequentItemsetTable,
    mine_frequent,
    mine_frequent_bruteforce,
    support,
)
from .rules import (
    CrossModalRule,
    RuleStore,
    confidence,
    generate_rules,
    load_store,
    merge_stores,
    save_store,
)
from .transactions import (
    MiningParams,
    Transaction,
    TransactionDatabase,
    build_cross_modal_transaction,
    build_database,
    build_image_transaction,
    build_text_transaction,
    load_database,
    preprocess_tokens,
    save_database,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationTable",
    "ConceptSet",
    "DEFAULT_GRID",
    "CrossModalRule",
    "EvalReport",
    "EvalStream",
    "FeatureTable",
    "FrequentItemset",
    "FrequentItemsetTable",
    "MiningParams",
    "RuleStore",
    "Story",
    "StoryImage",
    "Transaction",
    "TransactionDatabase",
    "Vocabulary",
    "XmrError",
    "build_cross_modal_transaction",
    "build_database",
    "build_image_transaction",
    "build_text_transaction",
    "build_vocabulary",
    "comprehensive_score",
    "confidence",
    "evaluate",
    "generate_rules",
    "infer_image",
    "infer_stream",
    "load_annotations",
    "load_database",
    "load_features",
    "load_store",
    "load_vocabulary",
    "merge_stores",
    "mine_frequent",
    "mine_frequent_bruteforce",
    "preprocess_tokens",
    "reference_labels",
    "render_table",
    "save_concepts",
    "save_database",
    "save_reports",
    "save_store",
    "save_vocabulary",
    "support",
    "threshold_sweep",
    "tokenize",
]
