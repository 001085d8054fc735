"""Cross-chain transaction semantic extraction toolkit.

Classifies blockchain transactions as cross-chain deposits (DT), cross-chain
withdrawals (WT), or ordinary transactions (NT) by fusing a directed-motif
census of the per-transaction asset transfer graph with an encoded
event-log text representation.
"""

from .core import (CLASSES, EventLogEntry, Label, LabeledTransaction,
                   TransactionMetadata, TransferEdgeRecord, normalize_address,
                   validate_metadata)
from .graph import AssetTransferGraph, build_asset_graph
from .motif import MotifCatalog, census_bruteforce, census_fast, default_catalog
from .eventtext import EventText, build_event_text, tokenize
from .encoder import (HashingEncoderConfig, HashingProvider, ProjectionHead,
                      RemoteEncoderConfig, RemoteProvider,
                      TrainingHyperparams, gradient_check, hashing_embed,
                      remote_embed, train_projection)
from .fuse import FeatureScaler, fit_scaler, fuse
from .classify import (ClassifierSpec, AdaBoostClassifier,
                       DecisionTreeClassifier, LinearSVMClassifier,
                       RandomForestClassifier, make_classifier)
from .evaluation import (ExperimentConfig, ExperimentReport, MetricsReport,
                         SplitPlan, compute_metrics, run_experiment,
                         split_generality, split_generalizability)
from .analyze import motif_profile, term_profile
from .synth import SynthConfig, generate_synthetic
from .ingest import (Dataset, RpcProvider, RpcProviderConfig,
                     fetch_transaction_metadata, load_labeled_jsonl,
                     merge_label_file, save_labeled_jsonl)
from .pipeline import XSemaModel, load_model, save_model

__version__ = "0.1.0"
