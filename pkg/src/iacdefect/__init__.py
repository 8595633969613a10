"""Defect analysis for Puppet manifests.

Counts the 12 defect-correlated source properties per script, builds labeled
datasets from commit exports, validates property/defect correlation with
nonparametric statistics, and trains and evaluates defect prediction models.
"""

from .features import (FeatureMatrix, PCAModel, bow_matrix, bow_preprocess,
                       log_transform, pca_fit, pca_transform)
from .learners import (EvalReport, LabeledDataset, LearnerSpec, TrainedModel,
                       auc, cross_validate, feature_importance,
                       predict_scores, train)
from .lexer import SourceScript, Token, TokenStream, strip_comments, tokenize
from .mining import (XCM, CommitLabel, CommitRecord, RepoStats, build_xcm,
                     label_scripts, passes_criteria)
from .properties import PropertyRow, PropertyVector, extract, extract_corpus
from .stats import (EffectSize, SKRanking, StatConfig, TestResult,
                    cliffs_delta, cohens_kappa, mann_whitney_one_sided,
                    scott_knott_esd)
from .stemming import porter_stem

__version__ = "0.1.0"

__all__ = [
    "FeatureMatrix", "PCAModel", "bow_matrix", "bow_preprocess",
    "log_transform", "pca_fit", "pca_transform",
    "EvalReport", "LabeledDataset", "LearnerSpec", "TrainedModel", "auc",
    "cross_validate", "feature_importance", "predict_scores", "train",
    "SourceScript", "Token", "TokenStream", "strip_comments", "tokenize",
    "XCM", "CommitLabel", "CommitRecord", "RepoStats", "build_xcm",
    "label_scripts", "passes_criteria",
    "PropertyRow", "PropertyVector", "extract", "extract_corpus",
    "EffectSize", "SKRanking", "StatConfig", "TestResult", "cliffs_delta",
    "cohens_kappa", "mann_whitney_one_sided", "scott_knott_esd",
    "porter_stem",
]
