"""Grammatical profiling of corpora from HPSG derivation trees.

The pipeline: parse derivation exports (`derivation`), load the grammar's
type hierarchy and classify labels (`hierarchy`), aggregate category-split
frequency profiles (`profiles`), compare them with similarity, diversity,
and significance statistics (`stats`), and assemble reports (`report`).
The `cli` module binds everything behind the ``grammar-profile`` command.
"""

from .derivation import (
    DerivationNode,
    SentenceRecord,
    extract_occurrences,
    parse_derivation,
    read_corpus,
    serialize_derivation,
)
from .hierarchy import (
    ANALYSIS_CATEGORIES,
    Category,
    CategoryTally,
    TypeHierarchy,
    classify,
    parse_tdl,
    subsumes,
    tally_categories,
)
from .profiles import (
    FrequencyProfile,
    SamplePlan,
    build_profile,
    diff_items,
    group_by_author,
    merge_profiles,
    not_in_only_in,
    sample_corpus,
)
from .report import (
    ComparisonReport,
    FrequencyComparison,
    PairwiseVarianceReport,
    build_comparison,
    build_frequency_comparison,
    build_pairwise_variance,
    emit,
)
from .stats import (
    AlignedVectors,
    DiversityScore,
    StatTestResult,
    bh_fdr,
    cosine,
    diversity,
    gini_simpson,
    mann_whitney,
    pca2,
    permutation_test,
    shannon,
)

__version__ = "0.1.0"
