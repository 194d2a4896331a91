"""Wikipedia-category voting classifier for short tagged records."""

__version__ = "0.1.0"

from .kb import KnowledgeBase, Sense, load_kb, lookup, serialize_kb
from .extract import (
    ClassifierRules,
    Concept,
    ConceptClass,
    Record,
    classify_concept,
    disambiguate,
    extract_concepts,
    longest_match,
    rank_within_class,
    tokenize,
)
from .cdor import (
    CdorSet,
    CorpusIndex,
    Query,
    SearchResult,
    construct_query,
    harvest_enrichment,
    offline_search,
    select_cdors,
)
from .classify import (
    EWikiCBag,
    Prediction,
    VotingModel,
    bag_of_record,
    evaluate_map,
    expand_ewikic,
    predict,
    score,
    train,
)
from .pipeline import Pipeline
