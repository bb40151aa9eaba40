"""Exception hierarchy for the emorank engine.

Every operation raises a subclass of :class:`EngineError`, so callers can
catch one base class at API boundaries (the CLI and HTTP layers map these
onto exit codes / status codes).
"""


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "engine_error"


# -- core ------------------------------------------------------------------

class NoSharedStimuli(EngineError):
    """Two response sets (or a candidate and a medoid) share no stimulus key."""

    code = "no_shared_stimuli"


class DuplicateResponse(EngineError):
    """A response list repeats a (stimulus, variant, context) key."""

    code = "duplicate_response"


class DimensionMismatch(EngineError):
    """Two emotion vectors have different lengths."""

    code = "dimension_mismatch"


# -- lexicon ---------------------------------------------------------------

class ParseError(EngineError):
    """A document is not well-formed (JSON syntax, missing keys, bad types)."""

    code = "parse_error"


class ValidationError(EngineError):
    """A document parses but violates an invariant (profile sums, dims)."""

    code = "validation_error"


class UnknownContext(EngineError):
    """The lexicon has no word entries for the requested context."""

    code = "unknown_context"


class MissingProfile(EngineError):
    """No component of a variant resolves to an emotion profile."""

    code = "missing_profile"


# -- learning --------------------------------------------------------------

class UnknownVariant(EngineError):
    """A response references a variant id with no known features."""

    code = "unknown_variant"


class TooFewCandidates(EngineError):
    """Fewer candidates than requested clusters."""

    code = "too_few_candidates"


class EmptyModel(EngineError):
    """A cluster model with no medoids cannot classify."""

    code = "empty_model"


# -- embedding -------------------------------------------------------------

class EmptySlotVocabulary(EngineError):
    """A template slot's context has no lexicon words."""

    code = "empty_slot_vocabulary"


class NoMappedCategory(EngineError):
    """A requested feature kind has no mapped category in the lexicon."""

    code = "no_mapped_category"


class InsufficientVocabulary(EngineError):
    """The lexicon cannot produce the requested number of distinct variants."""

    code = "insufficient_vocabulary"


# -- ranking ---------------------------------------------------------------

class EmptyItemSet(EngineError):
    """rank_items called with no items."""

    code = "empty_item_set"


class UnknownItem(EngineError):
    """An item id is absent from a ranking."""

    code = "unknown_item"


# -- evaluation ------------------------------------------------------------

class EmptyComparison(EngineError):
    """A rank comparison with no rows has no match rate."""

    code = "empty_comparison"


class UnclassifiedCandidate(EngineError):
    """An accuracy report requires every candidate to carry a class."""

    code = "unclassified_candidate"


class InvalidParams(EngineError):
    """Generator or experiment parameters are out of range."""

    code = "invalid_params"


# -- datastore -------------------------------------------------------------

class StorageError(EngineError):
    """An underlying filesystem operation failed."""

    code = "storage_error"


# -- service ---------------------------------------------------------------

class SessionNotActive(EngineError):
    """The session is complete, abandoned, or unknown."""

    code = "session_not_active"


class IncompleteRatings(EngineError):
    """A submission does not cover exactly the presented variant set."""

    code = "incomplete_ratings"


class OutOfRangeRating(EngineError):
    """A submitted rating falls outside [0, rating_max]."""

    code = "out_of_range_rating"


class LexiconUnavailable(EngineError):
    """The service has no lexicon loaded."""

    code = "lexicon_unavailable"


class DuplicateActiveSession(EngineError):
    """The candidate already has an active elicitation session."""

    code = "duplicate_active_session"


class UnknownCandidate(EngineError):
    """No stored profile exists for the candidate."""

    code = "unknown_candidate"


class UnknownSession(EngineError):
    """No session exists with the given id."""

    code = "unknown_session"
