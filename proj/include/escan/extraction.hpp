#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "escan/fielded_document.hpp"
#include "escan/ontology.hpp"
#include "escan/text.hpp"

namespace escan {

// ---------------------------------------------------------------------------
// Concept tagging

struct LexiconEntry {
    std::string phrase;
    ConceptType type = ConceptType::Population;
    std::string alias;
    std::map<std::string, std::string> attributes;
    std::vector<std::string> lemmas;  // phrase lemmatized at load time
};

// Phrase gazetteer. Matching happens over token lemmas, so entries are
// lemmatized once when added. File format, tab-separated:
//   phrase <TAB> ConceptType <TAB> alias [<TAB> key=value ...]
// Attribute keys are validated against attribute_allowed().
class Lexicon {
public:
    Lexicon() = default;

    static Lexicon load(const std::filesystem::path& path,
                        const Lemmatizer& lemmatizer);

    void add(const std::string& phrase, ConceptType type,
             const std::string& alias, const Lemmatizer& lemmatizer,
             std::map<std::string, std::string> attributes = {});

    std::size_t size() const { return entries_.size(); }
    const std::vector<LexiconEntry>& entries() const { return entries_; }

    // Entries whose first lemma equals `lemma`, longest phrase first.
    const std::vector<const LexiconEntry*>* candidates(
        std::string_view lemma) const;

private:
    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::vector<const LexiconEntry*>> by_first_;
};

struct ConceptMention {
    std::string surface;        // original text covered by the mention
    std::string alias;          // canonical text
    ConceptType type = ConceptType::Population;
    std::size_t token_begin = 0;  // token index range, end exclusive
    std::size_t token_end = 0;
    std::size_t char_begin = 0;  // byte range in the source text
    std::size_t char_end = 0;
    std::size_t sentence = 0;
    std::map<std::string, std::string> attributes;
};

// Longest-match-wins, left to right, over token lemmas. Overlapping shorter
// matches are suppressed; the next scan position is the end of the match.
std::vector<ConceptMention> tag_concepts(const std::vector<Token>& tokens,
                                         const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Conceptual expansion

// alias -> [(related alias, similarity weight in (0,1])]. File format:
//   alias <TAB> related <TAB> weight
class ExpansionTable {
public:
    ExpansionTable() = default;

    static ExpansionTable load(const std::filesystem::path& path);

    void add(const std::string& alias, const std::string& related,
             double weight);
    const std::vector<std::pair<std::string, double>>* related(
        std::string_view alias) const;
    std::size_t size() const;

private:
    std::map<std::string, std::vector<std::pair<std::string, double>>, std::less<>>
        table_;
};

// Accumulated expansion weights for the mentions of one document. Weights of
// repeated expansions add up. Aliases already mentioned in the document are
// not echoed into the result.
std::map<std::string, double> expand_concepts(
    const std::vector<ConceptMention>& mentions, const ExpansionTable& table);

// ---------------------------------------------------------------------------
// Base (surface) relation extraction

// One element of a rule pattern. Patterns are whitespace-separated element
// lists with exactly two slot elements:
//   {*}            any concept mention
//   {Type}         mention of that ConceptType
//   {=alias}       mention with that canonical alias
//   {Type=alias}   both constraints
//   {#}            a single numeric token (synthesized into a mention)
//   word           one token whose lemma is `word`
//   a|b|c          one token whose lemma is any alternative
//   *              any single token
// Slots span their mention's tokens; every other element consumes one token.
// A match must stay inside one sentence.
struct RuleElement {
    enum class Kind { Slot, NumberSlot, Lemma, AnyToken };
    Kind kind = Kind::Lemma;
    // Slot constraints; unset means unconstrained.
    std::optional<ConceptType> slot_type;
    std::optional<std::string> slot_alias;
    // Lemma alternatives for Kind::Lemma.
    std::vector<std::string> lemmas;
};

struct RelationRule {
    std::string pattern;  // original text, for diagnostics
    std::vector<RuleElement> elements;
    BaseRelation code = BaseRelation::AGT;
    bool swap_args = false;  // a trailing '~' on the code column
    double confidence = 1.0;
};

// File format: pattern <TAB> code[~] <TAB> confidence. The confidence column
// may be omitted and defaults to 1.0.
class RuleSet {
public:
    RuleSet() = default;

    static RuleSet load(const std::filesystem::path& path,
                        const Lemmatizer& lemmatizer);

    void add(const std::string& pattern, const std::string& code,
             double confidence, const Lemmatizer& lemmatizer);

    const std::vector<RelationRule>& rules() const { return rules_; }

private:
    std::vector<RelationRule> rules_;
};

struct BaseRelationMention {
    ConceptMention arg1;
    BaseRelation code = BaseRelation::AGT;
    ConceptMention arg2;
    double confidence = 1.0;
};

// Applies every rule to every sentence. Duplicate extractions on the same
// (arg1 span, code, arg2 span) keep the first rule's hit, so rule order is
// the priority order.
std::vector<BaseRelationMention> extract_base_relations(
    const std::vector<Token>& tokens, const std::vector<ConceptMention>& mentions,
    const RuleSet& rules);

// ---------------------------------------------------------------------------
// Semantic calculus

struct SemanticAxiom {
    BaseRelation r1 = BaseRelation::AGT;
    BaseRelation r2 = BaseRelation::AGT;
    CqmRelation r0 = CqmRelation::Experiences;
    ConceptType c1_type = ConceptType::Population;
    ConceptType c2_type = ConceptType::Population;
    std::string bridge_class;  // empty: no constraint on the middle concept
};

// File format: r1 <TAB> r2 <TAB> r0 <TAB> c1type <TAB> c2type <TAB> bridge.
// A "-" bridge column means unconstrained. Loading rejects axioms whose
// (c1type, r0, c2type) violates the domain/range table.
class AxiomSet {
public:
    AxiomSet() = default;

    static AxiomSet load(const std::filesystem::path& path);

    void add(SemanticAxiom axiom);
    const std::vector<SemanticAxiom>& axioms() const { return axioms_; }

private:
    std::vector<SemanticAxiom> axioms_;
};

// True when `bridge_class` is empty or the alias belongs to the named class.
// Unknown class names throw IoError.
bool bridge_class_contains(const std::string& bridge_class,
                           const std::string& alias);

struct DerivedTriple {
    ConceptMention subject;
    CqmRelation relation = CqmRelation::Experiences;
    ConceptMention object;
    double confidence = 1.0;
};

// One pass over ordered pairs of base relations sharing a middle mention
// (r1.arg2 and r2.arg1 cover the same span): each matching axiom derives
// r0(r1.arg1, r2.arg2) with confidence min of the pair. Output deduplicated
// on (subject alias, relation, object alias), keeping the highest confidence,
// and sorted by that key. Every output is checked against the domain/range
// table; a violation throws TypingError.
std::vector<DerivedTriple> apply_semantic_calculus(
    const std::vector<BaseRelationMention>& base_relations,
    const AxiomSet& axioms);

// ---------------------------------------------------------------------------
// Bundle and document assembly

// Extraction resources loaded from one directory:
//   lexicon.tsv, stopwords.txt, expansions.tsv, rules.tsv, axioms.tsv
struct ResourceBundle {
    Lemmatizer lemmatizer;
    StopwordSet stopwords;
    Lexicon lexicon;
    ExpansionTable expansions;
    RuleSet rules;
    AxiomSet axioms;

    static ResourceBundle load(const std::filesystem::path& dir);
};

struct ExtractionResult {
    std::vector<Token> tokens;
    std::vector<ConceptMention> mentions;
    std::map<std::string, double> expansions;
    std::vector<BaseRelationMention> base_relations;
    std::vector<DerivedTriple> triples;
};

ExtractionResult extract(std::string_view text, const ResourceBundle& bundle);

// Projects an extraction onto the five fields without re-running it.
FieldedDocument fields_from_extraction(const std::string& doc_id,
                                       const ExtractionResult& extraction);

// Runs the full extraction pipeline and projects it onto the five fields:
// keywords = non-stopword lemmas, concepts = mention aliases, expansions =
// accumulated expansion weights, relations = "alias|CODE|alias" per base
// relation, cqm_relations = "alias|Relation|alias" per derived triple. The
// same function serves documents and measure description text.
FieldedDocument build_fielded_document(const std::string& doc_id,
                                       std::string_view text,
                                       const ResourceBundle& bundle);

}  // namespace escan
