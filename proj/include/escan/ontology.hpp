#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace escan {

// ---------------------------------------------------------------------------
// Closed vocabularies
// ---------------------------------------------------------------------------

enum class ConceptType {
    ChangeConcept,
    HealthStatus,
    Population,
    Utilization,
    Output,
};
inline constexpr int kConceptTypeCount = 5;

enum class CqmRelation {
    Experiences,
    HasFocus,
    IsAPartOf,
    IsMadeUpOf,
    ResultsIn,
};
inline constexpr int kCqmRelationCount = 5;

// The 26 base linguistic relation codes.
enum class BaseRelation {
    AGT, ASO, AT_L, AT_T, CAU, EXP, IFL, INS, INT, ISA, JST, KIN, MAK,
    MNR, PW, POS, PRO, PRP, QNT, RCP, SRC, STI, SYN, THM, TPC, VAL,
};
inline constexpr int kBaseRelationCount = 26;

std::string_view to_string(ConceptType t);
std::string_view to_string(CqmRelation r);
std::string_view to_string(BaseRelation r);

std::optional<ConceptType> concept_type_from(std::string_view s);
std::optional<CqmRelation> cqm_relation_from(std::string_view s);
std::optional<BaseRelation> base_relation_from(std::string_view s);

// True iff (subject_type, object_type) is a legal domain/range pair for the
// relation. Total over the closed enums; exactly 8 of the 125 combinations
// are legal.
bool validate_triple_typing(ConceptType subject_type, CqmRelation relation,
                            ConceptType object_type);

// Attribute keys are only legal on Population (age_group, gender,
// social_determinants) and HealthStatus (severity, time).
bool attribute_allowed(ConceptType t, std::string_view key);

// ---------------------------------------------------------------------------
// Measure concept-graph templates
// ---------------------------------------------------------------------------

struct PatternNode {
    std::string id;        // role name, e.g. "population"
    ConceptType type;
    std::string binds;     // measure-instance field bound at instantiation
    bool optional = false; // care-setting nodes are optional
};

struct PatternEdge {
    std::string from;
    std::string to;
    CqmRelation rel;
    bool optional = false; // true when either endpoint is optional
};

struct PatternGraph {
    enum class Name { Numerator, Denominator, Opportunity };

    Name name;
    std::vector<PatternNode> nodes;
    std::vector<PatternEdge> edges;
    std::vector<PatternEdge> not_edges;

    const PatternNode* find_node(std::string_view id) const;

    // The template without optional nodes and the edges touching them.
    PatternGraph required_view() const;
};

std::string_view to_string(PatternGraph::Name n);
std::optional<PatternGraph::Name> pattern_name_from(std::string_view s);

// Concept texts manually pulled from one measure description.
struct MeasureConceptInstance {
    std::string measure_id;
    std::string population;
    std::string denominator_health_status;
    std::string change_concept;
    std::string numerator_health_status;
    std::string output;
    std::string utilization;  // empty when the measure names no care setting
};

// One template node with its bound text.
struct GoldNode {
    std::string role;
    ConceptType type;
    std::string text;
};

struct GoldGraph {
    PatternGraph::Name name;
    std::vector<GoldNode> nodes;
    std::vector<PatternEdge> edges;

    const GoldNode* find_node(std::string_view role) const;
};

// Relation table plus the three concept-graph templates, loaded from the
// versioned schema file shipped under resources/. The loader cross-checks
// the file's relation section against the compiled domain/range table and
// validates every template edge.
class OntologySchema {
public:
    static OntologySchema load(const std::string& path);

    int version() const { return version_; }

    // The Numerator, Denominator and Opportunity templates, in that order.
    const std::vector<PatternGraph>& pattern_graphs() const { return patterns_; }

    const PatternGraph& pattern(PatternGraph::Name n) const;

    // Binds instance texts onto each template. The care-setting node is
    // included only when the instance names a utilization. Throws
    // MissingConceptError when a required field is empty.
    std::map<PatternGraph::Name, GoldGraph>
    instantiate_measure_graphs(const MeasureConceptInstance& instance) const;

private:
    int version_ = 0;
    std::vector<PatternGraph> patterns_;
};

}  // namespace escan
