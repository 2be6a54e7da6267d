#include "escan/ontology.hpp"

#include <algorithm>
#include <set>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

constexpr std::array<std::string_view, kConceptTypeCount> kConceptNames = {
    "ChangeConcept", "HealthStatus", "Population", "Utilization", "Output"};

constexpr std::array<std::string_view, kCqmRelationCount> kCqmNames = {
    "Experiences", "HasFocus", "IsAPartOf", "IsMadeUpOf", "ResultsIn"};

constexpr std::array<std::string_view, kBaseRelationCount> kBaseCodes = {
    "AGT", "ASO", "AT-L", "AT-T", "CAU", "EXP", "IFL", "INS", "INT",
    "ISA", "JST", "KIN", "MAK", "MNR", "PW",  "POS", "PRO", "PRP",
    "QNT", "RCP", "SRC", "STI", "SYN", "THM", "TPC", "VAL"};

struct LegalPair {
    CqmRelation rel;
    ConceptType domain;
    ConceptType range;
};

// Domain/range table for the five CQM relations; eight pairs total.
constexpr std::array<LegalPair, 8> kLegalPairs = {{
    {CqmRelation::Experiences, ConceptType::Population, ConceptType::ChangeConcept},
    {CqmRelation::HasFocus, ConceptType::ChangeConcept, ConceptType::HealthStatus},
    {CqmRelation::IsAPartOf, ConceptType::HealthStatus, ConceptType::Output},
    {CqmRelation::IsAPartOf, ConceptType::Utilization, ConceptType::Output},
    {CqmRelation::IsAPartOf, ConceptType::Utilization, ConceptType::ChangeConcept},
    {CqmRelation::IsMadeUpOf, ConceptType::Population, ConceptType::HealthStatus},
    {CqmRelation::IsMadeUpOf, ConceptType::Population, ConceptType::Utilization},
    {CqmRelation::ResultsIn, ConceptType::ChangeConcept, ConceptType::Output},
}};

}  // namespace

std::string_view to_string(ConceptType t) {
    return kConceptNames[static_cast<int>(t)];
}
std::string_view to_string(CqmRelation r) {
    return kCqmNames[static_cast<int>(r)];
}
std::string_view to_string(BaseRelation r) {
    return kBaseCodes[static_cast<int>(r)];
}

std::optional<ConceptType> concept_type_from(std::string_view s) {
    for (int i = 0; i < kConceptTypeCount; ++i)
        if (kConceptNames[i] == s) return static_cast<ConceptType>(i);
    return std::nullopt;
}

std::optional<CqmRelation> cqm_relation_from(std::string_view s) {
    for (int i = 0; i < kCqmRelationCount; ++i)
        if (kCqmNames[i] == s) return static_cast<CqmRelation>(i);
    return std::nullopt;
}

std::optional<BaseRelation> base_relation_from(std::string_view s) {
    for (int i = 0; i < kBaseRelationCount; ++i)
        if (kBaseCodes[i] == s) return static_cast<BaseRelation>(i);
    return std::nullopt;
}

bool validate_triple_typing(ConceptType subject_type, CqmRelation relation,
                            ConceptType object_type) {
    for (const auto& p : kLegalPairs)
        if (p.rel == relation && p.domain == subject_type && p.range == object_type)
            return true;
    return false;
}

bool attribute_allowed(ConceptType t, std::string_view key) {
    if (t == ConceptType::Population)
        return key == "age_group" || key == "gender" || key == "social_determinants";
    if (t == ConceptType::HealthStatus)
        return key == "severity" || key == "time";
    return false;
}

const PatternNode* PatternGraph::find_node(std::string_view id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

PatternGraph PatternGraph::required_view() const {
    PatternGraph out;
    out.name = name;
    for (const auto& n : nodes)
        if (!n.optional) out.nodes.push_back(n);
    for (const auto& e : edges)
        if (!e.optional) out.edges.push_back(e);
    for (const auto& e : not_edges)
        if (!e.optional) out.not_edges.push_back(e);
    return out;
}

std::string_view to_string(PatternGraph::Name n) {
    switch (n) {
        case PatternGraph::Name::Numerator: return "Numerator";
        case PatternGraph::Name::Denominator: return "Denominator";
        case PatternGraph::Name::Opportunity: return "Opportunity";
    }
    return "?";
}

std::optional<PatternGraph::Name> pattern_name_from(std::string_view s) {
    if (s == "Numerator") return PatternGraph::Name::Numerator;
    if (s == "Denominator") return PatternGraph::Name::Denominator;
    if (s == "Opportunity") return PatternGraph::Name::Opportunity;
    return std::nullopt;
}

const GoldNode* GoldGraph::find_node(std::string_view role) const {
    for (const auto& n : nodes)
        if (n.role == role) return &n;
    return nullptr;
}

namespace {

void validate_pattern(const PatternGraph& g) {
    const std::string ctx = "pattern " + std::string(to_string(g.name));
    std::set<std::string> ids;
    for (const auto& n : g.nodes)
        if (!ids.insert(n.id).second)
            throw IoError(ctx + ": duplicate node id " + n.id);

    auto check_edge = [&](const PatternEdge& e, const char* kind) {
        const PatternNode* from = g.find_node(e.from);
        const PatternNode* to = g.find_node(e.to);
        if (!from || !to)
            throw IoError(ctx + ": " + kind + " references unknown node");
        if (!validate_triple_typing(from->type, e.rel, to->type))
            throw IoError(ctx + ": illegal " + kind + " " + e.from + " -" +
                          std::string(to_string(e.rel)) + "-> " + e.to);
        if (e.optional != (from->optional || to->optional))
            throw IoError(ctx + ": optional flag mismatch on " + kind);
    };
    for (const auto& e : g.edges) check_edge(e, "edge");
    for (const auto& e : g.not_edges) check_edge(e, "not_edge");

    for (const auto& ne : g.not_edges)
        for (const auto& e : g.edges)
            if (e.from == ne.from && e.to == ne.to && e.rel == ne.rel)
                throw IoError(ctx + ": not_edge duplicates an edge");

    // Required nodes must be connected through required edges.
    std::vector<std::string> required;
    for (const auto& n : g.nodes)
        if (!n.optional) required.push_back(n.id);
    if (required.empty()) throw IoError(ctx + ": no required nodes");
    std::set<std::string> seen = {required.front()};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : g.edges) {
            if (e.optional) continue;
            bool f = seen.count(e.from), t = seen.count(e.to);
            if (f != t) {
                seen.insert(f ? e.to : e.from);
                grew = true;
            }
        }
    }
    for (const auto& id : required)
        if (!seen.count(id))
            throw IoError(ctx + ": node " + id + " is disconnected");
}

}  // namespace

OntologySchema OntologySchema::load(const std::string& path) {
    OntologySchema schema;
    std::set<std::tuple<std::string, std::string, std::string>> file_pairs;
    PatternGraph* current = nullptr;

    for (const auto& line : tsv::read_lines(path)) {
        auto f = tsv::split(line);
        const std::string& tag = f[0];
        if (tag == "version") {
            if (f.size() != 2) throw IoError(path + ": bad version line");
            schema.version_ = static_cast<int>(tsv::parse_long(f[1]));
        } else if (tag == "relation") {
            if (f.size() != 4) throw IoError(path + ": bad relation line");
            file_pairs.insert({f[1], f[2], f[3]});
        } else if (tag == "pattern") {
            if (f.size() != 2) throw IoError(path + ": bad pattern line");
            auto name = pattern_name_from(f[1]);
            if (!name) throw IoError(path + ": unknown pattern " + f[1]);
            schema.patterns_.emplace_back();
            current = &schema.patterns_.back();
            current->name = *name;
        } else if (tag == "node" || tag == "edge" || tag == "not_edge") {
            if (!current) throw IoError(path + ": " + tag + " outside a pattern");
            if (tag == "node") {
                if (f.size() < 4) throw IoError(path + ": bad node line");
                PatternNode n;
                n.id = f[1];
                auto ct = concept_type_from(f[2]);
                if (!ct) throw IoError(path + ": unknown concept type " + f[2]);
                n.type = *ct;
                if (f[3].rfind("binds=", 0) != 0)
                    throw IoError(path + ": node missing binds= field");
                n.binds = f[3].substr(6);
                n.optional = f.size() > 4 && f[4] == "optional";
                current->nodes.push_back(n);
            } else {
                if (f.size() < 4) throw IoError(path + ": bad " + tag + " line");
                PatternEdge e;
                e.from = f[1];
                auto rel = cqm_relation_from(f[2]);
                if (!rel) throw IoError(path + ": unknown relation " + f[2]);
                e.rel = *rel;
                e.to = f[3];
                e.optional = f.size() > 4 && f[4] == "optional";
                (tag == "edge" ? current->edges : current->not_edges).push_back(e);
            }
        } else {
            throw IoError(path + ": unknown line tag " + tag);
        }
    }

    // The file's relation table must reproduce the compiled one exactly.
    std::set<std::tuple<std::string, std::string, std::string>> compiled;
    for (const auto& p : kLegalPairs)
        compiled.insert({std::string(to_string(p.rel)),
                         std::string(to_string(p.domain)),
                         std::string(to_string(p.range))});
    if (file_pairs != compiled)
        throw IoError(path + ": relation table does not match the domain/range contract");

    if (schema.patterns_.size() != 3)
        throw IoError(path + ": expected exactly 3 patterns, got " +
                      std::to_string(schema.patterns_.size()));
    std::set<PatternGraph::Name> names;
    for (const auto& p : schema.patterns_) {
        validate_pattern(p);
        names.insert(p.name);
    }
    if (names.size() != 3) throw IoError(path + ": duplicate pattern names");

    // Fixed order regardless of file order.
    std::sort(schema.patterns_.begin(), schema.patterns_.end(),
              [](const PatternGraph& a, const PatternGraph& b) {
                  return static_cast<int>(a.name) < static_cast<int>(b.name);
              });
    return schema;
}

const PatternGraph& OntologySchema::pattern(PatternGraph::Name n) const {
    for (const auto& p : patterns_)
        if (p.name == n) return p;
    throw Error("pattern not loaded");
}

std::map<PatternGraph::Name, GoldGraph>
OntologySchema::instantiate_measure_graphs(const MeasureConceptInstance& instance) const {
    auto text_for = [&](const std::string& binds) -> const std::string& {
        if (binds == "population") return instance.population;
        if (binds == "denominator_health_status") return instance.denominator_health_status;
        if (binds == "change_concept") return instance.change_concept;
        if (binds == "numerator_health_status") return instance.numerator_health_status;
        if (binds == "output") return instance.output;
        if (binds == "utilization") return instance.utilization;
        throw IoError("schema binds unknown instance field: " + binds);
    };

    std::map<PatternGraph::Name, GoldGraph> out;
    for (const auto& tmpl : patterns_) {
        GoldGraph g;
        g.name = tmpl.name;
        std::set<std::string> kept;
        for (const auto& n : tmpl.nodes) {
            const std::string& text = text_for(n.binds);
            if (text.empty()) {
                if (n.optional) continue;  // no care setting for this measure
                throw MissingConceptError(
                    "measure " + instance.measure_id + ": description gave no " +
                    n.binds + " concept");
            }
            g.nodes.push_back({n.id, n.type, text});
            kept.insert(n.id);
        }
        for (const auto& e : tmpl.edges)
            if (kept.count(e.from) && kept.count(e.to))
                g.edges.push_back(e);
        out.emplace(tmpl.name, std::move(g));
    }
    return out;
}

}  // namespace escan
