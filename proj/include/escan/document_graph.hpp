#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "escan/ontology.hpp"
#include "escan/triple_store.hpp"

namespace escan {

// Short form (uppercased) -> long-form expansions. Keys are at most five
// characters; lookups are case-insensitive. File format: short TAB long.
class AcronymTable {
public:
    AcronymTable() = default;

    static AcronymTable load(const std::filesystem::path& path);

    void add(const std::string& short_form, const std::string& long_form);
    const std::vector<std::string>* expansions(const std::string& text) const;
    std::size_t size() const { return table_.size(); }

private:
    std::map<std::string, std::vector<std::string>> table_;
};

struct GraphNode {
    std::string key;  // canonical text; "Population"/"Output" when generic
    ConceptType type = ConceptType::Population;
    std::vector<std::string> provenance;  // pre-merge surface texts, sorted
};

struct GraphEdge {
    std::size_t from = 0;  // node indices
    CqmRelation rel = CqmRelation::Experiences;
    std::size_t to = 0;
};

struct DocumentGraph {
    std::string doc_id;
    std::vector<GraphNode> nodes;  // sorted by (key, type)
    std::vector<GraphEdge> edges;  // deduplicated, sorted by (from, rel, to)

    std::optional<std::size_t> find(const std::string& key,
                                    ConceptType type) const;
    bool has_edge(std::size_t from, CqmRelation rel, std::size_t to) const;
};

// Collapses one document's triples into its concept graph: node keys start
// as alias text; short keys found in the acronym table are replaced by their
// long form and merged into the long-form node; Population and Output nodes
// collapse to the generic keys "Population" and "Output"; edges are
// deduplicated. Triples below confidence_min are ignored. All triples must
// carry the same doc_id.
DocumentGraph build_document_graph(const std::vector<Triple>& triples,
                                   const AcronymTable& acronyms,
                                   double confidence_min = 0.0);

}  // namespace escan
