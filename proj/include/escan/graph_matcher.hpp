#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "escan/document_graph.hpp"
#include "escan/embedding.hpp"
#include "escan/ontology.hpp"

namespace escan {

// One subgraph isomorphism: pattern node id -> document node index.
struct NodeBinding {
    std::map<std::string, std::size_t> nodes;
};

// Complete enumeration of the type-consistent injective embeddings of the
// pattern's required view into the document graph: node types equal, every
// pattern edge present with the right relation, every forbidden edge absent.
// Deterministic order; every valid binding appears exactly once.
std::vector<NodeBinding> find_pattern_subgraphs(const DocumentGraph& doc,
                                                const PatternGraph& pattern);

inline constexpr double kDefaultMatchThreshold = 0.6;

// Exact case-insensitive equality first; otherwise embedding distance
// (1 − cosine of the phrase means) at most `threshold`. Throws
// OutOfVocabularyError when either phrase cannot be embedded.
bool node_match(const std::string& doc_text, const std::string& gold_text,
                const EmbeddingTable& embeddings,
                double threshold = kDefaultMatchThreshold);

struct MatchVerdict {
    std::string doc_id;
    // Bindings that passed node-level matching, per pattern.
    std::map<PatternGraph::Name, std::vector<NodeBinding>> matched_bindings;
    bool numerator_matched = false;
    bool denominator_matched = false;
    bool opportunity_matched = false;
    bool relevant = false;            // at least one pattern matched
    bool stringent_relevant = false;  // all three matched

    bool pattern_matched(PatternGraph::Name name) const;
};

// Judges one document against one measure's gold graphs. A pattern counts as
// matched when some subgraph binding has every bound node passing node_match
// against the gold node of the same role; Population and Output nodes match
// unconditionally (their text is generic). An OutOfVocabularyError downgrades
// that node to a non-match and logs one line to `warnings`.
MatchVerdict judge_relevancy(
    const DocumentGraph& doc, const OntologySchema& schema,
    const std::map<PatternGraph::Name, GoldGraph>& gold_graphs,
    const EmbeddingTable& embeddings,
    double threshold = kDefaultMatchThreshold,
    std::ostream* warnings = nullptr);

}  // namespace escan
