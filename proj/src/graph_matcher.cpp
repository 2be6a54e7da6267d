#include "escan/graph_matcher.hpp"

#include <algorithm>
#include <array>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

struct MatchState {
    const DocumentGraph* doc = nullptr;
    const PatternGraph* pattern = nullptr;
    std::vector<std::size_t> order;      // pattern node visit order
    std::vector<std::size_t> assigned;   // order position -> doc node index
    std::vector<bool> used;              // doc node index taken
    std::vector<NodeBinding> results;
};

bool edges_consistent(const MatchState& st, std::size_t depth) {
    // Check every pattern edge whose endpoints are both assigned and that
    // involves the node just placed.
    const std::string& placed = st.pattern->nodes[st.order[depth]].id;
    auto doc_index_of = [&](const std::string& id) -> const std::size_t* {
        for (std::size_t k = 0; k <= depth; ++k) {
            if (st.pattern->nodes[st.order[k]].id == id) return &st.assigned[k];
        }
        return nullptr;
    };
    for (const PatternEdge& e : st.pattern->edges) {
        if (e.from != placed && e.to != placed) continue;
        const std::size_t* from = doc_index_of(e.from);
        const std::size_t* to = doc_index_of(e.to);
        if (!from || !to) continue;
        if (!st.doc->has_edge(*from, e.rel, *to)) return false;
    }
    return true;
}

bool not_edges_absent(const MatchState& st) {
    auto doc_index_of = [&](const std::string& id) {
        for (std::size_t k = 0; k < st.order.size(); ++k) {
            if (st.pattern->nodes[st.order[k]].id == id) return st.assigned[k];
        }
        return std::size_t{0};  // unreachable for a validated pattern
    };
    for (const PatternEdge& e : st.pattern->not_edges) {
        if (st.doc->has_edge(doc_index_of(e.from), e.rel, doc_index_of(e.to))) {
            return false;
        }
    }
    return true;
}

void backtrack(MatchState& st, std::size_t depth) {
    if (depth == st.order.size()) {
        if (!not_edges_absent(st)) return;
        NodeBinding binding;
        for (std::size_t k = 0; k < st.order.size(); ++k) {
            binding.nodes[st.pattern->nodes[st.order[k]].id] = st.assigned[k];
        }
        st.results.push_back(std::move(binding));
        return;
    }
    const PatternNode& pnode = st.pattern->nodes[st.order[depth]];
    for (std::size_t i = 0; i < st.doc->nodes.size(); ++i) {
        if (st.used[i] || st.doc->nodes[i].type != pnode.type) continue;
        st.assigned[depth] = i;
        if (edges_consistent(st, depth)) {
            st.used[i] = true;
            backtrack(st, depth + 1);
            st.used[i] = false;
        }
    }
}

}  // namespace

std::vector<NodeBinding> find_pattern_subgraphs(const DocumentGraph& doc,
                                                const PatternGraph& pattern) {
    PatternGraph required = pattern.required_view();
    MatchState st;
    st.doc = &doc;
    st.pattern = &required;

    // Visit the rarest concept types first to prune early. The result set is
    // independent of this order.
    std::array<std::size_t, kConceptTypeCount> type_count{};
    for (const GraphNode& n : doc.nodes) {
        ++type_count[static_cast<std::size_t>(n.type)];
    }
    st.order.resize(required.nodes.size());
    for (std::size_t i = 0; i < st.order.size(); ++i) st.order[i] = i;
    std::stable_sort(st.order.begin(), st.order.end(),
                     [&](std::size_t a, std::size_t b) {
                         auto ca = type_count[static_cast<std::size_t>(
                             required.nodes[a].type)];
                         auto cb = type_count[static_cast<std::size_t>(
                             required.nodes[b].type)];
                         if (ca != cb) return ca < cb;
                         return required.nodes[a].id < required.nodes[b].id;
                     });
    st.assigned.resize(st.order.size());
    st.used.assign(doc.nodes.size(), false);
    backtrack(st, 0);

    // Present bindings in a stable, order-independent sequence.
    std::sort(st.results.begin(), st.results.end(),
              [](const NodeBinding& a, const NodeBinding& b) {
                  return a.nodes < b.nodes;
              });
    return st.results;
}

bool node_match(const std::string& doc_text, const std::string& gold_text,
                const EmbeddingTable& embeddings, double threshold) {
    if (tsv::to_lower(doc_text) == tsv::to_lower(gold_text)) return true;
    std::vector<double> a = embeddings.embed_phrase(doc_text);
    std::vector<double> b = embeddings.embed_phrase(gold_text);
    return cosine_distance(a, b) <= threshold;
}

bool MatchVerdict::pattern_matched(PatternGraph::Name name) const {
    switch (name) {
        case PatternGraph::Name::Numerator: return numerator_matched;
        case PatternGraph::Name::Denominator: return denominator_matched;
        case PatternGraph::Name::Opportunity: return opportunity_matched;
    }
    return false;
}

MatchVerdict judge_relevancy(
    const DocumentGraph& doc, const OntologySchema& schema,
    const std::map<PatternGraph::Name, GoldGraph>& gold_graphs,
    const EmbeddingTable& embeddings, double threshold,
    std::ostream* warnings) {
    MatchVerdict verdict;
    verdict.doc_id = doc.doc_id;
    for (const auto& [name, gold] : gold_graphs) {
        const PatternGraph& pattern = schema.pattern(name);
        bool matched = false;
        std::vector<NodeBinding> passing;
        for (const NodeBinding& binding : find_pattern_subgraphs(doc, pattern)) {
            bool all_nodes_pass = true;
            for (const auto& [role, doc_index] : binding.nodes) {
                const GraphNode& doc_node = doc.nodes[doc_index];
                if (doc_node.type == ConceptType::Population ||
                    doc_node.type == ConceptType::Output) {
                    continue;  // generic nodes match by construction
                }
                const GoldNode* gold_node = gold.find_node(role);
                if (!gold_node) {
                    all_nodes_pass = false;
                    break;
                }
                bool ok = false;
                try {
                    ok = node_match(doc_node.key, gold_node->text, embeddings,
                                    threshold);
                } catch (const OutOfVocabularyError& e) {
                    if (warnings) {
                        *warnings << "warning: " << doc.doc_id << ": "
                                  << e.what() << "\n";
                    }
                    ok = false;
                }
                if (!ok) {
                    all_nodes_pass = false;
                    break;
                }
            }
            if (all_nodes_pass) {
                matched = true;
                passing.push_back(binding);
            }
        }
        switch (name) {
            case PatternGraph::Name::Numerator:
                verdict.numerator_matched = matched;
                break;
            case PatternGraph::Name::Denominator:
                verdict.denominator_matched = matched;
                break;
            case PatternGraph::Name::Opportunity:
                verdict.opportunity_matched = matched;
                break;
        }
        verdict.matched_bindings[name] = std::move(passing);
    }
    verdict.relevant = verdict.numerator_matched ||
                       verdict.denominator_matched ||
                       verdict.opportunity_matched;
    verdict.stringent_relevant = verdict.numerator_matched &&
                                 verdict.denominator_matched &&
                                 verdict.opportunity_matched;
    return verdict;
}

}  // namespace escan
