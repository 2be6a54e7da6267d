#include "escan/document_graph.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

std::string to_upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

using NodeId = std::pair<std::string, ConceptType>;

}  // namespace

AcronymTable AcronymTable::load(const std::filesystem::path& path) {
    AcronymTable table;
    for (const auto& line : tsv::read_lines(path.string())) {
        auto cols = tsv::split(line);
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
            throw IoError("bad acronym row: " + line);
        }
        table.add(cols[0], cols[1]);
    }
    return table;
}

void AcronymTable::add(const std::string& short_form,
                       const std::string& long_form) {
    if (short_form.size() > 5) {
        throw IoError("acronym short form longer than 5 characters: " +
                      short_form);
    }
    table_[to_upper(short_form)].push_back(long_form);
}

const std::vector<std::string>* AcronymTable::expansions(
    const std::string& text) const {
    if (text.size() > 5) return nullptr;
    auto it = table_.find(to_upper(text));
    return it == table_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> DocumentGraph::find(const std::string& key,
                                              ConceptType type) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].key == key && nodes[i].type == type) return i;
    }
    return std::nullopt;
}

bool DocumentGraph::has_edge(std::size_t from, CqmRelation rel,
                             std::size_t to) const {
    auto probe = std::make_tuple(from, rel, to);
    return std::binary_search(
        edges.begin(), edges.end(), probe,
        [](const auto& a, const auto& b) {
            auto key = [](const auto& e) {
                if constexpr (std::is_same_v<std::decay_t<decltype(e)>,
                                             GraphEdge>) {
                    return std::make_tuple(e.from, e.rel, e.to);
                } else {
                    return e;
                }
            };
            return key(a) < key(b);
        });
}

DocumentGraph build_document_graph(const std::vector<Triple>& triples,
                                   const AcronymTable& acronyms,
                                   double confidence_min) {
    DocumentGraph graph;
    std::map<NodeId, std::set<std::string>> nodes;  // id -> provenance texts
    std::set<std::tuple<NodeId, CqmRelation, NodeId>> edges;

    for (const Triple& t : triples) {
        if (t.confidence < confidence_min) continue;
        if (graph.doc_id.empty()) {
            graph.doc_id = t.doc_id;
        } else if (graph.doc_id != t.doc_id) {
            throw Error("document graph input mixes doc ids: " + graph.doc_id +
                        " and " + t.doc_id);
        }
        NodeId subj{t.subject_alias, t.subject_type};
        NodeId obj{t.object_alias, t.object_type};
        nodes[subj].insert(t.subject_text);
        nodes[obj].insert(t.object_text);
        edges.insert({subj, t.relation, obj});
    }

    // Acronym substitution, decided against the pre-substitution node set:
    // a unique expansion always applies; an ambiguous short form resolves to
    // the expansion already present as a same-type node, or stays as is.
    std::map<NodeId, NodeId> rename;
    for (const auto& [id, prov] : nodes) {
        const auto* exps = acronyms.expansions(id.first);
        if (!exps) continue;
        std::string replacement;
        if (exps->size() == 1) {
            replacement = exps->front();
        } else {
            std::vector<std::string> present;
            for (const std::string& e : *exps) {
                if (nodes.count({e, id.second})) present.push_back(e);
            }
            if (present.size() == 1) replacement = present.front();
        }
        if (!replacement.empty() && replacement != id.first) {
            rename[id] = NodeId{replacement, id.second};
        }
    }

    auto resolve = [&rename](NodeId id) {
        if (auto it = rename.find(id); it != rename.end()) id = it->second;
        // Population and Output surface text collapses to the generic key.
        if (id.second == ConceptType::Population) id.first = "Population";
        if (id.second == ConceptType::Output) id.first = "Output";
        return id;
    };

    std::map<NodeId, std::set<std::string>> merged;
    for (const auto& [id, prov] : nodes) {
        auto& texts = merged[resolve(id)];
        texts.insert(prov.begin(), prov.end());
    }
    std::set<std::tuple<NodeId, CqmRelation, NodeId>> merged_edges;
    for (const auto& [from, rel, to] : edges) {
        merged_edges.insert({resolve(from), rel, resolve(to)});
    }

    std::map<NodeId, std::size_t> index;
    for (const auto& [id, prov] : merged) {
        index[id] = graph.nodes.size();
        GraphNode node;
        node.key = id.first;
        node.type = id.second;
        node.provenance.assign(prov.begin(), prov.end());
        graph.nodes.push_back(std::move(node));
    }
    for (const auto& [from, rel, to] : merged_edges) {
        graph.edges.push_back({index.at(from), rel, index.at(to)});
    }
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const GraphEdge& a, const GraphEdge& b) {
                  return std::make_tuple(a.from, a.rel, a.to) <
                         std::make_tuple(b.from, b.rel, b.to);
              });
    return graph;
}

}  // namespace escan
