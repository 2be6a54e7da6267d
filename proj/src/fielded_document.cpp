#include "escan/fielded_document.hpp"

#include <algorithm>
#include <sstream>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {
constexpr const char* kFieldNames[kFieldCount] = {
    "keywords", "concepts", "expansions", "relations", "cqm_relations"};
}

const char* to_string(Field f) {
    return kFieldNames[static_cast<std::size_t>(f)];
}

Field field_from(const std::string& name) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        if (name == kFieldNames[i]) return static_cast<Field>(i);
    }
    throw IoError("unknown field name: " + name);
}

void FieldedDocument::add(Field f, const std::string& term, double weight) {
    field(f)[term] += weight;
}

bool FieldedDocument::empty() const {
    return std::all_of(fields.begin(), fields.end(),
                       [](const auto& m) { return m.empty(); });
}

std::string to_tsv(const std::vector<FieldedDocument>& docs) {
    std::vector<const FieldedDocument*> ordered;
    ordered.reserve(docs.size());
    for (const auto& d : docs) ordered.push_back(&d);
    std::sort(ordered.begin(), ordered.end(),
              [](const FieldedDocument* a, const FieldedDocument* b) {
                  return a->doc_id < b->doc_id;
              });
    std::string out = "doc_id\tfield\tterm\tweight\n";
    for (const FieldedDocument* doc : ordered) {
        for (Field f : kAllFields) {
            for (const auto& [term, weight] : doc->field(f)) {
                out += tsv::join({doc->doc_id, to_string(f), term,
                                  tsv::fmt_double(weight)});
                out += '\n';
            }
        }
    }
    return out;
}

std::vector<FieldedDocument> fielded_docs_from_tsv(const std::string& content) {
    std::vector<FieldedDocument> docs;
    std::map<std::string, std::size_t> index;
    std::istringstream in(content);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first) {  // header row
            first = false;
            continue;
        }
        auto cols = tsv::split(line);
        if (cols.size() != 4) throw IoError("bad fielded-document row: " + line);
        auto [it, inserted] = index.try_emplace(cols[0], docs.size());
        if (inserted) {
            docs.emplace_back();
            docs.back().doc_id = cols[0];
        }
        FieldedDocument& doc = docs[it->second];
        doc.field(field_from(cols[1]))[cols[2]] += tsv::parse_double(cols[3]);
    }
    return docs;
}

void save_fielded_docs(const std::string& path,
                       const std::vector<FieldedDocument>& docs) {
    tsv::write_file(path, to_tsv(docs));
}

std::vector<FieldedDocument> load_fielded_docs(const std::string& path) {
    return fielded_docs_from_tsv(tsv::read_file(path));
}

}  // namespace escan
