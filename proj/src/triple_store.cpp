#include "escan/triple_store.hpp"

#include <fstream>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

void check_text(const std::string& value, const char* what) {
    if (value.empty()) {
        throw TypingError(std::string("triple field '") + what + "' is empty");
    }
    if (value.find('\t') != std::string::npos ||
        value.find('\n') != std::string::npos ||
        value.find('\r') != std::string::npos) {
        throw TypingError(std::string("triple field '") + what +
                          "' contains a tab or newline");
    }
}

std::string format_triple(const Triple& t) {
    return tsv::join({t.doc_id, std::string(to_string(t.subject_type)),
                      t.subject_text, t.subject_alias,
                      std::string(to_string(t.relation)),
                      std::string(to_string(t.object_type)), t.object_text,
                      t.object_alias, tsv::fmt_double(t.confidence)}) +
           "\n";
}

Triple parse_triple(const std::string& line) {
    auto cols = tsv::split(line);
    if (cols.size() != 9) throw IoError("bad triple row: " + line);
    Triple t;
    t.doc_id = cols[0];
    auto st = concept_type_from(cols[1]);
    auto rel = cqm_relation_from(cols[4]);
    auto ot = concept_type_from(cols[5]);
    if (!st || !rel || !ot) throw IoError("bad triple row: " + line);
    t.subject_type = *st;
    t.subject_text = cols[2];
    t.subject_alias = cols[3];
    t.relation = *rel;
    t.object_type = *ot;
    t.object_text = cols[6];
    t.object_alias = cols[7];
    t.confidence = tsv::parse_double(cols[8]);
    return t;
}

}  // namespace

void validate_triple(const Triple& t) {
    check_text(t.doc_id, "doc_id");
    check_text(t.subject_text, "subject_text");
    check_text(t.subject_alias, "subject_alias");
    check_text(t.object_text, "object_text");
    check_text(t.object_alias, "object_alias");
    if (!validate_triple_typing(t.subject_type, t.relation, t.object_type)) {
        throw TypingError("illegal triple typing: " +
                          std::string(to_string(t.subject_type)) + " " +
                          std::string(to_string(t.relation)) + " " +
                          std::string(to_string(t.object_type)));
    }
    if (!(t.confidence >= 0.0 && t.confidence <= 1.0)) {
        throw TypingError("triple confidence out of [0,1]");
    }
}

std::string TripleStore::tsv_header() {
    return "doc_id\tsubject_type\tsubject_text\tsubject_alias\trelation\t"
           "object_type\tobject_text\tobject_alias\tconfidence";
}

TripleStore TripleStore::open(const std::filesystem::path& path) {
    TripleStore store;
    store.path_ = path;
    if (!std::filesystem::exists(path)) {
        tsv::write_file(path.string(), tsv_header() + "\n");
        return store;
    }
    for (const auto& line : tsv::read_lines(path.string())) {
        if (line == tsv_header()) continue;
        Triple t = parse_triple(line);
        validate_triple(t);
        store.by_doc_[t.doc_id].push_back(store.triples_.size());
        store.triples_.push_back(std::move(t));
    }
    return store;
}

TripleStore TripleStore::create(const std::filesystem::path& path) {
    TripleStore store;
    store.path_ = path;
    tsv::write_file(path.string(), tsv_header() + "\n");
    return store;
}

void TripleStore::append(Triple triple) {
    validate_triple(triple);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot append to " + path_.string());
        out << format_triple(triple);
    }
    by_doc_[triple.doc_id].push_back(triples_.size());
    triples_.push_back(std::move(triple));
}

void TripleStore::append(const std::vector<Triple>& triples) {
    for (const Triple& t : triples) validate_triple(t);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot append to " + path_.string());
        for (const Triple& t : triples) out << format_triple(t);
    }
    for (const Triple& t : triples) {
        by_doc_[t.doc_id].push_back(triples_.size());
        triples_.push_back(t);
    }
}

std::vector<Triple> TripleStore::load(const std::string& doc_id) const {
    std::vector<Triple> out;
    auto it = by_doc_.find(doc_id);
    if (it == by_doc_.end()) return out;
    out.reserve(it->second.size());
    for (std::size_t i : it->second) out.push_back(triples_[i]);
    return out;
}

std::vector<std::string> TripleStore::doc_ids() const {
    std::vector<std::string> out;
    out.reserve(by_doc_.size());
    for (const auto& [id, idx] : by_doc_) out.push_back(id);
    return out;
}

}  // namespace escan
