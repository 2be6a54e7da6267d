#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "escan/ontology.hpp"

namespace escan {

// One stored knowledge statement. Text fields keep the surface form, alias
// fields the canonical form used as graph node keys.
struct Triple {
    std::string doc_id;
    ConceptType subject_type = ConceptType::Population;
    std::string subject_text;
    std::string subject_alias;
    CqmRelation relation = CqmRelation::Experiences;
    ConceptType object_type = ConceptType::Population;
    std::string object_text;
    std::string object_alias;
    double confidence = 1.0;
};

// Throws TypingError when the (subject_type, relation, object_type) pair is
// illegal, a text field is empty, confidence leaves [0,1], or a field would
// break the line-oriented storage format (embedded tab or newline).
void validate_triple(const Triple& triple);

// Append-only TSV file plus an in-memory index by doc_id. One instance owns
// its file; open an existing store read-write with open(), start fresh with
// create() (truncates, making re-ingest idempotent). A default-constructed
// store is memory-only.
class TripleStore {
public:
    TripleStore() = default;

    static TripleStore open(const std::filesystem::path& path);
    static TripleStore create(const std::filesystem::path& path);

    void append(Triple triple);
    void append(const std::vector<Triple>& triples);

    // Triples of one document in insertion order; unknown doc_id → empty.
    std::vector<Triple> load(const std::string& doc_id) const;

    const std::vector<Triple>& all() const { return triples_; }
    std::vector<std::string> doc_ids() const;
    std::size_t size() const { return triples_.size(); }

    static std::string tsv_header();

private:
    std::filesystem::path path_;  // empty: memory-only
    std::vector<Triple> triples_;
    std::map<std::string, std::vector<std::size_t>> by_doc_;
};

}  // namespace escan
