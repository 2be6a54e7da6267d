#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace escan {

// The five searchable views of one document. Field order is also the weight
// order everywhere a five-weight vector appears.
enum class Field {
    Keywords = 0,
    Concepts = 1,
    Expansions = 2,
    Relations = 3,
    CqmRelations = 4,
};

inline constexpr std::size_t kFieldCount = 5;

const char* to_string(Field f);
Field field_from(const std::string& name);

constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::Keywords, Field::Concepts, Field::Expansions, Field::Relations,
    Field::CqmRelations};

// Term weights per field. Keywords, concepts and the two relation fields
// hold occurrence counts; expansions hold accumulated similarity weights,
// which may be fractional.
struct FieldedDocument {
    std::string doc_id;
    std::array<std::map<std::string, double>, kFieldCount> fields;

    std::map<std::string, double>& field(Field f) {
        return fields[static_cast<std::size_t>(f)];
    }
    const std::map<std::string, double>& field(Field f) const {
        return fields[static_cast<std::size_t>(f)];
    }

    void add(Field f, const std::string& term, double weight = 1.0);
    bool empty() const;
};

// TSV serialization: one row per (doc, field, term, weight), header included,
// rows ordered by doc_id, field, term so output is reproducible byte for
// byte. Weights are shortest-round-trip formatted.
std::string to_tsv(const std::vector<FieldedDocument>& docs);
std::vector<FieldedDocument> fielded_docs_from_tsv(const std::string& content);

void save_fielded_docs(const std::string& path,
                       const std::vector<FieldedDocument>& docs);
std::vector<FieldedDocument> load_fielded_docs(const std::string& path);

}  // namespace escan
