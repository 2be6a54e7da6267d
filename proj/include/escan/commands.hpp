#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "escan/evaluate.hpp"
#include "escan/ontology.hpp"
#include "escan/search_index.hpp"

namespace escan {

// One measure of the measure file. Rows are either
//   measure_id TAB description
// or the full form with the concept instance:
//   measure_id TAB description TAB population TAB denominator_health_status
//   TAB change_concept TAB numerator_health_status TAB output TAB utilization
// with empty strings for absent concepts.
struct MeasureRecord {
    std::string measure_id;
    std::string description;
    MeasureConceptInstance instance;
};

std::vector<MeasureRecord> load_measures(const std::string& path);

// The measure named by `measure_id`, or the file's only measure when the id
// is not given.
const MeasureRecord& select_measure(const std::vector<MeasureRecord>& measures,
                                    const std::optional<std::string>& measure_id);

// Tuned weights used when a scan does not specify its own.
WeightVector default_weights();

struct IngestStats {
    std::size_t succeeded = 0;
    std::size_t skipped = 0;
};

// Corpus records are doc_id TAB title TAB body. Malformed records are logged
// and skipped. Outputs (fielded-document TSV and triple store) are rewritten
// from scratch, so re-runs are idempotent.
IngestStats run_ingest(const std::string& corpus_path,
                       const std::string& resources_dir,
                       const std::string& fielded_out,
                       const std::string& triples_out, std::ostream& log);

void run_index(const std::string& fielded_path, const std::string& index_out,
               const std::string& target);

void run_scan(const std::string& index_path, const std::string& resources_dir,
              const std::string& measures_path,
              const std::optional<std::string>& measure_id,
              const WeightVector& weights, std::size_t k,
              const std::string& out_path);

void run_optimize(const std::string& index_path,
                  const std::string& resources_dir,
                  const std::string& measures_path,
                  const std::string& gold_path, const std::string& out_path,
                  const std::optional<std::string>& surface_path);

// Judges documents against measure gold graphs. With a ranked file (a scan
// report), only those documents are judged, in rank order; otherwise the
// whole triple store, by doc_id. Without a measure id every measure in the
// file is processed.
void run_match(const std::string& triples_path,
               const std::string& resources_dir,
               const std::string& measures_path,
               const std::optional<std::string>& measure_id,
               const std::optional<std::string>& ranked_path,
               const std::string& embeddings_path, double threshold,
               double confidence_min, const std::string& out_path,
               std::ostream& warnings);

void run_evaluate(const std::string& verdicts_path,
                  const std::string& manual_path, std::size_t k,
                  const std::string& out_path);

// Parses a verdict report written by run_match.
std::vector<VerdictRow> load_verdicts(const std::string& path);

// Parses the doc_id column of a scan report, in rank order.
std::vector<std::string> load_ranked_doc_ids(const std::string& path);

}  // namespace escan
