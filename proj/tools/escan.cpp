// Command-line front end for the environmental-scan pipeline.
//
// Pipeline stages, each a subcommand: ingest (text -> fielded docs + triple
// store), index (fielded docs -> searchable index), scan (rank documents for
// a measure), optimize-weights (grid-search field weights against citation
// gold), match-graphs (judge document graphs against measure gold graphs),
// evaluate (compare verdicts with a manual review).
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "escan/commands.hpp"
#include "escan/errors.hpp"
#include "escan/graph_matcher.hpp"
#include "escan/search_index.hpp"

namespace {

std::optional<std::string> opt_of(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Environmental-scan engine for clinical quality measures"};
    app.require_subcommand(1);

    // ingest
    std::string corpus, resources, fielded = "fielded.tsv",
                triples = "triples.tsv";
    CLI::App* ingest =
        app.add_subcommand("ingest", "Extract fielded documents and triples "
                                     "from a corpus file");
    ingest->add_option("--corpus", corpus, "corpus TSV: doc_id, title, body")
        ->required();
    ingest->add_option("--resources", resources, "resource directory")
        ->required();
    ingest->add_option("--fielded", fielded, "fielded-document output path");
    ingest->add_option("--triples", triples, "triple-store output path");

    // index
    std::string index_fielded, index_out, target = "abstracts";
    CLI::App* index =
        app.add_subcommand("index", "Build a search index from fielded "
                                    "documents");
    index->add_option("--fielded", index_fielded, "fielded-document TSV")
        ->required();
    index->add_option("--index", index_out, "index output path")->required();
    index->add_option("--target", target,
                      "index target label (abstracts or articles)");

    // scan
    std::string scan_index, scan_resources, scan_measures, scan_out;
    std::string scan_measure_id, weights_text;
    std::size_t top_k = 30;
    CLI::App* scan =
        app.add_subcommand("scan", "Rank indexed documents against a measure "
                                   "description");
    scan->add_option("--index", scan_index, "search index path")->required();
    scan->add_option("--resources", scan_resources, "resource directory")
        ->required();
    scan->add_option("--measure", scan_measures, "measure file")->required();
    scan->add_option("--measure-id", scan_measure_id,
                     "measure to scan (defaults to the file's only measure)");
    scan->add_option("--weights", weights_text,
                     "five comma-separated field weights (default: tuned)");
    scan->add_option("--top-k", top_k, "number of documents to report");
    scan->add_option("--out", scan_out, "scan report output path")->required();

    // optimize-weights
    std::string opt_index, opt_resources, opt_measures, opt_gold, opt_out;
    std::string surface;
    CLI::App* optimize =
        app.add_subcommand("optimize-weights",
                           "Grid-search field weights that maximize the "
                           "modified mean reciprocal rank of cited documents");
    optimize->add_option("--index", opt_index, "search index path")
        ->required();
    optimize->add_option("--resources", opt_resources, "resource directory")
        ->required();
    optimize->add_option("--measure", opt_measures, "measure file")
        ->required();
    optimize->add_option("--gold", opt_gold, "citation gold: measure_id, "
                                             "doc_id")
        ->required();
    optimize->add_option("--out", opt_out, "best-weights output path")
        ->required();
    optimize->add_option("--surface", surface,
                         "optional full grid-surface output path");

    // match-graphs
    std::string match_triples, match_resources, match_measures, match_out;
    std::string match_measure_id, ranked, embeddings;
    double threshold = escan::kDefaultMatchThreshold;
    double confidence_min = 0.0;
    CLI::App* match =
        app.add_subcommand("match-graphs",
                           "Judge document graphs against measure gold graphs "
                           "(Numerator / Denominator / Opportunity)");
    match->add_option("--triples", match_triples, "triple-store path")
        ->required();
    match->add_option("--resources", match_resources, "resource directory")
        ->required();
    match->add_option("--measure", match_measures, "measure file")->required();
    match->add_option("--measure-id", match_measure_id,
                      "measure to judge (defaults to every measure)");
    match->add_option("--ranked", ranked,
                      "scan report; restricts judging to its documents, in "
                      "rank order");
    match->add_option("--embeddings", embeddings, "word-embedding table")
        ->required();
    match->add_option("--threshold", threshold,
                      "embedding-distance match threshold");
    match->add_option("--confidence-min", confidence_min,
                      "minimum triple confidence to keep");
    match->add_option("--out", match_out, "verdict output path")->required();

    // evaluate
    std::string eval_verdicts, eval_manual, eval_out;
    std::size_t eval_k = 30;
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Compare match verdicts against a "
                                       "manual relevancy review");
    evaluate->add_option("--verdicts", eval_verdicts, "verdict TSV from "
                                                      "match-graphs")
        ->required();
    evaluate->add_option("--manual", eval_manual,
                         "manual review: measure_id, doc_id, yes|no")
        ->required();
    evaluate->add_option("--top-k", eval_k,
                         "rank cutoff for the relevant fraction");
    evaluate->add_option("--out", eval_out, "report output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) {
            escan::IngestStats stats = escan::run_ingest(
                corpus, resources, fielded, triples, std::cerr);
            std::cerr << "ingest: " << stats.succeeded << " records, "
                      << stats.skipped << " skipped\n";
        } else if (*index) {
            escan::run_index(index_fielded, index_out, target);
        } else if (*scan) {
            escan::WeightVector w = weights_text.empty()
                                        ? escan::default_weights()
                                        : escan::WeightVector::parse(
                                              weights_text);
            escan::run_scan(scan_index, scan_resources, scan_measures,
                            opt_of(scan_measure_id), w, top_k, scan_out);
        } else if (*optimize) {
            escan::run_optimize(opt_index, opt_resources, opt_measures,
                                opt_gold, opt_out, opt_of(surface));
        } else if (*match) {
            escan::run_match(match_triples, match_resources, match_measures,
                             opt_of(match_measure_id), opt_of(ranked),
                             embeddings, threshold, confidence_min, match_out,
                             std::cerr);
        } else if (*evaluate) {
            escan::run_evaluate(eval_verdicts, eval_manual, eval_k, eval_out);
        }
    } catch (const escan::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
