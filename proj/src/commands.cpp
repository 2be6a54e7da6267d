#include "escan/commands.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "escan/document_graph.hpp"
#include "escan/embedding.hpp"
#include "escan/errors.hpp"
#include "escan/extraction.hpp"
#include "escan/graph_matcher.hpp"
#include "escan/triple_store.hpp"
#include "escan/tsv.hpp"
#include "escan/weight_optimizer.hpp"

namespace escan {

namespace {

const char* yes_no(bool b) { return b ? "yes" : "no"; }

bool parse_flag(const std::string& value, const std::string& context) {
    if (value == "yes") return true;
    if (value == "no") return false;
    throw IoError("expected yes or no in " + context);
}

std::string compose_text(const std::string& title, const std::string& body) {
    if (title.empty()) return body;
    if (body.empty()) return title;
    return title + ". " + body;
}

Triple to_triple(const std::string& doc_id, const DerivedTriple& d) {
    Triple t;
    t.doc_id = doc_id;
    t.subject_type = d.subject.type;
    t.subject_text = d.subject.surface;
    t.subject_alias = d.subject.alias;
    t.relation = d.relation;
    t.object_type = d.object.type;
    t.object_text = d.object.surface;
    t.object_alias = d.object.alias;
    t.confidence = d.confidence;
    return t;
}

FieldIndex load_nonempty_index(const std::string& path) {
    FieldIndex index = FieldIndex::load(path);
    if (index.doc_count() == 0) {
        throw MissingIndexError("index is empty: " + path);
    }
    return index;
}

}  // namespace

std::vector<MeasureRecord> load_measures(const std::string& path) {
    std::vector<MeasureRecord> measures;
    std::set<std::string> seen;
    for (const auto& line : tsv::read_lines(path)) {
        auto cols = tsv::split(line);
        if ((cols.size() != 2 && cols.size() != 8) || cols[0].empty()) {
            throw IoError("bad measure row: " + line);
        }
        MeasureRecord rec;
        rec.measure_id = cols[0];
        rec.description = cols[1];
        rec.instance.measure_id = cols[0];
        if (cols.size() == 8) {
            rec.instance.population = cols[2];
            rec.instance.denominator_health_status = cols[3];
            rec.instance.change_concept = cols[4];
            rec.instance.numerator_health_status = cols[5];
            rec.instance.output = cols[6];
            rec.instance.utilization = cols[7];
        }
        if (!seen.insert(rec.measure_id).second) {
            throw IoError("duplicate measure id: " + rec.measure_id);
        }
        measures.push_back(std::move(rec));
    }
    if (measures.empty()) throw IoError("measure file has no rows: " + path);
    return measures;
}

const MeasureRecord& select_measure(
    const std::vector<MeasureRecord>& measures,
    const std::optional<std::string>& measure_id) {
    if (!measure_id) {
        if (measures.size() == 1) return measures.front();
        throw Error("the measure file lists several measures; pick one with "
                    "--measure-id");
    }
    for (const MeasureRecord& rec : measures) {
        if (rec.measure_id == *measure_id) return rec;
    }
    throw Error("measure not found: " + *measure_id);
}

WeightVector default_weights() {
    WeightVector w;
    w.w = {0.1, 0.3, 0.2, 1.0, 0.3};
    return w;
}

IngestStats run_ingest(const std::string& corpus_path,
                       const std::string& resources_dir,
                       const std::string& fielded_out,
                       const std::string& triples_out, std::ostream& log) {
    ResourceBundle bundle = ResourceBundle::load(resources_dir);
    IngestStats stats;
    std::vector<FieldedDocument> docs;
    TripleStore store = TripleStore::create(triples_out);
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (const auto& line : tsv::read_lines(corpus_path, false)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = tsv::split(line);
        if (cols.size() != 3 || cols[0].empty()) {
            log << "ingest: line " << line_no
                << ": malformed record, skipped\n";
            ++stats.skipped;
            continue;
        }
        if (!seen.insert(cols[0]).second) {
            log << "ingest: line " << line_no << ": duplicate doc_id "
                << cols[0] << ", skipped\n";
            ++stats.skipped;
            continue;
        }
        std::string text = compose_text(cols[1], cols[2]);
        ExtractionResult ex = extract(text, bundle);
        docs.push_back(fields_from_extraction(cols[0], ex));
        std::vector<Triple> triples;
        triples.reserve(ex.triples.size());
        for (const DerivedTriple& d : ex.triples) {
            triples.push_back(to_triple(cols[0], d));
        }
        store.append(triples);
        ++stats.succeeded;
    }
    if (stats.succeeded == 0) {
        throw IoError("no corpus record could be ingested from " + corpus_path);
    }
    save_fielded_docs(fielded_out, docs);
    return stats;
}

void run_index(const std::string& fielded_path, const std::string& index_out,
               const std::string& target) {
    std::vector<FieldedDocument> docs = load_fielded_docs(fielded_path);
    FieldIndex index = FieldIndex::build(docs, target);
    index.save(index_out);
}

void run_scan(const std::string& index_path, const std::string& resources_dir,
              const std::string& measures_path,
              const std::optional<std::string>& measure_id,
              const WeightVector& weights, std::size_t k,
              const std::string& out_path) {
    FieldIndex index = load_nonempty_index(index_path);
    ResourceBundle bundle = ResourceBundle::load(resources_dir);
    auto measures = load_measures(measures_path);
    const MeasureRecord& rec = select_measure(measures, measure_id);
    FieldedDocument mdoc =
        build_fielded_document(rec.measure_id, rec.description, bundle);
    Query query = Query::from_fielded(mdoc, index.target());
    auto ranked = scan(query, weights, k, index);
    std::string out = "rank\tdoc_id\tscore\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        out += tsv::join({std::to_string(i + 1), ranked[i].first,
                          tsv::fmt_double(ranked[i].second)});
        out += '\n';
    }
    tsv::write_file(out_path, out);
}

void run_optimize(const std::string& index_path,
                  const std::string& resources_dir,
                  const std::string& measures_path,
                  const std::string& gold_path, const std::string& out_path,
                  const std::optional<std::string>& surface_path) {
    FieldIndex index = load_nonempty_index(index_path);
    ResourceBundle bundle = ResourceBundle::load(resources_dir);
    auto measures = load_measures(measures_path);
    CitationGold gold = CitationGold::load(gold_path);
    std::vector<MeasureParts> parts;
    for (const MeasureRecord& rec : measures) {
        const auto* cited = gold.citations(rec.measure_id);
        if (!cited || cited->empty()) continue;
        FieldedDocument mdoc =
            build_fielded_document(rec.measure_id, rec.description, bundle);
        Query query = Query::from_fielded(mdoc, index.target());
        parts.push_back({rec.measure_id, compute_score_parts(query, index)});
    }
    GridSearchResult result = grid_search(parts, gold);
    std::string out =
        "w_keywords\tw_concepts\tw_expansions\tw_relations\tw_cqm_relations\t"
        "mean_mrr\n";
    for (double w : result.best_weights.w) {
        out += tsv::fmt_double(w);
        out += '\t';
    }
    out += tsv::fmt_double(result.best_mean_mrr);
    out += '\n';
    tsv::write_file(out_path, out);
    if (surface_path) {
        tsv::write_file(*surface_path, surface_to_tsv(result.surface));
    }
}

void run_match(const std::string& triples_path,
               const std::string& resources_dir,
               const std::string& measures_path,
               const std::optional<std::string>& measure_id,
               const std::optional<std::string>& ranked_path,
               const std::string& embeddings_path, double threshold,
               double confidence_min, const std::string& out_path,
               std::ostream& warnings) {
    if (!std::filesystem::exists(triples_path)) {
        throw IoError("triple store not found: " + triples_path);
    }
    TripleStore store = TripleStore::open(triples_path);
    std::filesystem::path resources(resources_dir);
    OntologySchema schema = OntologySchema::load(resources / "cqm_schema.txt");
    AcronymTable acronyms = AcronymTable::load(resources / "acronyms.tsv");
    EmbeddingTable embeddings = EmbeddingTable::load(embeddings_path);
    auto measures = load_measures(measures_path);

    std::vector<const MeasureRecord*> targets;
    if (measure_id) {
        targets.push_back(&select_measure(measures, measure_id));
    } else {
        for (const MeasureRecord& rec : measures) targets.push_back(&rec);
    }

    std::vector<std::string> doc_ids = ranked_path
                                           ? load_ranked_doc_ids(*ranked_path)
                                           : store.doc_ids();

    std::string out =
        "measure_id\tdoc_id\tnumerator_matched\tdenominator_matched\t"
        "opportunity_matched\trelevant\tstringent_relevant\n";
    for (const MeasureRecord* rec : targets) {
        auto gold_graphs = schema.instantiate_measure_graphs(rec->instance);
        std::vector<std::string> rows(doc_ids.size());
        std::vector<std::string> row_warnings(doc_ids.size());
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(doc_ids.size()); ++i) {
            const std::string& doc_id = doc_ids[static_cast<std::size_t>(i)];
            DocumentGraph graph = build_document_graph(
                store.load(doc_id), acronyms, confidence_min);
            graph.doc_id = doc_id;  // empty triple lists keep the right id
            std::ostringstream warn;
            MatchVerdict v = judge_relevancy(graph, schema, gold_graphs,
                                             embeddings, threshold, &warn);
            rows[static_cast<std::size_t>(i)] =
                tsv::join({rec->measure_id, doc_id,
                           yes_no(v.numerator_matched),
                           yes_no(v.denominator_matched),
                           yes_no(v.opportunity_matched), yes_no(v.relevant),
                           yes_no(v.stringent_relevant)}) +
                "\n";
            row_warnings[static_cast<std::size_t>(i)] = warn.str();
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out += rows[i];
            if (!row_warnings[i].empty()) warnings << row_warnings[i];
        }
    }
    tsv::write_file(out_path, out);
}

void run_evaluate(const std::string& verdicts_path,
                  const std::string& manual_path, std::size_t k,
                  const std::string& out_path) {
    std::vector<VerdictRow> rows = load_verdicts(verdicts_path);
    ManualTruth manual = ManualTruth::load(manual_path);
    EvalReport report = evaluate(rows, manual, k);
    tsv::write_file(out_path, eval_report_to_tsv(report));
}

std::vector<VerdictRow> load_verdicts(const std::string& path) {
    std::vector<VerdictRow> rows;
    bool first = true;
    for (const auto& line : tsv::read_lines(path)) {
        if (first) {  // header row
            first = false;
            continue;
        }
        auto cols = tsv::split(line);
        if (cols.size() != 7) throw IoError("bad verdict row: " + line);
        VerdictRow row;
        row.measure_id = cols[0];
        row.doc_id = cols[1];
        row.numerator = parse_flag(cols[2], "verdict row '" + line + "'");
        row.denominator = parse_flag(cols[3], "verdict row '" + line + "'");
        row.opportunity = parse_flag(cols[4], "verdict row '" + line + "'");
        row.relevant = parse_flag(cols[5], "verdict row '" + line + "'");
        row.stringent = parse_flag(cols[6], "verdict row '" + line + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> load_ranked_doc_ids(const std::string& path) {
    std::vector<std::string> ids;
    bool first = true;
    for (const auto& line : tsv::read_lines(path)) {
        if (first) {
            first = false;
            continue;
        }
        auto cols = tsv::split(line);
        if (cols.size() != 3) throw IoError("bad scan report row: " + line);
        ids.push_back(cols[1]);
    }
    return ids;
}

}  // namespace escan
