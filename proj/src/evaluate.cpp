#include "escan/evaluate.hpp"

#include <algorithm>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

bool parse_yes_no(const std::string& value, const std::string& context) {
    std::string v = tsv::to_lower(value);
    if (v == "yes") return true;
    if (v == "no") return false;
    throw IoError("expected yes or no in " + context + ", got: " + value);
}

}  // namespace

ManualTruth ManualTruth::load(const std::string& path) {
    ManualTruth truth;
    for (const auto& line : tsv::read_lines(path)) {
        auto cols = tsv::split(line);
        if (cols.size() != 3 || cols[0].empty() || cols[1].empty()) {
            throw IoError("bad manual-review row: " + line);
        }
        truth.by_measure[cols[0]][cols[1]] =
            parse_yes_no(cols[2], "manual-review row '" + line + "'");
    }
    return truth;
}

EvalReport evaluate(const std::vector<VerdictRow>& rows,
                    const ManualTruth& manual, std::size_t k) {
    bool manual_has_rows = false;
    for (const auto& [measure, docs] : manual.by_measure) {
        if (!docs.empty()) manual_has_rows = true;
    }
    if (!manual_has_rows) {
        throw EmptyManualError("manual-review file has no adjudications");
    }

    // Group verdict rows per measure, keeping file order within a measure.
    std::map<std::string, std::vector<const VerdictRow*>> grouped;
    for (const VerdictRow& row : rows) {
        grouped[row.measure_id].push_back(&row);
    }

    EvalReport report;
    for (const auto& [measure_id, measure_rows] : grouped) {
        MeasureEval ev;
        ev.measure_id = measure_id;
        const std::map<std::string, bool>* truth = nullptr;
        if (auto it = manual.by_measure.find(measure_id);
            it != manual.by_measure.end()) {
            truth = &it->second;
        }
        std::size_t top_relevant = 0;
        for (std::size_t i = 0; i < measure_rows.size(); ++i) {
            const VerdictRow& row = *measure_rows[i];
            if (row.relevant) {
                ++ev.auto_relevant;
                if (i < k) ++top_relevant;
                if (truth) {
                    auto it = truth->find(row.doc_id);
                    if (it != truth->end() && it->second) ++ev.agreed;
                }
            }
        }
        if (truth) {
            for (const auto& [doc, yes] : *truth) {
                if (yes) ++ev.manual_relevant;
            }
        }
        ev.precision = ev.auto_relevant
                           ? static_cast<double>(ev.agreed) /
                                 static_cast<double>(ev.auto_relevant)
                           : 0.0;
        ev.recall = ev.manual_relevant
                        ? static_cast<double>(ev.agreed) /
                              static_cast<double>(ev.manual_relevant)
                        : 0.0;
        ev.relevant_fraction =
            k ? static_cast<double>(top_relevant) / static_cast<double>(k)
              : 0.0;
        report.measures.push_back(std::move(ev));
    }

    if (!report.measures.empty()) {
        double p = 0.0;
        double r = 0.0;
        double f = 0.0;
        for (const MeasureEval& ev : report.measures) {
            p += ev.precision;
            r += ev.recall;
            f += ev.relevant_fraction;
        }
        auto n = static_cast<double>(report.measures.size());
        report.mean_precision = p / n;
        report.mean_recall = r / n;
        report.mean_relevant_fraction = f / n;
    }
    return report;
}

std::string eval_report_to_tsv(const EvalReport& report) {
    std::string out =
        "measure_id\tauto_relevant\tmanual_relevant\tagreed\tprecision\t"
        "recall\trelevant_fraction\n";
    auto row = [&out](const std::string& id, std::size_t a, std::size_t m,
                      std::size_t g, double p, double r, double f) {
        out += tsv::join({id, std::to_string(a), std::to_string(m),
                          std::to_string(g), tsv::fmt_double(p),
                          tsv::fmt_double(r), tsv::fmt_double(f)});
        out += '\n';
    };
    std::size_t total_auto = 0;
    std::size_t total_manual = 0;
    std::size_t total_agreed = 0;
    for (const MeasureEval& ev : report.measures) {
        row(ev.measure_id, ev.auto_relevant, ev.manual_relevant, ev.agreed,
            ev.precision, ev.recall, ev.relevant_fraction);
        total_auto += ev.auto_relevant;
        total_manual += ev.manual_relevant;
        total_agreed += ev.agreed;
    }
    row("MEAN", total_auto, total_manual, total_agreed, report.mean_precision,
        report.mean_recall, report.mean_relevant_fraction);
    return out;
}

}  // namespace escan
