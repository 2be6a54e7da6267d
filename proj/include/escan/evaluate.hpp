#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace escan {

// Manual-review adjudications: measure_id TAB doc_id TAB yes|no.
struct ManualTruth {
    std::map<std::string, std::map<std::string, bool>> by_measure;

    static ManualTruth load(const std::string& path);
};

// One row of a verdict report, in report order.
struct VerdictRow {
    std::string measure_id;
    std::string doc_id;
    bool numerator = false;
    bool denominator = false;
    bool opportunity = false;
    bool relevant = false;
    bool stringent = false;
};

struct MeasureEval {
    std::string measure_id;
    std::size_t auto_relevant = 0;   // |A|: docs the system judged relevant
    std::size_t manual_relevant = 0;  // |T|: docs the manual review marked yes
    std::size_t agreed = 0;           // |A ∩ T|
    double precision = 0.0;           // |A ∩ T| / |A|, 0 when A is empty
    double recall = 0.0;              // |A ∩ T| / |T|, 0 when T is empty
    double relevant_fraction = 0.0;   // relevant among the first k rows, / k
};

struct EvalReport {
    std::vector<MeasureEval> measures;  // ordered by measure_id
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_relevant_fraction = 0.0;
};

// The manual file is the truth. Measures are those present in the verdict
// rows; rows keep their file order for the top-k fraction. Throws
// EmptyManualError when the manual truth has no rows at all.
EvalReport evaluate(const std::vector<VerdictRow>& rows,
                    const ManualTruth& manual, std::size_t k);

std::string eval_report_to_tsv(const EvalReport& report);

}  // namespace escan
