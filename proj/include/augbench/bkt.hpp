#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augbench/matrix.hpp"

namespace augbench {

// Classic four-parameter knowledge-tracing model (no forgetting), one set per
// skill/topic.
struct BktParams {
    double p_init;
    double p_learn;
    double p_guess;
    double p_slip;

    // validates all fields in [0,1] and rejects the degenerate combination
    // p_guess + (1 - p_slip) == 0
    static BktParams create(double init, double learn, double guess, double slip);
};

// One observation step: Bayesian posterior given the response, then the
// learning transition. Result is in [0,1] for any valid inputs.
double bkt_update(const BktParams& params, double mastery, bool correct);

// Ordered correctness sequences per student, keyed by topic id. Topics a
// student never attempted are simply absent.
struct StudentResponses {
    std::string student_id;
    std::map<std::string, std::vector<std::uint8_t>> by_topic;
};

// One column per topic (in `topic_order`), one row per student; each entry is
// the mastery estimate after folding bkt_update over the student's sequence,
// starting from p_init. Missing topics impute p_init (the no-evidence
// posterior). Errors on a response for a topic absent from `params`.
Matrix bkt_features(const std::vector<StudentResponses>& students,
                    const std::map<std::string, BktParams>& params,
                    const std::vector<std::string>& topic_order);

// Grid-search fit for one topic's sequences, maximizing response
// log-likelihood: init/learn over {0,0.05,...,1}, guess/slip over
// {0,0.05,...,0.5}.
BktParams fit_bkt(const std::vector<std::vector<std::uint8_t>>& sequences);

// Parameter file: CSV with columns topic,p_init,p_learn,p_guess,p_slip.
std::map<std::string, BktParams> load_bkt_params(const std::string& path);
void save_bkt_params(const std::map<std::string, BktParams>& params, const std::string& path);

// Response log: CSV with columns student,topic,correct (0/1), rows in
// observation order. Students are returned in first-appearance order.
std::vector<StudentResponses> load_responses(const std::string& path);

}  // namespace augbench
