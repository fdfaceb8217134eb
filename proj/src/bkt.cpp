#include "augbench/bkt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace augbench {

BktParams BktParams::create(double init, double learn, double guess, double slip) {
    for (double v : {init, learn, guess, slip})
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("BktParams: probabilities must be in [0,1]");
    if (guess + (1.0 - slip) == 0.0)
        throw std::invalid_argument("BktParams: degenerate p_guess + (1 - p_slip) == 0");
    return BktParams{init, learn, guess, slip};
}

double bkt_update(const BktParams& p, double mastery, bool correct) {
    if (!(mastery >= 0.0 && mastery <= 1.0))
        throw std::invalid_argument("bkt_update: mastery must be in [0,1]");
    double posterior;
    if (correct) {
        const double denom = mastery * (1.0 - p.p_slip) + (1.0 - mastery) * p.p_guess;
        posterior = denom > 0.0 ? mastery * (1.0 - p.p_slip) / denom : mastery;
    } else {
        const double denom = mastery * p.p_slip + (1.0 - mastery) * (1.0 - p.p_guess);
        posterior = denom > 0.0 ? mastery * p.p_slip / denom : mastery;
    }
    const double next = posterior + (1.0 - posterior) * p.p_learn;
    return std::clamp(next, 0.0, 1.0);
}

Matrix bkt_features(const std::vector<StudentResponses>& students,
                    const std::map<std::string, BktParams>& params,
                    const std::vector<std::string>& topic_order) {
    for (const auto& student : students)
        for (const auto& [topic, seq] : student.by_topic)
            if (!params.count(topic))
                throw std::invalid_argument("bkt_features: unknown topic identifier '" + topic +
                                            "'");
    Matrix out(students.size(), topic_order.size());
    for (std::size_t s = 0; s < students.size(); ++s) {
        for (std::size_t t = 0; t < topic_order.size(); ++t) {
            const auto pit = params.find(topic_order[t]);
            if (pit == params.end())
                throw std::invalid_argument("bkt_features: no parameters for topic '" +
                                            topic_order[t] + "'");
            const BktParams& p = pit->second;
            double mastery = p.p_init;  // no-evidence value for missing topics
            const auto rit = students[s].by_topic.find(topic_order[t]);
            if (rit != students[s].by_topic.end())
                for (std::uint8_t correct : rit->second)
                    mastery = bkt_update(p, mastery, correct != 0);
            out(s, t) = mastery;
        }
    }
    return out;
}

namespace {

double sequence_log_likelihood(const BktParams& p,
                               const std::vector<std::vector<std::uint8_t>>& sequences) {
    double ll = 0.0;
    for (const auto& seq : sequences) {
        double mastery = p.p_init;
        for (std::uint8_t correct : seq) {
            double prob_correct = mastery * (1.0 - p.p_slip) + (1.0 - mastery) * p.p_guess;
            prob_correct = std::clamp(prob_correct, 1e-12, 1.0 - 1e-12);
            ll += std::log(correct ? prob_correct : 1.0 - prob_correct);
            mastery = bkt_update(p, mastery, correct != 0);
        }
    }
    return ll;
}

}  // namespace

BktParams fit_bkt(const std::vector<std::vector<std::uint8_t>>& sequences) {
    if (sequences.empty()) throw std::invalid_argument("fit_bkt: no sequences");
    BktParams best = BktParams::create(0.5, 0.1, 0.1, 0.1);
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int init = 0; init <= 20; ++init) {
        for (int learn = 0; learn <= 20; ++learn) {
            for (int guess = 0; guess <= 10; ++guess) {
                for (int slip = 0; slip <= 10; ++slip) {
                    const BktParams p{init * 0.05, learn * 0.05, guess * 0.05, slip * 0.05};
                    const double ll = sequence_log_likelihood(p, sequences);
                    if (ll > best_ll) {
                        best_ll = ll;
                        best = p;
                    }
                }
            }
        }
    }
    return best;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::map<std::string, BktParams> load_bkt_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_bkt_params: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || split_line(line) != std::vector<std::string>{
                                       "topic", "p_init", "p_learn", "p_guess", "p_slip"})
        throw std::runtime_error("load_bkt_params: expected header topic,p_init,p_learn,p_guess,p_slip");
    std::map<std::string, BktParams> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cells.size() != 5)
            throw std::runtime_error("load_bkt_params: wrong field count in '" + line + "'");
        out.emplace(cells[0], BktParams::create(std::stod(cells[1]), std::stod(cells[2]),
                                                std::stod(cells[3]), std::stod(cells[4])));
    }
    return out;
}

void save_bkt_params(const std::map<std::string, BktParams>& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_bkt_params: cannot open " + path);
    out << "topic,p_init,p_learn,p_guess,p_slip\n";
    for (const auto& [topic, p] : params)
        out << topic << ',' << p.p_init << ',' << p.p_learn << ',' << p.p_guess << ','
            << p.p_slip << '\n';
}

std::vector<StudentResponses> load_responses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_responses: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) ||
        split_line(line) != std::vector<std::string>{"student", "topic", "correct"})
        throw std::runtime_error("load_responses: expected header student,topic,correct");
    std::vector<StudentResponses> out;
    std::map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cells.size() != 3)
            throw std::runtime_error("load_responses: wrong field count in '" + line + "'");
        if (cells[2] != "0" && cells[2] != "1")
            throw std::runtime_error("load_responses: correctness must be 0 or 1, got '" +
                                     cells[2] + "'");
        auto [it, inserted] = index.try_emplace(cells[0], out.size());
        if (inserted) out.push_back(StudentResponses{cells[0], {}});
        out[it->second].by_topic[cells[1]].push_back(cells[2] == "1" ? 1 : 0);
    }
    return out;
}

}  // namespace augbench
