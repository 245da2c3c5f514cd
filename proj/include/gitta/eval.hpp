#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <future>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "gitta/error.hpp"
#include "gitta/grammar.hpp"
#include "gitta/induction.hpp"

namespace gitta {

struct ExperimentConfig {
    std::vector<std::size_t> sample_sizes{25, 50, 100};
    std::size_t runs = 5;
    double ratio = default_ratio;
    std::optional<std::size_t> max_height;  // defaults to the reference grammar's depth
    std::uint64_t seed = 0;
    std::size_t cap = default_enumeration_cap;
    std::size_t threads = 0;  // 0: hardware concurrency
};

struct RunMetrics {
    std::size_t in_lg = 0;
    std::size_t not_in_lg = 0;
    std::size_t rules = 0;

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct SizeResult {
    std::size_t sample_size = 0;
    std::size_t median_in_lg = 0;
    std::size_t median_not_in_lg = 0;
    std::size_t median_rules = 0;
    std::vector<RunMetrics> runs;

    friend bool operator==(const SizeResult&, const SizeResult&) = default;
};

struct GrammarReport {
    std::string name;
    std::size_t language_size = 0;    // |L_G|
    std::size_t reference_rules = 0;  // #R_G
    std::vector<SizeResult> sizes;

    friend bool operator==(const GrammarReport&, const GrammarReport&) = default;
};

struct EvalReport {
    std::vector<GrammarReport> grammars;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct LanguageComparison {
    std::size_t in_lg = 0;      // |L_I ∩ L_G|
    std::size_t not_in_lg = 0;  // |L_I \ L_G|
};

inline LanguageComparison compare_languages(const LanguageSet& induced, const LanguageSet& reference) {
    if (induced.truncated || reference.truncated)
        throw input_error("compare_languages: enumeration hit the cap; rerun with a larger cap");
    LanguageComparison out;
    for (const auto& s : induced.sentences) {
        if (reference.sentences.count(s))
            ++out.in_lg;
        else
            ++out.not_in_lg;
    }
    return out;
}

inline LanguageComparison compare_languages(const Grammar& induced, const Grammar& reference,
                                            std::size_t cap = default_enumeration_cap) {
    return compare_languages(enumerate_language(induced, cap), enumerate_language(reference, cap));
}

// Lower median (the middle element for odd counts).
inline std::size_t lower_median(std::vector<std::size_t> values) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

// Seed for run `run` at sample size `size`, so every report cell is
// reproducible on its own.
inline std::uint64_t run_seed(std::uint64_t seed, std::size_t size, std::size_t run) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ size) ^ run);
}

// Uniform subset of `language` of the given size, drawn without replacement.
inline std::vector<std::string> sample_language(const LanguageSet& language, std::size_t size, std::uint64_t seed) {
    if (size > language.sentences.size())
        throw input_error("sample size " + std::to_string(size) + " exceeds |L_G| = " + std::to_string(language.sentences.size()));
    std::mt19937_64 engine(seed);
    std::vector<std::string> sample;
    std::sample(language.sentences.begin(), language.sentences.end(), std::back_inserter(sample), size, engine);
    return sample;
}

inline RunMetrics evaluate_sample(const std::vector<std::string>& sample, const LanguageSet& reference,
                                  const ExperimentConfig& config, std::size_t max_height) {
    Grammar induced = induce_grammar(sample, config.ratio, max_height);
    auto cmp = compare_languages(enumerate_language(induced, config.cap), reference);
    return RunMetrics{cmp.in_lg, cmp.not_in_lg, rule_count(induced)};
}

// For each sample size, induces `runs` grammars from random subsets of the
// reference language and reports medians of |L_I ∩ L_G|, |L_I \ L_G| and #R_I.
inline EvalReport run_experiment(const Grammar& reference, const ExperimentConfig& config, const std::string& name = "grammar") {
    if (config.runs == 0) throw input_error("run_experiment: runs must be at least 1");
    const LanguageSet language = enumerate_language(reference, config.cap);
    if (language.truncated) throw input_error("run_experiment: reference language exceeds the enumeration cap");
    for (auto n : config.sample_sizes) {
        if (n == 0) throw input_error("run_experiment: sample sizes must be positive");
        if (n > language.sentences.size())
            throw input_error("run_experiment: sample size " + std::to_string(n) + " exceeds |L_G| = " +
                              std::to_string(language.sentences.size()));
    }
    const std::size_t max_height = config.max_height.value_or(grammar_depth(reference));

    struct Job {
        std::size_t size_index, run;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < config.sample_sizes.size(); ++s)
        for (std::size_t k = 0; k < config.runs; ++k) jobs.push_back({s, k});

    std::vector<RunMetrics> metrics(jobs.size());
    auto work = [&](std::size_t j) {
        const std::size_t n = config.sample_sizes[jobs[j].size_index];
        auto sample = sample_language(language, n, run_seed(config.seed, n, jobs[j].run));
        metrics[j] = evaluate_sample(sample, language, config, max_height);
    };
    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs.size());
    if (threads <= 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) work(j);
    } else {
        std::vector<std::future<void>> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.push_back(std::async(std::launch::async, [&, t] {
                for (std::size_t j = t; j < jobs.size(); j += threads) work(j);
            }));
        }
        for (auto& w : workers) w.get();
    }

    GrammarReport g{name, language.sentences.size(), rule_count(reference), {}};
    for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
        SizeResult r;
        r.sample_size = config.sample_sizes[s];
        std::vector<std::size_t> in, out, rules;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].size_index != s) continue;
            r.runs.push_back(metrics[j]);
            in.push_back(metrics[j].in_lg);
            out.push_back(metrics[j].not_in_lg);
            rules.push_back(metrics[j].rules);
        }
        r.median_in_lg = lower_median(in);
        r.median_not_in_lg = lower_median(out);
        r.median_rules = lower_median(rules);
        g.sizes.push_back(std::move(r));
    }
    return EvalReport{{std::move(g)}};
}

enum class ReportFormat { csv, json, markdown };

namespace detail {

inline std::vector<std::size_t> report_sizes(const EvalReport& report) {
    std::vector<std::size_t> sizes;
    for (const auto& g : report.grammars)
        for (const auto& s : g.sizes)
            if (std::find(sizes.begin(), sizes.end(), s.sample_size) == sizes.end()) sizes.push_back(s.sample_size);
    return sizes;
}

inline const SizeResult* find_size(const GrammarReport& g, std::size_t n) {
    for (const auto& s : g.sizes)
        if (s.sample_size == n) return &s;
    return nullptr;
}

inline std::vector<std::vector<std::string>> report_rows(const EvalReport& report, bool markdown) {
    const auto sizes = report_sizes(report);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"grammar", markdown ? "#L_G" : "L_G", markdown ? "#R_G" : "R_G"};
    for (auto n : sizes) {
        const auto suffix = "@" + std::to_string(n);
        header.push_back((markdown ? "∈L_G" : "in_LG") + suffix);
        header.push_back((markdown ? "∉L_G" : "not_in_LG") + suffix);
        header.push_back((markdown ? "#R_I" : "R_I") + suffix);
    }
    rows.push_back(std::move(header));
    for (const auto& g : report.grammars) {
        std::vector<std::string> row{g.name, std::to_string(g.language_size), std::to_string(g.reference_rules)};
        for (auto n : sizes) {
            if (const auto* s = find_size(g, n)) {
                row.push_back(std::to_string(s->median_in_lg));
                row.push_back(std::to_string(s->median_not_in_lg));
                row.push_back(std::to_string(s->median_rules));
            } else {
                row.insert(row.end(), {"", "", ""});
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

inline std::string format_report(const EvalReport& report, ReportFormat format) {
    std::ostringstream out;
    switch (format) {
        case ReportFormat::json: {
            nlohmann::json doc = nlohmann::json::array();
            for (const auto& g : report.grammars) {
                nlohmann::json sizes = nlohmann::json::array();
                for (const auto& s : g.sizes) {
                    nlohmann::json runs = nlohmann::json::array();
                    for (const auto& r : s.runs) runs.push_back({{"in_LG", r.in_lg}, {"not_in_LG", r.not_in_lg}, {"rules", r.rules}});
                    sizes.push_back({{"sample_size", s.sample_size},
                                     {"median_in_LG", s.median_in_lg},
                                     {"median_not_in_LG", s.median_not_in_lg},
                                     {"median_rules", s.median_rules},
                                     {"runs", runs}});
                }
                doc.push_back({{"grammar", g.name}, {"L_G", g.language_size}, {"R_G", g.reference_rules}, {"sizes", sizes}});
            }
            out << doc.dump(2) << '\n';
            break;
        }
        case ReportFormat::csv:
            for (const auto& row : detail::report_rows(report, false)) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(row[i]);
                out << '\n';
            }
            break;
        case ReportFormat::markdown: {
            auto rows = detail::report_rows(report, true);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                out << '|';
                for (const auto& cell : rows[r]) out << ' ' << cell << " |";
                out << '\n';
                if (r == 0) {
                    out << '|';
                    for (std::size_t i = 0; i < rows[r].size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
                    out << '\n';
                }
            }
            break;
        }
    }
    return out.str();
}

}  // namespace gitta
