// gitta: induce, inspect and evaluate template grammars from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gitta/gitta.hpp"

namespace {

enum Exit { ok = 0, usage = 1, unsupported = 2, invariant = 3 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gitta::input_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// One sentence per line; blank lines are skipped.
std::vector<std::string> read_corpus(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        auto normalized = gitta::normalize_whitespace(line);
        if (!normalized.empty()) lines.push_back(std::move(normalized));
    }
    if (lines.empty()) throw gitta::input_error("corpus '" + path + "' contains no sentences");
    return lines;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || v == 0) throw gitta::input_error("bad sample size '" + item + "'");
        sizes.push_back(static_cast<std::size_t>(v));
    }
    if (sizes.empty()) throw gitta::input_error("--sizes needs at least one value");
    return sizes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Template-tree grammar induction"};
    app.require_subcommand(1);

    std::string corpus, grammar_path, out_path;
    double ratio = gitta::default_ratio;
    std::optional<std::size_t> max_height;
    std::size_t cap = gitta::default_enumeration_cap;
    std::uint64_t seed = 0;
    std::size_t count = 1;
    std::string sizes = "25,50,100";
    std::size_t runs = 5;
    std::string format = "markdown";

    auto* induce = app.add_subcommand("induce", "Induce a Tracery grammar from a corpus (one sentence per line)");
    induce->add_option("corpus", corpus, "Corpus file")->required();
    induce->add_option("--ratio", ratio, "Jaccard threshold for merging slots")->check(CLI::Range(0.0, 1.0));
    induce->add_option("--max-height", max_height, "Maximum template tree height")->check(CLI::PositiveNumber);
    induce->add_option("--out", out_path, "Write the grammar here instead of stdout");

    auto* tree = app.add_subcommand("tree", "Print the learned template tree");
    tree->add_option("corpus", corpus, "Corpus file")->required();
    tree->add_option("--max-height", max_height, "Maximum template tree height")->check(CLI::PositiveNumber);

    auto* enumerate = app.add_subcommand("enumerate", "Print every sentence of a grammar, sorted");
    enumerate->add_option("grammar", grammar_path, "Tracery JSON file")->required();
    enumerate->add_option("--cap", cap, "Maximum number of sentences")->check(CLI::PositiveNumber);

    auto* generate = app.add_subcommand("generate", "Print random sentences of a grammar");
    generate->add_option("grammar", grammar_path, "Tracery JSON file")->required();
    generate->add_option("--seed", seed, "Random seed")->required();
    generate->add_option("--count", count, "Number of sentences");

    auto* eval = app.add_subcommand("eval", "Reverse-engineer a grammar from samples of its language");
    eval->add_option("grammar", grammar_path, "Tracery JSON file")->required();
    eval->add_option("--sizes", sizes, "Comma-separated sample sizes");
    eval->add_option("--runs", runs, "Runs per sample size")->check(CLI::PositiveNumber);
    eval->add_option("--ratio", ratio, "Jaccard threshold for merging slots")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--max-height", max_height, "Tree height (default: depth of the grammar)")->check(CLI::PositiveNumber);
    eval->add_option("--seed", seed, "Random seed");
    eval->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json", "markdown"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    try {
        if (*induce) {
            auto g = gitta::induce_grammar(read_corpus(corpus), ratio, max_height);
            const auto json = gitta::to_tracery(g) + "\n";
            if (out_path.empty()) {
                std::cout << json;
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw gitta::input_error("cannot write '" + out_path + "'");
                out << json;
            }
        } else if (*tree) {
            auto root = gitta::learn_template_tree(read_corpus(corpus), max_height);
            std::cout << gitta::dump_tree(root);
        } else if (*enumerate) {
            auto language = gitta::enumerate_language(gitta::parse_tracery(read_file(grammar_path)), cap);
            for (const auto& s : language.sentences) std::cout << s << '\n';
            if (language.truncated) std::cerr << "warning: output truncated at " << cap << " sentences\n";
        } else if (*generate) {
            auto g = gitta::parse_tracery(read_file(grammar_path));
            std::mt19937_64 engine(seed);
            for (std::size_t i = 0; i < count; ++i) std::cout << gitta::generate_random(g, engine) << '\n';
        } else if (*eval) {
            auto g = gitta::parse_tracery(read_file(grammar_path));
            gitta::ExperimentConfig config;
            config.sample_sizes = parse_sizes(sizes);
            config.runs = runs;
            config.ratio = ratio;
            config.max_height = max_height;
            config.seed = seed;
            const auto name = std::filesystem::path(grammar_path).stem().string();
            const auto fmt = format == "csv" ? gitta::ReportFormat::csv
                             : format == "json" ? gitta::ReportFormat::json
                                                : gitta::ReportFormat::markdown;
            std::cout << gitta::format_report(gitta::run_experiment(g, config, name), fmt);
        }
    } catch (const gitta::unsupported_grammar_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::unsupported;
    } catch (const gitta::invariant_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return Exit::invariant;
    } catch (const gitta::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::usage;
    }
    return Exit::ok;
}
