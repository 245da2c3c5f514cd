#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gitta/error.hpp"
#include "gitta/template.hpp"

namespace gitta {

struct Symbol {
    bool nonterminal = false;
    std::string text;  // token text or non-terminal name

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
    friend bool operator==(const Symbol&, const Symbol&) = default;
};

inline Symbol terminal(std::string text) { return Symbol{false, std::move(text)}; }
inline Symbol nonterminal(std::string name) { return Symbol{true, std::move(name)}; }

using Production = std::vector<Symbol>;

// Context-free grammar with normalized (disjunction-free) productions.
struct Grammar {
    std::string start = "origin";
    std::map<std::string, std::vector<Production>> rules;

    friend bool operator==(const Grammar&, const Grammar&) = default;
};

struct LanguageSet {
    std::set<std::string> sentences;  // whitespace-normalized
    bool truncated = false;           // the enumeration cap was hit
};

// Either a topological order (every non-terminal before the ones that
// reference it) or the first cycle found.
struct RecursionCheck {
    std::vector<std::string> order;
    std::vector<std::string> cycle;

    bool acyclic() const { return cycle.empty(); }
};

inline constexpr std::size_t default_enumeration_cap = 1'000'000;

namespace detail {

inline Production parse_rule_body(const std::string& rule, std::string_view body) {
    Production production;
    std::string text;
    auto flush = [&] {
        for (auto& w : split_whitespace(text)) production.push_back(terminal(std::move(w)));
        text.clear();
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '[' || c == ']')
            throw unsupported_grammar_error("rule '" + rule + "' uses unsupported Tracery actions: " + std::string(body));
        if (c != '#') {
            text += c;
            continue;
        }
        const auto close = body.find('#', i + 1);
        if (close == std::string_view::npos)
            throw unsupported_grammar_error("rule '" + rule + "' has an unterminated #reference#: " + std::string(body));
        std::string name(body.substr(i + 1, close - i - 1));
        if (auto dot = name.find('.'); dot != std::string::npos) name.erase(dot);
        if (name.empty()) throw unsupported_grammar_error("rule '" + rule + "' has an empty #reference#");
        flush();
        production.push_back(nonterminal(std::move(name)));
        i = close;
    }
    flush();
    return production;
}

inline std::string render_rule_body(const Production& production) {
    std::string out;
    for (const auto& s : production) {
        if (!out.empty()) out += ' ';
        out += s.nonterminal ? "#" + s.text + "#" : s.text;
    }
    return out;
}

}  // namespace detail

// Reads a Tracery-style grammar: a JSON object mapping rule names to a string
// or an array of strings, `#name#` references, `origin` as start symbol.
// Modifiers (`#name.capitalize#`) are dropped, keeping the bare name.
inline Grammar parse_tracery(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw unsupported_grammar_error(std::string("malformed grammar JSON: ") + e.what());
    }
    if (!doc.is_object()) throw unsupported_grammar_error("grammar JSON must be an object of rules");

    Grammar g;
    for (const auto& [name, body] : doc.items()) {
        auto& productions = g.rules[name];
        if (body.is_string()) {
            productions.push_back(detail::parse_rule_body(name, body.get<std::string>()));
        } else if (body.is_array()) {
            for (const auto& alt : body) {
                if (!alt.is_string()) throw unsupported_grammar_error("rule '" + name + "' has a non-string alternative");
                productions.push_back(detail::parse_rule_body(name, alt.get<std::string>()));
            }
            if (productions.empty()) throw unsupported_grammar_error("rule '" + name + "' has no alternatives");
        } else {
            throw unsupported_grammar_error("rule '" + name + "' must be a string or an array of strings");
        }
    }
    if (!g.rules.count(g.start)) throw unsupported_grammar_error("grammar has no 'origin' rule");
    for (const auto& [name, productions] : g.rules)
        for (const auto& p : productions)
            for (const auto& s : p)
                if (s.nonterminal && !g.rules.count(s.text))
                    throw unsupported_grammar_error("rule '" + name + "' references undefined rule '" + s.text + "'");
    return g;
}

// Serializes in the dialect read by parse_tracery. The start symbol is
// written as `origin`.
inline std::string to_tracery(const Grammar& g) {
    auto rename = [&](const std::string& name) {
        if (name == g.start) return std::string("origin");
        if (name == "origin") return g.start;
        return name;
    };
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [name, productions] : g.rules) {
        std::vector<std::string> bodies;
        for (auto p : productions) {
            for (auto& s : p)
                if (s.nonterminal) s.text = rename(s.text);
            bodies.push_back(detail::render_rule_body(p));
        }
        if (bodies.size() == 1)
            doc[rename(name)] = bodies.front();
        else
            doc[rename(name)] = bodies;
    }
    return doc.dump(2);
}

inline RecursionCheck check_nonrecursive(const Grammar& g) {
    RecursionCheck result;
    enum class Mark { unseen, active, done };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;

    auto visit = [&](auto&& self, const std::string& name) -> bool {
        mark[name] = Mark::active;
        stack.push_back(name);
        if (auto it = g.rules.find(name); it != g.rules.end()) {
            for (const auto& p : it->second) {
                for (const auto& s : p) {
                    if (!s.nonterminal) continue;
                    const Mark m = mark[s.text];
                    if (m == Mark::active) {
                        auto from = std::find(stack.begin(), stack.end(), s.text);
                        result.cycle.assign(from, stack.end());
                        return false;
                    }
                    if (m == Mark::unseen && !self(self, s.text)) return false;
                }
            }
        }
        stack.pop_back();
        mark[name] = Mark::done;
        result.order.push_back(name);
        return true;
    };

    for (const auto& [name, productions] : g.rules) {
        if (mark[name] != Mark::unseen) continue;
        if (!visit(visit, name)) {
            result.order.clear();
            return result;
        }
    }
    return result;
}

inline std::size_t rule_count(const Grammar& g) {
    std::size_t n = 0;
    for (const auto& [name, productions] : g.rules) n += productions.size();
    return n;
}

inline std::set<std::string> reachable_nonterminals(const Grammar& g) {
    std::set<std::string> seen{g.start};
    std::vector<std::string> todo{g.start};
    while (!todo.empty()) {
        auto name = todo.back();
        todo.pop_back();
        auto it = g.rules.find(name);
        if (it == g.rules.end()) continue;
        for (const auto& p : it->second)
            for (const auto& s : p)
                if (s.nonterminal && seen.insert(s.text).second) todo.push_back(s.text);
    }
    return seen;
}

// Number of non-terminals on the longest reference chain from the start
// symbol (a grammar without references has depth 1).
inline std::size_t grammar_depth(const Grammar& g) {
    auto check = check_nonrecursive(g);
    if (!check.acyclic()) throw unsupported_grammar_error("grammar_depth: grammar is recursive");
    std::map<std::string, std::size_t> depth;
    for (const auto& name : check.order) {
        std::size_t d = 1;
        for (const auto& p : g.rules.at(name))
            for (const auto& s : p)
                if (s.nonterminal) d = std::max(d, depth[s.text] + 1);
        depth[name] = d;
    }
    return depth[g.start];
}

namespace detail {

inline std::string join_words(const std::string& x, const std::string& y) {
    if (x.empty()) return y;
    if (y.empty()) return x;
    return x + ' ' + y;
}

}  // namespace detail

// Bottom-up enumeration over a topological order. Stops adding sentences
// once `cap` is reached and marks the result truncated.
inline LanguageSet enumerate_language(const Grammar& g, std::size_t cap = default_enumeration_cap) {
    auto check = check_nonrecursive(g);
    if (!check.acyclic()) throw unsupported_grammar_error("enumerate_language: grammar is recursive");
    if (!g.rules.count(g.start)) throw unsupported_grammar_error("enumerate_language: missing start rule");
    const auto reachable = reachable_nonterminals(g);

    bool truncated = false;
    std::map<std::string, std::set<std::string>> expansions;
    for (const auto& name : check.order) {
        if (!reachable.count(name)) continue;
        auto& out = expansions[name];
        for (const auto& production : g.rules.at(name)) {
            std::set<std::string> partial{""};
            for (const auto& s : production) {
                std::set<std::string> next;
                const std::set<std::string> single{s.text};
                const auto& options = s.nonterminal ? expansions.at(s.text) : single;
                for (const auto& x : partial) {
                    for (const auto& y : options) {
                        if (next.size() >= cap) {
                            truncated = true;
                            break;
                        }
                        next.insert(detail::join_words(x, y));
                    }
                }
                partial = std::move(next);
            }
            for (auto& sentence : partial) {
                if (out.size() >= cap) {
                    truncated = true;
                    break;
                }
                out.insert(sentence);
            }
        }
    }
    return LanguageSet{std::move(expansions[g.start]), truncated};
}

// Uniform independent choice among productions at every expansion.
template <class Engine>
std::string generate_random(const Grammar& g, Engine& engine) {
    if (!check_nonrecursive(g).acyclic()) throw unsupported_grammar_error("generate_random: grammar is recursive");
    auto expand = [&](auto&& self, const std::string& name) -> std::string {
        const auto& productions = g.rules.at(name);
        std::uniform_int_distribution<std::size_t> pick(0, productions.size() - 1);
        std::string out;
        for (const auto& s : productions[pick(engine)]) out = detail::join_words(out, s.nonterminal ? self(self, s.text) : s.text);
        return out;
    };
    return expand(expand, g.start);
}

inline std::string generate_random(const Grammar& g, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    return generate_random(g, engine);
}

}  // namespace gitta
