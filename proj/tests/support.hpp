#pragma once

// Fixtures and brute-force oracles shared by the test suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gitta/gitta.hpp"

namespace gitta::testing {

inline const char* const putting_json =
    R"({"origin":"I like putting #T# on my #F#","T":["cheese","pineapple","soy sauce"],"F":["pizza","salad","muesli","sushi"]})";

inline const std::vector<std::string> greeting_sentences{"hello world", "hello people", "hi world", "hi people"};

// Two origin alternatives sharing a prefix slot; the second adds a literal.
inline const char* const hello_there_json = R"({
  "origin": ["#hello# #world#", "#hello# there, #name#"],
  "hello": ["hello", "hi", "hey", "greetings"],
  "world": ["world", "earth", "planet", "universe"],
  "name": ["alice", "bob", "carol", "dave"]
})";

// The overgeneral shape: an optional literal slot and a slot holding the
// union of both tails.
inline const char* const hello_there_overgeneral_json = R"({
  "origin": "#hello# #there# #thing#",
  "hello": ["hello", "hi", "hey", "greetings"],
  "there": ["there,", ""],
  "thing": ["world", "earth", "planet", "universe", "alice", "bob", "carol", "dave"]
})";

inline std::vector<std::string> words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string join(const std::vector<std::string>& ws) {
    std::string out;
    for (const auto& w : ws) out += (out.empty() ? "" : " ") + w;
    return out;
}

// Backtracking: can `pattern` produce exactly `target`? Pattern tokens must
// equal target elements; a pattern slot swallows any run of target elements.
inline bool brute_derives(const Template& pattern, const Template& target) {
    std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> bool {
        if (i == pattern.size()) return j == target.size();
        if (is_token(pattern[i])) return j < target.size() && target[j] == pattern[i] && go(i + 1, j + 1);
        for (std::size_t k = j; k <= target.size(); ++k)
            if (go(i + 1, k)) return true;
        return false;
    };
    return go(0, 0);
}

// Language by naive recursive expansion of every production.
inline std::set<std::string> brute_language(const Grammar& g) {
    std::function<std::set<std::vector<std::string>>(const std::string&, int)> expand =
        [&](const std::string& name, int depth) {
            std::set<std::vector<std::string>> out;
            if (depth > 32) return out;
            for (const auto& p : g.rules.at(name)) {
                std::set<std::vector<std::string>> acc{{}};
                for (const auto& s : p) {
                    std::set<std::vector<std::string>> next;
                    if (s.nonterminal) {
                        for (const auto& tail : expand(s.text, depth + 1))
                            for (auto head : acc) {
                                head.insert(head.end(), tail.begin(), tail.end());
                                next.insert(std::move(head));
                            }
                    } else {
                        for (const auto& w : words(s.text))
                            for (auto head : acc) {
                                head.push_back(w);
                                next.insert(std::move(head));
                            }
                        if (words(s.text).empty()) next = acc;
                    }
                    acc = std::move(next);
                }
                out.insert(acc.begin(), acc.end());
            }
            return out;
        };
    std::set<std::string> language;
    for (const auto& ws : expand(g.start, 0)) language.insert(join(ws));
    return language;
}

// Cycle detection by repeated reachability: a non-terminal is recursive iff
// it can reach itself.
inline bool brute_recursive(const Grammar& g) {
    for (const auto& [name, productions] : g.rules) {
        std::set<std::string> seen;
        std::vector<std::string> todo{name};
        while (!todo.empty()) {
            auto cur = todo.back();
            todo.pop_back();
            auto it = g.rules.find(cur);
            if (it == g.rules.end()) continue;
            for (const auto& p : it->second)
                for (const auto& s : p) {
                    if (!s.nonterminal) continue;
                    if (s.text == name) return true;
                    if (seen.insert(s.text).second) todo.push_back(s.text);
                }
        }
    }
    return false;
}

inline std::size_t brute_jaccard_numerator(const ValueSet& a, const ValueSet& b) {
    std::size_t n = 0;
    for (const auto& v : a) n += b.count(v);
    return n;
}

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random template over a small alphabet. Slots, when allowed, are never
// adjacent and use ids 0..max_slot.
inline Template random_template(Rng& rng, std::size_t max_len, bool allow_slots, std::size_t alphabet = 4,
                                SlotId max_slot = 3) {
    Template t;
    const std::size_t len = uniform(rng, 0, max_len);
    for (std::size_t i = 0; i < len; ++i) {
        const bool prev_slot = !t.empty() && is_slot(t.elements.back());
        if (allow_slots && !prev_slot && uniform(rng, 0, 3) == 0)
            t.elements.push_back(make_slot(static_cast<SlotId>(uniform(rng, 0, max_slot))));
        else
            t.elements.push_back(make_token(std::string(1, static_cast<char>('a' + uniform(rng, 0, alphabet - 1)))));
    }
    return t;
}

inline std::string random_sentence(Rng& rng, std::size_t min_len, std::size_t max_len, std::size_t alphabet) {
    std::vector<std::string> ws;
    const std::size_t len = uniform(rng, min_len, max_len);
    for (std::size_t i = 0; i < len; ++i) ws.push_back("w" + std::to_string(uniform(rng, 0, alphabet - 1)));
    return join(ws);
}

inline std::vector<std::string> random_corpus(Rng& rng, std::size_t max_sentences = 6, std::size_t max_len = 5,
                                              std::size_t alphabet = 5) {
    std::vector<std::string> corpus;
    const std::size_t n = uniform(rng, 1, max_sentences);
    for (std::size_t i = 0; i < n; ++i) corpus.push_back(random_sentence(rng, 1, max_len, alphabet));
    return corpus;
}

struct SyntheticSpec {
    std::size_t min_slots = 2, max_slots = 4;
    std::size_t min_values = 3, max_values = 8;
    std::size_t max_value_words = 2;
};

// Two-level grammar: origin is literal separators around 2-4 slots, each
// slot a rule of 3-8 values drawn from a vocabulary used nowhere else.
inline Grammar synthetic_grammar(Rng& rng, const SyntheticSpec& spec = {}) {
    Grammar g;
    std::size_t word = 0;
    auto fresh = [&](const std::string& prefix) { return prefix + std::to_string(word++); };
    Production origin{terminal(fresh("lit"))};
    const std::size_t slots = uniform(rng, spec.min_slots, spec.max_slots);
    for (std::size_t s = 0; s < slots; ++s) {
        const std::string name = "S" + std::to_string(s);
        origin.push_back(nonterminal(name));
        origin.push_back(terminal(fresh("sep")));
        const std::size_t n = uniform(rng, spec.min_values, spec.max_values);
        for (std::size_t v = 0; v < n; ++v) {
            Production p;
            const std::size_t len = uniform(rng, 1, spec.max_value_words);
            for (std::size_t k = 0; k < len; ++k) p.push_back(terminal(fresh("v" + std::to_string(s) + "_")));
            g.rules[name].push_back(std::move(p));
        }
    }
    g.rules[g.start] = {std::move(origin)};
    return g;
}

// Product of value counts; the language size of a synthetic grammar.
inline std::size_t synthetic_language_size(const Grammar& g) {
    std::size_t n = 1;
    for (const auto& [name, productions] : g.rules)
        if (name != g.start) n *= productions.size();
    return n;
}

}  // namespace gitta::testing
