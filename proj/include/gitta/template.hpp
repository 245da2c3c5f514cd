#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gitta/error.hpp"

namespace gitta {

using SlotId = std::uint32_t;

struct Token {
    std::string text;

    friend auto operator<=>(const Token&, const Token&) = default;
    friend bool operator==(const Token&, const Token&) = default;
};

struct Slot {
    SlotId id = 0;

    friend auto operator<=>(const Slot&, const Slot&) = default;
    friend bool operator==(const Slot&, const Slot&) = default;
};

// Tokens order before slots; tokens by text, slots by id.
using Element = std::variant<Token, Slot>;

inline bool is_slot(const Element& e) { return std::holds_alternative<Slot>(e); }
inline bool is_token(const Element& e) { return std::holds_alternative<Token>(e); }
inline SlotId slot_id(const Element& e) { return std::get<Slot>(e).id; }
inline const std::string& token_text(const Element& e) { return std::get<Token>(e).text; }

inline Element make_token(std::string text) { return Token{std::move(text)}; }
inline Element make_slot(SlotId id) { return Slot{id}; }

// An ordered sequence of word tokens and slots. A slot stands for zero or
// more elements. Also used for slot values, where the empty sequence is ε.
struct Template {
    std::vector<Element> elements;

    Template() = default;
    explicit Template(std::vector<Element> elems) : elements(std::move(elems)) {}
    Template(std::initializer_list<Element> elems) : elements(elems) {}

    std::size_t size() const { return elements.size(); }
    bool empty() const { return elements.empty(); }
    const Element& operator[](std::size_t i) const { return elements[i]; }
    auto begin() const { return elements.begin(); }
    auto end() const { return elements.end(); }

    friend bool operator==(const Template&, const Template&) = default;
    friend bool operator<(const Template& a, const Template& b) { return a.elements < b.elements; }
};

using ValueSet = std::set<Template>;
// Slot id to the set of element sequences it was observed to cover.
using SlotValueMap = std::map<SlotId, ValueSet>;

// Slot id to its canonical representative.
struct SlotReplacement {
    std::map<SlotId, SlotId> mapping;

    SlotId resolve(SlotId id) const {
        // Chains are short; follow them rather than requiring compression.
        auto it = mapping.find(id);
        std::size_t guard = 0;
        while (it != mapping.end() && it->second != id && guard++ <= mapping.size()) {
            id = it->second;
            it = mapping.find(id);
        }
        return id;
    }

    void add(SlotId from, SlotId to) {
        if (from != to) mapping[from] = to;
        compress();
    }

    void compress() {
        for (auto& [from, to] : mapping) to = resolve(to);
    }

    bool empty() const { return mapping.empty(); }

    friend bool operator==(const SlotReplacement&, const SlotReplacement&) = default;
};

// Hands out fresh slot ids.
class SlotIdSource {
public:
    explicit SlotIdSource(SlotId first = 0) : next_(first) {}
    SlotId fresh() { return next_++; }
    SlotId peek() const { return next_; }
    void reserve_above(SlotId id) { next_ = std::max(next_, id + 1); }

private:
    SlotId next_;
};

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
}

// Trim and collapse runs of whitespace to a single space.
inline std::string normalize_whitespace(std::string_view text) {
    std::string out;
    for (const auto& w : split_whitespace(text)) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

inline Template tokenize(std::string_view text) {
    Template t;
    for (auto& w : split_whitespace(text)) t.elements.push_back(Token{std::move(w)});
    return t;
}

inline std::size_t token_count(const Template& t) {
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), is_token));
}

inline std::size_t slot_count(const Template& t) {
    return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), is_slot));
}

inline bool has_slots(const Template& t) { return std::any_of(t.begin(), t.end(), is_slot); }

inline std::set<SlotId> slots_of(const Template& t) {
    std::set<SlotId> ids;
    for (const auto& e : t)
        if (is_slot(e)) ids.insert(slot_id(e));
    return ids;
}

inline bool contains_slot(const Template& t, SlotId id) {
    return std::any_of(t.begin(), t.end(), [id](const Element& e) { return is_slot(e) && slot_id(e) == id; });
}

inline std::string slot_name(SlotId id);

// Substitute every slot of `t` by its assigned value and join with single
// spaces. Empty values vanish without leaving extra spaces.
inline std::string render(const Template& t, const std::map<SlotId, Template>& assignment) {
    std::string out;
    auto append = [&out](const std::string& word) {
        if (!out.empty()) out += ' ';
        out += word;
    };
    for (const auto& e : t) {
        if (is_token(e)) {
            append(token_text(e));
            continue;
        }
        auto it = assignment.find(slot_id(e));
        if (it == assignment.end())
            throw input_error("render: no value assigned to slot " + slot_name(slot_id(e)));
        for (const auto& v : it->second) {
            if (is_slot(v)) throw input_error("render: value for slot " + slot_name(slot_id(e)) + " contains a slot");
            append(token_text(v));
        }
    }
    return out;
}

inline std::string render(const Template& t) { return render(t, {}); }

// 0 -> A, 25 -> Z, 26 -> AA, ...
inline std::string slot_name(SlotId id) {
    std::string name;
    std::uint64_t n = id;
    do {
        name.insert(name.begin(), static_cast<char>('A' + n % 26));
        n = n / 26;
    } while (n-- > 0);
    return name;
}

enum class Notation { unicode, ascii };

inline std::string slot_label(const std::string& name, Notation notation) {
    return notation == Notation::unicode ? "⟨" + name + "⟩" : "<" + name + ">";
}

inline std::string to_string(const Template& t, Notation notation = Notation::unicode) {
    std::string out;
    for (const auto& e : t) {
        if (!out.empty()) out += ' ';
        out += is_token(e) ? token_text(e) : slot_label(slot_name(slot_id(e)), notation);
    }
    return out;
}

// Renumber slots 0, 1, ... by first appearance.
inline Template canonical(const Template& t) {
    std::map<SlotId, SlotId> renumber;
    Template out;
    out.elements.reserve(t.size());
    for (const auto& e : t) {
        if (is_token(e)) {
            out.elements.push_back(e);
        } else {
            auto [it, inserted] = renumber.try_emplace(slot_id(e), static_cast<SlotId>(renumber.size()));
            out.elements.push_back(Slot{it->second});
        }
    }
    return out;
}

inline bool equivalent(const Template& a, const Template& b) { return canonical(a) == canonical(b); }

inline Template replace_slots(const Template& t, const SlotReplacement& repl) {
    if (repl.empty()) return t;
    Template out = t;
    for (auto& e : out.elements)
        if (is_slot(e)) e = Slot{repl.resolve(slot_id(e))};
    return out;
}

inline SlotId max_slot_id(const Template& t) {
    SlotId m = 0;
    for (const auto& e : t)
        if (is_slot(e)) m = std::max(m, slot_id(e));
    return m;
}

}  // namespace gitta
