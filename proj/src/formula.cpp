#include "nsmp/formula.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>

#include "nsmp/kg_store.hpp"

namespace nsmp {

Formula Formula::atom(Atom a) {
    Formula f;
    f.kind_ = Kind::Atom;
    f.atom_ = a;
    return f;
}

Formula Formula::conjunction(std::vector<Formula> children) {
    if (children.empty()) throw Error("empty conjunction");
    if (children.size() == 1) return std::move(children.front());
    Formula f;
    f.kind_ = Kind::And;
    f.children_ = std::move(children);
    return f;
}

Formula Formula::disjunction(std::vector<Formula> children) {
    if (children.empty()) throw Error("empty disjunction");
    if (children.size() == 1) return std::move(children.front());
    Formula f;
    f.kind_ = Kind::Or;
    f.children_ = std::move(children);
    return f;
}

namespace {

bool is_symbol(char c) {
    return c == '(' || c == ')' || c == ',' || c == '&' || c == '|' || c == '!';
}

std::optional<std::uint32_t> parse_index(std::string_view digits) {
    if (digits.empty()) return std::nullopt;
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
    return v;
}

class Parser {
   public:
    Parser(std::string_view text, const TripleStore* kg, std::size_t num_entities,
           std::size_t num_relations)
        : text_(text), kg_(kg), num_entities_(num_entities), num_relations_(num_relations) {}

    Formula run() {
        Formula f = disjunction();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (!saw_free_) throw ParseError("formula has no free variable y");
        return f;
    }

   private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("syntax error at position " + std::to_string(pos_) + ": " + msg);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string_view word() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_symbol(text_[pos_]) &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    Formula disjunction() {
        std::vector<Formula> parts;
        parts.push_back(conjunction());
        while (accept('|')) parts.push_back(conjunction());
        return Formula::disjunction(std::move(parts));
    }

    Formula conjunction() {
        std::vector<Formula> parts;
        parts.push_back(primary());
        while (accept('&')) parts.push_back(primary());
        return Formula::conjunction(std::move(parts));
    }

    Formula primary() {
        const bool negated = accept('!');
        if (accept('(')) {
            if (negated)
                throw ParseError("negation must be atomic (position " + std::to_string(pos_ - 1) +
                                 ")");
            Formula inner = disjunction();
            expect(')');
            return inner;
        }
        Atom a;
        a.negated = negated;
        a.relation = relation(word());
        expect('(');
        a.head = term(word());
        expect(',');
        a.tail = term(word());
        expect(')');
        return Formula::atom(a);
    }

    RelationId relation(std::string_view name) {
        if (kg_)
            if (auto id = kg_->relations().find(name)) return *id;
        if (name.size() > 1 && name[0] == 'r')
            if (auto id = parse_index(name.substr(1)); id && *id < num_relations_) return *id;
        throw ParseError("unknown relation '" + std::string(name) + "'");
    }

    Term term(std::string_view name) {
        if (name == "y") {
            saw_free_ = true;
            return Term::free();
        }
        if (name[0] == 'x' && (name.size() == 1 || parse_index(name.substr(1)))) {
            auto [it, inserted] =
                existentials_.try_emplace(std::string(name), existentials_.size() + 1);
            return Term::existential(static_cast<std::uint32_t>(it->second));
        }
        if (kg_)
            if (auto id = kg_->entities().find(name)) return Term::constant(*id);
        if (name.size() > 1 && name[0] == 'e')
            if (auto id = parse_index(name.substr(1)); id && *id < num_entities_)
                return Term::constant(*id);
        throw ParseError("unknown entity '" + std::string(name) + "'");
    }

    std::string_view text_;
    const TripleStore* kg_;
    std::size_t num_entities_;
    std::size_t num_relations_;
    std::size_t pos_ = 0;
    bool saw_free_ = false;
    std::map<std::string, std::size_t> existentials_;
};

// DNF of a subformula as a list of conjunctions.
std::vector<Conjunction> dnf(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Atom:
            return {Conjunction{f.as_atom()}};
        case Formula::Kind::Or: {
            std::vector<Conjunction> out;
            for (const auto& c : f.children()) {
                auto part = dnf(c);
                out.insert(out.end(), part.begin(), part.end());
                if (out.size() > kMaxDnfBranches)
                    throw UnsupportedQuery("DNF has more than " + std::to_string(kMaxDnfBranches) +
                                           " branches");
            }
            return out;
        }
        case Formula::Kind::And: {
            std::vector<Conjunction> acc{Conjunction{}};
            for (const auto& c : f.children()) {
                auto part = dnf(c);
                if (acc.size() * part.size() > kMaxDnfBranches)
                    throw UnsupportedQuery("DNF has more than " + std::to_string(kMaxDnfBranches) +
                                           " branches");
                std::vector<Conjunction> next;
                for (const auto& left : acc) {
                    for (const auto& right : part) {
                        Conjunction merged = left;
                        merged.insert(merged.end(), right.begin(), right.end());
                        next.push_back(std::move(merged));
                    }
                }
                acc = std::move(next);
            }
            return acc;
        }
    }
    return {};
}

void collect_existentials(const Formula& f, std::set<std::uint32_t>& out) {
    if (f.kind() == Formula::Kind::Atom) {
        for (const Term& t : {f.as_atom().head, f.as_atom().tail})
            if (t.kind == Term::Kind::Existential) out.insert(t.value);
        return;
    }
    for (const auto& c : f.children()) collect_existentials(c, out);
}

bool looks_like_variable(std::string_view s) {
    return s == "y" || (s[0] == 'x' && (s.size() == 1 || parse_index(s.substr(1))));
}

// A label can stand in for an id when the parser will read it back as that id.
bool usable_label(std::string_view s) {
    if (s.empty() || looks_like_variable(s)) return false;
    for (char c : s)
        if (is_symbol(c) || std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

std::string id_token(const Dictionary* dict, char prefix, std::uint32_t id) {
    if (dict && usable_label(dict->label(id))) return dict->label(id);
    std::string numeric = prefix + std::to_string(id);
    if (dict && dict->find(numeric))
        throw Error("cannot render id " + numeric + ": a different label uses that text");
    return numeric;
}

std::string render_atom(const Atom& a, const TripleStore* kg) {
    std::string out = a.negated ? "!" : "";
    out += id_token(kg ? &kg->relations() : nullptr, 'r', a.relation);
    out += "(" + render(a.head, kg) + "," + render(a.tail, kg) + ")";
    return out;
}

}  // namespace

Formula parse_formula(std::string_view text, const TripleStore& kg) {
    return Parser(text, &kg, kg.num_entities(), kg.num_relations()).run();
}

Formula parse_formula(std::string_view text, std::size_t num_entities,
                      std::size_t num_relations) {
    return Parser(text, nullptr, num_entities, num_relations).run();
}

std::vector<Conjunction> to_dnf(const Formula& f) { return dnf(f); }

std::size_t count_existentials(const Formula& f) {
    std::set<std::uint32_t> seen;
    collect_existentials(f, seen);
    return seen.size();
}

std::size_t count_existentials(const Conjunction& c) {
    std::set<std::uint32_t> seen;
    for (const auto& a : c)
        for (const Term& t : {a.head, a.tail})
            if (t.kind == Term::Kind::Existential) seen.insert(t.value);
    return seen.size();
}

std::string render(const Term& t, const TripleStore* kg) {
    switch (t.kind) {
        case Term::Kind::Free:
            return "y";
        case Term::Kind::Existential:
            return "x" + std::to_string(t.value);
        case Term::Kind::Constant:
            return id_token(kg ? &kg->entities() : nullptr, 'e', t.value);
    }
    return {};
}

std::string render(const Formula& f, const TripleStore* kg) {
    if (f.kind() == Formula::Kind::Atom) return render_atom(f.as_atom(), kg);
    std::string out;
    const char sep = f.kind() == Formula::Kind::And ? '&' : '|';
    for (std::size_t i = 0; i < f.children().size(); ++i) {
        const auto& c = f.children()[i];
        if (i > 0) out += sep;
        const bool wrap = c.kind() == Formula::Kind::Or ||
                          (c.kind() == Formula::Kind::And && f.kind() == Formula::Kind::And);
        out += wrap ? "(" + render(c, kg) + ")" : render(c, kg);
    }
    return out;
}

std::string render(const Conjunction& c, const TripleStore* kg) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i > 0) out += '&';
        out += render_atom(c[i], kg);
    }
    return out;
}

}  // namespace nsmp
