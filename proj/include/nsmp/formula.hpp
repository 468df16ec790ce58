#pragma once
// EFO-1 formulas: parsing, canonical rendering, and DNF conversion.
//
// Grammar (whitespace insensitive):
//   query := disj
//   disj  := conj ('|' conj)*
//   conj  := atom ('&' atom)*
//   atom  := ['!'] REL '(' term ',' term ')' | '(' disj ')'
//   term  := 'y' | 'x' [INT] | 'e' INT | LABEL
//   REL   := 'r' INT | LABEL
//
// `y` is the free variable and `x`, `x1`, `x2`, ... are existential
// variables; any other term is an entity. Labels are looked up in the
// knowledge graph dictionaries first and fall back to the `e<id>` / `r<id>`
// numeric forms. Negation may only be applied to a single atom.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nsmp/types.hpp"

namespace nsmp {

class TripleStore;

struct Term {
    enum class Kind { Constant, Existential, Free };
    Kind kind = Kind::Free;
    // Entity id for constants, 1-based variable index for existentials.
    std::uint32_t value = 0;

    static Term constant(EntityId e) { return {Kind::Constant, e}; }
    static Term existential(std::uint32_t index) { return {Kind::Existential, index}; }
    static Term free() { return {Kind::Free, 0}; }

    bool is_variable() const { return kind != Kind::Constant; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

// r(head, tail), or its negation.
struct Atom {
    RelationId relation = 0;
    Term head;
    Term tail;
    bool negated = false;

    friend bool operator==(const Atom&, const Atom&) = default;
};

class Formula {
   public:
    enum class Kind { Atom, And, Or };

    static Formula atom(Atom a);
    static Formula conjunction(std::vector<Formula> children);
    static Formula disjunction(std::vector<Formula> children);

    Kind kind() const { return kind_; }
    const Atom& as_atom() const { return atom_; }
    const std::vector<Formula>& children() const { return children_; }

    friend bool operator==(const Formula&, const Formula&) = default;

   private:
    Kind kind_ = Kind::Atom;
    Atom atom_;
    std::vector<Formula> children_;
};

// One sub-conjunctive query: a conjunction of (possibly negated) atoms.
using Conjunction = std::vector<Atom>;

inline constexpr std::size_t kMaxDnfBranches = 64;

Formula parse_formula(std::string_view text, const TripleStore& kg);
// Numeric `e<id>` / `r<id>` forms only, checked against the given sizes.
Formula parse_formula(std::string_view text, std::size_t num_entities, std::size_t num_relations);

// Disjunction of conjunctions, branch order preserved left to right.
// Throws UnsupportedQuery above kMaxDnfBranches branches.
std::vector<Conjunction> to_dnf(const Formula& f);

// Number of distinct existential variables.
std::size_t count_existentials(const Formula& f);
std::size_t count_existentials(const Conjunction& c);

// Canonical text using numeric ids (`r3(e5,x1)`); parse_formula(render(f))
// reproduces f. With `kg`, labels are used wherever the parser would read
// them back unchanged, numeric ids elsewhere.
std::string render(const Formula& f, const TripleStore* kg = nullptr);
std::string render(const Conjunction& c, const TripleStore* kg = nullptr);
std::string render(const Term& t, const TripleStore* kg = nullptr);

}  // namespace nsmp
