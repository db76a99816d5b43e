#pragma once

#include "esmv/symplectic.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace esmv {

// A word in the generators of a finitely presented group: a sequence of
// (generator index, exponent +/-1) letters.
struct Word {
  std::vector<std::pair<int, int>> letters;

  Word() = default;
  explicit Word(std::vector<std::pair<int, int>> ls) : letters(std::move(ls)) {}
  bool empty() const { return letters.empty(); }
  Word reduced() const;
  Word inverse() const;
  Word concat(const Word& other) const;
  std::string display(const std::vector<std::string>& generators) const;
  bool operator==(const Word&) const = default;
};

struct GroupPresentation {
  std::vector<std::string> generators;
  std::vector<Word> relations;

  void validate() const;
  bool operator==(const GroupPresentation&) const = default;

  // Free group on the given generators.
  static GroupPresentation free_group(std::vector<std::string> gens);
  // Free abelian group: one commutator relation per generator pair.
  static GroupPresentation free_abelian(std::vector<std::string> gens);
};

// A symplectic monodromy representation: the computational stand-in for a
// flat symplectic vector bundle over a space with this fundamental group.
// Construction checks that every generator image is symplectic, that every
// relation maps to the identity, and, when a lattice is attached, that every
// image preserves it.
struct MonodromyRep {
  GroupPresentation presentation;
  SymplecticSpace sp;
  std::vector<MatQ> images;
  std::vector<MatQ> inverse_images;
  std::optional<IntegralLattice> lattice;

  MonodromyRep(GroupPresentation pres, SymplecticSpace space, std::vector<MatQ> imgs,
               std::optional<IntegralLattice> lat = std::nullopt);

  static MonodromyRep trivial(int n_gens, SymplecticSpace space);
};

MatQ transport(const MonodromyRep& rep, const Word& w);
Eigen::MatrixXd transport_dense(const MonodromyRep& rep, const Word& w);

// All transport values of reduced words of length <= max_len, deduplicated
// exactly, in canonical (breadth-first, lexicographic) discovery order.
std::vector<MatQ> holonomy_sample(const MonodromyRep& rep, int max_len,
                                  std::size_t size_limit = 4096);

// Enumerates the reduced words themselves, in the same canonical order.
std::vector<Word> reduced_words(int n_gens, int max_len);

// Canonical basis of the algebra of matrices commuting with every generator
// image.
std::vector<MatQ> commutant_basis(const MonodromyRep& rep);
bool commutes_with_monodromy(const MonodromyRep& rep, const MatQ& a);
// Membership of `a` in the span of commutant_basis(rep).
bool in_commutant_span(const MonodromyRep& rep, const MatQ& a);

struct TrivialityVerdict {
  bool trivial = false;
  std::string witness;  // generator whose image differs from the identity
};

// A monodromy representation is trivializable iff conjugating all images to
// the identity is solvable, which forces every image to equal the identity.
TrivialityVerdict is_trivializable(const MonodromyRep& rep);

struct EquivalenceVerdict {
  enum Kind { Equivalent, Distinct, Inconclusive } kind = Inconclusive;
  MatQ conjugator;     // for Equivalent: A with A r1 A^{-1} = r2 (up to positive scale)
  Rational conformal_factor{1};  // A^T omega A = conformal_factor * omega
  std::string witness;
};

EquivalenceVerdict reps_equivalent(const MonodromyRep& r1, const MonodromyRep& r2,
                                   int max_word_len);

bool preserves_lattice(const MonodromyRep& rep, const IntegralLattice& lat);

}  // namespace esmv
