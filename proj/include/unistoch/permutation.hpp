#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "unistoch/matcore.hpp"

namespace unistoch {

/// A bijection on {0, ..., d-1}. The permutation matrix has P(i, sigma(i)) = 1,
/// so the 3-cycle "123" (1 -> 2 -> 3 -> 1) gives ones at (1,2), (2,3), (3,1)
/// in one-based terms.
class Permutation {
 public:
  Permutation() = default;
  /// Zero-based one-line notation; throws ParameterError if not a bijection.
  explicit Permutation(std::vector<std::size_t> images);

  static Permutation identity(std::size_t d);
  /// Parses "id", "123", "(123)", "(12)(34)" or "(1,2,10)" (one-based
  /// labels). Digits without separators are read one label per digit.
  static Permutation parse_cycles(std::string_view text, std::size_t d);

  std::size_t size() const noexcept { return img_.size(); }
  std::size_t operator()(std::size_t i) const { return img_[i]; }
  const std::vector<std::size_t>& images() const noexcept { return img_; }

  Permutation inverse() const;
  /// (this * other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;
  std::vector<std::size_t> cycle_lengths() const;
  bool is_identity() const;

  RealMatrix matrix() const;
  ComplexMatrix complex_matrix() const;

  /// One-based cycle notation without fixed points, or "id".
  std::string to_cycle_string() const;

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<std::size_t> img_;
};

}  // namespace unistoch
