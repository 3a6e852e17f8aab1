#include "unistoch/permutation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace unistoch {

Permutation::Permutation(std::vector<std::size_t> images) : img_(std::move(images)) {
  std::vector<bool> seen(img_.size(), false);
  for (std::size_t v : img_) {
    if (v >= img_.size() || seen[v]) throw ParameterError("not a permutation");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t d) {
  std::vector<std::size_t> img(d);
  for (std::size_t i = 0; i < d; ++i) img[i] = i;
  return Permutation(std::move(img));
}

namespace {

std::vector<std::size_t> parse_labels(std::string_view group) {
  std::vector<std::size_t> labels;
  const bool separated = group.find_first_of(", ") != std::string_view::npos;
  if (separated) {
    std::size_t value = 0;
    bool have = false;
    for (char ch : group) {
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        value = value * 10 + static_cast<std::size_t>(ch - '0');
        have = true;
      } else if (ch == ',' || ch == ' ') {
        if (have) labels.push_back(value);
        value = 0;
        have = false;
      } else {
        throw ParameterError(std::string("unexpected character in cycle: ") + ch);
      }
    }
    if (have) labels.push_back(value);
  } else {
    for (char ch : group) {
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw ParameterError(std::string("unexpected character in cycle: ") + ch);
      labels.push_back(static_cast<std::size_t>(ch - '0'));
    }
  }
  return labels;
}

}  // namespace

Permutation Permutation::parse_cycles(std::string_view text, std::size_t d) {
  std::vector<std::size_t> img(d);
  for (std::size_t i = 0; i < d; ++i) img[i] = i;
  std::string_view t = text;
  while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
  while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
  if (t.empty() || t == "id" || t == "()") return Permutation(std::move(img));

  std::vector<std::string_view> groups;
  if (t.front() != '(') {
    groups.push_back(t);
  } else {
    std::size_t pos = 0;
    while (pos < t.size()) {
      if (t[pos] == ' ') {
        ++pos;
        continue;
      }
      if (t[pos] != '(') throw ParameterError("malformed cycle notation: " + std::string(text));
      const std::size_t close = t.find(')', pos);
      if (close == std::string_view::npos) throw ParameterError("unbalanced parenthesis: " + std::string(text));
      groups.push_back(t.substr(pos + 1, close - pos - 1));
      pos = close + 1;
    }
  }

  std::vector<bool> used(d, false);
  for (auto g : groups) {
    const auto labels = parse_labels(g);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::size_t from = labels[k];
      const std::size_t to = labels[(k + 1) % labels.size()];
      if (from < 1 || from > d) throw ParameterError("cycle label out of range: " + std::to_string(from));
      if (used[from - 1]) throw ParameterError("label repeated across cycles: " + std::to_string(from));
      used[from - 1] = true;
      img[from - 1] = to - 1;
    }
  }
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(img_.size());
  for (std::size_t i = 0; i < img_.size(); ++i) inv[img_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw DimensionError("permutation size mismatch");
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = img_[other.img_[i]];
  return Permutation(std::move(out));
}

std::vector<std::size_t> Permutation::cycle_lengths() const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> lengths;
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = img_[j]) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (img_[i] != i) return false;
  return true;
}

RealMatrix Permutation::matrix() const {
  RealMatrix m(size(), size());
  for (std::size_t i = 0; i < size(); ++i) m(i, img_[i]) = 1.0;
  return m;
}

ComplexMatrix Permutation::complex_matrix() const {
  ComplexMatrix m(size(), size());
  for (std::size_t i = 0; i < size(); ++i) m(i, img_[i]) = 1.0;
  return m;
}

std::string Permutation::to_cycle_string() const {
  std::ostringstream out;
  const bool wide = size() > 9;
  std::vector<bool> seen(size(), false);
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen[i] || img_[i] == i) continue;
    out << '(';
    bool first = true;
    for (std::size_t j = i; !seen[j]; j = img_[j]) {
      seen[j] = true;
      if (wide && !first) out << ',';
      out << j + 1;
      first = false;
    }
    out << ')';
  }
  const std::string s = out.str();
  return s.empty() ? "id" : s;
}

}  // namespace unistoch
