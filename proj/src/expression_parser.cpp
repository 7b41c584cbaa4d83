/* Copyright 2026 The Pulsegate Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Grammar (whitespace ignored):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := [number '*'] factor ('*' factor)*
//   factor := 'I' ('x'|'y'|'z') '(' spin-name ')'

#include <cctype>
#include <charconv>
#include <string>

#include "pulsegate/errors.hpp"
#include "pulsegate/spin_core.hpp"

namespace pulsegate {

namespace {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const SpinSystem& system) : system_(system) {
    // Strip whitespace but remember where each kept character came from.
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(text[i]))) {
        src_.push_back(text[i]);
        origin_.push_back(i);
      }
    }
    end_origin_ = text.size();
  }

  CMatrix parse() {
    const auto d = static_cast<Eigen::Index>(system_.dim());
    CMatrix sum = CMatrix::Zero(d, d);
    if (src_.empty()) fail("empty expression");
    bool first = true;
    while (pos_ < src_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      sum += sign * term();
      first = false;
    }
    return sum;
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    const std::size_t at = pos_ < origin_.size() ? origin_[pos_] : end_origin_;
    throw ValidationError("operator expression: " + what + " at position " + std::to_string(at));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  CMatrix term() {
    double coefficient = 1.0;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coefficient = number();
      expect('*');
    }
    CMatrix product = factor();
    while (peek() == '*') {
      ++pos_;
      product = (product * factor()).eval();
    }
    return coefficient * product;
  }

  double number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed coefficient");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  CMatrix factor() {
    if (peek() != 'I') fail("expected operator 'Ix', 'Iy' or 'Iz'");
    ++pos_;
    Axis axis;
    switch (peek()) {
      case 'x': axis = Axis::x; break;
      case 'y': axis = Axis::y; break;
      case 'z': axis = Axis::z; break;
      default: fail("expected axis x, y or z");
    }
    ++pos_;
    expect('(');
    const std::size_t name_start = pos_;
    while (pos_ < src_.size() && src_[pos_] != ')') ++pos_;
    if (pos_ >= src_.size()) fail("unterminated spin name");
    const std::string name = src_.substr(name_start, pos_ - name_start);
    int spin = -1;
    try {
      spin = system_.index_of(name);
    } catch (const ValidationError&) {
      pos_ = name_start;
      fail("unknown spin '" + name + "'");
    }
    ++pos_;  // ')'
    return embed_spin_operator(axis, spin, system_.size());
  }

  const SpinSystem& system_;
  std::string src_;
  std::vector<std::size_t> origin_;
  std::size_t end_origin_ = 0;
  std::size_t pos_ = 0;
};

}  // namespace

OperatorMatrix parse_operator_expression(std::string_view text, const SpinSystem& system) {
  return OperatorMatrix(ExpressionParser(text, system).parse(), Role::observable);
}

}  // namespace pulsegate
