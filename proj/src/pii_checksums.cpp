// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <stdexcept>

#include "pii_internal.hpp"
#include "x402guard/pii_engine.hpp"

namespace x402guard {

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

}  // namespace

bool luhn_valid(std::string_view digits) {
  if (digits.size() < 13 || digits.size() > 19)
    throw std::invalid_argument("luhn_valid: length must be 13..19");
  int sum = 0;
  bool dbl = false;
  for (std::size_t i = digits.size(); i-- > 0;) {
    char c = digits[i];
    if (!is_ascii_digit(c)) throw std::invalid_argument("luhn_valid: non-digit input");
    int d = c - '0';
    if (dbl) d = d > 4 ? d * 2 - 9 : d * 2;
    sum += d;
    dbl = !dbl;
  }
  return sum % 10 == 0;
}

bool iban_valid(std::string_view candidate) {
  if (candidate.size() < 15 || candidate.size() > 34) return false;
  if (!is_ascii_upper(candidate[0]) || !is_ascii_upper(candidate[1])) return false;
  if (!is_ascii_digit(candidate[2]) || !is_ascii_digit(candidate[3])) return false;
  // Rotate the first four characters to the back and reduce mod 97 a
  // character at a time (letters expand to two digits, A=10).
  unsigned rem = 0;
  for (std::size_t k = 0; k < candidate.size(); ++k) {
    char c = candidate[(k + 4) % candidate.size()];
    if (is_ascii_digit(c)) {
      rem = (rem * 10 + static_cast<unsigned>(c - '0')) % 97;
    } else if (is_ascii_upper(c)) {
      rem = (rem * 100 + static_cast<unsigned>(c - 'A' + 10)) % 97;
    } else {
      return false;
    }
  }
  return rem == 1;
}

namespace detail {

bool ssn_plausible(std::string_view nine_digits) {
  if (nine_digits.size() != 9) return false;
  for (char c : nine_digits)
    if (!is_ascii_digit(c)) return false;
  int area = (nine_digits[0] - '0') * 100 + (nine_digits[1] - '0') * 10 + (nine_digits[2] - '0');
  int group = (nine_digits[3] - '0') * 10 + (nine_digits[4] - '0');
  bool serial_zero = nine_digits[5] == '0' && nine_digits[6] == '0' && nine_digits[7] == '0' &&
                     nine_digits[8] == '0';
  if (area == 0 || area == 666 || area >= 900) return false;
  if (group == 0) return false;
  if (serial_zero) return false;
  return true;
}

}  // namespace detail

}  // namespace x402guard
