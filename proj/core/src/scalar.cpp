// Copyright 2026 The carpetlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "carpetlab/scalar.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "carpetlab/errors.hpp"

namespace carpetlab {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw InvalidParameter("malformed rational '" + std::string(whole) + "'");
  }
  BigInt v(std::string(s), 10);
  return neg ? BigInt(-v) : v;
}

Scalar parse_decimal(std::string_view s, std::string_view whole) {
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    BigInt e = parse_integer(s.substr(epos + 1), whole);
    if (!e.fits_slong_p() || abs(e) > 4096) {
      throw InvalidParameter("exponent out of range in '" +
                             std::string(whole) + "'");
    }
    exp10 = e.get_si();
    s = s.substr(0, epos);
  }
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  auto dot = s.find('.');
  std::string digits;
  if (dot == std::string_view::npos) {
    digits = std::string(s);
  } else {
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) {
      throw InvalidParameter("malformed rational '" + std::string(whole) +
                             "'");
    }
    digits = std::string(ip) + std::string(fp);
    exp10 -= static_cast<long>(fp.size());
  }
  if (!all_digits(digits)) {
    throw InvalidParameter("malformed rational '" + std::string(whole) + "'");
  }
  Scalar v{BigInt(digits, 10)};
  v *= pow(Scalar(10), exp10);
  return neg ? Scalar(-v) : v;
}

std::string strip_zeros(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

Scalar make_scalar(long num, long den) {
  if (den == 0) throw InvalidParameter("zero denominator");
  Scalar q(num, den);
  q.canonicalize();
  return q;
}

Scalar parse_scalar(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) throw InvalidParameter("empty rational");
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) {
      throw InvalidParameter("zero denominator in '" + std::string(text) +
                             "'");
    }
    Scalar q(num, den);
    q.canonicalize();
    return q;
  }
  if (text.find_first_of(".eE") != std::string_view::npos) {
    return parse_decimal(text, text);
  }
  return Scalar(parse_integer(text, text));
}

std::string to_fraction_string(const Scalar& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_decimal_string(const Scalar& x, int digits) {
  if (digits < 1) throw InvalidParameter("need at least one digit");
  if (sgn(x) == 0) return "0";
  const bool neg = sgn(x) < 0;
  const Scalar a = abs(x);

  long e = static_cast<long>(std::floor(log2(a) * std::log10(2.0)));
  while (pow(Scalar(10), e) > a) --e;
  while (pow(Scalar(10), e + 1) <= a) ++e;

  Scalar scaled = a * pow(Scalar(10), digits - 1 - e);
  BigInt q = floor(scaled);
  Scalar rem = scaled - Scalar(q);
  const Scalar half(1, 2);
  if (rem > half || (rem == half && mpz_odd_p(q.get_mpz_t()))) ++q;
  BigInt limit = pow(BigInt(10), static_cast<unsigned long>(digits));
  if (q == limit) {
    q /= 10;
    ++e;
  }
  std::string ds = q.get_str();

  std::string out;
  if (e < -4 || e >= digits) {
    std::string mant = ds.substr(0, 1);
    if (ds.size() > 1) mant += "." + ds.substr(1);
    mant = strip_zeros(mant);
    std::string es = std::to_string(e < 0 ? -e : e);
    if (es.size() < 2) es = "0" + es;
    out = mant + (e < 0 ? "e-" : "e+") + es;
  } else if (e >= 0) {
    std::string ip = ds.substr(0, static_cast<std::size_t>(e) + 1);
    std::string fp = ds.substr(static_cast<std::size_t>(e) + 1);
    out = fp.empty() ? ip : strip_zeros(ip + "." + fp);
  } else {
    out = strip_zeros("0." + std::string(static_cast<std::size_t>(-e - 1), '0') +
                      ds);
  }
  return neg ? "-" + out : out;
}

double to_double(const Scalar& x) {
  if (sgn(x) == 0) return 0.0;
  double l = log2(abs(x));
  if (l > 1000 || l < -1000) {
    double v = std::exp2(l);
    return sgn(x) < 0 ? -v : v;
  }
  return x.get_d();
}

Scalar pow(const Scalar& x, long e) {
  if (e == 0) return Scalar(1);
  if (e < 0) {
    if (sgn(x) == 0) throw InvalidParameter("zero to a negative power");
    return pow(Scalar(1) / x, -e);
  }
  BigInt n, d;
  mpz_pow_ui(n.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(d.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(e));
  Scalar r(n, d);
  r.canonicalize();
  return r;
}

BigInt pow(const BigInt& x, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), e);
  return r;
}

BigInt floor(const Scalar& x) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

BigInt ceil(const Scalar& x) {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

bool is_integer(const Scalar& x) { return x.get_den() == 1; }

double log2(const Scalar& x) {
  if (sgn(x) <= 0) throw InvalidParameter("log2 of a non-positive value");
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
  return std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
}

long ceil_log2(const Scalar& x) {
  if (sgn(x) <= 0) throw InvalidParameter("ceil_log2 of a non-positive value");
  long k = 0;
  Scalar p(1);
  while (p < x) {
    p *= 2;
    ++k;
  }
  return k;
}

}  // namespace carpetlab
