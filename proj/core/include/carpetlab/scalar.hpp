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

#ifndef CARPETLAB_SCALAR_HPP_
#define CARPETLAB_SCALAR_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace carpetlab {

// Exact rational; GMP keeps it canonical after every arithmetic operation.
using Scalar = mpq_class;
using BigInt = mpz_class;

Scalar make_scalar(long num, long den = 1);

// Accepts "p/q", "p", and finite decimals such as "-0.125" or "3e-2".
Scalar parse_scalar(std::string_view text);

// Canonical "p/q" form, or "p" for integers.
std::string to_fraction_string(const Scalar& x);

// Decimal with `digits` significant digits, round-half-even, printf-%g
// layout (trailing zeros stripped, exponent form outside [1e-5, 1e12)).
std::string to_decimal_string(const Scalar& x, int digits = 12);

double to_double(const Scalar& x);

// x^e for any integer e; x must be nonzero when e < 0.
Scalar pow(const Scalar& x, long e);
BigInt pow(const BigInt& x, unsigned long e);

BigInt floor(const Scalar& x);
BigInt ceil(const Scalar& x);
bool is_integer(const Scalar& x);

// log2 of a positive rational, accurate even when the value underflows
// double precision.
double log2(const Scalar& x);

// Smallest k >= 0 with 2^k >= x, for x > 0.
long ceil_log2(const Scalar& x);

}  // namespace carpetlab

#endif  // CARPETLAB_SCALAR_HPP_
