#pragma once
#include <gmpxx.h>

#include <string>

namespace planarpeel {

using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat out = 1;
  Rat b = base;
  while (e) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace planarpeel
