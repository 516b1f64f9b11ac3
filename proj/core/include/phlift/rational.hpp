#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace phlift {

// Exact rational scalar. All symbolic coefficients in the library are Rat;
// doubles appear only in the numerics layer.
using Rat = mpq_class;

// Canonical text form: "p" for integers, "p/q" otherwise, q > 0.
std::string rat_to_string(const Rat& r);

// Accepts integers and "p/q". Returns nullopt on malformed input or q == 0.
std::optional<Rat> rat_from_string(const std::string& s);

inline double rat_to_double(const Rat& r) { return r.get_d(); }

inline int rat_sign(const Rat& r) { return sgn(r); }

}  // namespace phlift
